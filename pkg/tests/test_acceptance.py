"""End-to-end acceptance checks. Each test prints one PASS/FAIL line."""

from __future__ import annotations

import itertools
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import as_cells, checked_run, fresh_world, terrain_for, verdict
from settlegen.agents import default_roster, register_seed_road
from settlegen.analysis import slope_of
from settlegen.bench import run_matrix
from settlegen.blueprint import PlotKind, enclosed_interior, init_blueprint, run
from settlegen.cli import main
from settlegen.economy import differentiate, random_baseline, same_type_nn_fraction
from settlegen.geometry import convex_hull, cross, point_in_polygon, savgol_coeffs
from settlegen.narrative import (default_models, generate_name, generate_population, name_is_sound,
                                 name_streets, write_chronicle)
from settlegen.narrative.names import substring_rate
from settlegen.narrative.population import street_position
from settlegen.pathfind import astar
from settlegen.placement import place_all
from settlegen.placement.canvas import Canvas
from settlegen.placement.farms import FarmRegion, finalize_farm_borders, grow_region
from settlegen.placement.materials import WALL_BLOCK
from settlegen.placement.wall import plan_wall_heights
from settlegen.rng import SplitMix64, stream
from settlegen.world import VoxelWorld

WALL_SEEDS = range(1, 11)
CIVILIAN = (PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL)


# 1 -------------------------------------------------------------------------
def test_end_to_end_determinism(tmp_path):
    first = tmp_path / "first"
    t0 = time.perf_counter()
    assert main(["generate", "--seed", "4", "--area", "128x128", "--biome", "plains", "--steps", "30",
                 "--snapshot-every", "10", "--out", str(first)]) == 0
    elapsed = time.perf_counter() - t0
    manifest = first / "manifest.json"
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["generate", "--config", str(manifest), "--out", str(out)]) == 0
        runs.append(out)
    listed = json.loads(manifest.read_text())["outputs"]
    kinds = {"world.sfw", "chronicle.txt", "chronicle.jsonl", "events.tsv", "economy.tsv"}
    same = all((runs[0] / f).read_bytes() == (runs[1] / f).read_bytes() == (first / f).read_bytes()
               for f in listed)
    covered = kinds <= set(listed) and any(f.startswith("snapshots/") for f in listed)
    verdict("1 end-to-end determinism", same and covered and elapsed < 180,
            f"{len(listed)} files identical={same}, first run {elapsed:.1f}s")


# 2 -------------------------------------------------------------------------
def test_anytime_validity():
    _, _, terrain, features = terrain_for(1)
    bad = []
    for k in (0, 5, 15, 30, 60):
        bp = init_blueprint(terrain, 1)
        register_seed_road(bp)
        run(bp, default_roster(), k)
        bp.check_invariants()
        differentiate(bp)
        bp.check_invariants()
        world, area = fresh_world(1)
        report = place_all(bp, world, features, 1, area=area)
        if report.failures or report.total_blocks == 0:
            bad.append((k, report.failures[:2]))
    verdict("2 anytime validity at steps 0/5/15/30/60", not bad, str(bad))


# 3 -------------------------------------------------------------------------
def test_blueprint_coherence():
    errors, removals = [], []
    for seed in (1, 2, 3):
        r = checked_run(seed)
        errors += r.invariant_errors
        removals += [e for e in r.bp.event_log if e.action == "remove"
                     and e.agent not in {a.name for a in r.roster if a.critically_important}]
    verdict("3 blueprint coherence over 60 steps", not errors and not removals,
            f"invariant errors={errors[:2]}, non-critical removals={removals[:2]}")


# 4 -------------------------------------------------------------------------
def test_wall_enclosure():
    misses = []
    for seed in WALL_SEEDS:
        bp = checked_run(seed).bp
        if bp.wall is None:
            misses.append((seed, "no wall"))
            continue
        wall_step = bp.wall.placed_step
        poly = bp.wall.path
        for p in bp.plots.values():
            if p.created_step > wall_step:
                continue
            if not bp.walled_in_map[p.rect.slices()].all():
                misses.append((seed, p.id, "walled_in_map"))
            elif not all(point_in_polygon(c, poly) for c in p.rect.cells()):
                misses.append((seed, p.id, "polygon"))
    verdict(f"4 wall enclosure over {len(WALL_SEEDS)} seeds", not misses, str(misses[:5]))


# 5 -------------------------------------------------------------------------
def test_wall_walkability():
    worst, mismatches = 0, 0
    for seed in WALL_SEEDS:
        bp = checked_run(seed).bp
        t = bp.terrain
        ground = np.where(t.water, t.water_surface, t.height)
        tops = plan_wall_heights(bp.wall, ground)
        deltas = np.abs(np.diff(np.append(tops, tops[0])))
        worst = max(worst, int(deltas.max()))
    # the built wall carries those tops on its centre line
    bp = checked_run(1).bp.copy()
    differentiate(bp)
    world, area = fresh_world(1)
    report = place_all(bp, world, terrain_for(1)[3], 1, area=area)
    wall_id = world.index(WALL_BLOCK)
    for i, (x, z) in enumerate(bp.wall.path):
        if not bp.road_map[x, z] and world.blocks[x, report.wall_tops[i], z] != wall_id:
            mismatches += 1
    verdict("5 wall top walkability", worst <= 1 and mismatches == 0,
            f"max consecutive delta {worst}, centre-line mismatches {mismatches}")


# 6 -------------------------------------------------------------------------
def _reference_growth(region, heights, allowed, rounds):
    W, D = heights.shape
    cur = as_cells(region)
    for _ in range(rounds):
        new = set(cur)
        for x, z in cur:
            for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1)):
                if 0 <= nx < W and 0 <= nz < D and allowed[nx, nz] and heights[nx, nz] == heights[x, z]:
                    new.add((nx, nz))
        if new == cur:
            break
        cur = new
    return cur


def test_farm_contour_law():
    violations = 0
    farms = 0
    for seed in (1, 2, 3):
        bp = checked_run(seed).bp.copy()
        differentiate(bp)
        world, area = fresh_world(seed)
        report = place_all(bp, world, terrain_for(seed)[3], seed, area=area)
        for reg in report.farm_regions:
            farms += 1
            h = reg.heights
            for x, z in as_cells(reg.mask & ~reg.seed_mask):
                if not any(0 <= nx < h.shape[0] and 0 <= nz < h.shape[1] and reg.mask[nx, nz]
                           and h[nx, nz] == h[x, z]
                           for nx, nz in ((x + 1, z), (x - 1, z), (x, z + 1), (x, z - 1))):
                    violations += 1
    gen = np.random.default_rng(6)
    oracle_bad = 0
    for _ in range(200):
        W, D = gen.integers(3, 12, size=2)
        heights = gen.integers(0, 3, size=(W, D))
        allowed = gen.random((W, D)) < 0.8
        region = gen.random((W, D)) < 0.1
        rounds = int(gen.integers(1, 6))
        got = as_cells(grow_region(region, heights, allowed, rounds))
        oracle_bad += got != _reference_growth(region, heights, allowed, rounds)
    verdict("6 farm contour law", farms > 0 and violations == 0 and oracle_bad == 0,
            f"{farms} farms, {violations} contour violations, {oracle_bad}/200 oracle mismatches")


# 7 -------------------------------------------------------------------------
def test_touching_farms_share_one_fence():
    size, ground = 24, 5
    world = VoxelWorld.empty((size, 16, size))
    world.blocks[:, :ground + 1, :] = world.index("grass_block")
    heights = np.full((size, size), ground)
    a = np.zeros((size, size), bool)
    b = np.zeros((size, size), bool)
    a[5:12, 6:15] = True
    b[12:18, 8:17] = True          # shares the x=11|12 edge with a
    regions = [FarmRegion(1, "wheat", a, heights, a.copy()), FarmRegion(2, "carrots", b, heights, b.copy())]
    canvas = Canvas(world, world_area(world))
    _, rings = finalize_farm_borders(canvas, regions, heights, np.zeros((size, size), bool))
    union = a | b
    fence = world.index("oak_fence")
    fenced = as_cells(world.blocks[:, ground + 1, :] == fence)
    ring = rings[0] if rings else np.zeros_like(union)
    ok = (len(rings) == 1 and not (ring & union).any() and not (fenced & as_cells(union))
          and fenced == as_cells(ring) and enclosed_interior(ring)[union].all())
    verdict("7 touching farms share one fence loop", ok,
            f"{len(rings)} ring(s), internal fence cells {len(fenced & as_cells(union))}")


def world_area(world):
    from settlegen.world import BuildArea
    return BuildArea(0, 0, world.dims[0], world.dims[2])


# 8 -------------------------------------------------------------------------
def test_differentiation_properties():
    eligible, leftovers, econ_bad, missing_types = 0, 0, 0, []
    actual, baseline = [], []
    for seed in itertools.count(1):
        if eligible >= 20 or seed > 120:
            break
        bp = checked_run(seed).bp.copy()
        if len(bp.plots_of(PlotKind.CIVILIAN_GENERIC)) < 30:
            continue
        eligible += 1
        trace = []
        differentiate(bp, trace=trace)
        leftovers += len(bp.plots_of(PlotKind.CIVILIAN_GENERIC))
        econ_bad += sum(not (0 <= r.employed <= r.workers and r.goods >= 0 and r.income >= 0)
                        for r in trace)
        civ = [p for p in bp.plots.values() if p.kind in CIVILIAN]
        kinds = {p.kind for p in civ}
        if kinds != set(CIVILIAN):
            missing_types.append(seed)
        frac = same_type_nn_fraction(civ, PlotKind.COMMERCIAL)
        base = random_baseline(civ, PlotKind.COMMERCIAL, stream(seed, "baseline"))
        if frac is not None and base is not None:
            actual.append(frac)
            baseline.append(base)
    clustered = bool(actual) and np.mean(actual) > np.mean(baseline)
    verdict("8 differentiation properties",
            eligible >= 20 and leftovers == 0 and econ_bad == 0 and not missing_types and clustered,
            f"{eligible} seeds, leftovers={leftovers}, economy violations={econ_bad}, "
            f"missing types on {missing_types}, commercial NN same-type "
            f"{np.mean(actual):.3f} vs baseline {np.mean(baseline):.3f}")


# 9 -------------------------------------------------------------------------
def test_road_network():
    disconnected, unreachable = [], []
    for seed in range(1, 11):
        r = checked_run(seed)
        disconnected += [(seed, s) for s in r.disconnected_steps]
        bp = r.bp
        cost = np.where(bp.road_map, 1.0, math.inf)
        goal = bp.roads.segments[0].cells[len(bp.roads.segments[0].cells) // 2]
        for p in bp.plots.values():
            if p.road_access is not None and astar(cost, p.road_access, goal) is None:
                unreachable.append((seed, p.id))
    verdict("9 road network connectivity", not disconnected and not unreachable,
            f"disconnected steps {disconnected[:3]}, unreachable plots {unreachable[:3]}")


# 10 ------------------------------------------------------------------------
def test_name_generation():
    models = default_models()
    unsound, rows_bad = 0, 0
    for model in (models.given_male, models.given_female, models.surname, models.place):
        rng = SplitMix64(10)
        unsound += sum(not name_is_sound(model, generate_name(model, rng)) for _ in range(300))
        for n, table in model.tables.items():
            rows_bad += sum(abs(sum(row.values()) - 1.0) > 1e-9 for row in table.values())
    corpus = models.surname.corpus
    rates = {}
    for order in (2, 5):
        m = models.surname.with_switch({order: 1.0})
        rng = SplitMix64(100 + order)
        rates[order] = substring_rate([generate_name(m, rng) for _ in range(1000)], corpus)
    verdict("10 name generation", unsound == 0 and rows_bad == 0 and rates[5] > rates[2],
            f"unsound={unsound}, bad rows={rows_bad}, substring rate order5={rates[5]:.3f} "
            f"order2={rates[2]:.3f}")


# 11 ------------------------------------------------------------------------
def test_chronicle_order_and_addresses():
    models = default_models()
    unsorted, broken = [], []
    for seed in range(1, 11):
        bp = checked_run(seed).bp.copy()
        differentiate(bp)
        rng = stream(seed, "narrative")
        streets = name_streets(bp, models, rng)
        people = generate_population(bp, models, rng, streets)
        chron = write_chronicle(bp, people, models, rng, streets)
        steps = [e.created_step for e in chron.entries]
        if steps != sorted(steps) or any(bp.plots[e.plot_id].created_step != e.created_step
                                         for e in chron.entries):
            unsorted.append(seed)
        addresses = [(p.address.plot_id, p.address.street) for p in people]
        addresses += [(e.plot_id, e.street) for e in chron.entries if e.address is not None]
        for pid, street in addresses:
            plot = bp.plots.get(pid)
            pos = street_position(bp, plot) if plot else None
            if plot is None or plot.kind != PlotKind.RESIDENTIAL or pos is None \
                    or streets.get(pos[0]) != street:
                broken.append((seed, pid))
    verdict("11 chronicle order and address integrity", not unsorted and not broken,
            f"unsorted seeds {unsorted}, broken addresses {broken[:3]}")


# 12 ------------------------------------------------------------------------
@pytest.mark.slow
def test_runtime_shape():
    t0 = time.perf_counter()
    plains = run_matrix([128, 256], [30, 60], ["plains"], 5, 1)
    jungle = run_matrix([128], [30], ["jungle"], 5, 1)
    wall = time.perf_counter() - t0
    failed = [r for r in plains.runs + jungle.runs if r.failed]
    area_ok = all(plains.mean("total", area=256, steps=s) > plains.mean("total", area=128, steps=s)
                  for s in (30, 60))
    place_ok = all(plains.mean("placement", area=a, steps=60) < 2 * plains.mean("placement", area=a, steps=30)
                   for a in (128, 256))
    tj = jungle.mean("tree_removal")
    tp = plains.mean("tree_removal", area=128, steps=30)
    decomposed = all(abs(r.total - (r.analysis + r.blueprint + r.tree_removal + r.placement)) < 1e-3
                     for r in plains.runs)
    verdict("12 runtime shape", not failed and area_ok and place_ok and tj > tp and decomposed
            and wall < 1800,
            f"mean total 128/30={plains.mean('total', area=128, steps=30):.2f}s "
            f"256/30={plains.mean('total', area=256, steps=30):.2f}s, "
            f"tree removal jungle={tj:.3f}s plains={tp:.3f}s, bench {wall:.0f}s")


# 13 ------------------------------------------------------------------------
def _brute_slope(h):
    W, D = h.shape
    out = np.zeros((W, D))
    for x in range(W):
        for z in range(D):
            best = 0
            for dx in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    if (dx or dz) and 0 <= x + dx < W and 0 <= z + dz < D:
                        best = max(best, abs(int(h[x + dx, z + dz]) - int(h[x, z])))
            out[x, z] = best
    return out


def _brute_hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    nxt = {}
    for a, b in itertools.permutations(pts, 2):
        if all(cross(a, b, p) > 0 or (cross(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                                       and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])) for p in pts):
            nxt[a] = b
    if not nxt:                     # all collinear: the two extremes
        return [pts[0], pts[-1]]
    start = min(nxt)
    hull = [start]
    while nxt[hull[-1]] != start:
        hull.append(nxt[hull[-1]])
    return hull


def _exact_sg(window, order):
    half = window // 2
    ts = range(-half, half + 1)
    # normal equations A^T A c = e0, weights = A c
    m = order + 1
    ata = [[Fraction(sum(t ** (i + j) for t in ts)) for j in range(m)] for i in range(m)]
    rhs = [Fraction(int(i == 0)) for i in range(m)]
    for col in range(m):
        piv = next(r for r in range(col, m) if ata[r][col] != 0)
        ata[col], ata[piv] = ata[piv], ata[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for r in range(m):
            if r != col and ata[r][col] != 0:
                f = ata[r][col] / ata[col][col]
                ata[r] = [x - f * y for x, y in zip(ata[r], ata[col])]
                rhs[r] -= f * rhs[col]
    c = [rhs[i] / ata[i][i] for i in range(m)]
    return [float(sum(c[k] * t ** k for k in range(m))) for t in ts]


def test_geometry_oracles():
    gen = np.random.default_rng(13)
    slope_bad = 0
    for _ in range(120):
        h = gen.integers(0, 20, size=tuple(gen.integers(1, 9, size=2)))
        slope_bad += not np.array_equal(slope_of(h), _brute_slope(h))
    hull_bad = 0
    for _ in range(150):
        n = int(gen.integers(1, 14))
        pts = [tuple(int(v) for v in p) for p in gen.integers(0, 7, size=(n, 2))]
        hull_bad += convex_hull(pts) != _brute_hull(pts)
    sg_cases = [(w, o) for w in range(3, 26, 2) for o in range(0, min(w, 7))]
    sg_bad = 0
    for w, o in sg_cases:
        got, ref = savgol_coeffs(w, o), np.array(_exact_sg(w, o))
        sg_bad += np.abs(got - ref).max() > 1e-9 * np.abs(ref).max()
    verdict("13 slope/hull/filter oracles", slope_bad == 0 and hull_bad == 0 and sg_bad == 0
            and len(sg_cases) >= 60,
            f"slope 120 cases bad={slope_bad}, hull 150 cases bad={hull_bad}, "
            f"SG {len(sg_cases)} cases bad={sg_bad}")
