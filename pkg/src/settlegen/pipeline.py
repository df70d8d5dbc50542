"""One end-to-end run: terrain, blueprint, differentiation, placement, narrative.

Every phase draws randomness from its own named sub-stream of the run seed,
so changing one phase never shifts the random draws of another.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .agents import default_roster, load_roster, register_seed_road
from .analysis import QualitativeFeatures, TerrainMaps, analyze
from .blueprint import Blueprint, init_blueprint, render, run, write_ppm
from .config import RunConfig
from .economy import differentiate, write_trace
from .narrative import (default_models, export_chronicle, generate_population, name_streets,
                        train, write_captains_log, write_chronicle)
from .narrative.names import load_corpus
from .narrative.population import NameModels
from .placement import PlacementReport, place_all
from .rng import derive_seed, stream
from .world import BuildArea, VoxelWorld, export_world, import_world, synthesize_terrain

log = logging.getLogger(__name__)

PHASES = ("analysis", "blueprint", "tree_removal", "placement")
MANIFEST_VERSION = 1


@dataclass
class RunResult:
    config: RunConfig
    world: VoxelWorld
    area: BuildArea
    terrain: TerrainMaps
    features: QualitativeFeatures
    blueprint: Blueprint
    placement: PlacementReport
    snapshots: dict = field(default_factory=dict)     # step -> RGB image
    trace: list = field(default_factory=list)
    chronicle: object = None
    captains_log: str | None = None
    population: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def total_time(self) -> float:
        return sum(self.timings[p] for p in PHASES)


def load_world(config: RunConfig) -> tuple[VoxelWorld, BuildArea]:
    if config.world is not None:
        world = import_world(config.world)
        sx, _, sz = world.dims
        w, d = config.area or (sx, sz)
        return world, BuildArea.centered(world, w, d)
    w, d = config.area_size
    world = synthesize_terrain(derive_seed(config.seed, "terrain"), (w, config.world_height, d),
                               config.biome, config.roughness)
    return world, BuildArea(0, 0, w, d)


def roster_for(config: RunConfig):
    return load_roster(config.roster) if config.roster else default_roster()


def plan(terrain: TerrainMaps, config: RunConfig, *, snapshot_every: int | None = None,
         on_snapshot=None) -> Blueprint:
    """Blueprint phase; ``on_snapshot(step, bp)`` fires at 0, every interval, and at the end."""
    every = config.snapshot_every if snapshot_every is None else snapshot_every
    bp = init_blueprint(terrain, config.seed)
    register_seed_road(bp)
    roster = roster_for(config)

    def hook(b, _report):
        if on_snapshot and every and b.step % every == 0:
            on_snapshot(b.step, b)

    if on_snapshot and every:
        on_snapshot(0, bp)
    run(bp, roster, config.steps, on_step=hook)
    if on_snapshot and every and config.steps % every:
        on_snapshot(bp.step, bp)
    return bp


def name_models(config: RunConfig) -> NameModels:
    corpus_dir = config.narrative.get("corpus_dir")
    switch = config.narrative.get("order_switch")
    if corpus_dir is None:
        models = default_models()
    else:
        d = Path(corpus_dir)
        models = NameModels(*(train(load_corpus(d / f"{n}.txt"))
                              for n in ("given_male", "given_female", "surnames", "places")))
    if switch:
        switch = {int(k): float(v) for k, v in switch.items()}
        models = NameModels(*(m.with_switch(switch) for m in
                              (models.given_male, models.given_female, models.surname, models.place)))
    return models


def generate(config: RunConfig) -> RunResult:
    """Run every phase in memory; nothing is written to disk."""
    timings = {}
    world, area = load_world(config)

    tick = time.perf_counter()
    terrain, features = analyze(world, area)
    timings["analysis"] = time.perf_counter() - tick

    snapshots: dict[int, np.ndarray] = {}
    tick = time.perf_counter()
    bp = plan(terrain, config, on_snapshot=lambda s, b: snapshots.__setitem__(s, render(b)))
    trace: list = []
    differentiate(bp, config.make_economy(), trace=trace)
    timings["blueprint"] = time.perf_counter() - tick

    report = place_all(bp, world, features, derive_seed(config.seed, "placement"), area=area,
                       clear_trees=config.placement.get("clear_trees", True))
    timings["tree_removal"] = report.timings["tree_removal"]
    timings["placement"] = report.timings["placement"]

    rng = stream(config.seed, "narrative")
    models = name_models(config)
    streets = name_streets(bp, models, rng)
    population = generate_population(bp, models, rng, streets)
    nar = config.narrative
    founding = nar.get("founding_year", 1432)
    chronicle = write_chronicle(bp, population, models, rng, streets, founding_year=founding,
                                city_name=nar.get("city_name"), max_entries=nar.get("max_entries"))
    captains_log = write_captains_log(bp, models, rng, city_name=chronicle.city_name,
                                      founding_year=founding)
    return RunResult(config, world, area, terrain, features, bp, report, snapshots, trace, chronicle,
                     captains_log, population, timings)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_outputs(result: RunResult, out_dir) -> Path:
    """Write every artifact plus ``manifest.json`` listing their hashes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    export_world(result.world, out / "world.sfw")
    written.append(out / "world.sfw")
    for s, img in sorted(result.snapshots.items()):
        written.append(write_ppm(out / "snapshots" / f"step_{s:04d}.ppm", img))
    written += list(export_chronicle(result.chronicle, out))
    if result.captains_log is not None:
        (out / "captains_log.txt").write_text(result.captains_log, encoding="utf-8")
        written.append(out / "captains_log.txt")
    result.blueprint.write_event_log(out / "events.tsv")
    written.append(out / "events.tsv")
    written.append(write_trace(result.trace, out / "economy.tsv"))
    # wall-clock numbers vary between runs, so they stay out of the manifest
    (out / "timings.json").write_text(json.dumps(result.timings, indent=2) + "\n", encoding="utf-8")
    manifest = {
        "version": MANIFEST_VERSION,
        "settlegen": __version__,
        "seed": result.config.seed,
        "config_hash": result.config.digest(),
        "config": result.config.to_dict(),
        "steps_run": result.blueprint.step,
        "outputs": {p.relative_to(out).as_posix(): _sha256(p) for p in written},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    return out


def replay_snapshots(config: RunConfig, out_dir, every: int, *, events_path=None) -> list[Path]:
    """Re-run the blueprint phase of a recorded run and render snapshots.

    When ``events_path`` is given, the replayed planning events must be a
    prefix of it (the recorded log goes on with the economy conversions).
    """
    world, area = load_world(config)
    terrain, _ = analyze(world, area)
    out = Path(out_dir)
    paths = []
    bp = plan(terrain, config, snapshot_every=every,
              on_snapshot=lambda s, b: paths.append(b.snapshot(out / f"step_{s:04d}.ppm")))
    if events_path is not None:
        recorded = Path(events_path).read_text(encoding="utf-8")
        replayed = "".join(e.to_line() + "\n" for e in bp.event_log)
        if not recorded.startswith(replayed):
            raise ValueError(f"replayed event log differs from {events_path}")
    return paths
