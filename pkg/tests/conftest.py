from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pytest

from settlegen.agents import default_roster, register_seed_road
from settlegen.analysis import analyze
from settlegen.blueprint import InvariantError, init_blueprint, removal_violations, run
from settlegen.config import RunConfig
from settlegen.pathfind import is_4connected
from settlegen.pipeline import load_world
from settlegen.world import BuildArea, VoxelWorld


VERDICTS: list[str] = []


def verdict(label: str, ok: bool, detail: str = "") -> None:
    """Print the one-line acceptance verdict, then assert."""
    line = f"{'PASS' if ok else 'FAIL'} {label}" + (f" ({detail})" if detail else "")
    print(line)
    VERDICTS.append(line)
    assert ok, f"{label}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@lru_cache(maxsize=None)
def terrain_for(seed: int, size: int = 128, biome: str = "plains"):
    cfg = RunConfig(seed=seed, area=(size, size), biome=biome)
    world, area = load_world(cfg)
    terrain, features = analyze(world, area)
    return world, area, terrain, features


@dataclass
class CheckedRun:
    bp: object
    roster: list
    invariant_errors: list = field(default_factory=list)
    disconnected_steps: list = field(default_factory=list)


@lru_cache(maxsize=None)
def _checked(seed: int, size: int, steps: int, biome: str) -> CheckedRun:
    _, _, terrain, _ = terrain_for(seed, size, biome)
    bp = init_blueprint(terrain, seed)
    register_seed_road(bp)
    roster = default_roster()
    out = CheckedRun(bp, roster)

    def hook(b, _report):
        try:
            b.check_invariants()
        except InvariantError as exc:
            out.invariant_errors.append((b.step, str(exc)))
        if not is_4connected(b.road_map):
            out.disconnected_steps.append(b.step)

    run(bp, roster, steps, on_step=hook)
    return out


def checked_run(seed: int, size: int = 128, steps: int = 60, biome: str = "plains") -> CheckedRun:
    """A planned blueprint whose invariants were audited after every step (cached; copy before mutating)."""
    return _checked(seed, size, steps, biome)


def fresh_world(seed: int, size: int = 128, biome: str = "plains") -> tuple[VoxelWorld, BuildArea]:
    world, area, _, _ = terrain_for(seed, size, biome)
    return world.copy(), area


@pytest.fixture
def flat_world():
    w = VoxelWorld.empty((32, 32, 32))
    w.blocks[:, :5, :] = w.index("stone")
    w.blocks[:, 5, :] = w.index("grass_block")
    return w


@pytest.fixture
def rng():
    from settlegen.rng import SplitMix64
    return SplitMix64(12345)


def removal_ok(run_: CheckedRun) -> bool:
    return not removal_violations(run_.bp, run_.roster)


def as_cells(mask: np.ndarray) -> set:
    return {tuple(c) for c in np.argwhere(mask).tolist()}
