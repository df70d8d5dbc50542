import numpy as np
import pytest

from conftest import terrain_for
from settlegen.agents import (AgentSpec, default_roster, load_roster, loop_erase, register_seed_road,
                              save_roster)
from settlegen.blueprint import (BlueprintError, BulldozePermissionError, ConstraintSet, PlotKind,
                                 find_candidates, init_blueprint, load_event_log, ordered_agents,
                                 read_ppm, run, step)
from settlegen.geometry import Rect


@pytest.fixture
def bp():
    _, _, terrain, _ = terrain_for(2, 64)
    b = init_blueprint(terrain, 2)
    register_seed_road(b)
    return b


def test_seed_road_is_straight_and_connected(bp):
    road = bp.roads.segments[0]
    assert len(road.cells) == 9
    xs = {c[0] for c in road.cells}
    zs = {c[1] for c in road.cells}
    assert len(xs) == 1 or len(zs) == 1
    bp.check_invariants()


def test_overlapping_plot_rejected(bp):
    c = find_candidates(bp, ConstraintSet((3, 3)))
    rect = c[0]
    bp.add_plot(PlotKind.CIVILIAN_GENERIC, rect, "t")
    with pytest.raises(BlueprintError):
        bp.add_plot(PlotKind.CIVILIAN_GENERIC, rect, "t")


def test_only_critical_agents_bulldoze(bp):
    rect = find_candidates(bp, ConstraintSet((3, 3)))[0]
    plot = bp.add_plot(PlotKind.CIVILIAN_GENERIC, rect, "t")
    with pytest.raises(BulldozePermissionError):
        bp.bulldoze(rect, AgentSpec("x", kind="tree"))
    church = AgentSpec("church", "church", kind="church", critically_important=True)
    assert bp.bulldoze(rect, church) == [plot.id]
    assert bp.event_log[-1].action == "remove"
    bp.check_invariants()


def test_candidates_respect_constraints(bp):
    c = find_candidates(bp, ConstraintSet((4, 4), max_slope=1))
    assert len(c) > 0
    for rect in list(c)[:50]:
        assert bp.rect_is_free(rect)
        assert bp.terrain.slope[rect.slices()].max() <= 1


def test_step_runs_every_active_agent_once(bp):
    roster = default_roster()
    report = step(bp, roster)
    names = [o.agent for o in report.outcomes]
    assert len(names) == len(set(names))
    assert bp.step == 1
    assert ordered_agents(roster, bp.extra_agents)[0].is_road_agent


def test_run_is_deterministic_and_logs(tmp_path):
    _, _, terrain, _ = terrain_for(3, 64)
    logs = []
    for _ in range(2):
        b = init_blueprint(terrain, 3)
        register_seed_road(b)
        run(b, default_roster(), 25)
        b.write_event_log(tmp_path / "e.tsv")
        logs.append((tmp_path / "e.tsv").read_text())
        b.check_invariants()
    assert logs[0] == logs[1]
    events = load_event_log(tmp_path / "e.tsv")
    assert events[0].agent == "seed"
    b.snapshot(tmp_path / "s.ppm")
    assert read_ppm(tmp_path / "s.ppm").shape == (64, 64, 3)


def test_negative_steps_rejected(bp):
    with pytest.raises(ValueError):
        run(bp, [], -1)


def test_roster_json_round_trip(tmp_path):
    roster = default_roster()
    save_roster(roster, tmp_path / "r.json")
    assert load_roster(tmp_path / "r.json") == roster
    assert roster[-1].behavior == "wall"


def test_agent_spec_validation():
    with pytest.raises(ValueError):
        AgentSpec("x", kind="tree", inside_wall_only=True, outside_wall_only=True)
    with pytest.raises(ValueError):
        AgentSpec("x", behavior="teleport")
    with pytest.raises(ValueError):
        AgentSpec("x", kind="castle")


def test_loop_erase_removes_cycles():
    walk = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (0, -1)]
    assert loop_erase(walk) == [(0, 0), (0, -1)]
    assert loop_erase([(0, 0), (1, 0), (2, 0)]) == [(0, 0), (1, 0), (2, 0)]


def test_inside_and_outside_wall_agents():
    from conftest import checked_run
    bp = checked_run(1).bp
    assert bp.wall is not None
    for p in bp.plots.values():
        if p.kind == PlotKind.FARM:
            assert not bp.walled_in_map[p.rect.slices()].any()
    assert bp.plots_of(PlotKind.CHURCH)
