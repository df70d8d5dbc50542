import csv
import json

import pytest

from settlegen.bench import BenchReport, PhaseTiming, report_to_csv, run_matrix
from settlegen.cli import EXIT_CONFIG, EXIT_IO, EXIT_NO_LAND, main
from settlegen.config import ConfigError, build_config, parse_area


def test_precedence_cli_over_file_over_defaults():
    cfg = build_config({"seed": 5, "steps": 12}, {"steps": 3, "seed": None})
    assert (cfg.seed, cfg.steps, cfg.snapshot_every) == (5, 3, 10)
    cfg = build_config({"biome": "jungle"}, {"world": "w.sfw"})
    assert cfg.biome is None and cfg.world == "w.sfw"
    with pytest.raises(ConfigError):
        build_config({"colour": "red"})
    with pytest.raises(ConfigError):
        build_config({"steps": -1})
    with pytest.raises(ConfigError):
        build_config({"economy": {"workers_per_house": 2, "magic": 1}})
    assert parse_area("64") == (64, 64) and parse_area("32x48") == (32, 48)


def test_config_digest_ignores_output_dir():
    a = build_config({}, {"out": "a"})
    b = build_config({}, {"out": "b"})
    assert a.digest() == b.digest() != build_config({}, {"seed": 2}).digest()


def test_generate_zero_steps(tmp_path):
    out = tmp_path / "run"
    assert main(["generate", "--area", "64x64", "--steps", "0", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["steps_run"] == 0
    assert (out / "world.sfw").exists() and (out / "snapshots" / "step_0000.ppm").exists()
    assert (out / "chronicle.txt").exists()
    events = (out / "events.tsv").read_text().splitlines()
    assert len(events) == 1 and events[0].split("\t")[2] == "road"


def test_env_var_sets_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("SETTLEGEN_OUT", str(tmp_path / "root"))
    assert main(["analyze", "--area", "32", "--seed", "3"]) == 0
    assert (tmp_path / "root" / "seed3" / "height.pgm").exists()


def test_snapshot_replay(tmp_path):
    out = tmp_path / "run"
    assert main(["generate", "--area", "64", "--steps", "8", "--out", str(out)]) == 0
    assert main(["snapshot", str(out), "--snapshot-every", "4"]) == 0
    replay = sorted(p.name for p in (out / "replay").iterdir())
    assert replay == ["step_0000.ppm", "step_0004.ppm", "step_0008.ppm"]
    assert (out / "replay" / "step_0008.ppm").read_bytes() == \
        (out / "snapshots" / "step_0008.ppm").read_bytes()


def test_exit_codes(tmp_path):
    assert main(["analyze", "--world", str(tmp_path / "missing.sfw"), "--out", str(tmp_path)]) == EXIT_IO
    assert main(["generate", "--biome", "mars", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["bench", "--biomes", "mars", "--out", str(tmp_path)]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["generate", "--config", str(bad)]) == EXIT_CONFIG


def test_no_buildable_land_exit_code(tmp_path):
    from settlegen.world import VoxelWorld, export_world
    w = VoxelWorld.empty((32, 24, 32))
    w.blocks[:, :4, :] = w.index("stone")
    w.blocks[:, 4, :] = w.index("water")
    export_world(w, tmp_path / "sea.sfw")
    code = main(["generate", "--world", str(tmp_path / "sea.sfw"), "--steps", "2",
                 "--out", str(tmp_path / "o")])
    assert code == EXIT_NO_LAND


def test_bench_cli_writes_two_rows(tmp_path):
    assert main(["bench", "--areas", "64", "--steps", "10", "--biomes", "plains", "--repeats", "2",
                 "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "bench.csv")))
    assert rows[0] == ["area", "steps", "biome", "seed", "analysis", "blueprint", "tree_removal",
                       "placement", "total", "outlier_flag"]
    assert len(rows) == 3


def test_csv_export_shapes(tmp_path):
    empty = report_to_csv(BenchReport(), tmp_path / "e.csv")
    assert len(empty.read_text().splitlines()) == 1
    rep = BenchReport([PhaseTiming(64, 10, "plains", 1, 0.1, 0.2, 0.3, 0.4)])
    a = report_to_csv(rep, tmp_path / "a.csv").read_bytes()
    assert len(a.splitlines()) == 2
    assert report_to_csv(rep, tmp_path / "b.csv").read_bytes() == a
    assert rep.runs[0].total == pytest.approx(1.0)


def test_outlier_flag_and_exclusive_mean():
    runs = [PhaseTiming(64, 10, "plains", s, 0, 1.0 + 0.01 * s, 0, 0) for s in range(5)]
    runs.append(PhaseTiming(64, 10, "plains", 9, 0, 50.0, 0, 0))
    rep = BenchReport(runs)
    rep.flag_outliers()
    assert [r.seed for r in rep.runs if r.outlier] == [9]
    agg = rep.aggregates()[(64, 10, "plains")]
    assert agg.mean_total_excl < 2 < agg.mean["total"]


def test_failed_runs_are_excluded():
    rep = run_matrix([64], [2], ["plains"], 1, 1)
    rep.runs.append(PhaseTiming(64, 2, "plains", 99, failed="boom"))
    assert rep.aggregates()[(64, 2, "plains")].n == 1
