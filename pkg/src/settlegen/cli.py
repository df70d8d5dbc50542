"""Command line: ``settlegen {generate,analyze,bench,snapshot}``.

Exit codes: 0 success, 2 configuration error, 3 no buildable land,
4 input/output failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import NoBuildableLandError, analyze, dump_maps
from .config import OUT_ENV, ConfigError, build_config, parse_area, read_config_file
from .world import Biome, BoundsError, WorldFormatError

log = logging.getLogger("settlegen")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_LAND = 3
EXIT_IO = 4


def _area(text: str):
    try:
        return parse_area(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _run_flags(p: argparse.ArgumentParser, *, with_steps: bool = True) -> None:
    p.add_argument("--config", help="JSON config file or a run manifest")
    p.add_argument("--seed", type=int)
    p.add_argument("--area", type=_area, metavar="WxD")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--biome", help=f"synthesize terrain: {', '.join(b.name.lower() for b in Biome)}")
    src.add_argument("--world", help="load a world file instead of synthesizing one")
    p.add_argument("--world-height", type=int, dest="world_height")
    if with_steps:
        p.add_argument("--steps", type=int)
        p.add_argument("--roster", help="agent roster JSON")
        p.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV}/seed<N>)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="settlegen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    _run_flags(sub.add_parser("generate", help="run every phase and write all outputs"))
    _run_flags(sub.add_parser("analyze", help="dump the terrain feature maps"), with_steps=False)

    b = sub.add_parser("bench", help="time the phases over a parameter grid")
    b.add_argument("--areas", type=int, nargs="+", default=[128, 256])
    b.add_argument("--steps", type=int, nargs="+", default=[30, 60])
    b.add_argument("--biomes", nargs="+", default=["plains"])
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seed-base", type=int, default=1, dest="seed_base")
    b.add_argument("--world-height", type=int, default=96, dest="world_height")
    b.add_argument("--out", help="output directory for bench.csv and summary.txt")

    s = sub.add_parser("snapshot", help="replay a recorded run and render blueprint snapshots")
    s.add_argument("run", help="run directory or its manifest.json")
    s.add_argument("--snapshot-every", type=int, default=1, dest="snapshot_every")
    s.add_argument("--out", help="image directory (default: <run>/replay)")
    return parser


def _config(args):
    file_values = read_config_file(args.config) if args.config else {}
    keys = ("seed", "area", "biome", "world", "world_height", "steps", "roster", "snapshot_every", "out")
    return build_config(file_values, {k: getattr(args, k, None) for k in keys})


def cmd_generate(args) -> int:
    from .pipeline import generate, write_outputs
    config = _config(args)
    result = generate(config)
    out = write_outputs(result, config.out_dir())
    bp = result.blueprint
    print(f"{len(bp.plots)} plots, {len(bp.roads.segments)} roads, wall "
          f"{'placed at step %d' % bp.wall.placed_step if bp.wall else 'not placed'}; "
          f"outputs in {out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    from .pipeline import load_world
    config = _config(args)
    world, area = load_world(config)
    maps, features = analyze(world, area)
    out = config.out_dir()
    dump_maps(maps, out)
    record = {"wood_types": sorted(features.wood_types),
              "dominant_biome": features.dominant_biome.name.lower(),
              "area": [area.x, area.z, area.width, area.depth]}
    (out / "features.json").write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    print(f"feature maps written to {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import format_summary, report_to_csv, run_matrix
    for b in args.biomes:
        try:
            Biome.parse(b)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if args.repeats < 1 or min(args.areas) < 16 or min(args.steps) < 0:
        raise ConfigError("need repeats >= 1, areas >= 16 and steps >= 0")
    out = Path(args.out) if args.out else build_config().out_dir().parent / "bench"
    out.mkdir(parents=True, exist_ok=True)

    def progress(t):
        status = t.failed or f"{t.total:.2f}s"
        log.info("%dx%d steps=%d %s seed=%d: %s", t.area, t.area, t.steps, t.biome, t.seed, status)

    report = run_matrix(args.areas, args.steps, args.biomes, args.repeats, args.seed_base,
                        world_height=args.world_height, progress=progress)
    report_to_csv(report, out / "bench.csv")
    summary = format_summary(report)
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    print(summary, end="")
    return EXIT_OK


def cmd_snapshot(args) -> int:
    from .pipeline import replay_snapshots
    run_dir = Path(args.run)
    manifest = run_dir if run_dir.suffix == ".json" else run_dir / "manifest.json"
    config = build_config(read_config_file(manifest))
    if args.snapshot_every < 1:
        raise ConfigError("--snapshot-every must be >= 1")
    out = Path(args.out) if args.out else manifest.parent / "replay"
    events = manifest.parent / "events.tsv"
    paths = replay_snapshots(config, out, args.snapshot_every,
                             events_path=events if events.exists() else None)
    print(f"{len(paths)} snapshots written to {out}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "bench": cmd_bench,
            "snapshot": cmd_snapshot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, BoundsError) as exc:
        print(f"settlegen: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoBuildableLandError as exc:
        print(f"settlegen: no buildable land: {exc}", file=sys.stderr)
        return EXIT_NO_LAND
    except (OSError, WorldFormatError) as exc:
        print(f"settlegen: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"settlegen: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
