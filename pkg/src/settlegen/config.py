"""Run configuration: defaults, JSON config files and command-line overrides.

A config file is a JSON object with the same keys as :class:`RunConfig`
(``economy``, ``placement`` and ``narrative`` are nested objects). A run
manifest is also accepted; its ``config`` member is used. Precedence is
command line over file over defaults.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .economy import Economy
from .world import Biome

OUT_ENV = "SETTLEGEN_OUT"
DEFAULT_OUT = "settlegen-out"
DEFAULT_AREA = (128, 128)
DEFAULT_WORLD_HEIGHT = 96
ECONOMY_KEYS = frozenset(f.name for f in dataclasses.fields(Economy)) - {"workers", "employed",
                                                                         "goods", "income"}
PLACEMENT_KEYS = frozenset({"clear_trees"})
NARRATIVE_KEYS = frozenset({"corpus_dir", "founding_year", "max_entries", "order_switch",
                            "city_name"})


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 1
    area: tuple[int, int] | None = None
    biome: str | None = "plains"
    world: str | None = None
    world_height: int = DEFAULT_WORLD_HEIGHT
    roughness: float = 0.2
    steps: int = 60
    roster: str | None = None
    snapshot_every: int = 10
    out: str | None = None
    economy: dict = field(default_factory=dict)
    placement: dict = field(default_factory=dict)
    narrative: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.area is not None:
            self.area = tuple(int(v) for v in self.area)
        self.validate()

    def validate(self) -> None:
        if (self.biome is None) == (self.world is None):
            raise ConfigError("set exactly one of biome and world")
        if self.biome is not None:
            try:
                Biome.parse(self.biome)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if not isinstance(self.steps, int) or self.steps < 0:
            raise ConfigError(f"steps must be a non-negative integer, got {self.steps!r}")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")
        if self.area is not None and (len(self.area) != 2 or min(self.area) < 1):
            raise ConfigError(f"bad area {self.area}")
        for name, allowed in (("economy", ECONOMY_KEYS), ("placement", PLACEMENT_KEYS),
                              ("narrative", NARRATIVE_KEYS)):
            unknown = set(getattr(self, name)) - allowed
            if unknown:
                raise ConfigError(f"unknown {name} keys: {sorted(unknown)}")

    @property
    def area_size(self) -> tuple[int, int]:
        return self.area or DEFAULT_AREA

    def make_economy(self) -> Economy:
        return Economy(**self.economy)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["area"] = list(self.area) if self.area else None
        return d

    def digest(self) -> str:
        """Hash of everything that affects outputs (the output directory does not)."""
        d = self.to_dict()
        d.pop("out")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def out_dir(self) -> Path:
        if self.out:
            return Path(self.out)
        return Path(os.environ.get(OUT_ENV, DEFAULT_OUT)) / f"seed{self.seed}"


def parse_area(text: str) -> tuple[int, int]:
    """``"WxD"`` or a single number for a square area."""
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad area {text!r}; expected WxD") from None
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 1:
        raise ConfigError(f"bad area {text!r}; expected WxD")
    return dims


def read_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if "config" in data and "config_hash" in data:
        data = data["config"]
    return data


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, file values and overrides (``None`` overrides are ignored)."""
    merged: dict = {}
    known = {f.name for f in dataclasses.fields(RunConfig)}
    for layer in (file_values or {}, {k: v for k, v in (overrides or {}).items() if v is not None}):
        unknown = set(layer) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in layer.items():
            if key in ("economy", "placement", "narrative"):
                merged[key] = {**merged.get(key, {}), **value}
            else:
                merged[key] = value
    # a world file on the command line replaces a synthesized biome from the file, and back
    if overrides and overrides.get("world") is not None:
        merged["biome"] = None
    elif overrides and overrides.get("biome") is not None:
        merged["world"] = None
    elif "world" in merged and merged.get("world") is not None and "biome" not in (file_values or {}):
        merged["biome"] = None
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
