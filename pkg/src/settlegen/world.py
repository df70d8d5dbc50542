"""Voxel world: block palette, synthetic terrain and the ``.sfw`` file format.

File layout (all integers little-endian)::

    magic      b"SFW1"
    version    u32            (currently 1)
    dims       3 x u32        x_size, y_size, z_size
    seed       u64
    sea_level  i32            y of the topmost water block
    n_palette  u32
    palette    n_palette x { u16 byte length, UTF-8 name, u8 class }
    biomes     x_size * z_size x u8, x-major
    body       per column (x outer, z inner):
                   u16 run count, then run count x { u16 palette index, u16 length }
               runs go bottom-up and their lengths sum to y_size
"""

from __future__ import annotations

import enum
import hashlib
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import derive_seed, hash_grid

MAGIC = b"SFW1"
FORMAT_VERSION = 1
MIN_SYNTH_DIM = 16


class WorldError(Exception):
    pass


class BoundsError(WorldError, IndexError):
    pass


class WorldFormatError(WorldError):
    pass


class CorruptHeaderError(WorldFormatError):
    pass


class VersionError(WorldFormatError):
    pass


class UnknownPaletteError(WorldFormatError):
    pass


class TruncatedError(WorldFormatError):
    pass


class BlockClass(enum.IntEnum):
    AIR = 0
    GROUND = 1
    WATER = 2
    LAVA = 3
    FOLIAGE_LOG = 4
    FOLIAGE_LEAF = 5
    BUILT = 6


FOLIAGE = (BlockClass.FOLIAGE_LOG, BlockClass.FOLIAGE_LEAF)


class Biome(enum.IntEnum):
    PLAINS = 0
    JUNGLE = 1
    DESERT = 2
    TAIGA = 3
    FOREST = 4

    @classmethod
    def parse(cls, name: "str | Biome") -> "Biome":
        if isinstance(name, Biome):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown biome {name!r}") from None


@dataclass(frozen=True)
class BlockId:
    name: str
    cls: BlockClass


_GROUND = ["stone", "dirt", "grass_block", "sand", "sandstone", "gravel", "podzol",
           "bedrock", "clay", "snow_block", "coarse_dirt"]
_WOODS = ["oak", "spruce", "birch", "jungle", "acacia", "dark_oak"]

# Default class of every block name this package writes. Unknown names default
# to BUILT when registered through :func:`block`.
KNOWN_BLOCKS: dict[str, BlockClass] = {"air": BlockClass.AIR, "water": BlockClass.WATER,
                                       "lava": BlockClass.LAVA}
KNOWN_BLOCKS.update({n: BlockClass.GROUND for n in _GROUND})
for _w in _WOODS:
    KNOWN_BLOCKS[f"{_w}_log"] = BlockClass.FOLIAGE_LOG
    KNOWN_BLOCKS[f"{_w}_leaves"] = BlockClass.FOLIAGE_LEAF
KNOWN_BLOCKS["tall_grass"] = BlockClass.FOLIAGE_LEAF
KNOWN_BLOCKS["fern"] = BlockClass.FOLIAGE_LEAF

AIR = BlockId("air", BlockClass.AIR)


def block(name: str) -> BlockId:
    """BlockId for ``name`` with its registered class (BUILT if unknown)."""
    return BlockId(name, KNOWN_BLOCKS.get(name, BlockClass.BUILT))


@dataclass(frozen=True)
class BuildArea:
    x: int
    z: int
    width: int
    depth: int

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.depth)

    @classmethod
    def centered(cls, world: "VoxelWorld", width: int, depth: int) -> "BuildArea":
        sx, _, sz = world.dims
        if width > sx or depth > sz:
            raise BoundsError(f"build area {width}x{depth} larger than world {sx}x{sz}")
        return cls((sx - width) // 2, (sz - depth) // 2, width, depth)

    def check_inside(self, world: "VoxelWorld") -> None:
        sx, _, sz = world.dims
        if self.width < 1 or self.depth < 1 or self.x < 0 or self.z < 0 \
                or self.x + self.width > sx or self.z + self.depth > sz:
            raise BoundsError(f"{self} not inside world of size {sx}x{sz}")


@dataclass(eq=False)
class VoxelWorld:
    """Dense block grid indexed ``blocks[x, y, z]`` into ``palette``."""

    blocks: np.ndarray
    palette: list[BlockId]
    biome_map: np.ndarray
    seed: int = 0
    sea_level: int = 0
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.blocks = np.ascontiguousarray(self.blocks, dtype=np.uint16)
        self.biome_map = np.ascontiguousarray(self.biome_map, dtype=np.uint8)
        if self.biome_map.shape != (self.blocks.shape[0], self.blocks.shape[2]):
            raise ValueError("biome_map must have shape (x_size, z_size)")
        self._index = {}
        for i, b in enumerate(self.palette):
            if b.name in self._index:
                raise ValueError(f"duplicate palette entry {b.name!r}")
            self._index[b.name] = i

    @classmethod
    def empty(cls, dims, fill: str = "air", biome: Biome = Biome.PLAINS, seed: int = 0,
              sea_level: int = 0) -> "VoxelWorld":
        sx, sy, sz = dims
        w = cls(np.zeros((sx, sy, sz), np.uint16), [AIR],
                np.full((sx, sz), int(biome), np.uint8), seed, sea_level)
        if fill != "air":
            w.blocks[:] = w.index(fill)
        return w

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(s) for s in self.blocks.shape)

    def index(self, b: "str | BlockId") -> int:
        """Palette index of ``b``, registering it on first use."""
        if isinstance(b, str):
            name = b
            if name in self._index:
                return self._index[name]
            b = block(name)
        elif b.name in self._index:
            i = self._index[b.name]
            if self.palette[i] != b:
                raise ValueError(f"{b.name!r} already registered with class {self.palette[i].cls.name}")
            return i
        if len(self.palette) >= 0xFFFF:
            raise WorldError("palette full")
        self.palette.append(b)
        self._index[b.name] = len(self.palette) - 1
        return len(self.palette) - 1

    def class_table(self) -> np.ndarray:
        """Array mapping palette index -> BlockClass value."""
        return np.array([int(b.cls) for b in self.palette], dtype=np.uint8)

    def classes(self) -> np.ndarray:
        return self.class_table()[self.blocks]

    def in_bounds(self, x: int, y: int, z: int) -> bool:
        sx, sy, sz = self.blocks.shape
        return 0 <= x < sx and 0 <= y < sy and 0 <= z < sz

    def get_block(self, x: int, y: int, z: int) -> BlockId:
        if not self.in_bounds(x, y, z):
            raise BoundsError(f"({x}, {y}, {z}) outside world {self.dims}")
        return self.palette[self.blocks[x, y, z]]

    def set_block(self, x: int, y: int, z: int, b: "str | BlockId") -> None:
        if not self.in_bounds(x, y, z):
            raise BoundsError(f"({x}, {y}, {z}) outside world {self.dims}")
        self.blocks[x, y, z] = self.index(b)

    def copy(self) -> "VoxelWorld":
        return VoxelWorld(self.blocks.copy(), list(self.palette), self.biome_map.copy(),
                          self.seed, self.sea_level)

    def __eq__(self, other):
        if not isinstance(other, VoxelWorld):
            return NotImplemented
        return (self.palette == other.palette and self.seed == other.seed
                and self.sea_level == other.sea_level
                and np.array_equal(self.biome_map, other.biome_map)
                and self.blocks.shape == other.blocks.shape
                and np.array_equal(self.blocks, other.blocks))

    def to_bytes(self) -> bytes:
        return _encode(self)

    def digest(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def get_block(world: VoxelWorld, x: int, y: int, z: int) -> BlockId:
    return world.get_block(x, y, z)


def set_block(world: VoxelWorld, x: int, y: int, z: int, b: "str | BlockId") -> None:
    world.set_block(x, y, z, b)


# ---------------------------------------------------------------- file format

def _encode(world: VoxelWorld) -> bytes:
    sx, sy, sz = world.dims
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I3IQi", FORMAT_VERSION, sx, sy, sz, world.seed & ((1 << 64) - 1),
                          world.sea_level))
    out.write(struct.pack("<I", len(world.palette)))
    for b in world.palette:
        raw = b.name.encode("utf-8")
        out.write(struct.pack("<H", len(raw)))
        out.write(raw)
        out.write(struct.pack("<B", int(b.cls)))
    out.write(world.biome_map.astype("<u1").tobytes())

    cols = world.blocks.transpose(0, 2, 1).reshape(sx * sz, sy)
    starts = np.ones(cols.shape, dtype=bool)
    starts[:, 1:] = cols[:, 1:] != cols[:, :-1]
    col_of_run, y_of_run = np.nonzero(starts)
    n_runs = starts.sum(axis=1)
    ends = np.append(y_of_run[1:], sy)
    ends[np.cumsum(n_runs) - 1] = sy
    lengths = ends - y_of_run
    values = cols[col_of_run, y_of_run]

    runs_before = np.concatenate(([0], np.cumsum(n_runs)[:-1]))
    body = np.empty(sx * sz + 2 * len(values), dtype="<u2")
    body[np.arange(sx * sz) + 2 * runs_before] = n_runs
    run_pos = col_of_run + 1 + 2 * np.arange(len(values))
    body[run_pos] = values
    body[run_pos + 1] = lengths
    out.write(body.tobytes())
    return out.getvalue()


def _decode(data: bytes) -> VoxelWorld:
    if len(data) < 4 or data[:4] != MAGIC:
        raise CorruptHeaderError("bad magic bytes")
    pos = 4
    head = struct.Struct("<I3IQi")
    if len(data) < pos + head.size:
        raise CorruptHeaderError("header truncated")
    version, sx, sy, sz, seed, sea_level = head.unpack_from(data, pos)
    pos += head.size
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported world format version {version}")
    if min(sx, sy, sz) < 1 or sy > 0xFFFF:
        raise CorruptHeaderError(f"invalid dims {(sx, sy, sz)}")
    if len(data) < pos + 4:
        raise CorruptHeaderError("palette header truncated")
    (n_palette,) = struct.unpack_from("<I", data, pos)
    pos += 4
    palette = []
    for _ in range(n_palette):
        if len(data) < pos + 2:
            raise CorruptHeaderError("palette truncated")
        (n,) = struct.unpack_from("<H", data, pos)
        pos += 2
        if len(data) < pos + n + 1:
            raise CorruptHeaderError("palette truncated")
        try:
            name = data[pos:pos + n].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptHeaderError(f"palette name is not UTF-8: {exc}") from None
        cls_byte = data[pos + n]
        pos += n + 1
        try:
            palette.append(BlockId(name, BlockClass(cls_byte)))
        except ValueError:
            raise CorruptHeaderError(f"unknown block class {cls_byte} for {name!r}") from None
    if len({b.name for b in palette}) != len(palette):
        raise CorruptHeaderError("duplicate palette names")
    if len(data) < pos + sx * sz:
        raise TruncatedError("biome map truncated")
    biome_map = np.frombuffer(data, dtype=np.uint8, count=sx * sz, offset=pos).reshape(sx, sz)
    pos += sx * sz

    if (len(data) - pos) % 2:
        raise TruncatedError("odd-length body")
    body = np.frombuffer(data, dtype="<u2", offset=pos)
    n_cols = sx * sz
    counts = np.empty(n_cols, dtype=np.int64)
    count_pos = np.empty(n_cols, dtype=np.int64)
    p = 0
    blen = len(body)
    lst = body.tolist()
    for c in range(n_cols):
        if p >= blen:
            raise TruncatedError(f"body ends before column {c}")
        k = lst[p]
        count_pos[c] = p
        counts[c] = k
        p += 1 + 2 * k
    if p > blen:
        raise TruncatedError("last column truncated")
    if p < blen:
        raise WorldFormatError(f"{2 * (blen - p)} trailing bytes after body")
    run_col = np.repeat(np.arange(n_cols), counts)
    first = np.repeat(count_pos + 1, counts)
    offs = np.arange(len(run_col)) - np.repeat(np.cumsum(counts) - counts, counts)
    vpos = first + 2 * offs
    values = body[vpos].astype(np.int64)
    lengths = body[vpos + 1].astype(np.int64)
    if len(values) and values.max() >= len(palette):
        raise UnknownPaletteError(f"palette index {int(values.max())} not in palette of {len(palette)}")
    if np.any(lengths == 0) or not np.array_equal(np.bincount(run_col, lengths, minlength=n_cols),
                                                    np.full(n_cols, float(sy))):
        raise WorldFormatError("column run lengths do not sum to y_size")
    flat = np.repeat(values, lengths).astype(np.uint16)
    blocks = flat.reshape(sx, sz, sy).transpose(0, 2, 1)
    return VoxelWorld(blocks, palette, biome_map.copy(), int(seed), int(sea_level))


def export_world(world: VoxelWorld, path) -> None:
    Path(path).write_bytes(_encode(world))


def import_world(path) -> VoxelWorld:
    return _decode(Path(path).read_bytes())


def world_from_bytes(data: bytes) -> VoxelWorld:
    return _decode(data)


# --------------------------------------------------------- terrain synthesis

@dataclass(frozen=True)
class BiomeStyle:
    top: str
    under: str
    wood: str
    tree_density: float
    trunk: tuple[int, int]
    canopy: int
    shrub_density: float = 0.0


BIOME_STYLES = {
    Biome.PLAINS: BiomeStyle("grass_block", "dirt", "oak", 0.004, (4, 6), 2),
    Biome.JUNGLE: BiomeStyle("grass_block", "dirt", "jungle", 0.045, (7, 13), 3, 0.08),
    Biome.DESERT: BiomeStyle("sand", "sandstone", "acacia", 0.001, (4, 5), 2),
    Biome.TAIGA: BiomeStyle("podzol", "dirt", "spruce", 0.02, (6, 9), 2),
    Biome.FOREST: BiomeStyle("grass_block", "dirt", "birch", 0.03, (5, 7), 2),
}

BASE_HEIGHT = 18
SEA_LEVEL_NOISE = -0.3


def _value_noise(seed: int, xs: np.ndarray, zs: np.ndarray, cell: float) -> np.ndarray:
    gx, gz = xs / cell, zs / cell
    x0, z0 = np.floor(gx), np.floor(gz)
    tx, tz = gx - x0, gz - z0
    tx = tx * tx * (3 - 2 * tx)
    tz = tz * tz * (3 - 2 * tz)
    v00 = hash_grid(seed, x0, z0)
    v10 = hash_grid(seed, x0 + 1, z0)
    v01 = hash_grid(seed, x0, z0 + 1)
    v11 = hash_grid(seed, x0 + 1, z0 + 1)
    a = v00 + (v10 - v00) * tx
    b = v01 + (v11 - v01) * tx
    return (a + (b - a) * tz) * 2 - 1


def fractal_noise(seed: int, sx: int, sz: int, base_cell: float = 48.0, octaves: int = 4) -> np.ndarray:
    xs, zs = np.meshgrid(np.arange(sx, dtype=np.float64), np.arange(sz, dtype=np.float64),
                         indexing="ij")
    total = np.zeros((sx, sz))
    amp, norm, cell = 1.0, 0.0, base_cell
    for o in range(octaves):
        total += amp * _value_noise(derive_seed(seed, f"octave{o}"), xs, zs, cell)
        norm += amp
        amp *= 0.5
        cell /= 2
    return total / norm


def synthesize_terrain(seed: int, dims=(128, 64, 128), biome: "Biome | str" = Biome.PLAINS,
                       roughness: float = 0.2) -> VoxelWorld:
    """Deterministic synthetic world with ground, lakes and biome trees."""
    sx, sy, sz = (int(d) for d in dims)
    if min(sx, sy, sz) < MIN_SYNTH_DIM:
        raise BoundsError(f"dims {dims} too small; each must be >= {MIN_SYNTH_DIM}")
    if not np.isfinite(roughness):
        raise ValueError("roughness must be finite")
    biome = Biome.parse(biome)
    roughness = float(min(max(roughness, 0.0), 1.0))
    seed &= (1 << 64) - 1
    style = BIOME_STYLES[biome]

    amp = 3 + 22 * roughness
    base = min(BASE_HEIGHT, sy // 3)
    noise = fractal_noise(derive_seed(seed, "height"), sx, sz)
    heights = np.rint(base + amp * noise).astype(np.int64)
    heights = np.clip(heights, 2, max(3, sy - 24))
    sea_level = int(round(base + amp * SEA_LEVEL_NOISE))
    sea_level = min(max(sea_level, 1), sy - 2)

    w = VoxelWorld.empty((sx, sy, sz), biome=biome, seed=seed, sea_level=sea_level)
    ys = np.arange(sy)[None, :, None]
    h3 = heights[:, None, :]
    stone, under, top = w.index("stone"), w.index(style.under), w.index(style.top)
    sand, water = w.index("sand"), w.index("water")
    bedrock = w.index("bedrock")
    submerged = heights < sea_level
    shore = heights <= sea_level + 1
    top_idx = np.where(shore, sand, top)[:, None, :]
    blk = np.zeros((sx, sy, sz), np.uint16)
    blk = np.where(ys <= h3 - 4, stone, blk)
    blk = np.where((ys > h3 - 4) & (ys < h3), under, blk)
    blk = np.where(ys == h3, top_idx, blk)
    blk = np.where((ys > h3) & (ys <= sea_level) & submerged[:, None, :], water, blk)
    blk[:, 0, :] = bedrock
    w.blocks = blk.astype(np.uint16)

    _plant_trees(w, seed, heights, submerged | shore, style)
    return w


def _plant_trees(w: VoxelWorld, seed: int, heights: np.ndarray, wet: np.ndarray,
                 style: BiomeStyle) -> None:
    sx, sy, sz = w.dims
    log, leaves = w.index(f"{style.wood}_log"), w.index(f"{style.wood}_leaves")
    roll = hash_grid(derive_seed(seed, "trees"), *np.meshgrid(np.arange(sx), np.arange(sz),
                                                              indexing="ij"))
    hroll = hash_grid(derive_seed(seed, "tree-height"), *np.meshgrid(np.arange(sx), np.arange(sz),
                                                                     indexing="ij"))
    r = style.canopy
    ok = (roll < style.tree_density) & ~wet
    ok[:r + 1, :] = ok[-r - 1:, :] = False
    ok[:, :r + 1] = ok[:, -r - 1:] = False
    lo, hi = style.trunk
    for x, z in zip(*np.nonzero(ok)):
        h = int(heights[x, z])
        tall = lo + int(hroll[x, z] * (hi - lo + 1))
        top = min(h + tall, sy - r - 2)
        if top <= h + 1:
            continue
        for y in range(top - r, top + 2):
            rr = r if y <= top else r - 1
            sl = w.blocks[x - rr:x + rr + 1, y, z - rr:z + rr + 1]
            sl[sl == 0] = leaves
        w.blocks[x, h + 1:top + 1, z] = log
    if style.shrub_density:
        shrub = (roll > 1 - style.shrub_density) & ~wet
        xs, zs = np.nonzero(shrub)
        ys = heights[xs, zs] + 1
        free = w.blocks[xs, ys, zs] == 0
        w.blocks[xs[free], ys[free], zs[free]] = leaves
