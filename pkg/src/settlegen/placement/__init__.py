"""Block placement: turning a finished blueprint into voxels."""

from .canvas import Canvas
from .cells import (CellChoice, CellLayout, CellModel, build_cell_structure, generate_layout,
                    load_library, load_model, parse_model, select_models)
from .farms import FarmRegion, expand_farms, fence_rings, finalize_farm_borders, grow_region
from .place import PlacementReport, place_all
from .trees import remove_trees
from .wall import build_wall, lipschitz_raise, plan_wall_heights, tower_indices

__all__ = [
    "Canvas", "CellChoice", "CellLayout", "CellModel", "FarmRegion", "PlacementReport",
    "build_cell_structure", "build_wall", "expand_farms", "fence_rings", "finalize_farm_borders",
    "generate_layout", "grow_region", "lipschitz_raise", "load_library", "load_model",
    "parse_model", "place_all", "plan_wall_heights", "remove_trees", "select_models",
    "tower_indices",
]
