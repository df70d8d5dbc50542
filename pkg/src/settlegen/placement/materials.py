"""Block names per structure style, derived from the local wood types."""

from __future__ import annotations

from dataclasses import dataclass

AIR = "air"
KEEP = "_"  # role character meaning "leave the block as it is"


@dataclass(frozen=True)
class Materials:
    planks: str
    frame: str
    roof: str
    stone: str
    glass: str = "glass_pane"
    fence: str = "oak_fence"
    floor: str = "oak_planks"
    door: str = "oak_door"

    def roles(self) -> dict[str, str]:
        """Model role character to block name."""
        return {"P": self.planks, "L": self.frame, "R": self.roof, "S": self.stone,
                "G": self.glass, "F": self.fence, "W": self.floor, ".": AIR}


def wood_materials(wood: str) -> Materials:
    return Materials(planks=f"{wood}_planks", frame=f"stripped_{wood}_log", roof=f"{wood}_stairs",
                     stone="cobblestone", fence=f"{wood}_fence", floor=f"{wood}_planks",
                     door=f"{wood}_door")


def style_for(kind: str, wood: str) -> Materials:
    base = wood_materials(wood)
    if kind == "commercial":
        return Materials(planks="bricks", frame=base.frame, roof=base.roof, stone="stone_bricks",
                         fence=base.fence, floor=base.floor, door=base.door)
    if kind == "church":
        return Materials(planks="stone_bricks", frame="polished_andesite", roof="deepslate_tiles",
                         stone="stone_bricks", glass="white_stained_glass_pane", fence=base.fence,
                         floor="polished_andesite", door=base.door)
    if kind == "industrial":
        return Materials(planks="cobblestone", frame=base.frame, roof="stone_brick_slab",
                         stone="cobblestone", fence=base.fence, floor="stone", door=base.door)
    return base


WALL_BLOCK = "stone_bricks"
WALL_TOP = "stone_brick_slab"
ROAD_BLOCK = "dirt_path"
ROAD_STEP = "cobblestone_stairs"
BRIDGE_DECK = "spruce_planks"
FOUNDATION = "cobblestone"
FARMLAND = "farmland"
CROP_BLOCKS = {"wheat": "wheat", "potatoes": "potatoes", "carrots": "carrots",
               "beetroots": "beetroots", "melon": "melon_stem"}
FURNITURE = ("bed", "chest", "crafting_table", "furnace", "bookshelf", "barrel", "lantern",
             "flower_pot")
