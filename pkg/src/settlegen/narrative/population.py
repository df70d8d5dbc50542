"""Street names, inhabitants and their addresses."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..blueprint import Blueprint, Plot, PlotKind, nearest_road_cell
from .names import NameModel, generate_name

STREET_SUFFIXES = ("straat", "laan", "weg", "gracht", "steeg", "dijk", "kade", "markt")
ADULT_AGES = (18, 80)
CHILD_GAP = 17  # a child is at least this much younger than each parent


@dataclass(frozen=True)
class Address:
    street: str
    number: int
    plot_id: int

    def __str__(self) -> str:
        return f"{self.street} {self.number}"


@dataclass
class Inhabitant:
    name: str
    age: int
    sex: str
    address: Address
    marital_status: str
    children: list = field(default_factory=list)

    @property
    def surname(self) -> str:
        return self.name.rsplit(" ", 1)[-1]


@dataclass(frozen=True)
class NameModels:
    given_male: NameModel
    given_female: NameModel
    surname: NameModel
    place: NameModel


def name_streets(bp: Blueprint, models: NameModels, rng) -> dict[int, str]:
    """One distinct generated street name per road segment."""
    used: set[str] = set()
    streets = {}
    for road in bp.roads.segments:
        for _ in range(50):
            base = generate_name(models.surname if rng.random() < 0.5 else models.place, rng)
            name = base + rng.choice(STREET_SUFFIXES)
            if name not in used:
                break
        else:
            name = f"{name} {road.id}"
        used.add(name)
        streets[road.id] = name
    return streets


def street_position(bp: Blueprint, plot: Plot):
    """(road id, index of the access cell along that road) or ``None``."""
    cell = plot.road_access or nearest_road_cell(bp, plot.rect)
    if cell is None:
        return None
    cell = tuple(cell)
    for road in bp.roads.segments:
        if cell in road.cells:
            return road.id, road.cells.index(cell)
    return None


def assign_addresses(bp: Blueprint, streets: dict[int, str],
                     kinds=(PlotKind.RESIDENTIAL,)) -> dict[int, Address]:
    """House numbers increase along each street, starting from its first cell."""
    by_street: dict[int, list] = {}
    for plot in bp.plots.values():
        if plot.kind not in kinds:
            continue
        pos = street_position(bp, plot)
        if pos is not None:
            by_street.setdefault(pos[0], []).append((pos[1], plot.id))
    out = {}
    for rid, items in by_street.items():
        for number, (_, pid) in enumerate(sorted(items), 1):
            out[pid] = Address(streets[rid], number, pid)
    return out


def _person(models: NameModels, rng, sex: str, surname: str, age: int, address: Address,
            status: str) -> Inhabitant:
    given = generate_name(models.given_male if sex == "male" else models.given_female, rng)
    return Inhabitant(f"{given} {surname}", age, sex, address, status)


def generate_household(models: NameModels, rng, address: Address) -> list[Inhabitant]:
    size = rng.randint(1, 5)
    surname = generate_name(models.surname, rng)
    sex = rng.choice(("female", "male"))
    head_age = rng.randint(*ADULT_AGES)
    members = []
    if size >= 2 and rng.random() < 0.75:
        partner_age = max(ADULT_AGES[0], min(ADULT_AGES[1], head_age + rng.randint(-6, 6)))
        other = "male" if sex == "female" else "female"
        head = _person(models, rng, sex, surname, head_age, address, "married")
        partner = _person(models, rng, other, surname, partner_age, address, "married")
        members += [head, partner]
        parents = [head, partner]
    else:
        status = "widowed" if size >= 2 else rng.choice(("single", "widowed"))
        head = _person(models, rng, sex, surname, head_age, address, status)
        members.append(head)
        parents = [head]
    oldest_child = min(p.age for p in parents) - CHILD_GAP
    for _ in range(size - len(members)):
        if oldest_child < 0:
            break
        child = _person(models, rng, rng.choice(("female", "male")), surname,
                        rng.randint(0, oldest_child), address, "single")
        for p in parents:
            p.children.append(child)
        members.append(child)
    return members


def generate_population(bp: Blueprint, models: NameModels, rng,
                        streets: dict[int, str] | None = None) -> list[Inhabitant]:
    """Everyone living in a residential plot, households in plot id order."""
    streets = streets if streets is not None else name_streets(bp, models, rng)
    addresses = assign_addresses(bp, streets)
    people = []
    for pid in sorted(addresses):
        people += generate_household(models, rng, addresses[pid])
    return people
