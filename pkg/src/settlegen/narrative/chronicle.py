"""The mayor's chronicle of civilian buildings and the merchant captain's log."""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..blueprint import Blueprint, PlotKind
from .names import generate_name
from .population import Address, Inhabitant, NameModels, assign_addresses, street_position

FOUNDING_YEAR = 1432
CIVILIAN = (PlotKind.RESIDENTIAL, PlotKind.COMMERCIAL, PlotKind.INDUSTRIAL)

# every slot draws exactly one member of its set
SYNONYMS = {
    "settled": ("moved into", "settled at", "took up residence at"),
    "opened": ("opened", "established", "started"),
    "trade": ("a bakery", "a tailor shop", "a cooperage", "an apothecary", "a candle shop",
              "a fishmonger"),
    "trouble": ("a rat infestation", "lacking supplies", "a harsh winter", "a flooded cellar",
                "a quarrel with the guild"),
    "fortune": ("thriving", "bustling", "prosperous"),
    "workshop": ("a smithy", "a tannery", "a brewery", "a sawmill", "a pottery", "a ropewalk"),
    "work": ("steady work", "honest wages", "a living"),
}
TEMPLATES = {
    PlotKind.RESIDENTIAL: "In {year}, {head} {settled} {address}{household}.",
    PlotKind.COMMERCIAL: ("In {year}, {owner} {opened} {trade} on {street}. It nearly closed "
                          "after {trouble}, but it is {fortune} today."),
    PlotKind.INDUSTRIAL: "In {year}, {owner} built {workshop} by {street}, giving {work} to {jobs} townsfolk.",
}
JSONL_FIELDS = ("plot_id", "kind", "created_step", "build_year", "street", "address", "inhabitants",
                "text")
CARGO = ("wool", "salted herring", "cheese", "timber", "spices", "wine", "grain", "linen", "peat",
         "bricks", "tulip bulbs", "silver")


@dataclass
class ChronicleEntry:
    plot_id: int
    kind: str
    created_step: int
    build_year: int
    street: str | None
    address: str | None
    inhabitants: list
    text: str
    slots: dict = field(default_factory=dict)

    def record(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in JSONL_FIELDS}


@dataclass
class Chronicle:
    city_name: str
    mayor: Inhabitant
    founding_year: int
    entries: list

    def render(self) -> str:
        lines = [f"The Chronicle of {self.city_name}", "",
                 f"I, {self.mayor.name}, mayor of {self.city_name}, write down how our town grew "
                 f"since its founding in {self.founding_year}.", ""]
        lines += [e.text for e in self.entries]
        lines += ["", f"Signed, {self.mayor.name}"]
        return "\n".join(lines) + "\n"


def _fill(template: str, rng, **values) -> tuple[str, dict]:
    slots = {}
    for slot, options in SYNONYMS.items():
        if "{" + slot + "}" in template:
            slots[slot] = rng.choice(options)
    return template.format(**values, **slots), slots


def _household_text(people) -> str:
    if len(people) <= 1:
        return ""
    head, rest = people[0], people[1:]
    partner = [p for p in rest if p.marital_status == "married"]
    kids = [p for p in rest if p not in partner]
    parts = []
    if partner:
        parts.append(f"with {partner[0].name.split(' ')[0]}")
    if kids:
        word = "child" if len(kids) == 1 else "children"
        names = ", ".join(k.name.split(" ")[0] for k in kids)
        parts.append(f"{'and' if partner else 'with'} {len(kids)} {word} ({names})")
    return " " + " ".join(parts)


def _person_name(models: NameModels, rng) -> str:
    given = generate_name(models.given_male if rng.random() < 0.5 else models.given_female, rng)
    return f"{given} {generate_name(models.surname, rng)}"


def pick_mayor(population, models: NameModels, rng) -> Inhabitant:
    adults = [p for p in population if p.age >= 30]
    if adults:
        return max(adults, key=lambda p: (p.age, p.name))
    return Inhabitant(_person_name(models, rng), rng.randint(40, 70), "female", None, "single")


def write_chronicle(bp: Blueprint, population, models: NameModels, rng, streets: dict[int, str], *,
                    founding_year: int = FOUNDING_YEAR, city_name: str | None = None,
                    max_entries: int | None = None) -> Chronicle:
    city = city_name or generate_name(models.place, rng)
    mayor = pick_mayor(population, models, rng)
    homes: dict[int, list] = {}
    for person in population:
        homes.setdefault(person.address.plot_id, []).append(person)
    addresses = assign_addresses(bp, streets)
    entries = []
    plots = sorted((p for p in bp.plots.values() if p.kind in CIVILIAN),
                   key=lambda p: (p.created_step, p.id))
    for plot in plots:
        year = founding_year + plot.created_step
        pos = street_position(bp, plot)
        street = streets.get(pos[0]) if pos else None
        street_text = street or "the old cart track"
        if plot.kind == PlotKind.RESIDENTIAL:
            people = homes.get(plot.id, [])
            addr: Address | None = addresses.get(plot.id)
            if not people or addr is None:
                continue
            text, slots = _fill(TEMPLATES[plot.kind], rng, year=year, head=people[0].name,
                                address=str(addr), household=_household_text(people))
            entries.append(ChronicleEntry(plot.id, plot.kind.value, plot.created_step, year, street,
                                          str(addr), [p.name for p in people], text, slots))
        else:
            owner = _person_name(models, rng)
            text, slots = _fill(TEMPLATES[plot.kind], rng, year=year, owner=owner, street=street_text,
                                jobs=rng.randint(2, 9))
            entries.append(ChronicleEntry(plot.id, plot.kind.value, plot.created_step, year, street,
                                          None, [owner], text, slots))
        if max_entries is not None and len(entries) >= max_entries:
            break
    return Chronicle(city, mayor, founding_year, entries)


def export_chronicle(chronicle: Chronicle, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    txt = out_dir / "chronicle.txt"
    txt.write_text(chronicle.render(), encoding="utf-8")
    jsonl = out_dir / "chronicle.jsonl"
    jsonl.write_text("".join(json.dumps(e.record(), ensure_ascii=False) + "\n"
                             for e in chronicle.entries), encoding="utf-8")
    return txt, jsonl


def write_captains_log(bp: Blueprint, models: NameModels, rng, *, city_name: str,
                       founding_year: int = FOUNDING_YEAR) -> str | None:
    """Voyage log of the town's merchant ship, or ``None`` without a large boat."""
    ships = [p for p in bp.plots_of(PlotKind.BOAT) if p.variant == "large"]
    if not ships:
        return None
    ship = generate_name(models.place, rng)
    captain = _person_name(models, rng)
    cargo = rng.sample(CARGO, rng.randint(3, 5))
    ports = []
    while len(ports) < rng.randint(2, 4) or not ports:
        port = generate_name(models.place, rng)
        if port != city_name and port not in ports:
            ports.append(port)
    day = dt.date(founding_year + max(ships[0].created_step, bp.step), 4, 1)
    day += dt.timedelta(days=rng.randint(0, 60))
    lines = [f"Log of the merchant ship {ship}, Captain {captain}", ""]
    lines.append(f"{day.isoformat()}: Cast off from {city_name} carrying {', '.join(cargo)}.")
    for i, port in enumerate(ports):
        day += dt.timedelta(days=rng.randint(3, 14))
        sold = cargo[i % len(cargo)]
        lines.append(f"{day.isoformat()}: Anchored at {port}. Sold the {sold} at a fair price.")
    day += dt.timedelta(days=rng.randint(5, 20))
    lines.append(f"{day.isoformat()}: Home again in {city_name}, hold full and crew in good spirits.")
    return "\n".join(lines) + "\n"
