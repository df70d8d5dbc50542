import json

import pytest

from conftest import checked_run
from settlegen.blueprint import PlotKind
from settlegen.economy import differentiate
from settlegen.narrative import (default_models, export_chronicle, generate_name, generate_population,
                                 name_streets, train, write_captains_log, write_chronicle)
from settlegen.narrative.chronicle import JSONL_FIELDS, SYNONYMS
from settlegen.narrative.names import CorpusError, name_is_sound
from settlegen.narrative.population import CHILD_GAP
from settlegen.rng import SplitMix64, stream


def test_anna_bigrams():
    m = train(["anna"])
    assert m.tables[2]["a"] == {"n": 1.0}
    assert m.tables[2]["n"] == {"a": 0.5, "n": 0.5}
    assert m.terminal[2]["a"] == 0.5


def test_training_is_deterministic_and_validated():
    corpus = ["pieter", "jan", "klaas"]
    assert train(corpus).tables == train(corpus).tables
    with pytest.raises(CorpusError):
        train([])
    with pytest.raises(CorpusError, match="position 2"):
        train(["jo3n"])
    with pytest.raises(CorpusError):
        train(corpus, min_size=50)


def test_single_name_closure():
    m = train(["anna"])
    rng = SplitMix64(1)
    for _ in range(50):
        name = generate_name(m, rng).lower()
        assert set(name) <= {"a", "n"} and name_is_sound(m, name)


def test_generation_seeded():
    m = default_models().given_female
    a = [generate_name(m, SplitMix64(9)) for _ in range(5)]
    b = [generate_name(m, SplitMix64(9)) for _ in range(5)]
    assert a == b
    assert all(3 <= len(n) <= 14 and n[0].isupper() for n in a)


@pytest.fixture(scope="module")
def town():
    bp = checked_run(7).bp.copy()
    differentiate(bp)
    models = default_models()
    rng = stream(7, "narrative")
    streets = name_streets(bp, models, rng)
    people = generate_population(bp, models, rng, streets)
    chron = write_chronicle(bp, people, models, rng, streets)
    return bp, models, streets, people, chron


def test_streets_unique(town):
    bp, _, streets, _, _ = town
    assert len(set(streets.values())) == len(bp.roads.segments)


def test_households_consistent(town):
    bp, _, _, people, _ = town
    homes = {}
    for p in people:
        homes.setdefault(p.address.plot_id, []).append(p)
        for child in p.children:
            assert child.age < p.age - (CHILD_GAP - 1)
    for members in homes.values():
        assert 1 <= len(members) <= 5
        assert len({m.surname for m in members}) == 1
        assert len({str(m.address) for m in members}) == 1
    assert set(homes) == {p.id for p in bp.plots_of(PlotKind.RESIDENTIAL) if p.id in homes}


def test_house_numbers_increase_along_street(town):
    bp, _, streets, people, _ = town
    from settlegen.narrative.population import street_position
    by_street = {}
    for p in people:
        pos = street_position(bp, bp.plots[p.address.plot_id])
        by_street.setdefault(p.address.street, set()).add((pos[1], p.address.number))
    for pairs in by_street.values():
        ordered = [n for _, n in sorted(pairs)]
        assert ordered == sorted(ordered)


def test_commercial_entries_use_one_synonym_per_slot(town):
    *_, chron = town
    commercial = [e for e in chron.entries if e.kind == "commercial"]
    assert commercial
    for e in commercial:
        for slot in ("opened", "trade", "trouble", "fortune"):
            hits = [s for s in SYNONYMS[slot] if s in e.text]
            assert hits == [e.slots[slot]]


def test_chronicle_export(tmp_path, town):
    *_, chron = town
    txt, jsonl = export_chronicle(chron, tmp_path)
    rows = [json.loads(line) for line in jsonl.read_text().splitlines()]
    assert len(rows) == len(chron.entries)
    assert all(tuple(r) == JSONL_FIELDS for r in rows)
    assert chron.city_name in txt.read_text()
    assert all(r["build_year"] == 1432 + r["created_step"] for r in rows)


def test_captains_log(town):
    bp, models, _, _, chron = town
    log = write_captains_log(bp, models, SplitMix64(1), city_name=chron.city_name)
    assert bp.plots_of(PlotKind.BOAT, "large")
    dated = [ln for ln in log.splitlines() if ln[:4].isdigit()]
    assert len(dated) >= 3
    assert log == write_captains_log(bp, models, SplitMix64(1), city_name=chron.city_name)
    empty = bp.copy()
    for p in empty.plots_of(PlotKind.BOAT):
        del empty.plots[p.id]
    assert write_captains_log(empty, models, SplitMix64(1), city_name="X") is None
