"""Mixed-order letter Markov chains for names.

Each order n in 2..5 has a table from (n-1)-letter contexts to the next
letter, plus a per-context probability of ending the name there. While
generating, every letter draws its order at random, so low orders add
novelty and high orders copy longer stretches of real names.
"""

from __future__ import annotations

import logging
import string
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

ALPHABET = frozenset(string.ascii_lowercase)
START = "^"
ORDERS = (2, 3, 4, 5)
DEFAULT_SWITCH = {2: 0.15, 3: 0.25, 4: 0.35, 5: 0.25}
MAX_LEN = 14
MIN_LEN = 3
MAX_ATTEMPTS = 20
MIN_CORPUS = 50
DATA_DIR = Path(__file__).with_name("data")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class NameModel:
    tables: dict            # order -> context -> {letter: p}
    terminal: dict          # order -> context -> P(name ends after this context)
    switch: dict = field(default_factory=lambda: dict(DEFAULT_SWITCH))
    corpus: tuple = ()

    def with_switch(self, switch: dict) -> "NameModel":
        total = sum(switch.values())
        if total <= 0 or any(n not in self.tables for n in switch):
            raise ValueError(f"bad order distribution {switch}")
        return NameModel(self.tables, self.terminal, {n: p / total for n, p in switch.items()},
                         self.corpus)


def validate_name(name: str, index: int | None = None) -> str:
    low = name.strip().lower()
    if not low:
        raise CorpusError(f"empty name at line {index}")
    for pos, ch in enumerate(low):
        if ch not in ALPHABET:
            where = f"line {index}, " if index is not None else ""
            raise CorpusError(f"{where}position {pos}: character {ch!r} in {name!r} is not a-z")
    return low


def train(corpus, *, switch: dict | None = None, min_size: int = 1) -> NameModel:
    """Count transitions for every order; deterministic in the corpus order."""
    names = [validate_name(n, i) for i, n in enumerate(corpus, 1)]
    if not names:
        raise CorpusError("empty corpus")
    if len(names) < min_size:
        raise CorpusError(f"corpus has {len(names)} names, need at least {min_size}")
    tables, terminal = {}, {}
    for n in ORDERS:
        letters: dict = defaultdict(Counter)
        ends: Counter = Counter()
        seen: Counter = Counter()
        for name in names:
            padded = START * (n - 1) + name
            for i in range(n - 1, len(padded) + 1):
                ctx = padded[i - n + 1:i]
                seen[ctx] += 1
                if i == len(padded):
                    ends[ctx] += 1
                else:
                    letters[ctx][padded[i]] += 1
        tables[n] = {ctx: {ch: c / sum(cnt.values()) for ch, c in sorted(cnt.items())}
                     for ctx, cnt in sorted(letters.items())}
        terminal[n] = {ctx: ends[ctx] / total for ctx, total in sorted(seen.items())}
    return NameModel(tables, terminal, dict(switch or DEFAULT_SWITCH), tuple(names))


def _pick(dist: dict, u: float):
    acc = 0.0
    last = None
    for key, p in dist.items():
        acc += p
        last = key
        if u < acc:
            return key
    return last


def _context(model: NameModel, prefix: str, n: int):
    """Longest seen context of order <= n for ``prefix``, as (order, context)."""
    for m in range(n, 1, -1):
        ctx = (START * (m - 1) + prefix)[-(m - 1):]
        if ctx in model.terminal[m]:
            return m, ctx
    return None


def sample_name(model: NameModel, rng, *, max_len: int = MAX_LEN) -> str:
    """One raw lowercase draw (may be shorter than the minimum length)."""
    orders = sorted(model.switch)
    weights = {n: model.switch[n] for n in orders}
    out = ""
    while len(out) < max_len:
        n = _pick(weights, rng.random())
        found = _context(model, out, n)
        if found is None:
            break
        m, ctx = found
        if rng.random() < model.terminal[m][ctx] or ctx not in model.tables[m]:
            break
        out += _pick(model.tables[m][ctx], rng.random())
    return out


def generate_name(model: NameModel, rng, *, max_len: int = MAX_LEN, min_len: int = MIN_LEN,
                  attempts: int = MAX_ATTEMPTS) -> str:
    for _ in range(attempts):
        name = sample_name(model, rng, max_len=max_len)
        if len(name) >= min_len:
            return name.capitalize()
    fallback = rng.choice(model.corpus)
    log.info("name generation fell back to corpus name %r", fallback)
    return fallback.capitalize()


def name_is_sound(model: NameModel, name: str) -> bool:
    """Every letter of ``name`` follows its prefix in at least one order's table."""
    low = name.lower()
    for i, ch in enumerate(low):
        ok = False
        for n in model.tables:
            ctx = (START * (n - 1) + low[:i])[-(n - 1):]
            if model.tables[n].get(ctx, {}).get(ch, 0.0) > 0:
                ok = True
                break
        if not ok:
            return False
    return True


def load_corpus(path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip()]


def bundled(name: str) -> list[str]:
    return load_corpus(DATA_DIR / f"{name}.txt")


def substring_rate(names, corpus) -> float:
    """Share of ``names`` that occur verbatim inside some corpus name."""
    pool = [c.lower() for c in corpus]
    hits = sum(any(n.lower() in c for c in pool) for n in names)
    return hits / max(len(names), 1)
