"""Deterministic sample grids: rational partitions, grid measures, seeded draws."""
from __future__ import annotations

import functools
import itertools
import random
from fractions import Fraction

from .core import FiniteSupport
from .giry import FinMeasurableSpace, Measure, meta_measure

DEFAULT_SEED = 0


def compositions(total: int, parts: int):
    """Nonnegative integer vectors of length ``parts`` summing to ``total``."""
    for cuts in itertools.combinations_with_replacement(range(total + 1), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


@functools.lru_cache(maxsize=None)
def weight_vectors(length: int, max_den: int) -> tuple:
    """Distinct rational weight vectors of ``length`` with denominators <= max_den."""
    seen = dict()
    for d in range(1, max_den + 1):
        for comp in compositions(d, length):
            seen.setdefault(tuple(Fraction(c, d) for c in comp), None)
    return tuple(seen)


def partitions(max_len: int = 4, max_den: int = 8):
    """Every FiniteSupport partition on indices 1..L, L <= max_len."""
    for length in range(1, max_len + 1):
        for w in weight_vectors(length, max_den):
            yield FiniteSupport.of(*w)


def grid_measures(X: FinMeasurableSpace, max_den: int = 4) -> list:
    """All measures putting mass k/d (d <= max_den) on the carrier labels."""
    return [Measure(X, dict(zip(X.carrier, w))) for w in weight_vectors(len(X.carrier), max_den)]


def random_partition(rng: random.Random, max_len: int = 4, max_den: int = 8) -> FiniteSupport:
    length = rng.randint(1, max_len)
    d = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, d) for _ in range(length - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return FiniteSupport.of(*[Fraction(p, d) for p in parts])


def random_meta(rng: random.Random, pool, size: int = 3, max_den: int = 4):
    """Finitely supported measure over distinct elements drawn from ``pool``."""
    chosen = rng.sample(list(pool), min(size, len(pool)))
    w = random_partition(rng, len(chosen), max_den)
    weights = w.weights(len(chosen))
    return meta_measure([(p, x) for p, x in zip(chosen, weights) if x > 0])
