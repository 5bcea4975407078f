"""Discrete quotients: the Disc functor, per-space component counts and the
witnesses that (-inf, inf] has a single component."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import LawReport
from .core import (
    DEFAULT_POLICY,
    INF,
    DivergentWitness,
    EvalPolicy,
    FiniteSupport,
    FinitePrefix,
    Geometric,
    is_inf,
    points,
    rinf_mix,
)
from .errors import NotMonotone, Unsupported
from .sampling import partitions
from .spaces import (
    DESK_VALUES,
    AffineMap,
    Disc,
    FinDist,
    InfUnitInterval,
    Product,
    RInfSpace,
    SemiDirect,
    SJ,
    Space,
)


@dataclass(frozen=True)
class MonotoneMap:
    """A table ``{0..n-1} -> {0..m-1}``; monotonicity is checked by :func:`disc_map`."""

    n: int
    m: int
    table: tuple

    def __init__(self, n: int, m: int, table: Sequence[int]):
        table = tuple(table)
        if len(table) != n:
            raise ValueError(f"table has {len(table)} entries, expected {n}")
        if any(not 0 <= v < m for v in table):
            raise ValueError(f"table {table} leaves {{0..{m - 1}}}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls, n: int) -> "MonotoneMap":
        return cls(n, n, range(n))

    def __call__(self, i: int) -> int:
        return self.table[i]

    def violation(self) -> Optional[int]:
        """First ``i`` with ``f(i) > f(i + 1)``."""
        for i in range(self.n - 1):
            if self.table[i] > self.table[i + 1]:
                return i
        return None

    def then(self, g: "MonotoneMap") -> "MonotoneMap":
        """``g . self``."""
        if g.n != self.m:
            raise ValueError("maps do not compose")
        return MonotoneMap(self.n, g.m, (g(v) for v in self.table))


@dataclass(frozen=True)
class DiscMap(AffineMap):
    f: MonotoneMap

    @property
    def domain(self):
        return Disc(self.f.n)

    @property
    def codomain(self):
        return Disc(self.f.m)

    def __call__(self, i):
        return self.f(i)

    def then(self, g: "DiscMap") -> "DiscMap":
        return DiscMap(self.f.then(g.f))


HALF = FiniteSupport.of(Fraction(1, 2), Fraction(1, 2))


def disc_map(f: MonotoneMap) -> DiscMap:
    """The affine map ``Disc(n) -> Disc(m)`` induced by a weakly monotone table.

    A drop ``f(i) > f(i+1)`` is refuted by the even split of ``i`` and
    ``i + 1``: the mixture is ``i`` so one leg is ``f(i)``, the other is
    ``min(f(i), f(i+1)) = f(i+1)``.
    """
    i = f.violation()
    if i is not None:
        raise NotMonotone(
            f"f({i}) = {f(i)} > f({i + 1}) = {f(i + 1)}: mixing {i} and {i + 1} evenly "
            f"gives f({i}) = {f(i)} on one side and {f(i + 1)} on the other",
            pair=(i, i + 1),
            partition=HALF,
        )
    return DiscMap(f)


def monotone_maps(n: int, m: int):
    """All weakly monotone tables ``{0..n-1} -> {0..m-1}``."""
    for table in itertools.combinations_with_replacement(range(m), n):
        yield MonotoneMap(n, m, table)


def all_maps(n: int, m: int):
    for table in itertools.product(range(m), repeat=n):
        yield MonotoneMap(n, m, table)


# -- component counts -----------------------------------------------------------


@dataclass(frozen=True)
class Collapse(AffineMap):
    space: Space

    @property
    def domain(self):
        return self.space

    @property
    def codomain(self):
        return Disc(1)

    def __call__(self, a):
        return 0


@dataclass(frozen=True)
class OrbitProjection(AffineMap):
    """``(r, k) -> rank(k)``: the strongest orbit lands on 0, which wins in Disc."""

    space: SemiDirect

    @property
    def domain(self):
        return self.space

    @property
    def codomain(self):
        return Disc(self.space.n)

    def __call__(self, a):
        return self.space.rank(a[1])


@dataclass(frozen=True)
class FactorProjection(AffineMap):
    """Projection of a product onto its only factor with more than one component."""

    space: Product
    index: int
    inner: AffineMap

    @property
    def domain(self):
        return self.space

    @property
    def codomain(self):
        return self.inner.codomain

    def __call__(self, a):
        return self.inner(a[self.index])


@dataclass(frozen=True)
class CompResult:
    space: Space
    count: int
    projection: AffineMap


def comp(space: Space) -> CompResult:
    """Universal affine map from ``space`` to a finite discrete space."""
    if isinstance(space, RInfSpace):
        return CompResult(space, 1, Collapse(space))
    if isinstance(space, Disc):
        return CompResult(space, space.n, disc_map(MonotoneMap.identity(space.n)))
    if isinstance(space, SemiDirect):
        return CompResult(space, space.n, OrbitProjection(space))
    if isinstance(space, Product):
        parts = [comp(f) for f in space.factors]
        nontrivial = [i for i, c in enumerate(parts) if c.count > 1]
        if not nontrivial:
            return CompResult(space, 1, Collapse(space))
        if len(nontrivial) == 1:
            i = nontrivial[0]
            return CompResult(space, parts[i].count, FactorProjection(space, i, parts[i].projection))
        raise Unsupported(
            f"{space}: a product of two discrete spaces with more than one point each mixes "
            "coordinatewise and is not a chain, so no affine map into a finite discrete space is universal"
        )
    if isinstance(space, InfUnitInterval):
        raise Unsupported("infunit has no universal affine map into a finite discrete space")
    if isinstance(space, (SJ, FinDist)):
        raise Unsupported(f"components are not implemented for {space}")
    raise Unsupported(f"components are not implemented for {space}")


def orbit_maps(space: SemiDirect, k: int):
    """Affine maps ``space -> Disc(k)``, as tables indexed by orbit.

    An affine map into a discrete space is constant on every copy of
    (-inf, inf] (see :func:`no_affine_to_two_witness`), so it factors through
    the orbit; a table is affine iff it respects the winner of every set of
    orbits.
    """
    reps = [(Fraction(0), j) for j in range(space.n)]
    for table in itertools.product(range(k), repeat=space.n):
        ok = True
        for size in range(2, space.n + 1):
            for subset in itertools.combinations(range(space.n), size):
                w = Fraction(1, size)
                winner = space.combine([(w, reps[j]) for j in subset])[1]
                if table[winner] != min(table[j] for j in subset):
                    ok = False
        if ok:
            yield table


def factors_through(theta, projection, carrier) -> Optional[dict]:
    """The map ``pi`` with ``theta = pi . projection`` on ``carrier``, or None."""
    pi = {}
    for a in carrier:
        key = projection(a)
        if pi.setdefault(key, theta(a)) != theta(a):
            return None
    return pi


# -- witnesses ------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    """A would-be affine map ``(-inf, inf] -> Disc(2)``.

    ``kind`` is ``finite`` (1 on finite values, 0 at inf), ``constant``
    (always ``c``) or ``threshold`` (1 iff the value is at least ``c``).
    """

    kind: str = "finite"
    c: object = 0

    def __post_init__(self):
        if self.kind not in ("finite", "constant", "threshold"):
            raise ValueError(f"unknown candidate kind {self.kind!r}")

    def __call__(self, u):
        if self.kind == "finite":
            return 0 if is_inf(u) else 1
        if self.kind == "constant":
            return self.c
        return int(is_inf(u) or u >= self.c)

    def image_sequence(self, seq):
        """Exact image of a sequence; the divergent one is finite and increasing without bound."""
        if not isinstance(seq, DivergentWitness):
            return seq.map(self)
        prefix = []
        i = 1
        while self.kind == "threshold" and seq[i] < self.c:
            prefix.append(self(seq[i]))
            i += 1
        return FinitePrefix(prefix, self(seq[i]))

    def __str__(self):
        return self.kind if self.kind == "finite" else f"{self.kind}({self.c})"


def _affinity_case(report, gamma, alpha, seq, policy, inputs):
    lhs = gamma(rinf_mix(alpha, seq, policy))
    rhs = Disc(2).mix(alpha, gamma.image_sequence(seq), policy)
    report.add(inputs, lhs, rhs)


def no_affine_to_two_witness(candidate: Candidate = Candidate(), policy: EvalPolicy = DEFAULT_POLICY) -> LawReport:
    """Evaluate both legs of the affinity square for ``candidate`` into Disc(2).

    Besides finite two-point mixtures of a small value grid, the report runs
    the divergent series ``sum 2^-i (i 2^i)`` and, for the threshold
    candidate, the split of ``c`` into ``c - 1`` and ``c + 1``.
    """
    report = LawReport("affine", f"gamma[{candidate}]: rinf -> disc2")
    values = list(DESK_VALUES)
    for alpha in partitions(2, 4):
        for x, y in itertools.product(values, repeat=2):
            pts = [x, y][: alpha.last_index]
            _affinity_case(report, candidate, alpha, points(*pts), policy, {"alpha": alpha, "points": pts})
    seq = DivergentWitness(0)
    _affinity_case(report, candidate, Geometric(Fraction(1, 2)), seq, policy,
                   {"alpha": Geometric(Fraction(1, 2)), "points": seq})
    if candidate.kind == "threshold":
        c = candidate.c
        pts = [c - 1, c + 1]
        _affinity_case(report, candidate, HALF, points(*pts), policy, {"alpha": HALF, "points": pts})
    return report.finish()


def divergence_witness(shifts=(-10, 0, Fraction(7, 2)), policy: EvalPolicy = DEFAULT_POLICY) -> LawReport:
    """``sum 2^-i (i 2^i + u)`` diverges, so its value in (-inf, inf] is inf."""
    report = LawReport("divergence", "geometric(1/2) over i*2^i + u")
    for u in shifts:
        seq = DivergentWitness(u)
        report.add({"alpha": Geometric(Fraction(1, 2)), "points": seq}, rinf_mix(Geometric(Fraction(1, 2)), seq, policy), INF)
    return report.finish()
