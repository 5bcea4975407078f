"""Implemented super convex spaces and closed-form countably affine maps.

Every space exposes ``mix(alpha, points, policy)``, the structural map
sending a partition of one and a sequence of points to their countable
affine sum.  Affine maps into (-inf, inf] are small frozen descriptors that
can be hashed, compared and serialized.

In the ordered disjoint union :class:`SemiDirect` one orbit beats another
under ``orbit_order``; ``rank(k) == 0`` marks the strongest orbit and
``rank(k) == n - 1`` the weakest.
"""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    DEFAULT_POLICY,
    INF,
    EvalPolicy,
    FiniteSupport,
    FinitePrefix,
    PartitionOfOne,
    PointSequence,
    as_rinf,
    close,
    constant,
    finite_terms,
    is_inf,
    rinf_mix,
)
from .errors import NoFamily, NotAffine, Undetermined
from .giry import FinMeasurableSpace, Measure, measure_mix

MAX_WINS = "max-wins"
MIN_WINS = "min-wins"

_SAMPLE_VALUES = tuple(Fraction(k, d) for d in (1, 2, 3) for k in range(-4, 5))


def _is_rinf(a) -> bool:
    try:
        return as_rinf(a) == a and not isinstance(a, bool)
    except (TypeError, ValueError):
        return False


def _sample_rinf(rng: random.Random, inf_rate=0.1):
    return INF if rng.random() < inf_rate else rng.choice(_SAMPLE_VALUES)


class Space:
    """A super convex space with a closed-form structural map."""

    def mix(self, alpha: PartitionOfOne, points: PointSequence, policy: EvalPolicy = DEFAULT_POLICY):
        terms = finite_terms(alpha, points)
        if terms is None:
            raise Undetermined(f"{self}: no closed form for this countable sum")
        return self.combine(terms, policy)

    def combine(self, terms, policy: EvalPolicy = DEFAULT_POLICY):
        """Mix finitely many ``(weight, point)`` pairs with positive weights."""
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    def carrier(self) -> tuple:
        raise NoFamily(f"{self} has no canonical finite carrier; pass one explicitly")

    def sample(self, rng: random.Random):
        raise NotImplementedError


@dataclass(frozen=True)
class RInfSpace(Space):
    def mix(self, alpha, points, policy=DEFAULT_POLICY):
        return rinf_mix(alpha, points, policy)

    def combine(self, terms, policy=DEFAULT_POLICY):
        if any(is_inf(v) for _, v in terms):
            return INF
        return sum((w * v for w, v in terms), 0 * terms[0][0])

    def contains(self, a):
        return _is_rinf(a)

    def sample(self, rng):
        return _sample_rinf(rng)

    def __str__(self):
        return "rinf"


@dataclass(frozen=True)
class Disc(Space):
    """``{0..n-1}``; a mixture returns the least point carrying positive weight."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Disc needs n >= 1")

    def combine(self, terms, policy=DEFAULT_POLICY):
        return min(v for _, v in terms)

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.n

    def carrier(self):
        return tuple(range(self.n))

    def sample(self, rng):
        return rng.randrange(self.n)

    def __str__(self):
        return f"disc{self.n}"


@dataclass(frozen=True)
class SemiDirect(Space):
    """Ordered disjoint union of ``n`` copies of (-inf, inf]; points are ``(r, orbit)``."""

    n: int
    orbit_order: str = MAX_WINS

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("SemiDirect needs n >= 1")
        if self.orbit_order not in (MAX_WINS, MIN_WINS):
            raise ValueError(f"unknown orbit order {self.orbit_order!r}")

    def rank(self, k: int) -> int:
        return self.n - 1 - k if self.orbit_order == MAX_WINS else k

    @property
    def weakest(self) -> int:
        return 0 if self.orbit_order == MAX_WINS else self.n - 1

    def winner(self, orbits) -> int:
        return min(orbits, key=self.rank)

    def combine(self, terms, policy=DEFAULT_POLICY):
        k = self.winner({p[1] for _, p in terms})
        inner = [(w, p[0]) for w, p in terms if p[1] == k]
        mass = sum(w for w, _ in inner)
        r = RInfSpace().combine([(w / mass, r) for w, r in inner], policy)
        return (r, k)

    def contains(self, a):
        return (
            isinstance(a, tuple)
            and len(a) == 2
            and _is_rinf(a[0])
            and isinstance(a[1], int)
            and 0 <= a[1] < self.n
        )

    def sample(self, rng):
        return (_sample_rinf(rng), rng.randrange(self.n))

    def __str__(self):
        return f"semidirect{self.n}-{self.orbit_order.split('-')[0]}"


@dataclass(frozen=True)
class Product(Space):
    factors: tuple

    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise ValueError("Product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    def mix(self, alpha, points, policy=DEFAULT_POLICY):
        return tuple(
            f.mix(alpha, points.map(lambda p, i=i: p[i]), policy)
            for i, f in enumerate(self.factors)
        )

    def combine(self, terms, policy=DEFAULT_POLICY):
        return tuple(
            f.combine([(w, p[i]) for w, p in terms], policy) for i, f in enumerate(self.factors)
        )

    def contains(self, a):
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(f.contains(x) for f, x in zip(self.factors, a))
        )

    def carrier(self):
        return tuple(itertools.product(*(f.carrier() for f in self.factors)))

    def sample(self, rng):
        return tuple(f.sample(rng) for f in self.factors)

    def __str__(self):
        return "product(" + ",".join(map(str, self.factors)) + ")"


@dataclass(frozen=True)
class InfUnitInterval(Space):
    """[0, 1] where a mixture is the infimum of the positively weighted values."""

    def combine(self, terms, policy=DEFAULT_POLICY):
        return min(v for _, v in terms)

    def contains(self, a):
        return _is_rinf(a) and not is_inf(a) and 0 <= a <= 1

    def sample(self, rng):
        return Fraction(rng.randrange(9), 8)

    def __str__(self):
        return "infunit"


@dataclass(frozen=True)
class SJ(Space):
    """Nonnegative vectors of length ``j`` plus one class for every infinite vector."""

    j: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("SJ needs j >= 1")

    def combine(self, terms, policy=DEFAULT_POLICY):
        if any(is_inf(p) for _, p in terms):
            return INF
        coords = tuple(
            RInfSpace().combine([(w, p[c]) for w, p in terms], policy) for c in range(self.j)
        )
        return INF if any(is_inf(x) for x in coords) else coords

    def contains(self, a):
        if is_inf(a):
            return True
        return (
            isinstance(a, tuple)
            and len(a) == self.j
            and all(_is_rinf(x) and not is_inf(x) and x >= 0 for x in a)
        )

    def sample(self, rng):
        if rng.random() < 0.1:
            return INF
        return tuple(Fraction(rng.randrange(9), rng.choice((1, 2, 4))) for _ in range(self.j))

    def __str__(self):
        return f"sj{self.j}"


@dataclass(frozen=True)
class FinDist(Space):
    """Probability measures on a finite measurable space, mixed componentwise."""

    X: FinMeasurableSpace

    def combine(self, terms, policy=DEFAULT_POLICY):
        return measure_mix(FiniteSupport.of(*[w for w, _ in terms]), [P for _, P in terms])

    def contains(self, a):
        return isinstance(a, Measure) and a.space == self.X

    def sample(self, rng):
        d = rng.choice((1, 2, 3, 4))
        cuts = sorted(rng.randint(0, d) for _ in range(len(self.X.carrier) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
        return Measure(self.X, {x: Fraction(p, d) for x, p in zip(self.X.carrier, parts)})

    def __str__(self):
        return f"findist{len(self.X.carrier)}"


def mix(space: Space, alpha: PartitionOfOne, points: PointSequence, policy: EvalPolicy = DEFAULT_POLICY):
    """Structural map of ``space``."""
    return space.mix(alpha, points, policy)


# -- affine maps --------------------------------------------------------------


class AffineMap:
    """Countably affine map; the codomain is (-inf, inf] unless overridden."""

    codomain: Space = RInfSpace()

    def __call__(self, a):
        raise NotImplementedError

    def image_sequence(self, seq: PointSequence) -> PointSequence:
        return seq.map(self)

    def _validate(self):
        bad = spot_check_affine(self)
        if bad is not None:
            raise NotAffine(f"{self!r} is not countably affine", counterexample=bad)


def affinity_gap(m, alpha, pts, policy=DEFAULT_POLICY, domain=None, codomain=None, tol=0):
    """``(lhs, rhs)`` of the affinity square when they differ, else None."""
    domain = domain or m.domain
    codomain = codomain or m.codomain
    lhs = m(domain.mix(alpha, pts, policy))
    image = m.image_sequence(pts) if hasattr(m, "image_sequence") else pts.map(m)
    rhs = codomain.mix(alpha, image, policy)
    if isinstance(codomain, RInfSpace):
        same = close(lhs, rhs, tol)
    else:
        same = lhs == rhs
    return None if same else (lhs, rhs)


def spot_check_affine(m, samples: int = 24, seed: int = 0):
    """Seeded randomized check on finite mixtures; returns a counterexample or None."""
    rng = random.Random(seed)
    for _ in range(samples):
        size = rng.randint(1, 3)
        raw = [rng.randint(0, 3) for _ in range(size)]
        if sum(raw) == 0:
            raw[0] = 1
        alpha = FiniteSupport.of(*[Fraction(x, sum(raw)) for x in raw])
        pts = FinitePrefix([m.domain.sample(rng) for _ in range(size)], m.domain.sample(rng))
        gap = affinity_gap(m, alpha, pts)
        if gap is not None:
            return {"alpha": alpha, "points": pts, "lhs": gap[0], "rhs": gap[1]}
    return None


@dataclass(frozen=True)
class Constant(AffineMap):
    domain: Space
    c: object

    def __post_init__(self):
        object.__setattr__(self, "c", as_rinf(self.c))

    def __call__(self, a):
        return self.c

    def image_sequence(self, seq):
        return constant(self.c)


@dataclass(frozen=True)
class AffineScaleShift(AffineMap):
    """``u -> scale*u + shift`` (``-scale*u + shift`` when reflected); inf is fixed.

    A zero scale gives the constant map ``shift``.
    """

    scale: object = Fraction(1)
    shift: object = Fraction(0)
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scale", as_rinf(self.scale))
        object.__setattr__(self, "shift", as_rinf(self.shift))
        if is_inf(self.scale) or self.scale < 0:
            raise ValueError("scale must be a finite nonnegative number")

    @property
    def domain(self):
        return RInfSpace()

    @property
    def is_constant(self):
        return self.scale == 0 or is_inf(self.shift)

    def __call__(self, u):
        if self.scale == 0:
            return self.shift
        if is_inf(u) or is_inf(self.shift):
            return INF
        return (-1 if self.reflect else 1) * self.scale * u + self.shift

    def image_sequence(self, seq):
        if self.scale == 0:
            return constant(self.shift)
        return seq.affine_image(self.scale, self.shift, self.reflect)


IDENTITY = AffineScaleShift()


@dataclass(frozen=True)
class Threshold(AffineMap):
    """On Disc(n): inf below ``t`` and the constant ``c`` at or above it."""

    n: int
    t: int
    c: object = Fraction(0)

    def __post_init__(self):
        if not 0 <= self.t <= self.n:
            raise ValueError(f"threshold {self.t} outside 0..{self.n}")
        object.__setattr__(self, "c", as_rinf(self.c))
        self._validate()

    @property
    def domain(self):
        return Disc(self.n)

    def __call__(self, a):
        return INF if a < self.t else self.c


@dataclass(frozen=True)
class OrbitThreshold(AffineMap):
    """On SemiDirect: inf on orbits ranked below ``t``, ``inner(r)`` elsewhere.

    ``inner`` may be non-constant only when ``t`` is the weakest rank: a
    finite value on a winning orbit forces every losing orbit to that value.
    """

    space: SemiDirect
    t: int
    inner: AffineMap = IDENTITY

    def __post_init__(self):
        if not 0 <= self.t <= self.space.n:
            raise ValueError(f"rank threshold {self.t} outside 0..{self.space.n}")
        if self.t < self.space.n - 1 and not _is_constant_map(self.inner):
            raise NotAffine(
                f"non-constant inner map at rank {self.t} of {self.space}: orbits it beats "
                "would have to take every one of its values"
            )
        self._validate()

    @property
    def domain(self):
        return self.space

    def __call__(self, a):
        r, k = a
        return INF if self.space.rank(k) < self.t else self.inner(r)


def _is_constant_map(m) -> bool:
    return isinstance(m, Constant) or (isinstance(m, AffineScaleShift) and m.is_constant)


@dataclass(frozen=True)
class EvalSet(AffineMap):
    """``P -> P(U)`` on FinDist(X)."""

    X: FinMeasurableSpace
    U: frozenset

    def __post_init__(self):
        object.__setattr__(self, "U", frozenset(self.U))
        if not self.X.is_measurable(self.U):
            raise ValueError(f"{set(self.U)} is not measurable")

    @property
    def domain(self):
        return FinDist(self.X)

    def __call__(self, P):
        return P(self.U)


@dataclass(frozen=True)
class Projection(AffineMap):
    """``component`` applied to coordinate ``index`` of a product point."""

    space: Product
    index: int
    component: AffineMap

    @property
    def domain(self):
        return self.space

    def __call__(self, a):
        return self.component(a[self.index])


def affine_eval(m: AffineMap, a, policy: EvalPolicy = DEFAULT_POLICY):
    return m(a)


def extend_affine(m: AffineScaleShift, alpha: PartitionOfOne, points: PointSequence, policy: EvalPolicy = DEFAULT_POLICY):
    """Countable extension: limit of ``sum a_i m(p_i)``, inf if none or if some term is inf."""
    if not isinstance(m, AffineScaleShift):
        raise TypeError("extend_affine expects an AffineScaleShift")
    return rinf_mix(alpha, m.image_sequence(points), policy)


_RINF_FAMILY = (
    IDENTITY,
    AffineScaleShift(1, 1),
    AffineScaleShift(2, 0),
    AffineScaleShift(1, 0, reflect=True),
)


@functools.lru_cache(maxsize=None)
def _family(space) -> tuple:
    if isinstance(space, RInfSpace):
        return _RINF_FAMILY
    if isinstance(space, Disc):
        return tuple(Threshold(space.n, t, 0) for t in range(1, space.n))
    if isinstance(space, SemiDirect):
        zero = Constant(RInfSpace(), 0)
        ranks = tuple(OrbitThreshold(space, t, zero) for t in range(1, space.n))
        return ranks + tuple(OrbitThreshold(space, space.n - 1, g) for g in _RINF_FAMILY)
    if isinstance(space, FinDist):
        return tuple(
            EvalSet(space.X, U) for U in sorted(space.X.sigma, key=lambda s: (len(s), sorted(map(repr, s))))
        )
    if isinstance(space, Product):
        return tuple(
            Projection(space, i, m) for i, f in enumerate(space.factors) for m in _family(f)
        )
    raise NoFamily(f"no finite coseparating family is implemented for {space}")


def generator_family(space: Space) -> list:
    """Finite stand-in for all affine maps ``space -> (-inf, inf]``."""
    return list(_family(space))


def separates(family, a, b) -> Optional[AffineMap]:
    """First family member telling ``a`` and ``b`` apart, or None."""
    for m in family:
        if not close(m(a), m(b)):
            return m
    return None


def semidirect_separated(space: SemiDirect, a, b) -> bool:
    """Whether ``a`` and ``b`` can be told apart by any affine map at all.

    Different orbits always can; inside an orbit only the weakest one
    carries non-constant affine maps.
    """
    if a[1] != b[1]:
        return True
    return a[1] == space.weakest and not close(a[0], b[0])


DESK_VALUES = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(2), INF)


def desk_carrier(space: Space, values=DESK_VALUES) -> tuple:
    """A small finite set of points, the full carrier when one exists."""
    try:
        return space.carrier()
    except NoFamily:
        pass
    if isinstance(space, RInfSpace):
        return tuple(values)
    if isinstance(space, SemiDirect):
        return tuple((r, k) for k in range(space.n) for r in values)
    if isinstance(space, Product):
        return tuple(itertools.product(*(desk_carrier(f, values) for f in space.factors)))
    if isinstance(space, FinDist):
        from .sampling import grid_measures

        return tuple(grid_measures(space.X, 2))
    raise NoFamily(f"{space} has no desk-scale carrier")


SPACE_NAMES = {
    "rinf": lambda: RInfSpace(),
    "infunit": lambda: InfUnitInterval(),
}


def space_from_name(name: str) -> Space:
    """Parse built-in names: rinf, infunit, discN, sjN, semidirectN[-max|-min]."""
    name = name.strip().lower()
    if name in SPACE_NAMES:
        return SPACE_NAMES[name]()
    if name.startswith("disc") and name[4:].isdigit():
        return Disc(int(name[4:]))
    if name.startswith("sj") and name[2:].isdigit():
        return SJ(int(name[2:]))
    if name.startswith("semidirect"):
        rest = name[len("semidirect"):]
        n, _, order = rest.partition("-")
        if n.isdigit():
            order = {"": MAX_WINS, "max": MAX_WINS, "min": MIN_WINS}.get(order)
            if order is not None:
                return SemiDirect(int(n), order)
    if name.startswith("findist") and name[7:].isdigit():
        k = int(name[7:])
        return FinDist(FinMeasurableSpace.discrete([f"x{i}" for i in range(k)]))
    raise ValueError(f"unknown space name {name!r}")
