"""Finite measurable spaces and the Giry monad at finite scale.

A :class:`Measure` stores a weight per carrier label of finite support; the
sigma-algebra decides which sets may be evaluated.  Measures on measures
(meta-measures) are ordinary :class:`Measure` objects whose labels are
measures; :func:`meta_measure` builds them.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .core import (
    DEFAULT_POLICY,
    FLOAT_SUM_TOL,
    INF,
    EvalPolicy,
    FiniteSupport,
    PartitionOfOne,
    PointSequence,
    as_rinf,
    as_scalar,
    finite_terms,
    is_inf,
)
from .errors import (
    NegativeMass,
    NotAdditive,
    NotMeasurable,
    NotMeasurableSet,
    NotSigmaAlgebra,
    NotWeaklyAveraging,
    OutOfRange,
    SpaceMismatch,
    UnknownAtom,
)


@dataclass(frozen=True, eq=False)
class FinMeasurableSpace:
    """A finite carrier together with the atoms of its sigma-algebra."""

    carrier: tuple
    atoms: frozenset

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinMeasurableSpace):
            return NotImplemented
        return hash(self) == hash(other) and self.carrier == other.carrier and self.atoms == other.atoms

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.carrier, self.atoms))
            self.__dict__["_hash"] = h
        return h

    @functools.cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.carrier)}

    def __contains__(self, x):
        return x in self.index

    def __post_init__(self):
        if len(set(self.carrier)) != len(self.carrier):
            raise ValueError("carrier labels must be distinct")
        covered = [x for atom in self.atoms for x in atom]
        if len(covered) != len(self.carrier) or set(covered) != set(self.carrier) or any(
            not atom for atom in self.atoms
        ):
            raise NotSigmaAlgebra("atoms must partition the carrier")

    @classmethod
    def discrete(cls, carrier: Iterable[Hashable]) -> "FinMeasurableSpace":
        carrier = tuple(carrier)
        return cls(carrier, frozenset(frozenset([x]) for x in carrier))

    @classmethod
    def trivial(cls, carrier: Iterable[Hashable]) -> "FinMeasurableSpace":
        carrier = tuple(carrier)
        return cls(carrier, frozenset([frozenset(carrier)]) if carrier else frozenset())

    @classmethod
    def from_sets(cls, carrier, sets) -> "FinMeasurableSpace":
        """Validate that ``sets`` is a sigma-algebra on ``carrier``."""
        carrier = tuple(carrier)
        full = frozenset(carrier)
        family = {frozenset(s) for s in sets}
        for s in family:
            if not s <= full:
                raise NotSigmaAlgebra(f"{set(s)} is not a subset of the carrier")
        if frozenset() not in family or full not in family:
            raise NotSigmaAlgebra("a sigma-algebra contains the empty set and the carrier")
        for s in family:
            if full - s not in family:
                raise NotSigmaAlgebra(f"complement of {set(s)} is missing")
        for s, t in itertools.combinations(family, 2):
            if s | t not in family:
                raise NotSigmaAlgebra(f"union of {set(s)} and {set(t)} is missing")
        return cls.generated_by(carrier, family)

    @classmethod
    def generated_by(cls, carrier, sets) -> "FinMeasurableSpace":
        """Smallest sigma-algebra on ``carrier`` containing every set in ``sets``."""
        carrier = tuple(carrier)
        sets = [frozenset(s) for s in sets]
        signature = {x: tuple(x in s for s in sets) for x in carrier}
        return cls.from_partition(carrier, signature.__getitem__)

    @classmethod
    def from_partition(cls, carrier, key: Callable) -> "FinMeasurableSpace":
        """Atoms are the classes of equal ``key`` value."""
        carrier = tuple(carrier)
        classes: dict = {}
        for x in carrier:
            classes.setdefault(key(x), []).append(x)
        return cls(carrier, frozenset(frozenset(c) for c in classes.values()))

    def atom_of(self, x) -> frozenset:
        for atom in self.atoms:
            if x in atom:
                return atom
        raise UnknownAtom(f"{x!r} is not in the carrier")

    def ordered_atoms(self) -> list:
        """Atoms sorted by the carrier position of their first element."""
        pos = {x: i for i, x in enumerate(self.carrier)}
        return sorted(self.atoms, key=lambda a: min(pos[x] for x in a))

    def is_measurable(self, s) -> bool:
        s = frozenset(s)
        return all(atom <= s or not (atom & s) for atom in self.atoms) and s <= frozenset(
            self.carrier
        )

    @property
    def sigma(self) -> frozenset:
        """Every measurable set (2 ** number of atoms of them)."""
        atoms = self.ordered_atoms()
        out = set()
        for mask in itertools.product((False, True), repeat=len(atoms)):
            out.add(frozenset().union(*[a for a, keep in zip(atoms, mask) if keep]))
        return frozenset(out)

    @property
    def is_discrete(self) -> bool:
        return all(len(a) == 1 for a in self.atoms)


def _check_total(weights):
    total = sum(weights)
    if all(isinstance(w, Fraction) for w in weights):
        if total != 1:
            raise ValueError(f"measure has total mass {total}, not 1")
    elif abs(total - 1) > FLOAT_SUM_TOL:
        raise ValueError(f"measure has total mass {total}, not 1 within {FLOAT_SUM_TOL}")


@dataclass(frozen=True, eq=False)
class Measure:
    """Finitely supported probability measure on a finite measurable space."""

    space: FinMeasurableSpace
    weights: tuple = field(default=())

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Measure):
            return NotImplemented
        return hash(self) == hash(other) and self.weights == other.weights and self.space == other.space

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.space, self.weights))
            self.__dict__["_hash"] = h
        return h

    def __init__(self, space: FinMeasurableSpace, weights):
        if isinstance(weights, Mapping):
            items = list(weights.items())
        else:
            items = list(weights)
        merged: dict = {}
        for x, w in items:
            if x not in space:
                raise UnknownAtom(f"{x!r} is not in the carrier")
            w = as_scalar(w)
            if w < 0:
                raise ValueError(f"negative weight at {x!r}")
            merged[x] = merged.get(x, 0) + w
        _check_total(list(merged.values()) or [Fraction(0)])
        index = space.index
        ordered = tuple(
            sorted(((x, w) for x, w in merged.items() if w != 0), key=lambda xw: index[xw[0]])
        )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", ordered)

    def __call__(self, s) -> object:
        s = frozenset(s)
        if not self.space.is_measurable(s):
            raise NotMeasurableSet(f"{set(s)} is not in the sigma-algebra")
        return sum((w for x, w in self.weights if x in s), Fraction(0))

    def mass(self, x) -> object:
        for y, w in self.weights:
            if y == x:
                return w
        return Fraction(0)

    @property
    def support(self) -> list:
        return [x for x, _ in self.weights]

    def equivalent(self, other: "Measure") -> bool:
        """Equal as set functions on the sigma-algebra."""
        return self.space == other.space and all(
            self(a) == other(a) for a in self.space.atoms
        )

    def __repr__(self):
        body = ", ".join(f"{x!r}: {w}" for x, w in self.weights)
        return f"Measure({{{body}}})"


MetaMeasure = Measure


def dirac(space: FinMeasurableSpace, x) -> Measure:
    if x not in space:
        raise UnknownAtom(f"{x!r} is not in the carrier")
    return Measure(space, {x: Fraction(1)})


def meta_measure(pairs: Iterable, space: Optional[FinMeasurableSpace] = None) -> Measure:
    """A measure whose labels are measures, on the discrete space of its support."""
    pairs = [(p, as_scalar(w)) for p, w in pairs]
    if space is None:
        carrier = list(dict.fromkeys(p for p, _ in pairs))
        space = FinMeasurableSpace.discrete(carrier)
    return Measure(space, pairs)


def _measure_list(alpha: PartitionOfOne, Ps, policy: EvalPolicy):
    if isinstance(Ps, PointSequence):
        terms = finite_terms(alpha, Ps)
        if terms is None:
            Ps = [Ps[i] for i in range(1, policy.max_terms + 1)]
        else:
            return terms
    Ps = list(Ps)
    if isinstance(alpha, FiniteSupport):
        if alpha.last_index > len(Ps):
            raise IndexError(f"partition index {alpha.last_index} exceeds {len(Ps)} measures")
        return [(w, Ps[i - 1]) for i, w in alpha.entries if w > 0]
    # truncate and hand the exact tail mass to the last listed measure
    n = min(len(Ps), policy.max_terms)
    terms = [(alpha.weight(i), Ps[i - 1]) for i in range(1, n)]
    terms.append((alpha.tail_mass(n - 1), Ps[n - 1]))
    return [(w, P) for w, P in terms if w > 0]


def measure_mix(alpha: PartitionOfOne, Ps, policy: EvalPolicy = DEFAULT_POLICY) -> Measure:
    """Componentwise mixture ``(sum a_i P_i)(U) = sum a_i P_i(U)``."""
    terms = _measure_list(alpha, Ps, policy)
    space = terms[0][1].space
    for _, P in terms:
        if P.space != space:
            raise SpaceMismatch("measures live on different spaces")
    acc: dict = {}
    for w, P in terms:
        for x, px in P.weights:
            acc[x] = acc.get(x, 0) + w * px
    return Measure(space, acc)


def multiply(Pi: Measure) -> Measure:
    """Monad multiplication: flatten a measure on measures."""
    return measure_mix(FiniteSupport.of(*[w for _, w in Pi.weights]), [P for P, _ in Pi.weights])


def pushforward(f, P: Measure, codomain: Optional[FinMeasurableSpace] = None) -> Measure:
    """Image measure ``V -> P(f^-1 V)``.

    ``f`` is a mapping or callable defined on the whole carrier of ``P``.
    Without ``codomain`` the discrete space on the image is used.
    """
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    X = P.space
    image = {x: fn(x) for x in X.carrier}
    if codomain is None:
        codomain = FinMeasurableSpace.discrete(dict.fromkeys(image.values()))
    for V in codomain.ordered_atoms():
        pre = frozenset(x for x in X.carrier if image[x] in V)
        if not X.is_measurable(pre):
            raise NotMeasurable(f"preimage of {set(V)} is not measurable", witness=V)
    acc: dict = {}
    for x, w in P.weights:
        y = image[x]
        if y not in codomain:
            raise UnknownAtom(f"{y!r} is not in the codomain carrier")
        acc[y] = acc.get(y, 0) + w
    return Measure(codomain, acc)


@dataclass(frozen=True)
class MeasurableFn:
    """A function from carrier labels into (-inf, inf], constant on atoms."""

    space: FinMeasurableSpace
    table: tuple

    def __init__(self, space: FinMeasurableSpace, table):
        if callable(table) and not isinstance(table, Mapping):
            table = {x: table(x) for x in space.carrier}
        values = {x: as_rinf(table[x]) for x in space.carrier}
        for atom in space.atoms:
            if len({values[x] for x in atom}) > 1:
                raise NotMeasurable("function is not constant on an atom", witness=atom)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "table", tuple((x, values[x]) for x in space.carrier))
        object.__setattr__(self, "_values", values)

    def __call__(self, x):
        try:
            return self._values[x]
        except KeyError:
            raise UnknownAtom(f"{x!r} is not in the carrier") from None

    @classmethod
    def indicator(cls, space, U) -> "MeasurableFn":
        U = frozenset(U)
        if not space.is_measurable(U):
            raise NotMeasurableSet(f"{set(U)} is not in the sigma-algebra")
        return cls(space, {x: Fraction(int(x in U)) for x in space.carrier})


def integrate(f: MeasurableFn, P: Measure):
    """``sum f(x) P({x})`` with inf absorbing on positive mass and 0 * inf = 0."""
    if f.space != P.space:
        raise SpaceMismatch("function and measure live on different spaces")
    total = Fraction(0)
    for x, w in P.weights:
        v = f(x)
        if is_inf(v):
            return INF
        total = total + w * v
    return total


# -- the phi isomorphism ------------------------------------------------------


def phi(P: Measure) -> dict:
    """Functional on characteristic functions: ``U -> P(U)`` for U in sigma."""
    return {U: P(U) for U in P.space.sigma}


def functional(P: Measure) -> Callable:
    """Full functional ``f -> integral of f dP`` on measurable functions."""
    return lambda f: integrate(f, P)


def phi_inv(space: FinMeasurableSpace, J: Mapping) -> Measure:
    """Rebuild a measure from its values on characteristic functions.

    Raises :class:`NotWeaklyAveraging` unless J(empty) = 0 and J(carrier) = 1,
    :class:`NegativeMass` for a negative value and :class:`NotAdditive` when
    J fails additivity on a pair of disjoint measurable sets.
    """
    J = {frozenset(U): v for U, v in J.items()}
    sigma = space.sigma
    missing = [U for U in sigma if U not in J]
    if missing:
        raise NotAdditive(f"functional is undefined on {set(missing[0])}", witness=[missing[0]])
    empty, full = frozenset(), frozenset(space.carrier)
    if J[empty] != 0:
        raise NotWeaklyAveraging(f"J(chi_empty) = {J[empty]}, expected 0", witness=[empty])
    if J[full] != 1:
        raise NotWeaklyAveraging(f"J(chi_X) = {J[full]}, expected 1", witness=[full])
    for U in sorted(sigma, key=lambda s: sorted(map(repr, s))):
        if J[U] < 0:
            raise NegativeMass(f"J(chi_U) = {J[U]} < 0", witness=[U])
    for U, V in itertools.combinations(sorted(sigma, key=lambda s: sorted(map(repr, s))), 2):
        if U & V:
            continue
        if J[U | V] != J[U] + J[V]:
            raise NotAdditive(
                f"J(U u V) = {J[U | V]} but J(U) + J(V) = {J[U] + J[V]}", witness=[U, V]
            )
    pos = {x: i for i, x in enumerate(space.carrier)}
    # each atom's mass goes to its first carrier element
    return Measure(
        space, {min(a, key=pos.__getitem__): J[a] for a in space.atoms}
    )


# -- dyadic simple functions ---------------------------------------------------


@dataclass(frozen=True)
class SimpleFunction:
    """``psi_n = sum k/2^n chi(cell_k)``; ``cells`` maps k to the labels in E_{n,k}."""

    level: int
    space: FinMeasurableSpace
    cells: tuple

    def coefficient(self, x) -> Fraction:
        for k, labels in self.cells:
            if x in labels:
                return Fraction(k, 2 ** self.level)
        raise UnknownAtom(f"{x!r} is not in the carrier")

    def as_function(self) -> MeasurableFn:
        return MeasurableFn(self.space, self.coefficient)


def simple_approx(m: MeasurableFn, n: int) -> SimpleFunction:
    """Dyadic lower approximation of ``m`` with values in [0, 1)."""
    if n < 0:
        raise ValueError("level must be >= 0")
    cells: dict = {}
    for x, v in m.table:
        if is_inf(v) or not 0 <= v < 1:
            raise OutOfRange(f"m({x!r}) = {v} is outside [0, 1)")
        k = int(Fraction(v) * 2 ** n) if isinstance(v, float) else int(v * 2 ** n)
        cells.setdefault(k, []).append(x)
    ordered = tuple((k, frozenset(cells[k])) for k in sorted(cells))
    return SimpleFunction(n, m.space, ordered)


def rescale_to_unit(m: MeasurableFn):
    """Affinely map a finite function into [0, 1).

    Returns ``(scaled, scale, shift)`` with ``scaled = scale * m + shift``.
    """
    vals = [v for _, v in m.table]
    if any(is_inf(v) for v in vals):
        raise OutOfRange("function takes the value inf")
    lo, hi = min(vals), max(vals)
    scale = 1 / (2 * (hi - lo)) if hi > lo else Fraction(1)
    shift = -lo * scale
    scaled = MeasurableFn(m.space, {x: v * scale + shift for x, v in m.table})
    return scaled, scale, shift


# -- sigma-algebras generated by affine maps ------------------------------------


def sigma_from_affine(space, carrier: Optional[Sequence] = None, family=None) -> FinMeasurableSpace:
    """Initial sigma-algebra on a finite carrier for a family of affine maps.

    Preimages of rational intervals and {inf} separate exactly the points
    whose value vectors differ, so the atoms are the level sets of the family.
    """
    from .spaces import generator_family

    if carrier is None:
        carrier = space.carrier()
    carrier = tuple(carrier)
    for a in carrier:
        if not space.contains(a):
            raise UnknownAtom(f"{a!r} is not a point of {space}")
    if family is None:
        family = generator_family(space)
    family = list(family)
    return FinMeasurableSpace.from_partition(
        carrier, lambda a: tuple(as_rinf(m(a)) for m in family)
    )
