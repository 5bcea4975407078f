"""Barycenter maps, induced convex structure, generalized points and law checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .core import (
    DEFAULT_POLICY,
    INF,
    AlternatingWitness,
    DivergentWitness,
    EvalPolicy,
    FiniteSupport,
    FinitePrefix,
    Geometric,
    PartitionOfOne,
    as_rinf,
    close,
    delta,
    is_inf,
    points,
)
from .errors import (
    GridMiss,
    Inconsistent,
    NoBarycenter,
    NotDeterministic,
    NotWeaklyAveraging,
    NotNatural,
    UnsupportedSubject,
)
from .giry import (
    FinMeasurableSpace,
    Measure,
    MeasurableFn,
    dirac,
    integrate,
    measure_mix,
    meta_measure,
    multiply,
    pushforward,
    sigma_from_affine,
)
from .sampling import DEFAULT_SEED, grid_measures, partitions, random_meta, random_partition
from .spaces import (
    AffineMap,
    AffineScaleShift,
    Constant,
    Disc,
    FinDist,
    RInfSpace,
    Space,
    affinity_gap,
    desk_carrier,
    generator_family,
)


def same(a, b, tol=0) -> bool:
    """Structural equality of points; numeric leaves compared with ``tol``."""
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(same(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, Measure) or isinstance(b, Measure):
        if not (isinstance(a, Measure) and isinstance(b, Measure)) or a.space != b.space:
            return False
        if tol == 0:
            return a == b
        return all(close(a.mass(x), b.mass(x), tol) for x in a.space.carrier)
    try:
        return close(as_rinf(a), as_rinf(b), tol)
    except (TypeError, ValueError):
        return a == b


def _tol_for(*values, policy=DEFAULT_POLICY):
    """Zero tolerance unless a float is involved somewhere."""

    def has_float(v):
        if isinstance(v, float):
            return not is_inf(v)
        if isinstance(v, tuple):
            return any(has_float(x) for x in v)
        if isinstance(v, Measure):
            return any(isinstance(w, float) for _, w in v.weights)
        return False

    return policy.abs_tol if any(has_float(v) for v in values) else 0


# -- barycenters ----------------------------------------------------------------


def integral_of_map(m, P: Measure):
    return integrate(MeasurableFn(P.space, m), P)


def barycenter(space: Space, P: Measure, policy: EvalPolicy = DEFAULT_POLICY, verify: bool = True):
    """The unique point ``a`` with ``m(a) = integral of m dP`` for every generator ``m``.

    The candidate is the closed-form mixture of the support of ``P``; it is
    then checked against the generator family of ``space``.
    """
    candidate = space.combine([(w, x) for x, w in P.weights], policy)
    if verify:
        for m in generator_family(space):
            lhs, rhs = m(candidate), integral_of_map(m, P)
            if not close(lhs, rhs, _tol_for(lhs, rhs, policy=policy)):
                raise NoBarycenter(f"{m!r}: value {lhs} at the candidate but integral {rhs}")
    return candidate


class AlgebraRule:
    """A map ``h`` from measures on ``X`` to labels of ``X``."""

    X: FinMeasurableSpace

    def __call__(self, P: Measure):
        raise NotImplementedError


@dataclass(frozen=True)
class BarycenterOf(AlgebraRule):
    space: Space
    X: FinMeasurableSpace

    @classmethod
    def on(cls, space: Space, carrier=None) -> "BarycenterOf":
        return cls(space, sigma_from_affine(space, desk_carrier(space) if carrier is None else carrier))

    def __call__(self, P):
        return barycenter(self.space, P)

    def __str__(self):
        return f"barycenter({self.space})"


@dataclass(frozen=True)
class Table(AlgebraRule):
    X: FinMeasurableSpace
    entries: tuple
    name: str = "table"

    def __init__(self, X, entries: Mapping, name="table"):
        for label in entries.values():
            if label not in X:
                raise ValueError(f"{label!r} is not a label of X")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "entries", tuple(entries.items()))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_lookup", dict(entries))

    @classmethod
    def tabulate(cls, X, fn: Callable, grid, name="table") -> "Table":
        return cls(X, {P: fn(P) for P in grid}, name)

    def __call__(self, P):
        try:
            return self._lookup[P]
        except KeyError:
            raise GridMiss(f"{self.name} has no entry for {P!r}") from None

    def __str__(self):
        return self.name


def induced_mix(h: AlgebraRule, alpha: PartitionOfOne, xs, policy: EvalPolicy = DEFAULT_POLICY):
    """``sum a_i x_i := h(sum a_i delta_{x_i})``."""
    xs = list(xs)
    return h(measure_mix(alpha, [dirac(h.X, x) for x in xs], policy))


# -- generalized points ---------------------------------------------------------


@dataclass(frozen=True)
class Composite(AffineMap):
    """``outer . inner`` for an outer map of (-inf, inf]."""

    outer: AffineScaleShift
    inner: AffineMap

    @property
    def domain(self):
        return self.inner.domain

    def __call__(self, a):
        return self.outer(self.inner(a))


@dataclass(frozen=True)
class Indicator:
    """``chi_U`` on a finite carrier; measurable but in general not affine."""

    U: frozenset

    def __call__(self, a):
        return Fraction(int(a in self.U))


_PROBES = (AffineScaleShift(1, 1), AffineScaleShift(2, 0), AffineScaleShift(1, 0, reflect=True))


@dataclass(frozen=True)
class GeneralizedPointTable:
    """Values of a functional on a finite family of maps out of ``space``."""

    space: Space
    values: tuple

    def __init__(self, space, values: Mapping):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", tuple((m, as_rinf(v)) for m, v in values.items()))
        self._validate()

    def __getitem__(self, m):
        for k, v in self.values:
            if k == m:
                return v
        raise KeyError(m)

    @property
    def functions(self) -> list:
        return [m for m, _ in self.values]

    def _validate(self):
        table = dict(self.values)
        for m, v in self.values:
            if isinstance(m, Constant) and not close(v, m.c):
                raise NotWeaklyAveraging(f"J(const {m.c}) = {v}", witness=[m])
            if isinstance(m, Composite) and m.inner in table:
                base = table[m.inner]
                if m.outer.reflect and is_inf(base):
                    continue
                if not close(v, m.outer(base), _tol_for(v, base)):
                    raise NotNatural(
                        f"J(g . m) = {v} but g(J(m)) = {m.outer(base)} for g = {m.outer!r}",
                        witness=[m],
                    )

    @classmethod
    def from_functional(cls, space, fn: Callable, family=None, probes: bool = True):
        family = list(generator_family(space) if family is None else family)
        keys = list(family) + [Constant(space, 0), Constant(space, 1)]
        if probes:
            keys += [Composite(g, m) for m in family for g in _PROBES]
        return cls(space, {m: fn(m) for m in keys})

    @classmethod
    def evaluation(cls, space, a) -> "GeneralizedPointTable":
        """``m -> m(a)``."""
        return cls.from_functional(space, lambda m: m(a))

    @classmethod
    def restricted(cls, space, P: Measure) -> "GeneralizedPointTable":
        """``m -> integral of m dP`` on the affine generator family."""
        return cls.from_functional(space, lambda m: integral_of_map(m, P))

    @classmethod
    def on_indicators(cls, space, P: Measure) -> "GeneralizedPointTable":
        """``chi_U -> P(U)`` for every measurable U: the functional before restriction."""
        return cls(space, {Indicator(U): P(U) for U in P.space.sigma})


def resolve_generalized_point(space: Space, J: GeneralizedPointTable, carrier=None):
    """Extract the point ``a`` with ``J = ev_a``.

    On the sigma-algebra the table's maps generate over ``carrier``, the
    preimage ``m^-1(V)`` gets mass 1 iff ``J(m)`` lies in ``V``.  That is a
    probability measure only when every ``J(m)`` is a value of ``m``
    (otherwise :class:`NotDeterministic`), and it is additive only when some
    atom realizes all values at once (otherwise :class:`Inconsistent`).
    Points in one atom are indistinguishable by the table, so the first one
    in carrier order is returned.
    """
    carrier = tuple(desk_carrier(space) if carrier is None else carrier)
    fns = J.functions
    vals = dict(J.values)
    images = {m: [m(a) for a in carrier] for m in fns}
    for m in fns:
        if not any(same(v, vals[m]) for v in images[m]):
            raise NotDeterministic(
                f"mu(A) = 0: J({m!r}) = {vals[m]} is not a value of the map, so mu is not two-valued"
            )
    for i, a in enumerate(carrier):
        if all(same(images[m][i], vals[m]) for m in fns):
            return a
    raise Inconsistent("every J(m) is attained separately but no single point attains them all")


# -- law checking ---------------------------------------------------------------


@dataclass
class Counterexample:
    inputs: dict
    lhs: object
    rhs: object
    gap: object = None

    def key(self):
        return repr(sorted(self.inputs.items(), key=lambda kv: kv[0]))


@dataclass
class LawReport:
    kind: str
    subject: str
    cases: int = 0
    counterexamples: list = field(default_factory=list)
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def add(self, inputs, lhs, rhs, tol=0):
        self.cases += 1
        if not same(lhs, rhs, tol):
            gap = None
            try:
                a, b = as_rinf(lhs), as_rinf(rhs)
                gap = INF if is_inf(a) or is_inf(b) else abs(a - b)
            except (TypeError, ValueError):
                pass
            self.counterexamples.append(Counterexample(dict(inputs), lhs, rhs, gap))

    def finish(self) -> "LawReport":
        self.counterexamples.sort(key=Counterexample.key)
        return self

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.kind} {self.subject}: {self.cases} cases, {len(self.counterexamples)} counterexamples"


def _space_pool(space: Space, carrier, rng, size=8):
    if carrier is not None:
        return list(carrier)
    return [space.sample(rng) for _ in range(size)]


def _draw(pool, rng, k):
    return [rng.choice(pool) for _ in range(k)]


def _law_axioms(space: Space, policy, rng, opts):
    report = LawReport("scvx-axioms", str(space))
    carrier = opts.get("carrier")
    max_len, max_den = opts.get("max_len", 4), opts.get("max_den", 8)
    draws = opts.get("draws", 2)
    for j in range(1, 9):
        for _ in range(draws):
            pts = [space.sample(rng) if carrier is None else rng.choice(carrier) for _ in range(8)]
            seq = FinitePrefix(pts, space.sample(rng) if carrier is None else pts[0])
            report.add({"axiom": "i", "j": j, "points": pts}, space.mix(delta(j), seq, policy), pts[j - 1])

    def axiom_ii(alpha, label):
        n = alpha.last_index
        betas = [random_partition(rng, max_len, max_den) for _ in range(n)]
        width = max(b.last_index for b in betas)
        pts = [space.sample(rng) if carrier is None else rng.choice(carrier) for _ in range(width)]
        seq = points(*pts)
        inner = [space.mix(b, seq, policy) for b in betas]
        lhs = space.mix(alpha, points(*inner), policy)
        combined = {}
        for i, w in alpha.entries:
            for j, bw in betas[i - 1].entries:
                combined[j] = combined.get(j, 0) + w * bw
        rhs = space.mix(FiniteSupport(combined), seq, policy)
        report.add({"axiom": "ii", "case": label, "alpha": alpha, "betas": betas, "points": pts}, lhs, rhs)

    for alpha in partitions(max_len, max_den):
        axiom_ii(alpha, "grid")
    for _ in range(opts.get("random_cases", 1000)):
        axiom_ii(random_partition(rng, max_len, max_den), "random")
    return report


def _law_affine(subject, policy, rng, opts):
    m = subject
    domain = opts.get("domain") or m.domain
    codomain = opts.get("codomain") or getattr(m, "codomain", RInfSpace())
    report = LawReport("affine", repr(m))
    carrier = opts.get("carrier")
    pool = _space_pool(domain, carrier, rng, 12)
    tol = opts.get("tol", 0)
    for alpha in partitions(opts.get("max_len", 3), opts.get("max_den", 4)):
        for _ in range(opts.get("draws", 2)):
            pts = _draw(pool, rng, alpha.last_index)
            seq = points(*pts)
            lhs = m(domain.mix(alpha, seq, policy))
            image = m.image_sequence(seq) if hasattr(m, "image_sequence") else seq.map(m)
            rhs = codomain.mix(alpha, image, policy)
            report.add({"alpha": alpha, "points": pts}, lhs, rhs, tol)
    if isinstance(domain, RInfSpace) and isinstance(codomain, RInfSpace):
        g = Geometric(Fraction(1, 2))
        for u in (-10, 0, Fraction(7, 2)):
            for seq in (DivergentWitness(u), AlternatingWitness(u)):
                gap = affinity_gap(m, g, seq, policy, domain, codomain, tol)
                lhs, rhs = gap if gap else (0, 0)
                report.add({"alpha": g, "points": seq}, lhs, rhs, tol)
    return report


def _law_monad(X: FinMeasurableSpace, policy, rng, opts):
    report = LawReport("monad", f"X{len(X.carrier)}")
    grid = grid_measures(X, opts.get("max_den", 4))
    GX = FinMeasurableSpace.discrete(grid)
    eta = lambda x: dirac(X, x)  # noqa: E731
    for P in grid:
        report.add({"law": "unit-outer", "P": P}, multiply(dirac(GX, P)), P)
        report.add({"law": "unit-inner", "P": P}, multiply(pushforward(eta, P)), P)
    metas = [random_meta(rng, grid, rng.randint(1, 3), 4) for _ in range(opts.get("pool", 40))]
    metas = [meta_measure(M.weights, GX) for M in metas]
    GGX = FinMeasurableSpace.discrete(dict.fromkeys(metas))
    for _ in range(opts.get("samples", 200)):
        Pi3 = meta_measure(random_meta(rng, GGX.carrier, rng.randint(1, 3), 4).weights, GGX)
        lhs = multiply(multiply(Pi3))
        rhs = multiply(pushforward(multiply, Pi3))
        report.add({"law": "associativity", "Pi": Pi3}, lhs, rhs)
    return report


def _law_algebra(h: AlgebraRule, policy, rng, opts):
    report = LawReport("algebra", str(h))
    X = h.X
    for x in X.carrier:
        report.add({"law": "unit", "x": x}, h(dirac(X, x)), x)
    pool = opts.get("pool") or grid_measures(X, opts.get("pool_den", 2))
    samples = opts.get("samples", 300)
    for _ in range(samples):
        Pi = random_meta(rng, pool, rng.randint(1, 3), opts.get("weight_den", 2))
        try:
            lhs = h(multiply(Pi))
            rhs = h(pushforward(h, Pi, X))
        except GridMiss:
            report.skipped += 1
            continue
        report.add({"law": "associativity", "Pi": Pi}, lhs, rhs)
    return report


def _law_naturality(subject, policy, rng, opts):
    m, A, B = subject
    carrier = tuple(opts.get("carrier") or desk_carrier(A))
    report = LawReport("naturality", f"{m!r}: {A} -> {B}")
    XA = FinMeasurableSpace.discrete(carrier)
    for P in grid_measures(XA, opts.get("max_den", 4)):
        lhs = m(barycenter(A, P, policy))
        rhs = barycenter(B, pushforward(m, P), policy)
        report.add({"P": P}, lhs, rhs, _tol_for(lhs, rhs, policy=policy))
    return report


def _law_triangles(X: FinMeasurableSpace, policy, rng, opts):
    report = LawReport("triangles", f"X{len(X.carrier)}")
    A = FinDist(X)
    grid = grid_measures(X, opts.get("max_den", 4))
    eta = lambda x: dirac(X, x)  # noqa: E731
    for P in grid:
        report.add({"triangle": "eps.P(eta)", "P": P}, barycenter(A, pushforward(eta, P), policy), P)
    GX = FinMeasurableSpace.discrete(grid)
    for a in grid:
        report.add({"triangle": "eps.eta", "space": str(A), "a": a}, barycenter(A, dirac(GX, a), policy), a)
    D = Disc(len(X.carrier))
    XD = FinMeasurableSpace.discrete(D.carrier())
    for a in D.carrier():
        report.add({"triangle": "eps.eta", "space": str(D), "a": a}, barycenter(D, dirac(XD, a), policy), a)
    return report


def _law_roundtrip(space: Space, policy, rng, opts):
    carrier = tuple(opts.get("carrier") or desk_carrier(space))
    h = BarycenterOf.on(space, carrier)
    report = LawReport("roundtrip", str(space))
    for alpha in partitions(opts.get("max_len", 4), opts.get("max_den", 8)):
        n = alpha.last_index
        for _ in range(opts.get("draws", 2)):
            xs = _draw(list(carrier), rng, n)
            lhs = induced_mix(h, alpha, xs, policy)
            rhs = space.mix(alpha, points(*xs), policy)
            report.add({"alpha": alpha, "xs": xs}, lhs, rhs, _tol_for(lhs, rhs, policy=policy))
    return report


LAW_KINDS = {
    "scvx-axioms": (_law_axioms, Space),
    "affine": (_law_affine, object),
    "monad": (_law_monad, FinMeasurableSpace),
    "algebra": (_law_algebra, AlgebraRule),
    "naturality": (_law_naturality, tuple),
    "triangles": (_law_triangles, FinMeasurableSpace),
    "roundtrip": (_law_roundtrip, Space),
}


def check_laws(kind: str, subject, policy: EvalPolicy = DEFAULT_POLICY, seed: int = DEFAULT_SEED, **opts) -> LawReport:
    """Evaluate both legs of every sampled instance of a commutative diagram.

    ``subject`` per kind: a space (scvx-axioms, roundtrip), an affine map
    (affine), a finite measurable space (monad, triangles), an algebra rule
    (algebra) or a triple ``(map, A, B)`` (naturality).
    """
    if kind not in LAW_KINDS:
        raise UnsupportedSubject(f"unknown law kind {kind!r}")
    fn, expected = LAW_KINDS[kind]
    if not isinstance(subject, expected) or (kind == "affine" and not callable(subject)):
        raise UnsupportedSubject(f"{kind} cannot be checked on {subject!r}")
    return fn(subject, policy, random.Random(seed), opts).finish()
