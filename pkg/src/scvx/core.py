"""Scalars, partitions of one, the extended real line and countable sums.

Coefficients are exact :class:`fractions.Fraction` by default; ``float`` is
accepted everywhere as the double-precision mode. The extended real line
(-inf, inf] is represented by ordinary scalars plus the single absorbing
point :data:`INF` (``math.inf``). Negative infinity and NaN are rejected.

All indices of partitions and sequences start at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import Undetermined

INF = math.inf

Scalar = Union[Fraction, float]
RInf = Union[Fraction, float]

FLOAT_SUM_TOL = 1e-12


def is_inf(x) -> bool:
    return isinstance(x, float) and x == INF


def as_scalar(x) -> Scalar:
    """Coerce ``x`` to a finite scalar (ints and strings become fractions)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"scalar must be finite, got {x!r}")
        return x
    raise TypeError(f"not a scalar: {x!r}")


def as_rinf(x) -> RInf:
    """Coerce ``x`` to an element of (-inf, inf]."""
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "+inf"):
        return INF
    if isinstance(x, float):
        if math.isnan(x) or x == -math.inf:
            raise ValueError(f"{x!r} is not in (-inf, inf]")
        return x
    return as_scalar(x)


def scale_rinf(lam, u) -> RInf:
    """``lam * u`` for ``lam >= 0`` with the convention ``0 * inf = 0``."""
    if is_inf(u):
        return 0 * lam if lam == 0 else INF
    return lam * u


def close(a, b, tol=0) -> bool:
    """Equality on (-inf, inf]; exact when ``tol == 0``."""
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    if tol == 0:
        return a == b
    return abs(a - b) <= tol


@dataclass(frozen=True)
class EvalPolicy:
    """Truncation budget for countable sums that lack a closed form."""

    max_terms: int = 64
    abs_tol: Scalar = 1e-9
    divergence_threshold: Scalar = 1e12

    def __post_init__(self):
        if self.max_terms < 8:
            raise ValueError("max_terms must be >= 8")
        if not self.abs_tol > 0 or not self.divergence_threshold > 0:
            raise ValueError("abs_tol and divergence_threshold must be positive")


DEFAULT_POLICY = EvalPolicy()


# -- partitions of one -------------------------------------------------------


class PartitionOfOne:
    """A countable family of nonnegative weights summing to one."""

    def weight(self, i: int) -> Scalar:
        raise NotImplementedError

    def tail_mass(self, n: int) -> Scalar:
        raise NotImplementedError

    def weights(self, n: int) -> list:
        return [self.weight(i) for i in range(1, n + 1)]


@dataclass(frozen=True)
class FiniteSupport(PartitionOfOne):
    """Weights on finitely many indices; ``entries`` holds ``(index, weight)``."""

    entries: tuple

    def __init__(self, weights: Union[Mapping[int, object], Iterable]):
        if isinstance(weights, Mapping):
            items = weights.items()
        else:
            items = weights
        merged: dict = {}
        for i, w in items:
            if not isinstance(i, int) or isinstance(i, bool) or i < 1:
                raise ValueError(f"partition indices start at 1, got {i!r}")
            w = as_scalar(w)
            if w < 0:
                raise ValueError(f"negative weight {w} at index {i}")
            merged[i] = merged.get(i, 0) + w
        if not merged:
            raise ValueError("empty partition")
        total = sum(merged.values())
        exact = all(isinstance(w, Fraction) for w in merged.values())
        if exact and total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        if not exact and abs(total - 1) > FLOAT_SUM_TOL:
            raise ValueError(f"weights sum to {total}, not 1 within {FLOAT_SUM_TOL}")
        object.__setattr__(self, "entries", tuple(sorted(merged.items())))

    @classmethod
    def of(cls, *weights) -> "FiniteSupport":
        """Weights listed for indices 1, 2, ..."""
        return cls(list(enumerate(weights, start=1)))

    @property
    def last_index(self) -> int:
        return self.entries[-1][0]

    def weight(self, i: int) -> Scalar:
        for j, w in self.entries:
            if j == i:
                return w
        return Fraction(0)

    def support(self) -> list:
        return [i for i, w in self.entries if w > 0]

    def tail_mass(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("n must be >= 0")
        rest = [w for i, w in self.entries if i > n]
        return sum(rest) if rest else Fraction(0)


def delta(j: int) -> FiniteSupport:
    return FiniteSupport({j: 1})


@dataclass(frozen=True)
class Geometric(PartitionOfOne):
    """``weight_i = (1 - q) q^(i-1)`` for ``i >= 1``."""

    ratio: Scalar

    def __post_init__(self):
        q = as_scalar(self.ratio)
        if not 0 < q < 1:
            raise ValueError(f"geometric ratio must lie in (0, 1), got {q}")
        object.__setattr__(self, "ratio", q)

    def weight(self, i: int) -> Scalar:
        if i < 1:
            return Fraction(0)
        q = self.ratio
        return (1 - q) * q ** (i - 1)

    def tail_mass(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("n must be >= 0")
        return self.ratio ** n


def tail_mass(alpha: PartitionOfOne, n: int) -> Scalar:
    """Mass remaining after the first ``n`` indices."""
    return alpha.tail_mass(n)


# -- sequences ---------------------------------------------------------------


class PointSequence:
    """A total sequence indexed from 1."""

    def __getitem__(self, i: int):
        raise NotImplementedError

    def map(self, fn: Callable) -> "PointSequence":
        return LazyMapped(self, fn)

    def geometric_sum(self, q):
        """Closed-form value of sum (1-q) q^(i-1) v_i, or None if unknown."""
        return None

    def affine_image(self, scale, shift, reflect=False) -> "PointSequence":
        """The sequence ``u -> +/-scale*u + shift`` applied termwise (scale > 0)."""
        return AffineImage(self, scale, shift, reflect)


def _check_index(i):
    if i < 1:
        raise IndexError("sequences are indexed from 1")


@dataclass(frozen=True)
class FinitePrefix(PointSequence):
    """``prefix[0], prefix[1], ...`` followed by ``tail`` forever."""

    prefix: tuple
    tail: object

    def __init__(self, prefix: Sequence, tail):
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail", tail)

    def __getitem__(self, i):
        _check_index(i)
        return self.prefix[i - 1] if i <= len(self.prefix) else self.tail

    def map(self, fn):
        return FinitePrefix([fn(v) for v in self.prefix], fn(self.tail))

    def affine_image(self, scale, shift, reflect=False):
        sign = -1 if reflect else 1

        def f(u):
            return INF if is_inf(u) or is_inf(shift) else sign * scale * u + shift

        return self.map(f)


def constant(value) -> FinitePrefix:
    return FinitePrefix((), value)


def points(*values, tail=None) -> FinitePrefix:
    """Sequence listing ``values``; the last one repeats unless ``tail`` is given."""
    if not values:
        raise ValueError("at least one value required")
    if tail is None:
        return FinitePrefix(values[:-1], values[-1])
    return FinitePrefix(values, tail)


@dataclass(frozen=True)
class DivergentWitness(PointSequence):
    """``v_i = i * 2^i + u``."""

    u: Scalar

    def __post_init__(self):
        object.__setattr__(self, "u", as_scalar(self.u))

    def __getitem__(self, i):
        _check_index(i)
        return i * 2 ** i + self.u

    def geometric_sum(self, q):
        # sum (1-q) q^(i-1) i 2^i = (1-q)/q * sum i (2q)^i, finite iff 2q < 1
        if 2 * q >= 1:
            return INF
        return 2 * (1 - q) / (1 - 2 * q) ** 2 + self.u


@dataclass(frozen=True)
class AlternatingWitness(PointSequence):
    """``v_i = (-2)^i * c``."""

    c: Scalar

    def __post_init__(self):
        object.__setattr__(self, "c", as_scalar(self.c))

    def __getitem__(self, i):
        _check_index(i)
        return (-2) ** i * self.c

    def geometric_sum(self, q):
        if self.c == 0:
            return 0 * self.c
        # terms do not tend to zero when 2q >= 1: partial sums have no limit
        if 2 * q >= 1:
            return INF
        return -2 * (1 - q) * self.c / (1 + 2 * q)


@dataclass(frozen=True)
class AffineImage(PointSequence):
    base: PointSequence
    scale: Scalar
    shift: RInf
    reflect: bool = False

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("AffineImage needs a positive scale")

    def _f(self, u):
        if is_inf(u) or is_inf(self.shift):
            return INF
        return (-1 if self.reflect else 1) * self.scale * u + self.shift

    def __getitem__(self, i):
        return self._f(self.base[i])

    def geometric_sum(self, q):
        s = self.base.geometric_sum(q)
        return None if s is None else self._f(s)

    def affine_image(self, scale, shift, reflect=False):
        # compose g(f(u)) = s2*(s1*u + c1) + c2 with signs tracked
        sign = -1 if reflect else 1
        if is_inf(self.shift) or is_inf(shift):
            new_shift = INF
        else:
            new_shift = sign * scale * self.shift + shift
        return AffineImage(self.base, scale * self.scale, new_shift, self.reflect != reflect)


@dataclass(frozen=True)
class LazyMapped(PointSequence):
    """``fn`` applied termwise; no closed form is known for its sums."""

    base: PointSequence
    fn: Callable

    def __getitem__(self, i):
        return self.fn(self.base[i])


def finite_terms(alpha: PartitionOfOne, seq: PointSequence):
    """Collapse ``(alpha, seq)`` to finitely many ``(weight, value)`` pairs.

    Only positive weights are kept. Returns None when no exact finite
    description exists (a geometric partition over a non-eventually-constant
    sequence).
    """
    if isinstance(alpha, FiniteSupport):
        return [(w, seq[i]) for i, w in alpha.entries if w > 0]
    if isinstance(seq, FinitePrefix):
        k = len(seq.prefix)
        terms = [(alpha.weight(i), seq.prefix[i - 1]) for i in range(1, k + 1)]
        terms.append((alpha.tail_mass(k), seq.tail))
        return [(w, v) for w, v in terms if w > 0]
    return None


def rinf_mix(alpha: PartitionOfOne, values: PointSequence, policy: EvalPolicy = DEFAULT_POLICY) -> RInf:
    """Countable affine sum in (-inf, inf]: the limit of partial sums, else inf."""
    terms = finite_terms(alpha, values)
    if terms is not None:
        vals = [as_rinf(v) for _, v in terms]
        if any(is_inf(v) for v in vals):
            return INF
        return sum((w * v for (w, _), v in zip(terms, vals)), 0 * terms[0][0])
    if isinstance(alpha, Geometric):
        closed = values.geometric_sum(alpha.ratio)
        if closed is not None:
            return closed
    return _partial_sum_verdict(alpha, values, policy)


def _partial_sum_verdict(alpha, values, policy):
    sums = []
    s = 0
    for i in range(1, policy.max_terms + 1):
        w = alpha.weight(i)
        if w == 0:
            sums.append(s)
            continue
        v = as_rinf(values[i])
        if is_inf(v):
            return INF
        s = s + w * v
        sums.append(s)
    window = sums[-8:]
    steps = [b - a for a, b in zip(window, window[1:])]
    if abs(sums[-1]) > policy.divergence_threshold and (
        all(d >= 0 for d in steps) or all(d <= 0 for d in steps)
    ):
        return INF
    rest = alpha.tail_mass(policy.max_terms)
    if all(abs(d) <= policy.abs_tol for d in steps) and rest <= policy.abs_tol:
        return sums[-1]
    raise Undetermined(
        f"no certified verdict after {policy.max_terms} terms (last partial sum {float(sums[-1]):.6g})"
    )
