import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import finite_partitions, rationals, ratios
from scvx.core import (
    DEFAULT_POLICY,
    INF,
    AlternatingWitness,
    DivergentWitness,
    EvalPolicy,
    FiniteSupport,
    Geometric,
    LazyMapped,
    as_rinf,
    constant,
    delta,
    points,
    rinf_mix,
    tail_mass,
)
from scvx.errors import Undetermined

# Sums of sum_i (1-q) q^(i-1) v_i, computed symbolically with sympy and frozen.
DIVERGENT_ORACLE = {
    (F(1, 4), F(0)): F(6),
    (F(1, 4), F(7, 2)): F(19, 2),
    (F(1, 4), F(-10)): F(-4),
    (F(1, 3), F(0)): F(12),
    (F(1, 3), F(7, 2)): F(31, 2),
    (F(1, 3), F(-10)): F(2),
    (F(2, 5), F(0)): F(30),
    (F(2, 5), F(7, 2)): F(67, 2),
    (F(2, 5), F(-10)): F(20),
}
ALTERNATING_ORACLE = {
    (F(1, 4), F(1)): F(-1),
    (F(1, 4), F(-3, 2)): F(3, 2),
    (F(1, 3), F(1)): F(-4, 5),
    (F(1, 3), F(-3, 2)): F(6, 5),
    (F(2, 5), F(1)): F(-2, 3),
    (F(2, 5), F(-3, 2)): F(1),
}


class TestPartitions:
    def test_exact_sum_required(self):
        with pytest.raises(ValueError):
            FiniteSupport.of(F(1, 2), F(1, 3))

    def test_float_sum_tolerance(self):
        FiniteSupport.of(0.1, 0.2, 0.7)
        with pytest.raises(ValueError):
            FiniteSupport.of(0.5, 0.5 + 1e-9)

    def test_rejects_negative_and_zero_index(self):
        with pytest.raises(ValueError):
            FiniteSupport.of(F(3, 2), F(-1, 2))
        with pytest.raises(ValueError):
            FiniteSupport({0: 1})

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            FiniteSupport.of(math.nan, 1.0)

    @pytest.mark.parametrize("q", [F(0), F(1), F(3, 2)])
    def test_geometric_ratio_range(self, q):
        with pytest.raises(ValueError):
            Geometric(q)

    def test_tail_mass_examples(self):
        assert tail_mass(Geometric(F(1, 2)), 3) == F(1, 8)
        assert tail_mass(FiniteSupport({1: 1}), 1) == 0
        assert tail_mass(Geometric(F(1, 2)), 0) == 1

    @given(ratios, st.integers(0, 30))
    def test_geometric_prefix_plus_tail_is_one(self, q, n):
        g = Geometric(q)
        assert sum(g.weights(n)) + g.tail_mass(n) == 1

    @given(finite_partitions(), st.integers(0, 6))
    def test_finite_prefix_plus_tail_is_one(self, ws, n):
        a = FiniteSupport.of(*ws)
        assert sum(a.weights(n)) + a.tail_mass(n) == 1


class TestRInfMix:
    def test_divergent_witness_at_half(self):
        assert rinf_mix(Geometric(F(1, 2)), DivergentWitness(0)) == INF

    def test_delta_picks_term(self):
        seq = points(1, 2, 5, 9)
        assert rinf_mix(FiniteSupport({3: 1}), seq) == 5

    def test_constant_tail(self):
        assert rinf_mix(Geometric(F(1, 2)), constant(7)) == 7

    def test_infinity_absorbs(self):
        assert rinf_mix(Geometric(F(1, 2)), points(INF, 0)) == INF

    def test_alternating_is_infinite(self):
        assert rinf_mix(Geometric(F(1, 2)), AlternatingWitness(1)) == INF

    def test_zero_weight_infinity_ignored(self):
        assert rinf_mix(FiniteSupport.of(0, 1), points(INF, 4)) == 4

    @pytest.mark.parametrize("key", sorted(DIVERGENT_ORACLE))
    def test_divergent_closed_form(self, key):
        q, u = key
        assert rinf_mix(Geometric(q), DivergentWitness(u)) == DIVERGENT_ORACLE[key]

    @pytest.mark.parametrize("key", sorted(ALTERNATING_ORACLE))
    def test_alternating_closed_form(self, key):
        q, c = key
        assert rinf_mix(Geometric(q), AlternatingWitness(c)) == ALTERNATING_ORACLE[key]

    @pytest.mark.parametrize("q", [F(1, 2), F(3, 5), F(9, 10)])
    def test_witnesses_diverge_for_large_ratio(self, q):
        assert rinf_mix(Geometric(q), DivergentWitness(3)) == INF
        assert rinf_mix(Geometric(q), AlternatingWitness(F(1, 3))) == INF

    def test_alternating_zero_is_zero(self):
        assert rinf_mix(Geometric(F(9, 10)), AlternatingWitness(0)) == 0

    def test_lazy_geometric_converges_numerically(self):
        seq = LazyMapped(constant(0), lambda v: v)
        assert rinf_mix(Geometric(F(1, 4)), LazyMapped(DivergentWitness(0), lambda v: 1 / (1 + v))) < 1
        assert rinf_mix(Geometric(F(1, 2)), seq) == 0

    def test_undetermined_is_raised_not_rounded(self):
        slow = LazyMapped(DivergentWitness(0), lambda v: F(1, 1) if v > 10**6 else F(v % 7))
        with pytest.raises(Undetermined):
            rinf_mix(Geometric(F(9, 10)), slow, EvalPolicy(max_terms=8))

    def test_policy_floor(self):
        with pytest.raises(ValueError):
            EvalPolicy(max_terms=7)
        assert DEFAULT_POLICY.max_terms == 64

    @given(st.lists(rationals, min_size=1, max_size=6), st.integers(1, 6))
    def test_delta_axiom(self, vals, j):
        j = min(j, len(vals))
        assert rinf_mix(delta(j), points(*vals)) == vals[j - 1]

    @given(finite_partitions(max_len=5), st.lists(rationals, min_size=5, max_size=5), st.permutations(range(5)))
    def test_permutation_invariance(self, ws, vals, perm):
        n = len(ws)
        alpha = FiniteSupport.of(*ws)
        moved = FiniteSupport({perm[i] + 1: w for i, w in enumerate(ws)})
        moved_vals = [None] * 5
        for i in range(5):
            moved_vals[perm[i]] = vals[i]
        assert rinf_mix(alpha, points(*vals[:n], tail=vals[n - 1])) == rinf_mix(moved, points(*moved_vals))

    @given(ratios, st.fractions(min_value=0, max_value=50, max_denominator=4))
    def test_nonnegative_divergence_iff_unbounded(self, q, u):
        # Partial sums of a nonnegative series are bounded iff 2q < 1.
        got = rinf_mix(Geometric(q), DivergentWitness(u))
        partial = sum(Geometric(q).weight(i) * (i * 2**i + u) for i in range(1, 100))
        if 2 * q < 1:
            assert got != INF and partial <= got
        else:
            assert got == INF and partial > 1000


def test_as_rinf_rejects_bad_values():
    for bad in (math.nan, -math.inf, "x"):
        with pytest.raises((ValueError, TypeError)):
            as_rinf(bad)
