import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import finite_partitions
from scvx.core import FiniteSupport, Geometric, INF, delta, rinf_mix, points
from scvx.errors import (
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
from scvx.giry import (
    FinMeasurableSpace,
    Measure,
    MeasurableFn,
    dirac,
    integrate,
    measure_mix,
    meta_measure,
    multiply,
    phi,
    phi_inv,
    pushforward,
    rescale_to_unit,
    sigma_from_affine,
    simple_approx,
)
from scvx.sampling import grid_measures, random_meta
from scvx.spaces import Constant, Disc, RInfSpace, SemiDirect

X2 = FinMeasurableSpace.discrete(["x0", "x1"])
ABC = FinMeasurableSpace.discrete("abc")


@st.composite
def measures_on(draw, X, max_den=12):
    raw = draw(st.lists(st.integers(0, max_den), min_size=len(X.carrier), max_size=len(X.carrier)).filter(any))
    total = sum(raw)
    return Measure(X, {x: F(k, total) for x, k in zip(X.carrier, raw)})


class TestSpaces:
    def test_from_sets_validates(self):
        with pytest.raises(NotSigmaAlgebra):
            FinMeasurableSpace.from_sets("ab", [set(), {"a"}, {"a", "b"}])
        X = FinMeasurableSpace.from_sets("abc", [set(), {"a"}, {"b", "c"}, set("abc")])
        assert X.atoms == {frozenset("a"), frozenset("bc")}

    def test_sigma_contains_empty_and_carrier_and_is_closed(self):
        X = FinMeasurableSpace.generated_by(range(5), [{0, 1}, {1, 2}])
        sigma = X.sigma
        full = frozenset(range(5))
        assert frozenset() in sigma and full in sigma
        assert all(full - s in sigma for s in sigma)
        assert all(s | t in sigma for s in sigma for t in sigma)

    def test_atoms_must_partition(self):
        with pytest.raises(NotSigmaAlgebra):
            FinMeasurableSpace(("a", "b"), frozenset([frozenset("a")]))


class TestDirac:
    def test_examples(self):
        d = dirac(X2, "x0")
        assert d({"x0"}) == 1 and d(set()) == 0 and d({"x1"}) == 0

    def test_unknown_atom(self):
        with pytest.raises(UnknownAtom):
            dirac(X2, "zz")

    def test_non_measurable_set(self):
        X = FinMeasurableSpace.trivial("ab")
        with pytest.raises(NotMeasurableSet):
            dirac(X, "a")({"a"})


class TestPushforward:
    def test_constant_map(self):
        P = Measure(ABC, {"a": F(1, 3), "c": F(2, 3)})
        assert pushforward(lambda x: "y0", P) == dirac(FinMeasurableSpace.discrete(["y0"]), "y0")

    def test_identity(self):
        P = Measure(ABC, {"a": F(1, 3), "c": F(2, 3)})
        assert pushforward(lambda x: x, P, ABC) == P

    def test_merge(self):
        X = FinMeasurableSpace.discrete("ab")
        Q = pushforward({"a": 0, "b": 0}, Measure(X, {"a": F(1, 3), "b": F(2, 3)}))
        assert Q({0}) == 1

    def test_not_measurable_names_witness(self):
        X = FinMeasurableSpace.trivial("ab")
        with pytest.raises(NotMeasurable) as e:
            pushforward({"a": 0, "b": 1}, dirac(X, "a"), FinMeasurableSpace.discrete([0, 1]))
        assert e.value.witness in (frozenset([0]), frozenset([1]))


class TestMix:
    def test_half_half(self):
        P = measure_mix(FiniteSupport.of(F(1, 2), F(1, 2)), [dirac(ABC, "a"), dirac(ABC, "b")])
        assert P({"a"}) == F(1, 2)

    def test_delta(self):
        Ps = [dirac(ABC, "a"), dirac(ABC, "b")]
        assert measure_mix(delta(2), Ps) == Ps[1]

    def test_geometric_tail(self):
        from scvx.core import FinitePrefix

        seq = FinitePrefix([dirac(X2, "x0")], dirac(X2, "x1"))
        assert measure_mix(Geometric(F(1, 2)), seq)({"x1"}) == F(1, 2)

    def test_geometric_over_list_stays_normalized(self):
        Ps = [dirac(ABC, "abc"[i % 3]) for i in range(10)]
        P = measure_mix(Geometric(F(1, 3)), Ps)
        assert sum(w for _, w in P.weights) == 1

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            measure_mix(FiniteSupport.of(F(1, 2), F(1, 2)), [dirac(ABC, "a"), dirac(X2, "x0")])


class TestIntegrate:
    def test_indicator_gives_mass(self):
        P = Measure(ABC, {"a": F(1, 4), "b": F(3, 4)})
        assert integrate(MeasurableFn.indicator(ABC, {"b", "c"}), P) == F(3, 4)

    def test_constant(self):
        P = Measure(ABC, {"a": F(1, 4), "b": F(3, 4)})
        assert integrate(MeasurableFn(ABC, lambda x: F(5, 2)), P) == F(5, 2)

    def test_zero_times_infinity(self):
        P = Measure(ABC, {"a": F(1, 4), "b": F(3, 4)})
        f = MeasurableFn(ABC, {"a": 2, "b": 4, "c": INF})
        assert integrate(f, P) == F(7, 2)
        assert integrate(f, Measure(ABC, {"c": F(1, 2), "a": F(1, 2)})) == INF

    def test_function_must_be_constant_on_atoms(self):
        X = FinMeasurableSpace.trivial("ab")
        with pytest.raises(NotMeasurable):
            MeasurableFn(X, {"a": 0, "b": 1})

    @given(finite_partitions(max_len=3), st.data())
    def test_integral_is_affine_in_the_measure(self, ws, data):
        Ps = [data.draw(measures_on(ABC)) for _ in ws]
        f = MeasurableFn(ABC, {"a": F(-1, 2), "b": 3, "c": F(7, 3)})
        alpha = FiniteSupport.of(*ws)
        lhs = integrate(f, measure_mix(alpha, Ps))
        assert lhs == rinf_mix(alpha, points(*[integrate(f, P) for P in Ps]))


class TestMultiply:
    def test_examples(self):
        P = Measure(ABC, {"a": F(1, 4), "b": F(3, 4)})
        Q = dirac(ABC, "c")
        assert multiply(meta_measure([(P, 1)])) == P
        assert multiply(meta_measure([(P, F(1, 2)), (Q, F(1, 2))])) == measure_mix(
            FiniteSupport.of(F(1, 2), F(1, 2)), [P, Q]
        )
        assert multiply(meta_measure([(P, F(1, 3)), (P, F(2, 3))])) == P

    def test_associativity_on_random_depth_two(self):
        rng = random.Random(5)
        grid = grid_measures(ABC, 3)
        GX = FinMeasurableSpace.discrete(grid)
        metas = [meta_measure(random_meta(rng, grid, 3, 4).weights, GX) for _ in range(12)]
        for _ in range(30):
            Pi = random_meta(rng, metas, 3, 4)
            assert multiply(multiply(Pi)) == multiply(pushforward(multiply, Pi))


class TestPhi:
    def test_dirac(self):
        J = phi(dirac(ABC, "b"))
        assert all(J[U] == int("b" in U) for U in ABC.sigma)

    @given(st.data())
    def test_roundtrip(self, data):
        X = FinMeasurableSpace.discrete(range(4))
        P = data.draw(measures_on(X))
        assert phi_inv(X, phi(P)) == P

    def test_roundtrip_coarse_space_up_to_atoms(self):
        X = FinMeasurableSpace.from_partition(range(4), lambda x: x // 2)
        P = Measure(X, {0: F(1, 3), 1: F(1, 3), 3: F(1, 3)})
        Q = phi_inv(X, phi(P))
        assert Q.equivalent(P) and Q({0, 1}) == F(2, 3)

    def test_weakly_averaging(self):
        J = phi(dirac(X2, "x0"))
        J[frozenset(X2.carrier)] = F(9, 10)
        with pytest.raises(NotWeaklyAveraging):
            phi_inv(X2, J)
        J = phi(dirac(X2, "x0"))
        J[frozenset()] = F(1, 10)
        with pytest.raises(NotWeaklyAveraging):
            phi_inv(X2, J)

    def test_additivity(self):
        J = phi(dirac(ABC, "a"))
        J[frozenset("b")] = F(1, 2)
        with pytest.raises(NotAdditive) as e:
            phi_inv(ABC, J)
        assert e.value.witness

    def test_negative_mass(self):
        J = phi(Measure(X2, {"x0": 1}))
        J[frozenset(["x1"])] = F(-1, 2)
        J[frozenset(["x0"])] = F(3, 2)
        with pytest.raises(NegativeMass):
            phi_inv(X2, J)

    def test_missing_set(self):
        J = phi(dirac(X2, "x0"))
        del J[frozenset(["x1"])]
        with pytest.raises(NotAdditive):
            phi_inv(X2, J)

    @given(finite_partitions(max_len=3), st.data())
    def test_phi_preserves_mixtures(self, ws, data):
        Ps = [data.draw(measures_on(ABC)) for _ in ws]
        alpha = FiniteSupport.of(*ws)
        mixed = phi(measure_mix(alpha, Ps))
        for U in ABC.sigma:
            assert mixed[U] == sum(w * phi(P)[U] for w, P in zip(ws, Ps))


class TestSimpleApprox:
    def test_examples(self):
        X = FinMeasurableSpace.discrete(["u"])
        m = MeasurableFn(X, {"u": F(3, 5)})
        assert simple_approx(m, 2).coefficient("u") == F(1, 2)
        assert simple_approx(m, 4).coefficient("u") == F(9, 16)
        zero = MeasurableFn(ABC, lambda x: 0)
        assert all(simple_approx(zero, 5).coefficient(x) == 0 for x in "abc")

    def test_float_value(self):
        X = FinMeasurableSpace.discrete(["u"])
        assert simple_approx(MeasurableFn(X, {"u": 0.6}), 4).coefficient("u") == F(9, 16)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            simple_approx(MeasurableFn(ABC, {"a": 0, "b": 1, "c": 0}), 3)
        with pytest.raises(OutOfRange):
            simple_approx(MeasurableFn(ABC, {"a": 0, "b": INF, "c": 0}), 3)

    @given(st.lists(st.fractions(0, 1, max_denominator=97).filter(lambda v: v < 1), min_size=3, max_size=3),
           st.integers(1, 10), st.data())
    def test_bounds_and_monotonicity(self, vals, n, data):
        m = MeasurableFn(ABC, dict(zip("abc", vals)))
        psi, nxt = simple_approx(m, n), simple_approx(m, n + 1)
        for x in "abc":
            assert psi.coefficient(x) <= nxt.coefficient(x) <= m(x) < psi.coefficient(x) + F(1, 2**n)
        P = data.draw(measures_on(ABC))
        assert 0 <= integrate(m, P) - integrate(psi.as_function(), P) <= F(1, 2**n)

    def test_rescale(self):
        m = MeasurableFn(ABC, {"a": -3, "b": 5, "c": 1})
        scaled, scale, shift = rescale_to_unit(m)
        assert all(0 <= scaled(x) < 1 and scaled(x) == scale * m(x) + shift for x in "abc")


class TestSigmaFromAffine:
    def test_disc3_is_powerset(self):
        assert sigma_from_affine(Disc(3)).is_discrete

    def test_constant_family_is_trivial(self):
        X = sigma_from_affine(Disc(3), family=[Constant(Disc(3), 0)])
        assert X.sigma == {frozenset(), frozenset(range(3))}

    def test_disc1(self):
        assert sigma_from_affine(Disc(1)).sigma == {frozenset(), frozenset([0])}

    def test_semidirect_lumps_inner_orbits(self):
        space = SemiDirect(3)
        carrier = [(r, k) for k in range(3) for r in (F(0), F(1), INF)]
        X = sigma_from_affine(space, carrier)
        assert frozenset((r, 1) for r in (F(0), F(1), INF)) in X.atoms
        assert frozenset([(F(0), 0)]) in X.atoms

    def test_generators_measurable(self):
        from scvx.spaces import generator_family

        carrier = [F(-1), F(0), F(2), INF]
        X = sigma_from_affine(RInfSpace(), carrier)
        for m in generator_family(RInfSpace()):
            for v in {m(a) for a in carrier}:
                assert X.is_measurable({a for a in carrier if m(a) == v})

    def test_unknown_point(self):
        with pytest.raises(UnknownAtom):
            sigma_from_affine(Disc(2), [0, 5])
