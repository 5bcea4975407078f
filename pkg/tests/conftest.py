from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
ratios = st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=20)


@st.composite
def finite_partitions(draw, max_len=5, max_den=12):
    n = draw(st.integers(1, max_len))
    raw = draw(st.lists(st.integers(0, max_den), min_size=n, max_size=n).filter(lambda xs: sum(xs) > 0))
    total = sum(raw)
    return [Fraction(k, total) for k in raw]
