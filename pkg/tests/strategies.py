"""
Hypothesis strategies and helpers shared by the adding-machine suites.
"""

from hypothesis import strategies as st

from dynamics.odometer import MAX_DIGIT, ExactPoint
from dynamics.radix import modulus, radix_at


@st.composite
def exact_points(draw, spec):
    """Random eventually periodic points; period symbols stay valid under every radix."""
    length = draw(st.integers(0, 6))
    pre = tuple(draw(st.integers(0, radix_at(spec, n) - 1)) for n in range(1, length + 1))
    per = tuple(draw(st.lists(st.sampled_from([0, 1, MAX_DIGIT]), min_size=1, max_size=3)))
    return ExactPoint(spec, pre, per)


def depths_within(spec, bound):
    """Depths L >= 0 with m_L <= bound."""
    out = [0]
    while modulus(spec, out[-1] + 1) <= bound:
        out.append(out[-1] + 1)
    return out
