"""Shared hypothesis strategies."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from vertexlab.exact_algebra import QQ, TruncSeries

small_int = st.integers(min_value=-5, max_value=5)
small_rational = st.builds(Fraction, small_int, st.integers(min_value=1, max_value=4))


@st.composite
def series(draw, ring=QQ, order=6, zero_constant=False, unit_constant=False):
    elems = small_rational if ring == QQ else small_int
    coeffs = draw(st.lists(elems, min_size=order + 1, max_size=order + 1))
    if zero_constant:
        coeffs[0] = 0
    if unit_constant:
        if ring == QQ:
            coeffs[0] = draw(st.sampled_from([Fraction(1), Fraction(-2), Fraction(3, 2)]))
        else:
            coeffs[0] = 1
    return TruncSeries(ring, coeffs, order)
