"""Shared hypothesis strategies for the test suite."""

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from gaborwalnut.model import GridSpec, StepFunction


@st.composite
def step_functions(draw, step=Fraction(1, 4), max_cells=12, lo_range=8, scale=3):
    """Complex step functions with small integer entries.

    Integer-valued cells keep every finite sum exactly representable, so
    bit-exactness claims can be tested without tolerance juggling.
    """
    n = draw(st.integers(1, max_cells))
    lo = draw(st.integers(-lo_range, lo_range))
    re = draw(st.lists(st.integers(-scale, scale), min_size=n, max_size=n))
    im = draw(st.lists(st.integers(-scale, scale), min_size=n, max_size=n))
    vals = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    return StepFunction(GridSpec(step), lo, vals)


small_fractions = st.builds(Fraction, st.integers(1, 4), st.integers(1, 4))
