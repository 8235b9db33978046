from fractions import Fraction
from math import factorial

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from aheinstein.series import Series


def test_jets_of_elementary_functions():
    x = Series.variable(0.3, 4)
    for got, want in ((x.sinh(), np.sinh), (x.cosh(), np.cosh), (x.exp(), np.exp)):
        assert abs(float(got.value) - want(0.3)) < 1e-15
    # k-th coefficient of exp is e^x / k!
    e = x.exp()
    assert all(abs(float(e.c[k]) - np.exp(0.3) / factorial(k)) < 1e-15 for k in range(5))


def test_exact_reversion():
    u = Series.exact_variable(5)
    f = u + u * u / 2
    g = f.revert()
    comp = f.compose(g)
    assert [Fraction(c) for c in comp.c] == [0, 1, 0, 0, 0, 0]


@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_real_power_and_log(x0, alpha):
    x = Series.variable(x0, 3)
    p = x ** alpha
    assert abs(float(p.value) - x0 ** alpha) < 1e-12 * max(1.0, x0 ** alpha)
    assert abs(float(p.derivative(1)) - alpha * x0 ** (alpha - 1)) < 1e-10 * max(1.0, abs(alpha * x0 ** (alpha - 1)))
    assert abs(float(x.log().exp().value) - x0) < 1e-13


def test_reciprocal_and_sqrt():
    x = Series.variable(2.0, 3)
    r = (x * x + 1).sqrt().reciprocal()
    assert abs(float(r.value) - 5 ** -0.5) < 1e-15
    # d/dx (1+x^2)^-1/2 = -x (1+x^2)^-3/2
    assert abs(float(r.derivative(1)) + 2 * 5 ** -1.5) < 1e-15
