import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpsurf.errors import ConfigError
from warpsurf.expr import Expression, parse

FORMULAS = ["u*v + sin(u)*exp(v)", "sqrt(1 + u^2)*cos(v)", "log(2 + sin(u*v))", "tanh(u) / (1 + v**2)",
            "sinh(u - v)*cosh(v)", "tan(0.3*u) - 2^v"]


def fd_partials(expr, u, v, h=1e-4):
    f = lambda a, b: expr(a, b)
    return ((f(u + h, v) - f(u - h, v)) / (2 * h),
            (f(u, v + h) - f(u, v - h)) / (2 * h),
            (f(u + h, v) - 2 * f(u, v) + f(u - h, v)) / h**2,
            (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h),
            (f(u, v + h) - 2 * f(u, v) + f(u, v - h)) / h**2)


@pytest.mark.parametrize("text", FORMULAS)
@given(u=st.floats(-1, 1), v=st.floats(-1, 1))
@settings(max_examples=25, deadline=None)
def test_jet_matches_differences(text, u, v):
    e = parse(text)
    j = e.jet(u, v)
    fd = fd_partials(e, u, v)
    for got, want in zip((j.du, j.dv, j.duu, j.duv, j.dvv), fd):
        assert abs(got - want) < 1e-5 * max(1.0, abs(want))


def test_tuple_and_constants():
    e = Expression("(t0, u, v)", {"t0": 0.7})
    assert e.arity == 3
    t, x, y = e(np.array([1.0, 2.0]), 3.0)
    assert np.all(t == 0.7) and np.all(y == 3.0)


def test_caret_is_power():
    assert parse("v^2")(0.0, 3.0) == 9.0


@pytest.mark.parametrize("bad", ["__import__('os')", "u.real", "w + 1", "abs(u)", "u if v else 1",
                                 "[u]", "'s'", "u < v", "((u, v), v)", "sin(u, v)", "u +"])
def test_rejects_unsafe_or_unknown(bad):
    with pytest.raises(ConfigError):
        Expression(bad)
