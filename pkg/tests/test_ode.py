import math

import numpy as np
import pytest

from iso_euler import ode
from iso_euler.errors import SingularPointError


def test_exponential_growth():
    tr = ode.integrate(lambda x, y: y, 0.0, [1.0], 2.0)
    assert tr.completed
    assert tr.terminal_x == 2.0
    assert tr.y[-1, 0] == pytest.approx(math.exp(2.0), rel=1e-9)


def test_backward_integration():
    tr = ode.integrate(lambda x, y: -y, 1.0, [1.0], 0.0)
    assert tr.completed
    assert tr.y[-1, 0] == pytest.approx(math.e, rel=1e-9)


def test_error_tracks_tolerance():
    def rhs(x, y):
        return np.array([y[1], -y[0]])

    errors = []
    for tol in (1e-4, 1e-6, 1e-8, 1e-10):
        tr = ode.integrate(rhs, 0.0, [0.0, 1.0], 10.0, rtol=tol, atol=tol * 1e-2)
        errors.append(abs(tr.y[-1, 0] - math.sin(10.0)))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-8


def test_fifth_order_step():
    # error of a single step scales like h^5 (local order 5 for the propagated solution)
    errs = []
    for h in (0.2, 0.1):
        y, _, _ = ode._dp_step(lambda x, y: y, 0.0, np.array([1.0]), np.array([1.0]), h)
        errs.append(abs(y[0] - math.exp(h)))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(6.0, abs=0.3)


def test_event_halts_at_sign_change():
    tr = ode.integrate(lambda x, y: np.array([1.0]), 0.0, [0.0], 5.0,
                       events={"hit": lambda x, y: y[0] - 1.2345})
    assert tr.reason == "singular"
    assert "hit" in tr.message
    assert tr.terminal_x == pytest.approx(1.2345, abs=1e-11)


def test_singular_rhs_during_step():
    def rhs(x, y):
        if x >= 1.0:
            raise SingularPointError("wall", xi=x)
        return np.array([1.0])

    tr = ode.integrate(rhs, 0.0, [0.0], 2.0)
    assert tr.reason in ("singular", "step_underflow")
    assert tr.terminal_x == pytest.approx(1.0, abs=1e-6)


def test_singular_initial_point_raises():
    def rhs(x, y):
        raise SingularPointError("bad", xi=x)

    with pytest.raises(SingularPointError):
        ode.integrate(rhs, 0.0, [1.0], 1.0)


def test_max_steps():
    tr = ode.integrate(lambda x, y: np.array([math.cos(50 * x)]), 0.0, [0.0], 10.0,
                       max_steps=5)
    assert tr.reason == "max_steps"


def test_zero_span():
    tr = ode.integrate(lambda x, y: y, 1.0, [2.0], 1.0)
    assert tr.completed and tr.y.shape == (1, 1)
