import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iso_euler.eos import TaitEos
from iso_euler.errors import OutsideBubbleError
from iso_euler.scaling import SymmetryCase
from iso_euler.solutions import (
    bubble_fields,
    bubble_pde_residuals,
    bubble_profile,
    bubble_solution,
    fields_csv,
    noh_fields,
    noh_region,
    noh_solution,
    noh_symmetry_constraints,
)
from oracles import BUBBLE, NOH_TAIT


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bubble_constants(n):
    gamma, omega, w0, xi0 = BUBBLE[n]
    sol = bubble_solution(n, -1e-3, 1.0)
    assert sol.gamma == pytest.approx(gamma, rel=1e-15)
    assert sol.omega == pytest.approx(omega, rel=1e-14)
    assert sol.w0 == pytest.approx(w0, rel=1e-13)
    assert sol.xi0 == pytest.approx(xi0, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_pressure_vanishes_at_xi0(n):
    sol = bubble_solution(n, -1e-3, 1.0)
    f = bubble_fields(sol, sol.xi0, 1.0)
    assert abs(f.P) <= 1e-12
    assert f.rho == pytest.approx(sol.rho_ref, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_pressure_positive_inside(n):
    sol = bubble_solution(n, -1e-3, 1.0)
    xi = np.linspace(0.01, 0.999, 50) * sol.xi0
    assert np.all(bubble_fields(sol, xi, 1.0).P > 0)


def test_profile_at_unit_xi():
    sol = bubble_solution(0, -1e-3, 1.0)
    f = bubble_profile(sol, 1.0)
    assert f.u == -1.0
    assert f.rho == pytest.approx(0.16548754598234366, rel=1e-14)


def test_unit_point_lies_outside_the_bubble():
    sol = bubble_solution(0, -1e-3, 1.0)
    with pytest.raises(OutsideBubbleError):
        bubble_fields(sol, 1.0, 1.0)


def test_bubble_time_and_sign_checks():
    sol = bubble_solution(1, -1e-3, 1.0)
    with pytest.raises(ValueError):
        bubble_fields(sol, 0.01, 0.0)
    with pytest.raises(ValueError):
        bubble_fields(sol, 0.01, -1.0)
    with pytest.raises(OutsideBubbleError):
        bubble_fields(sol, 0.0, 1.0)


@pytest.mark.parametrize("args", [(3, -1e-3, 1.0), (0, 1e-3, 1.0), (0, -1e-3, 0.0)])
def test_bubble_validation(args):
    with pytest.raises(ValueError):
        bubble_solution(*args)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([0, 1, 2]), st.floats(0.05, 0.95), st.floats(0.5, 5.0))
def test_bubble_scale_invariance(n, frac, k):
    sol = bubble_solution(n, -1e-3, 1.0)
    r = frac * sol.xi0
    a, b = bubble_fields(sol, r, 1.0), bubble_fields(sol, k * r, k)
    assert b.rho == pytest.approx(a.rho, rel=1e-12)
    assert b.u == pytest.approx(a.u, rel=1e-12)


def pde_orders(n, points=50, seed=4):
    sol = bubble_solution(n, -1e-3, 1.0)
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.5, 2.0, points)
    r = rng.uniform(0.1, 0.8, points) * sol.xi0 * t
    hs = [1e-2 / 2**k for k in range(4)]
    norms = []
    for h in hs:
        mass, mom = bubble_pde_residuals(sol, r, t, h)
        norms.append((np.max(np.abs(mass)), np.max(np.abs(mom))))
    norms = np.array(norms)
    return np.log2(norms[:-1] / norms[1:])


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bubble_pde_residuals_second_order(n):
    orders = pde_orders(n)
    assert np.all(np.abs(orders - 2.0) <= 0.3)


def test_noh_solution_and_fields():
    sol = noh_solution(TaitEos.water().with_sie_zero_at(1.0), 1.0, 0.1)
    rho2, D0 = NOH_TAIT[0.1]
    assert sol.rho2 == pytest.approx(rho2, rel=1e-12)
    r = np.array([0.0, 0.5 * D0, D0, 1.01 * D0, 2.0])
    f = noh_fields(sol, r, 1.0)
    np.testing.assert_array_equal(f.u, [0, 0, 0, -0.1, -0.1])
    np.testing.assert_array_equal(f.rho, [sol.rho2] * 3 + [1.0, 1.0])
    assert f.I[-1] == 0.0 and f.I[0] == pytest.approx(sol.I2)
    assert list(noh_region(sol, r, 1.0)) == ["shocked"] * 3 + ["unshocked"] * 2
    assert sol.shock_position(2.0) == 2 * sol.D0
    with pytest.raises(ValueError):
        noh_fields(sol, 0.1, 0.0)
    with pytest.raises(ValueError):
        noh_fields(sol, -0.1, 1.0)


def test_noh_symmetry():
    sym = noh_symmetry_constraints(0.1, 1.0)
    assert sym.case is SymmetryCase.IV
    assert sym.a == (1.0, 1.0, 0.0)
    assert (sym.alpha, sym.beta, sym.zeta, sym.sigma) == (1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        noh_symmetry_constraints(0.0, 1.0)


def test_fields_csv():
    text = fields_csv([(0.1, 1.0, -0.1, 1.0, 0.0, 0.0, "bubble")])
    assert text.splitlines() == ["r,t,u,rho,P,I,region",
                                 "0.10000000000000001,1,-0.10000000000000001,1,0,0,bubble"]
    assert math.isclose(float(text.splitlines()[1].split(",")[0]), 0.1)
