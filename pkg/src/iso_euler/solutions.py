"""
Closed-form flow fields: the shock-free Tait bubble and the planar Noh problem.

Both are invariant under the purely kinematic scaling (r, t) -> (k r, k t),
so every field depends on r and t only through xi = r / t.
"""

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .eos import TaitEos
from .errors import OutsideBubbleError
from .rh import solve_noh_shock
from .scaling import SymmetryCase, classify, derive_exponents


class Fields(NamedTuple):
    u: object
    rho: object
    P: object
    I: object


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


# --- shock-free bubble ------------------------------------------------------

@dataclass(frozen=True)
class BubbleSolution:
    """Expanding bubble u = -r/t, rho = w0 (r/t)^(2/(gamma-1)).

    The velocity ansatz forces gamma = (n - 3)/(n + 1) < 0, so B < 0 keeps
    omega = B gamma / rho_ref^gamma positive. The flow ends at the
    zero-pressure surface r = xi0 t where rho = rho_ref.
    """

    n: int
    B: float
    rho_ref: float
    I0: float = 0.0

    @property
    def gamma(self):
        return (self.n - 3.0) / (self.n + 1.0)

    @property
    def omega(self):
        return self.B * self.gamma / self.rho_ref**self.gamma

    @property
    def w0(self):
        g = self.gamma
        return ((1.0 - g) / self.omega) ** (1.0 / (g - 1.0))

    @property
    def density_exponent(self):
        return 2.0 / (self.gamma - 1.0)

    @property
    def xi0(self):
        """xi where rho = rho_ref, i.e. where P vanishes."""
        return (self.rho_ref / self.w0) ** ((self.gamma - 1.0) / 2.0)

    @property
    def eos(self):
        return TaitEos(self.B, self.gamma, self.rho_ref, I0=self.I0)


def bubble_solution(n, B, rho_ref, I0=0.0):
    if n not in (0, 1, 2):
        raise ValueError("geometry n must be 0, 1 or 2")
    if not B < 0.0:
        raise ValueError("the shock-free bubble needs B < 0 so that omega > 0")
    if not rho_ref > 0.0:
        raise ValueError("rho_ref must be positive")
    return BubbleSolution(int(n), float(B), float(rho_ref), float(I0))


def bubble_profile(sol, xi):
    """Fields as functions of xi = r/t, without the zero-pressure cutoff."""
    xi = np.asarray(xi, dtype=float)
    rho = sol.w0 * xi**sol.density_exponent
    eos = sol.eos
    return Fields(_out(-xi), _out(rho), eos.pressure(rho), eos.sie(rho))


def bubble_fields(sol, r, t):
    """(u, rho, P, I) inside the bubble, 0 < r/t <= xi0, for t > 0."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t == 0.0):
        raise ValueError("t = 0: the bubble fields are unbounded")
    if np.any(t < 0.0):
        raise ValueError("only the t > 0 branch is evaluated")
    xi = r / t
    if np.any(xi <= 0.0):
        raise OutsideBubbleError("bubble fields need r/t > 0")
    # small slack so that r = xi0 t itself is accepted
    if np.any(xi > sol.xi0 * (1.0 + 1e-12)):
        raise OutsideBubbleError(f"r/t exceeds the zero-pressure point xi0={sol.xi0:.17g}")
    return bubble_profile(sol, xi)


def bubble_pde_residuals(sol, r, t, h):
    """Centered-difference residuals of the reduced mass and momentum PDEs.

    Steps are ``h r`` in space and ``h t`` in time. The exact solution gives
    residuals of order h^2.
    """
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    n = sol.n
    eos = sol.eos
    dr, dt = h * r, h * t

    def f(rr, tt):
        out = bubble_profile(sol, rr / tt)
        return np.asarray(out.u), np.asarray(out.rho)

    u, rho = f(r, t)
    u_rp, rho_rp = f(r + dr, t)
    u_rm, rho_rm = f(r - dr, t)
    u_tp, rho_tp = f(r, t + dt)
    u_tm, rho_tm = f(r, t - dt)
    rho_r = (rho_rp - rho_rm) / (2.0 * dr)
    rho_t = (rho_tp - rho_tm) / (2.0 * dt)
    u_r = (u_rp - u_rm) / (2.0 * dr)
    u_t = (u_tp - u_tm) / (2.0 * dt)
    mass = r * rho_t + r * u * rho_r + rho * r * u_r + n * rho * u
    mom = rho**2 * u_t + rho**2 * u * u_r + eos.bulk_modulus(rho) * rho_r
    return mass, mom


# --- planar Noh --------------------------------------------------------------

@dataclass(frozen=True)
class NohSolution:
    eos: object
    rho0: float
    u0: float
    rho2: float
    D0: float
    P2: float
    I2: float
    P1: float
    I1: float

    def shock_position(self, t):
        return self.D0 * t


def noh_solution(eos, rho0, u0):
    shock = solve_noh_shock(eos, rho0, u0)
    return NohSolution(eos=eos, rho0=float(rho0), u0=float(u0), rho2=shock.rho2,
                       D0=shock.D0, P2=shock.P2, I2=shock.I2,
                       P1=eos.pressure(rho0), I1=eos.sie(rho0))


def noh_fields(sol, r, t):
    """Piecewise-constant Noh fields; r = D0 t belongs to the shocked side."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("noh_fields requires t > 0")
    if np.any(r < 0.0):
        raise ValueError("noh_fields requires r >= 0")
    shocked = r <= sol.D0 * t
    u = np.where(shocked, 0.0, -sol.u0)
    rho = np.where(shocked, sol.rho2, sol.rho0)
    P = np.where(shocked, sol.P2, sol.P1)
    I = np.where(shocked, sol.I2, sol.I1)
    return Fields(_out(u), _out(rho), _out(P), _out(I))


def noh_region(sol, r, t):
    return np.where(np.asarray(r) <= sol.D0 * np.asarray(t), "shocked", "unshocked")


@dataclass(frozen=True)
class NohSymmetry:
    case: SymmetryCase
    a: tuple
    alpha: float
    beta: float
    zeta: float
    sigma: float
    note: str


def noh_symmetry_constraints(u0, rho0):
    """Scaling constants compatible with constant inflow u0 and density rho0.

    Invariance of u + u0 = 0 forces a2 = a1, and of rho - rho0 = 0 forces
    a3 = 0: the purely kinematic case IV with alpha = 1, beta = zeta = 0 and a
    constant shock speed. Any isentropic EOS is admissible.
    """
    if not (u0 > 0.0 and rho0 > 0.0):
        raise ValueError("u0 and rho0 must be positive")
    a = (1.0, 1.0, 0.0)
    _, pl = derive_exponents(*a)
    return NohSymmetry(case=classify(*a), a=a, alpha=pl.alpha, beta=pl.beta,
                       zeta=pl.zeta, sigma=pl.sigma,
                       note="arbitrary K_S admissible (kinematic r-t scaling only)")


# --- field dumps --------------------------------------------------------------

FIELD_COLUMNS = ("r", "t", "u", "rho", "P", "I", "region")


def fields_csv(rows, fmt=".17g"):
    """CSV text for rows of (r, t, u, rho, P, I, region)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELD_COLUMNS)
    for row in rows:
        writer.writerow([format(float(v), fmt) for v in row[:6]] + [row[6]])
    return buf.getvalue()
