"""
Similarity variables and the reduced ODEs of the homentropic Euler system.

Under the scaling group with power-law exponents (alpha, zeta, beta, lambda,
tau) a scale-invariant flow is written as

    xi = r / t^alpha,  rho = r^zeta w(xi),  u = r^beta j(xi),
    P = r^lambda m(xi),  I = r^tau h(xi),

and the mass and momentum equations become a pair of ODEs for w and j that
are linear in (w', j'). For the power-law EOS of case I the further change
j = xi^(1/alpha) J, w = xi^kappa W with kappa = a1 a3 / ((a2 - a1) a2)
makes the system autonomous.
"""

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import ode
from .eos import PolytropicCaseIEos, ZeroPressureEos
from .errors import SingularPointError
from .scaling import PowerLawExponents, ScalingExponents, derive_exponents

XI_MIN = 1e-300
_DEN_TOL = 1e-14
_DET_TOL = 1e-13


@dataclass(frozen=True)
class SimilarityState:
    xi: float
    w: float
    j: float
    m: Optional[float] = None
    h: Optional[float] = None


@dataclass(frozen=True)
class CaseITransformedState:
    J: float
    W: float


@dataclass(frozen=True)
class FlowSample:
    r: float
    t: float
    rho: float
    u: float
    P: Optional[float] = None
    I: Optional[float] = None


def power_laws(exponents):
    """Accept ``PowerLawExponents``, ``ScalingExponents`` or an (a1, a2, a3) triple."""
    if isinstance(exponents, PowerLawExponents):
        return exponents
    if isinstance(exponents, ScalingExponents):
        exponents = (exponents.a1, exponents.a2, exponents.a3)
    return derive_exponents(*exponents)[1]


def _need(pl, *names):
    for name in names:
        if getattr(pl, name) is None:
            raise ValueError(f"exponent {name} undefined for these scaling constants (a2 = 0)")


def to_similarity(r, t, rho, u, exponents, P=None, I=None):
    """Map a physical sample (r, t, rho, u[, P, I]) to similarity variables."""
    if not (r > 0.0 and t > 0.0):
        raise ValueError("to_similarity requires r > 0 and t > 0")
    pl = power_laws(exponents)
    _need(pl, "alpha", "zeta", "beta")
    xi = r / t**pl.alpha
    m = None if P is None else P / r**pl.lam
    h = None if I is None else I / r**pl.tau
    return SimilarityState(xi, rho / r**pl.zeta, u / r**pl.beta, m, h)


def from_similarity(state, r, exponents):
    """Inverse of :func:`to_similarity` at radius ``r``."""
    if not r > 0.0:
        raise ValueError("from_similarity requires r > 0")
    if not state.xi > 0.0:
        raise ValueError("from_similarity requires xi > 0")
    pl = power_laws(exponents)
    _need(pl, "alpha", "zeta", "beta")
    t = (r / state.xi) ** (1.0 / pl.alpha)
    P = None if state.m is None else r**pl.lam * state.m
    I = None if state.h is None else r**pl.tau * state.h
    return FlowSample(r, t, r**pl.zeta * state.w, r**pl.beta * state.j, P, I)


def chain_rule_derivatives(r, t, w, dw, j, dj, exponents):
    """Partial derivatives (rho_t, rho_r, u_t, u_r) of the similarity fields.

    ``w, dw, j, dj`` are w(xi), w'(xi), j(xi), j'(xi) at xi = r / t^alpha.
    """
    pl = power_laws(exponents)
    a, z, b = pl.alpha, pl.zeta, pl.beta
    rho_t = -a * r ** (z + 1.0) * t ** (-a - 1.0) * dw
    rho_r = z * r ** (z - 1.0) * w + r**z * t**-a * dw
    u_t = -a * r ** (b + 1.0) * t ** (-a - 1.0) * dj
    u_r = b * r ** (b - 1.0) * j + r**b * t**-a * dj
    return rho_t, rho_r, u_t, u_r


def _r_cancels(pl, eos):
    if pl.zeta == 0.0 and pl.beta == 0.0:
        return True
    if isinstance(eos, ZeroPressureEos):
        return True
    # K_S = A1 rho^psi: r^(-zeta-2beta) K_S(r^zeta w) = A1 w^psi iff zeta psi = zeta + 2 beta
    if isinstance(eos, PolytropicCaseIEos):
        return math.isclose(pl.zeta * eos.psi, pl.zeta + 2.0 * pl.beta,
                            rel_tol=1e-12, abs_tol=1e-14)
    return False


def general_rhs(state, exponents, eos, r=None, n=0):
    """Right-hand sides ``(dw/dxi, dj/dxi)`` of the reduced mass/momentum ODEs.

    The two equations are solved simultaneously as a 2x2 linear system in
    (w', j'). With the effective modulus k = r^(-zeta-2 beta) K_S(r^zeta w)
    and A = alpha xi^(1/alpha) - j:

        xi A w' - xi w j'         = (zeta + beta + n) j w
        -k xi w' + xi A w^2 j'    = k zeta w + beta w^2 j^2

    ``r`` may be omitted only when the r-dependence of k cancels (case IV
    exponents, zero pressure, or a power-law EOS with matching psi).

    Raises
    ------
    SingularPointError
        On A = 0 or on the sonic locus, where the determinant
        w^2 xi^2 A^2 - k xi^2 w vanishes.
    """
    pl = power_laws(exponents)
    _need(pl, "alpha", "zeta", "beta")
    xi, w, j = float(state.xi), float(state.w), float(state.j)
    if abs(xi) < XI_MIN:
        raise SingularPointError("xi too close to 0", xi=xi)
    if r is None:
        if not _r_cancels(pl, eos):
            raise ValueError("r is required: the reduced momentum equation depends on r "
                             "for this EOS/exponent combination")
        r = 1.0
    alpha, zeta, beta = pl.alpha, pl.zeta, pl.beta
    lead = alpha * xi ** (1.0 / alpha)
    A = lead - j
    if abs(A) <= _DEN_TOL * max(abs(lead), abs(j)):
        raise SingularPointError(f"denominator xi (alpha xi^(1/alpha) - j) vanishes at xi={xi!r}",
                                 xi=xi)
    k = r ** (-zeta - 2.0 * beta) * eos.bulk_modulus(r**zeta * w)
    den = xi * A
    rhs_mass = (zeta + beta + n) * j * w
    rhs_mom = k * zeta * w + beta * w * w * j * j
    det = w * w * den * den - k * xi * xi * w
    if abs(det) <= _DET_TOL * (w * w * den * den + abs(k * xi * xi * w)):
        raise SingularPointError(f"sonic locus: reduced system is singular at xi={xi!r}", xi=xi)
    dw = (rhs_mass * w * w * den + xi * w * rhs_mom) / det
    dj = (den * rhs_mom + k * xi * rhs_mass) / det
    return dw, dj


def sonic_function(state, exponents, eos, r=None, n=0):
    """Determinant of the reduced linear system (changes sign at the sonic locus)."""
    pl = power_laws(exponents)
    xi, w, j = state.xi, state.w, state.j
    if r is None:
        r = 1.0
    A = pl.alpha * xi ** (1.0 / pl.alpha) - j
    k = r ** (-pl.zeta - 2.0 * pl.beta) * eos.bulk_modulus(r**pl.zeta * w)
    return w * w * xi * xi * A * A - k * xi * xi * w


# --- case I -----------------------------------------------------------------

def _case1_constants(a1, a2, a3):
    a1, a2, a3 = float(a1), float(a2), float(a3)
    if a1 == 0.0 or a2 == 0.0 or a3 == 0.0 or a1 == a2:
        raise ValueError("case I needs a1, a2, a3 nonzero and a1 != a2")
    alpha = a2 / a1
    zeta = a3 / a2
    beta = (a2 - a1) / a2
    psi = (a3 + 2.0 * a2 - 2.0 * a1) / a3
    kappa = a1 * a3 / ((a2 - a1) * a2)
    return alpha, zeta, beta, psi, kappa


def case1_kappa(a1, a2, a3):
    """Exponent kappa in w = xi^kappa W."""
    return _case1_constants(a1, a2, a3)[4]


def to_case1(state, a1, a2, a3):
    alpha, _, _, _, kappa = _case1_constants(a1, a2, a3)
    xi = state.xi
    return CaseITransformedState(J=state.j / xi ** (1.0 / alpha), W=state.w / xi**kappa)


def from_case1(xi, tstate, a1, a2, a3):
    alpha, _, _, _, kappa = _case1_constants(a1, a2, a3)
    return SimilarityState(xi, xi**kappa * tstate.W, xi ** (1.0 / alpha) * tstate.J)


def case1_deltas(tstate, a1, a2, a3, A1, n):
    """(Delta1, Delta2, Delta) with xi W' = Delta1/Delta and xi J' = Delta2/Delta.

    Re-derived from the reduced ODEs with K_S = A1 rho^psi; the powers of xi
    cancel so the system is autonomous:

        Delta = W^2 (alpha - J)^2 - A1 W^(psi + 1)
    """
    alpha, zeta, beta, psi, kappa = _case1_constants(a1, a2, a3)
    J, W = float(tstate.J), float(tstate.W)
    if not W > 0.0:
        raise ValueError("W must be positive")
    q = alpha - J
    kw = A1 * W**psi
    # mass:     q X - W Y = e ;   momentum: -kw X + W^2 q Y = f
    e = (zeta + beta + n) * J * W - kappa * W * q + W * J / alpha
    f = beta * W * W * J * J + (zeta + kappa) * kw * W - W * W * q * J / alpha
    delta = W * W * q * q - kw * W
    delta1 = e * W * W * q + W * f
    delta2 = q * f + e * kw
    return delta1, delta2, delta


class DeltaRhs(NamedTuple):
    dW_dJ: float
    dlnxi_dJ: float
    on_sonic_locus: bool


def case1_delta_rhs(tstate, a1, a2, a3, A1, n):
    """Autonomous case-I system ``dW/dJ = Delta1/Delta2``, ``dln(xi)/dJ = Delta/Delta2``."""
    d1, d2, d = case1_deltas(tstate, a1, a2, a3, A1, n)
    scale = abs(d1) + abs(d) + abs(d2)
    if d2 == 0.0 or abs(d2) <= 1e-15 * scale:
        raise SingularPointError("critical point of the case-I system (Delta2 = 0)")
    alpha, _, _, psi, _ = _case1_constants(a1, a2, a3)
    W = tstate.W
    on_sonic = abs(d) <= 1e-13 * (W * W * (alpha - tstate.J) ** 2 + A1 * W ** (psi + 1.0))
    return DeltaRhs(d1 / d2, d / d2, bool(on_sonic))


# --- cases II and III -------------------------------------------------------

def case2_closed_form(xi, j0, w0, n, zeta=0.0):
    """Pressureless similarity solution w = w0 ((xi - j0)/xi)^(n + zeta), j = j0.

    With the default ``zeta = 0`` this is w0 (xi - j0)^n xi^-n. A nonzero
    ``zeta`` gives the solution for case-II exponents, where zeta = a3/a1.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0.0):
        raise SingularPointError("case II closed form has a pole at xi = 0", xi=0.0)
    p = n + zeta
    w = w0 * np.power((xi - j0) / xi, p) if p != 0 else w0 * np.ones_like(xi)
    j = j0 * np.ones_like(xi)
    if w.ndim == 0:
        return float(w), float(j)
    return w, j


# --- trajectories -----------------------------------------------------------

@dataclass
class SimilarityTrajectory:
    xi: np.ndarray
    w: np.ndarray
    j: np.ndarray
    reason: str
    terminal_xi: float
    message: str = ""
    W: Optional[np.ndarray] = None
    J: Optional[np.ndarray] = None

    COLUMNS = ("xi", "w", "j", "W", "J", "termination_reason")

    def rows(self):
        last = len(self.xi) - 1
        for i in range(len(self.xi)):
            yield (self.xi[i], self.w[i], self.j[i],
                   None if self.W is None else self.W[i],
                   None if self.J is None else self.J[i],
                   self.reason if i == last else "")

    def to_csv(self, fmt=".17g"):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows():
            writer.writerow(["" if v is None else (v if isinstance(v, str) else format(float(v), fmt))
                             for v in row])
        return buf.getvalue()


def integrate(rhs, initial, xi_span, tol=1e-10, atol=1e-12, events=None):
    """Integrate ``rhs(xi, [w, j]) -> [w', j']`` from ``initial`` over ``xi_span``.

    ``xi_span`` is (xi_start, xi_end); the start must equal ``initial.xi``.
    Returns a :class:`SimilarityTrajectory` that ends at ``xi_end`` or at the
    first singular locus.
    """
    xi0, xi1 = map(float, xi_span)
    if not math.isclose(xi0, initial.xi, rel_tol=1e-14, abs_tol=0.0):
        raise ValueError("xi_span must start at the initial state's xi")
    traj = ode.integrate(rhs, xi0, [initial.w, initial.j], xi1, rtol=tol, atol=atol,
                         events=events)
    return SimilarityTrajectory(traj.x, traj.y[:, 0], traj.y[:, 1], traj.reason,
                                traj.terminal_x, traj.message)


def integrate_reduced(exponents, eos, initial, xi_end, n=0, r=None, tol=1e-10, atol=1e-12):
    """Integrate the general reduced ODEs, halting at the sonic/denominator loci."""
    pl = power_laws(exponents)

    def rhs(xi, y):
        return np.array(general_rhs(SimilarityState(xi, y[0], y[1]), pl, eos, r=r, n=n))

    def denominator(xi, y):
        return pl.alpha * xi ** (1.0 / pl.alpha) - y[1]

    def sonic(xi, y):
        return sonic_function(SimilarityState(xi, y[0], y[1]), pl, eos, r=r, n=n)

    return integrate(rhs, initial, (initial.xi, xi_end), tol, atol,
                     events={"denominator": denominator, "sonic": sonic})


def integrate_case1(a1, a2, a3, A1, n, initial, xi0, J_end, tol=1e-10, atol=1e-12):
    """Integrate the autonomous case-I system in J from ``initial`` at ``xi0``.

    W(J) and ln(xi)(J) are advanced together; the run stops at Delta2 = 0
    (critical point) or Delta = 0 (sonic locus).
    """
    def rhs(J, y):
        out = case1_delta_rhs(CaseITransformedState(J, y[0]), a1, a2, a3, A1, n)
        return np.array([out.dW_dJ, out.dlnxi_dJ])

    def critical(J, y):
        return case1_deltas(CaseITransformedState(J, y[0]), a1, a2, a3, A1, n)[1]

    def sonic(J, y):
        return case1_deltas(CaseITransformedState(J, y[0]), a1, a2, a3, A1, n)[2]

    traj = ode.integrate(rhs, initial.J, [initial.W, math.log(xi0)], J_end, rtol=tol,
                         atol=atol, events={"critical": critical, "sonic": sonic})
    J = traj.x
    W = traj.y[:, 0]
    xi = np.exp(traj.y[:, 1])
    alpha, _, _, _, kappa = _case1_constants(a1, a2, a3)
    return SimilarityTrajectory(xi, xi**kappa * W, xi ** (1.0 / alpha) * J, traj.reason,
                                float(xi[-1]), traj.message, W=W, J=J)
