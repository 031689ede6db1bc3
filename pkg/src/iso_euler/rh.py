"""
Jump conditions across a discontinuity for an isentropic EOS, and the planar
Noh stagnation-shock state.

With only mass and momentum conserved across the front, the Noh shocked
density solves

    f(rho2) = f(rho0) + rho0 u0^2 / (1 - rho0 / rho2),   rho2 > rho0,

and the shock speed follows from mass conservation, D0 = rho0 u0 / (rho2 - rho0).
"""

import csv
import io
import math
from dataclasses import dataclass

from .eos import TaitEos
from .errors import BracketError


@dataclass(frozen=True)
class JumpState:
    """Unshocked (1) and shocked (2) states on either side of a front moving at D."""

    rho1: float
    u1: float
    rho2: float
    u2: float
    D: float

    def is_admissible_shock(self, eos):
        """rho2 > rho1, P2 > P1 and u2 != u1."""
        return (self.rho2 > self.rho1 and self.u2 != self.u1
                and eos.pressure(self.rho2) > eos.pressure(self.rho1))


def jump_residuals(eos, state):
    """(mass, momentum) residuals of the isentropic jump conditions."""
    if not (state.rho1 > 0.0 and state.rho2 > 0.0):
        raise ValueError("densities must be positive")
    s = state
    mass = (s.u1 - s.D) * s.rho1 - (s.u2 - s.D) * s.rho2
    momentum = (eos.pressure(s.rho1) + s.rho1 * (s.u1 - s.D) * s.u1
                - eos.pressure(s.rho2) - s.rho2 * (s.u2 - s.D) * s.u2)
    return mass, momentum


@dataclass(frozen=True)
class NohShock:
    """Constant shocked state of the planar Noh problem.

    ``sign_changes`` counts the sign changes of the root function seen while
    scanning up to ``1e6 rho0``; more than one means additional admissible
    roots exist and the smallest was returned.
    """

    rho0: float
    u0: float
    rho2: float
    D0: float
    P2: float
    I2: float
    residual: float
    sign_changes: int = 1

    @property
    def multiple_roots(self):
        return self.sign_changes > 1

    def jump_state(self):
        return JumpState(rho1=self.rho0, u1=-self.u0, rho2=self.rho2, u2=0.0, D=self.D0)

    def __iter__(self):
        # unpacks like (rho2, D0)
        return iter((self.rho2, self.D0))


def _noh_root_function(eos, rho0, u0):
    f0 = eos.pressure(rho0)
    q = rho0 * u0 * u0

    def g(rho2):
        return eos.pressure(rho2) - f0 - q * rho2 / (rho2 - rho0)

    return g


def find_root(g, lo, hi, rel_tol=1e-14, max_iter=400):
    """Bracketed root of ``g`` on [lo, hi] by a bisection/secant hybrid.

    A secant (regula falsi) point is used when it lands well inside the
    bracket; otherwise the bracket is bisected. Each iteration costs one
    evaluation, and the bracket at least halves every other iteration.
    """
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if math.copysign(1.0, g_lo) == math.copysign(1.0, g_hi):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]")
    bisect_next = False
    for _ in range(max_iter):
        width = hi - lo
        if width <= rel_tol * max(abs(lo), abs(hi)):
            break
        x = lo - g_lo * width / (g_hi - g_lo)
        margin = 0.05 * width
        if bisect_next or not (lo + margin < x < hi - margin):
            x = 0.5 * (lo + hi)
            bisect_next = False
        else:
            bisect_next = True
        gx = g(x)
        if gx == 0.0:
            return x
        if math.copysign(1.0, gx) == math.copysign(1.0, g_lo):
            lo, g_lo = x, gx
        else:
            hi, g_hi = x, gx
    return lo if abs(g_lo) <= abs(g_hi) else hi


def solve_noh_shock(eos, rho0, u0, n=0):
    """Planar Noh shocked state for inflow speed ``u0`` into density ``rho0``.

    The bracket starts at [rho0 (1 + 1e-9), 2 rho0]; the upper end doubles
    until the root function changes sign, up to 1e6 rho0.

    Returns
    -------
    NohShock
        Unpacks as ``(rho2, D0)``; also carries P2, I2 and the normalized
        root residual.
    """
    if n != 0:
        raise ValueError("only planar geometry (n = 0) is supported: a curvilinear Noh "
                         "solution needs an EOS with constant pressure at varying density")
    rho0, u0 = float(rho0), float(u0)
    if not rho0 > 0.0:
        raise ValueError("rho0 must be positive")
    if not u0 > 0.0:
        raise ValueError("u0 must be positive (u0 <= 0 produces no shock)")
    if not eos.bulk_modulus(rho0) > 0.0:
        raise ValueError("EOS bulk modulus must be positive at rho0")

    g = _noh_root_function(eos, rho0, u0)
    rho_max = min(1e6 * rho0, eos.rho_max)
    lo = rho0 * (1.0 + 1e-9)
    g_lo = g(lo)
    if g_lo >= 0.0:
        raise BracketError(f"root function is non-negative at rho0 (1 + 1e-9) for u0={u0!r}; "
                           "inflow too weak to resolve")
    hi = min(2.0 * rho0, rho_max)
    while g(hi) < 0.0:
        if hi >= rho_max:
            raise BracketError(f"no sign change of the Noh root function up to rho={rho_max:g}")
        lo = hi
        hi = min(2.0 * hi, rho_max)
    rho2 = find_root(g, lo, hi)

    # keep scanning for further sign changes
    sign_changes = 1
    prev = math.copysign(1.0, g(hi))
    x = hi
    while x < rho_max:
        x = min(2.0 * x, rho_max)
        s = math.copysign(1.0, g(x))
        if s != prev:
            sign_changes += 1
            prev = s

    D0 = rho0 * u0 / (rho2 - rho0)
    P2 = eos.pressure(rho2)
    scale = max(abs(P2), rho0 * u0 * u0)
    return NohShock(rho0=rho0, u0=u0, rho2=rho2, D0=D0, P2=P2, I2=eos.sie(rho2),
                    residual=abs(g(rho2)) / scale, sign_changes=sign_changes)


def solve_noh_shock_tait(B, gamma, rho_ref, rho0, u0):
    """Noh shocked state for the modified Tait EOS.

    The SIE offset is chosen so that I(rho0) = 0; P2 - f(rho2) vanishes by
    construction, i.e. the shocked fluid stays on the same isentrope.
    """
    eos = TaitEos(B, gamma, rho_ref).with_sie_zero_at(rho0)
    return solve_noh_shock(eos, rho0, u0)


def tait_root_residual(B, gamma, rho_ref, rho0, u0, rho2):
    """Relative residual of the Tait Noh density equation at ``rho2``."""
    lhs = B * ((rho2 / rho_ref) ** gamma - (rho0 / rho_ref) ** gamma)
    rhs = rho0 * u0 * u0 / (1.0 - rho0 / rho2)
    P2 = B * ((rho2 / rho_ref) ** gamma - 1.0)
    return abs(lhs - rhs) / max(abs(P2), rho0 * u0 * u0)


@dataclass(frozen=True)
class IdealGasNoh:
    gamma: float
    rho0: float
    u0: float
    rho2: float
    D0: float
    P2: float
    I2: float

    def entropy_argument(self):
        """P rho^-gamma in the shocked region; its log sets the ideal-gas entropy."""
        return self.P2 * self.rho2 ** (-self.gamma)


def ideal_gas_noh_reference(gamma, rho0, u0):
    """Classical planar Noh state of a gamma-law gas with energy conservation.

    The compression ratio (gamma + 1)/(gamma - 1) is independent of u0.
    """
    gamma, rho0, u0 = float(gamma), float(rho0), float(u0)
    if not gamma > 1.0:
        raise ValueError("gamma must exceed 1")
    if not (rho0 > 0.0 and u0 > 0.0):
        raise ValueError("rho0 and u0 must be positive")
    rho2 = rho0 * (gamma + 1.0) / (gamma - 1.0)
    return IdealGasNoh(gamma=gamma, rho0=rho0, u0=u0, rho2=rho2,
                       D0=0.5 * (gamma - 1.0) * u0,
                       P2=0.5 * (gamma + 1.0) * rho0 * u0 * u0,
                       I2=0.5 * u0 * u0)


def ideal_gas_shocked_entropy(gamma, rho0, u0, cv=1.0):
    """cv ln(P2 rho2^-gamma) for the ideal-gas Noh shocked state (up to a constant)."""
    return cv * math.log(0.5 * u0 * u0 * rho0 ** (1.0 - gamma) * (gamma + 1.0)
                         * ((gamma + 1.0) / (gamma - 1.0)) ** (-gamma))


NOH_COLUMNS = ("u0", "rho2", "D0", "P2", "I2", "residual_mass", "residual_momentum")


def noh_row(eos, shock):
    mass, mom = jump_residuals(eos, shock.jump_state())
    return (shock.u0, shock.rho2, shock.D0, shock.P2, shock.I2, mass, mom)


def noh_sweep_csv(eos, shocks, fmt=".17g"):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(NOH_COLUMNS)
    for s in shocks:
        writer.writerow([format(v, fmt) for v in noh_row(eos, s)])
    return buf.getvalue()
