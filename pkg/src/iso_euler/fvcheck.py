"""
First-order finite-volume solver for the reduced (two-equation) Euler system.

Conserved variables are (rho, rho u); the pressure is never an independent
unknown, it is evaluated from the EOS at every flux call, so states stay on
the isentrope by construction. Curvilinear geometry uses face areas r^n and
cell volumes (r_R^(n+1) - r_L^(n+1))/(n+1); the pressure enters the momentum
balance through P (A_R - A_L), which keeps mass exactly conservative.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PositivityError
from .solutions import bubble_fields, noh_fields, noh_solution

CFL_MAX = 0.9
WALL, INFLOW, PERIODIC, EXACT, OUTFLOW = "wall", "inflow", "periodic", "exact", "outflow"


@dataclass(frozen=True)
class Boundary:
    """Ghost-cell rule: ``wall`` mirrors, ``inflow`` holds ``state`` = (rho, u),
    ``exact`` calls ``func(r, t) -> (u, rho, ...)``, ``periodic`` wraps."""

    kind: str
    state: tuple = None
    func: object = None


@dataclass(frozen=True)
class Grid1D:
    r_lo: float
    r_hi: float
    rho: np.ndarray
    mom: np.ndarray
    n: int = 0
    t: float = 0.0
    cfl: float = 0.8
    lo: Boundary = field(default_factory=lambda: Boundary(WALL))
    hi: Boundary = field(default_factory=lambda: Boundary(OUTFLOW))

    @property
    def N(self):
        return self.rho.size

    @property
    def dr(self):
        return (self.r_hi - self.r_lo) / self.N

    @property
    def faces(self):
        return np.linspace(self.r_lo, self.r_hi, self.N + 1)

    @property
    def centers(self):
        f = self.faces
        return 0.5 * (f[:-1] + f[1:])

    @property
    def volumes(self):
        f = self.faces
        return (f[1:] ** (self.n + 1) - f[:-1] ** (self.n + 1)) / (self.n + 1)

    @property
    def u(self):
        return self.mom / self.rho

    def total_mass(self):
        return float(np.sum(self.rho * self.volumes))


def make_grid(N, r_lo, r_hi, rho, u, n=0, t=0.0, cfl=0.8, lo=None, hi=None):
    """Grid with cell-center values ``rho(r)``/``u(r)`` (callables or scalars)."""
    if N < 1:
        raise ValueError("N must be positive")
    if n not in (0, 1, 2):
        raise ValueError("geometry n must be 0, 1 or 2")
    if n > 0 and r_lo < 0.0:
        raise ValueError("curvilinear grids need r_lo >= 0")
    f = np.linspace(r_lo, r_hi, N + 1)
    rc = 0.5 * (f[:-1] + f[1:])
    rho_c = np.asarray(rho(rc) if callable(rho) else np.full(N, float(rho)), dtype=float)
    u_c = np.asarray(u(rc) if callable(u) else np.full(N, float(u)), dtype=float)
    if np.any(rho_c <= 0.0):
        raise PositivityError("initial density must be positive", np.flatnonzero(rho_c <= 0.0))
    return Grid1D(float(r_lo), float(r_hi), rho_c, rho_c * u_c, int(n), float(t), float(cfl),
                  lo or Boundary(WALL), hi or Boundary(OUTFLOW))


def _ghost(grid, side, t):
    b = grid.lo if side == "lo" else grid.hi
    i = 0 if side == "lo" else -1
    if b.kind == WALL:
        return grid.rho[i], -grid.mom[i]
    if b.kind == OUTFLOW:
        return grid.rho[i], grid.mom[i]
    if b.kind == PERIODIC:
        j = -1 if side == "lo" else 0
        return grid.rho[j], grid.mom[j]
    if b.kind == INFLOW:
        rho_b, u_b = b.state
        return rho_b, rho_b * u_b
    if b.kind == EXACT:
        r_g = grid.r_lo - 0.5 * grid.dr if side == "lo" else grid.r_hi + 0.5 * grid.dr
        out = b.func(r_g, t)
        return float(out[1]), float(out[1]) * float(out[0])
    raise ValueError(f"unknown boundary kind {b.kind!r}")


def hll_flux(eos, rho_l, mom_l, rho_r, mom_r):
    """Two-wave HLL flux with wave-speed bounds u -+ c."""
    u_l, u_r = mom_l / rho_l, mom_r / rho_r
    p_l, p_r = eos.pressure(rho_l), eos.pressure(rho_r)
    c_l, c_r = eos.sound_speed(rho_l), eos.sound_speed(rho_r)
    s_l = np.minimum(u_l - c_l, u_r - c_r)
    s_r = np.maximum(u_l + c_l, u_r + c_r)
    f1_l, f1_r = mom_l, mom_r
    f2_l, f2_r = mom_l * u_l + p_l, mom_r * u_r + p_r
    inv = 1.0 / np.where(s_r > s_l, s_r - s_l, 1.0)
    f1_star = (s_r * f1_l - s_l * f1_r + s_l * s_r * (rho_r - rho_l)) * inv
    f2_star = (s_r * f2_l - s_l * f2_r + s_l * s_r * (mom_r - mom_l)) * inv
    f1 = np.where(s_l >= 0.0, f1_l, np.where(s_r <= 0.0, f1_r, f1_star))
    f2 = np.where(s_l >= 0.0, f2_l, np.where(s_r <= 0.0, f2_r, f2_star))
    return f1, f2


def max_wave_speed(grid, eos):
    return float(np.max(np.abs(grid.u) + eos.sound_speed(grid.rho)))


def stable_dt(grid, eos):
    return grid.cfl * grid.dr / max_wave_speed(grid, eos)


def step(grid, eos, dt=None):
    """Advance ``grid`` by one explicit step and return the new grid.

    ``dt`` defaults to the CFL limit; an explicit ``dt`` whose Courant number
    exceeds 0.9 is rejected, as is a grid whose ``cfl`` exceeds 0.9.
    """
    if not 0.0 < grid.cfl <= CFL_MAX:
        raise ValueError(f"CFL number {grid.cfl} outside (0, {CFL_MAX}]")
    smax = max_wave_speed(grid, eos)
    if dt is None:
        dt = grid.cfl * grid.dr / smax
    elif dt * smax / grid.dr > CFL_MAX * (1.0 + 1e-12):
        raise ValueError(f"dt={dt:g} violates CFL <= {CFL_MAX} "
                         f"(Courant number {dt * smax / grid.dr:.3f})")
    rho_g = np.concatenate(([0.0], grid.rho, [0.0]))
    mom_g = np.concatenate(([0.0], grid.mom, [0.0]))
    rho_g[0], mom_g[0] = _ghost(grid, "lo", grid.t)
    rho_g[-1], mom_g[-1] = _ghost(grid, "hi", grid.t)

    f1, f2 = hll_flux(eos, rho_g[:-1], mom_g[:-1], rho_g[1:], mom_g[1:])
    faces = grid.faces
    area = faces ** grid.n if grid.n else np.ones_like(faces)
    vol = grid.volumes
    p = eos.pressure(grid.rho)
    rho_new = grid.rho - dt / vol * (area[1:] * f1[1:] - area[:-1] * f1[:-1])
    mom_new = grid.mom - dt / vol * (area[1:] * f2[1:] - area[:-1] * f2[:-1]
                                     - p * (area[1:] - area[:-1]))
    bad = np.flatnonzero(~(rho_new > 0.0))
    if bad.size:
        raise PositivityError(f"non-positive density in cells {bad[:5].tolist()} at "
                              f"t={grid.t + dt:.6g}", bad)
    return replace(grid, rho=rho_new, mom=mom_new, t=grid.t + dt)


def advance(grid, eos, t_final, max_steps=10**7):
    """Step until ``t_final``, shortening the last step to land on it."""
    for _ in range(max_steps):
        if grid.t >= t_final:
            return grid
        dt = min(stable_dt(grid, eos), t_final - grid.t)
        grid = step(grid, eos, dt)
        if t_final - grid.t <= 1e-14 * max(1.0, t_final):
            return replace(grid, t=float(t_final))
    raise RuntimeError("max_steps exceeded")


_GL_X, _GL_W = np.polynomial.legendre.leggauss(3)


def l1_error(grid, analytic, eos=None):
    """L1 norms of rho, u (and P when ``eos`` is given) against ``analytic``.

    ``analytic(r, t)`` returns (u, rho, P, ...). The exact field is
    cell-averaged with 3-point Gauss-Legendre quadrature; the norm uses the
    plain dr measure.
    """
    f = grid.faces
    half = 0.5 * (f[1:] - f[:-1])
    mid = 0.5 * (f[1:] + f[:-1])
    exact = np.zeros((3, grid.N))
    for x, w in zip(_GL_X, _GL_W):
        out = analytic(mid + half * x, grid.t)
        exact += 0.5 * w * np.array([out[0], out[1], out[2]], dtype=float)
    norms = {"rho": float(np.sum(np.abs(grid.rho - exact[1])) * grid.dr),
             "u": float(np.sum(np.abs(grid.u - exact[0])) * grid.dr)}
    if eos is not None:
        norms["P"] = float(np.sum(np.abs(eos.pressure(grid.rho) - exact[2])) * grid.dr)
    return norms


def shock_position(grid, rho_lo, rho_hi):
    """Outermost crossing of the midpoint density (rho_lo + rho_hi)/2, interpolated."""
    level = 0.5 * (rho_lo + rho_hi)
    rc = grid.centers
    above = grid.rho >= level
    idx = np.flatnonzero(above[:-1] & ~above[1:])
    if idx.size == 0:
        return float("nan")
    i = idx[-1]
    r0, r1 = rc[i], rc[i + 1]
    d0, d1 = grid.rho[i], grid.rho[i + 1]
    return float(r0 + (level - d0) * (r1 - r0) / (d1 - d0))


@dataclass
class ErrorReport:
    N: int
    t: float
    l1: dict
    shock_position: float = None
    exact_shock_position: float = None
    dr: float = None

    @property
    def shock_offset_cells(self):
        if self.shock_position is None:
            return None
        return abs(self.shock_position - self.exact_shock_position) / self.dr


def run_noh(eos, u0, rho0, N, t_final, r_hi=1.0, cfl=0.8):
    """Planar Noh run on [0, r_hi]: wall at r = 0, fixed inflow (rho0, -u0) at r_hi."""
    sol = noh_solution(eos, rho0, u0)
    grid = make_grid(N, 0.0, r_hi, rho0, -u0, n=0, cfl=cfl,
                     lo=Boundary(WALL), hi=Boundary(INFLOW, state=(rho0, -u0)))
    grid = advance(grid, eos, t_final)
    report = ErrorReport(N=N, t=grid.t, l1=l1_error(grid, lambda r, t: noh_fields(sol, r, t), eos),
                         shock_position=shock_position(grid, rho0, sol.rho2),
                         exact_shock_position=sol.D0 * grid.t, dr=grid.dr)
    return grid, report


def measure_shock_speed(eos, u0, rho0, N, t1, t2, r_hi=1.0, cfl=0.8):
    """Shock speed from the midpoint-density positions at two times."""
    sol = noh_solution(eos, rho0, u0)
    grid = make_grid(N, 0.0, r_hi, rho0, -u0, n=0, cfl=cfl,
                     lo=Boundary(WALL), hi=Boundary(INFLOW, state=(rho0, -u0)))
    grid = advance(grid, eos, t1)
    x1 = shock_position(grid, rho0, sol.rho2)
    grid = advance(grid, eos, t2)
    x2 = shock_position(grid, rho0, sol.rho2)
    return (x2 - x1) / (t2 - t1)


def bubble_domain(sol, t0, t_final, frac=(0.2, 0.6)):
    """Radial window that stays strictly inside the bubble for t in [t0, t_final]."""
    lo, hi = frac
    if not (0.0 < lo < hi and hi * max(t0, t_final) / min(t0, t_final) < 1.0):
        raise ValueError("window leaves the bubble during the run")
    return lo * sol.xi0 * t0, hi * sol.xi0 * t0


def run_bubble(sol, N, t0, t_final, r_lo=None, r_hi=None, cfl=0.8):
    """Bubble run initialized from exact fields at t0 with exact ghost data."""
    if r_lo is None or r_hi is None:
        r_lo, r_hi = bubble_domain(sol, t0, t_final)
    eos = sol.eos

    def exact(r, t):
        return bubble_fields(sol, r, t)

    # initialize with cell averages of the exact solution
    f = np.linspace(r_lo, r_hi, N + 1)
    half, mid = 0.5 * (f[1:] - f[:-1]), 0.5 * (f[1:] + f[:-1])
    rho_avg = np.zeros(N)
    mom_avg = np.zeros(N)
    for x, w in zip(_GL_X, _GL_W):
        out = exact(mid + half * x, t0)
        rho_avg += 0.5 * w * out.rho
        mom_avg += 0.5 * w * out.rho * out.u
    grid = Grid1D(float(r_lo), float(r_hi), rho_avg, mom_avg, sol.n, float(t0), float(cfl),
                  Boundary(EXACT, func=exact), Boundary(EXACT, func=exact))
    grid = advance(grid, eos, t_final)
    report = ErrorReport(N=N, t=grid.t, l1=l1_error(grid, exact, eos), dr=grid.dr)
    return grid, report


def observed_orders(errors, resolutions):
    """log2-type observed orders between successive resolutions."""
    return [math.log(errors[i] / errors[i + 1]) / math.log(resolutions[i + 1] / resolutions[i])
            for i in range(len(errors) - 1)]


def convergence_report(reports, key="rho"):
    """List of ``{"N", "L1_<key>", "order"}`` dicts; order is None for the coarsest."""
    Ns = [r.N for r in reports]
    errs = [r.l1[key] for r in reports]
    orders = [None] + observed_orders(errs, Ns)
    return [{"N": N, f"L1_{key}": e, "order": o} for N, e, o in zip(Ns, errs, orders)]


def convergence_json(reports, key="rho"):
    return json.dumps(convergence_report(reports, key), indent=2)


def snapshot_csv(grid, eos, fmt=".17g"):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("r_center", "rho", "u", "P"))
    for r, rho, u, p in zip(grid.centers, grid.rho, grid.u, eos.pressure(grid.rho)):
        writer.writerow([format(float(v), fmt) for v in (r, rho, u, p)])
    return buf.getvalue()
