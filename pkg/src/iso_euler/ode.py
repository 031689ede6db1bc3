"""
Adaptive Dormand-Prince 5(4) integrator that stops cleanly at singular loci.

Singular loci are described by event functions ``g(x, y)``; a sign change
between two accepted steps is refined by bisection (re-stepping from the last
accepted point) until the bracket is narrower than 1e-12 max(1, |x|). A
``SingularPointError`` raised by the right-hand side is treated as a rejected
step, and if the step then shrinks below the underflow limit the run ends
with a partial trajectory and a diagnostic instead of an exception.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularPointError

# Dormand & Prince (1980), FSAL form
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
ORDER = 5

COMPLETED = "completed"
SINGULAR = "singular"
UNDERFLOW = "step_underflow"
MAX_STEPS = "max_steps"


@dataclass
class Trajectory:
    x: np.ndarray
    y: np.ndarray
    reason: str
    terminal_x: float
    message: str = ""
    events: dict = field(default_factory=dict)

    @property
    def completed(self):
        return self.reason == COMPLETED


def _dp_step(rhs, x, y, k1, h):
    k = np.empty((7, y.size))
    k[0] = k1
    for s in range(1, 7):
        ys = y + h * np.dot(_A[s], k[:s])
        k[s] = rhs(x + _C[s] * h, ys)
    y_new = y + h * np.dot(_B5, k)
    err = h * np.dot(_E, k)
    return y_new, err, k[6]


def integrate(rhs, x0, y0, x_end, rtol=1e-10, atol=1e-12, events=None,
              h0=None, max_steps=200000):
    """Integrate ``dy/dx = rhs(x, y)`` from ``x0`` to ``x_end``.

    Parameters
    ----------
    rhs : callable
        ``rhs(x, y) -> array``; may raise ``SingularPointError``.
    events : dict, optional
        ``name -> g(x, y)``; integration halts where any ``g`` changes sign.

    Returns
    -------
    Trajectory
        Accepted points, termination reason and terminal ``x``. The reason is
        ``"completed"``, ``"singular"`` (with the event name in ``message``),
        ``"step_underflow"`` or ``"max_steps"``.
    """
    events = dict(events or {})
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    x = float(x0)
    x_end = float(x_end)
    direction = 1.0 if x_end >= x else -1.0
    span = abs(x_end - x)
    xs, ys = [x], [y.copy()]
    if span == 0.0:
        return Trajectory(np.array(xs), np.array(ys), COMPLETED, x)

    try:
        k1 = np.asarray(rhs(x, y), dtype=float)
    except SingularPointError as exc:
        raise SingularPointError(f"initial point is singular: {exc}", xi=x) from exc
    g_prev = {name: g(x, y) for name, g in events.items()}
    for name, val in g_prev.items():
        if val == 0.0:
            raise SingularPointError(f"initial point lies on singular locus {name!r}", xi=x)

    def scale(a, b):
        return atol + rtol * np.maximum(np.abs(a), np.abs(b))

    if h0 is None:
        d0 = np.max(np.abs(y) / scale(y, y))
        d1 = np.max(np.abs(k1) / scale(y, y))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, span)
    else:
        h = min(abs(float(h0)), span)
    h *= direction

    last_singular = None
    for _ in range(max_steps):
        h_min = 1e-14 * max(1.0, abs(x))
        if abs(h) < h_min:
            reason = SINGULAR if last_singular is not None else UNDERFLOW
            msg = (f"step size underflow at x={x:.17g}"
                   + (f" ({last_singular})" if last_singular else ""))
            return Trajectory(np.array(xs), np.array(ys), reason, x, msg)
        if direction * (x + h - x_end) > 0.0:
            h = x_end - x
        try:
            y_new, err, k7 = _dp_step(rhs, x, y, k1, h)
            ok = np.all(np.isfinite(y_new))
        except SingularPointError as exc:
            last_singular = str(exc)
            h *= 0.25
            continue
        except (FloatingPointError, ValueError, ZeroDivisionError):
            # e.g. a stage left the EOS validity interval
            ok = False
        if not ok:
            h *= 0.25
            continue
        err_norm = np.max(np.abs(err) / scale(y, y_new))
        if err_norm > 1.0:
            h *= max(0.2, 0.9 * err_norm ** (-1.0 / ORDER))
            continue

        x_new = x + h
        hit = None
        g_new = {}
        for name, g in events.items():
            g_new[name] = g(x_new, y_new)
            if np.sign(g_new[name]) != np.sign(g_prev[name]):
                hit = name
                break
        if hit is not None:
            x_sing, x_last, y_last = _bisect_event(rhs, events[hit], x, y, k1, h, g_prev[hit])
            if x_last != x:
                xs.append(x_last)
                ys.append(y_last)
            return Trajectory(np.array(xs), np.array(ys), SINGULAR, x_sing,
                              f"singular locus {hit!r} at x={x_sing:.17g}",
                              events={hit: x_sing})

        x, y, k1, g_prev = x_new, y_new, k7, g_new
        xs.append(x)
        ys.append(y.copy())
        last_singular = None
        if x == x_end or direction * (x - x_end) >= 0.0:
            return Trajectory(np.array(xs), np.array(ys), COMPLETED, x)
        factor = 5.0 if err_norm == 0.0 else min(5.0, max(0.2, 0.9 * err_norm ** (-1.0 / ORDER)))
        h *= factor
    return Trajectory(np.array(xs), np.array(ys), MAX_STEPS, x,
                      f"max_steps={max_steps} reached at x={x:.17g}")


def _bisect_event(rhs, g, x, y, k1, h, g0):
    """Locate the sign change of ``g`` inside one step by re-stepping from (x, y)."""
    lo, hi = 0.0, h
    y_lo = y
    s0 = np.sign(g0)
    tol = 1e-12 * max(1.0, abs(x))
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        try:
            y_mid, _, _ = _dp_step(rhs, x, y, k1, mid)
            same = np.sign(g(x + mid, y_mid)) == s0
        except SingularPointError:
            same = False
        if same:
            lo, y_lo = mid, y_mid
        else:
            hi = mid
    return x + 0.5 * (lo + hi), x + lo, y_lo
