"""
Scaling-group constraint algebra.

The group acts as t -> e^{a1 s} t, r -> e^{a2 s} r, rho -> e^{a3 s} rho, with
the velocity, pressure and SIE exponents forced by invariance of the reduced
Euler system, the jump conditions and the Gibbs relation:

    a4 = a2 - a1,   a5 = a3 + 2 a2 - 2 a1,   a6 = 2 a2 - 2 a1.
"""

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

REL_TOL = 1e-12
FD_STEP = 1e-6


def _close(x, y, scale):
    return abs(x - y) <= REL_TOL * scale


class SymmetryCase(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @property
    def admissible_eos(self):
        return _ADMISSIBLE[self]

    @property
    def shock_law(self):
        return "D0" if self in (SymmetryCase.II, SymmetryCase.IV) else "D0 t^sigma"


_ADMISSIBLE = {
    SymmetryCase.I: "power law: K_S = A1 rho^psi, P = A1 rho^psi / psi, "
                    "I = A1 rho^(psi-1) / (psi (psi-1)) (ideal-gas type, P0 = I0 = 0)",
    SymmetryCase.II: "trivial: K_S = 0, P = 0, I = I0",
    SymmetryCase.III: "trivial: K_S = 0, P = 0, I = 0",
    SymmetryCase.IV: "arbitrary isentropic EOS (purely kinematic r-t scaling)",
}


@dataclass(frozen=True)
class ScalingExponents:
    a1: float
    a2: float
    a3: float

    @property
    def a4(self):
        return self.a2 - self.a1

    @property
    def a5(self):
        return self.a3 + 2.0 * self.a2 - 2.0 * self.a1

    @property
    def a6(self):
        return 2.0 * self.a2 - 2.0 * self.a1


@dataclass(frozen=True)
class PowerLawExponents:
    """Power-law exponents built from (a1, a2, a3); ``None`` marks a zero denominator.

    xi = r / t^alpha, rho = r^zeta w, u = r^beta j, P = r^lambda m,
    I = r^tau h, D = D0 t^sigma and K_S ~ rho^psi.
    """

    sigma: Optional[float]
    psi: Optional[float]
    alpha: Optional[float]
    zeta: Optional[float]
    lam: Optional[float]
    beta: Optional[float]
    tau: Optional[float]

    def as_dict(self):
        return {"sigma": self.sigma, "psi": self.psi, "alpha": self.alpha,
                "zeta": self.zeta, "lambda": self.lam, "beta": self.beta,
                "tau": self.tau}


def _ratio(num, den):
    return None if den == 0.0 else num / den


def derive_exponents(a1, a2, a3):
    """Return ``(ScalingExponents, PowerLawExponents)`` for the given constants.

    Raises ``ValueError`` for a1 = 0, where the time scaling degenerates.
    """
    a1, a2, a3 = float(a1), float(a2), float(a3)
    if a1 == 0.0:
        raise ValueError("a1 must be nonzero")
    sc = ScalingExponents(a1, a2, a3)
    pl = PowerLawExponents(
        sigma=(a2 - a1) / a1,
        psi=_ratio(sc.a5, a3),
        alpha=_ratio(a2, a1),
        zeta=_ratio(a3, a2),
        lam=_ratio(sc.a5, a2),
        beta=_ratio(a2 - a1, a2),
        tau=_ratio(sc.a6, a2),
    )
    return sc, pl


def classify(a1, a2, a3):
    """Table of scale-invariant EOS classes.

    Equality a1 = a2 and a3 = 0 are tested with relative tolerance 1e-12
    against max(|a1|, |a2|). Case I is everything with a1 != a2 and a3 != 0;
    an additional coincidence a2 = a3 does not change the admissible EOS.
    """
    a1, a2, a3 = float(a1), float(a2), float(a3)
    if a1 == 0.0:
        raise ValueError("a1 must be nonzero")
    scale = max(abs(a1), abs(a2))
    equal = _close(a1, a2, scale)
    zero3 = abs(a3) <= REL_TOL * scale
    if equal:
        return SymmetryCase.IV if zero3 else SymmetryCase.II
    return SymmetryCase.III if zero3 else SymmetryCase.I


def exponent_report(a1, a2, a3):
    """JSON-ready ``{"a": [...], "case": ..., "exponents": {...}}``."""
    _, pl = derive_exponents(a1, a2, a3)
    return {"a": [float(a1), float(a2), float(a3)],
            "case": classify(a1, a2, a3).value,
            "exponents": pl.as_dict()}


def exponent_report_json(a1, a2, a3):
    return json.dumps(exponent_report(a1, a2, a3), sort_keys=True)


def ks_determining_residual(eos, a1, a2, a3, rho):
    """a3 rho K_S'(rho) - (a3 + 2 a2 - 2 a1) K_S(rho).

    K_S' is a centered difference with step 1e-6 rho. The residual vanishes
    when the EOS admits the scaling generated by (a1, a2, a3).
    """
    sc = ScalingExponents(float(a1), float(a2), float(a3))
    rho = np.asarray(rho, dtype=float)
    h = FD_STEP * rho
    dks = (eos.bulk_modulus(rho + h) - eos.bulk_modulus(rho - h)) / (2.0 * h)
    res = sc.a3 * rho * dks - sc.a5 * eos.bulk_modulus(rho)
    return float(res) if res.ndim == 0 else res


def shock_trajectory(a1, a2, D0, t):
    """Shock ``(position, velocity)`` for D(t) = D0 t^sigma, sigma = (a2 - a1)/a1.

    The position integrates D from t = 0, which requires sigma > -1.
    """
    a1, a2 = float(a1), float(a2)
    if a1 == 0.0:
        raise ValueError("a1 must be nonzero")
    if not t > 0.0:
        raise ValueError("t must be positive")
    sigma = (a2 - a1) / a1
    if _close(a1, a2, max(abs(a1), abs(a2))):
        sigma = 0.0
    if sigma <= -1.0:
        raise ValueError(f"sigma = {sigma:g} <= -1: shock path not integrable from t = 0")
    velocity = D0 * t**sigma
    position = D0 * t ** (sigma + 1.0) / (sigma + 1.0)
    return position, velocity


def inverse_time(r, xi, alpha, beta):
    """1/t written as xi^(1/alpha) r^(beta - 1)."""
    return xi ** (1.0 / alpha) * r ** (beta - 1.0)
