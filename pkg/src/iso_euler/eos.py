"""
Isentropic equations of state, P = f(rho).

Units are fixed throughout the package: density in g/cm^3, pressure in Mbar,
length in cm and time in microseconds, so velocities are in cm/us and
specific energies in Mbar cm^3/g.

Every EOS exposes the pressure f, its derivative f', the specific internal
energy I = g(rho) + I0 with rho^2 g' = f, the adiabatic bulk modulus
K_S = rho f' and the sound speed sqrt(K_S / rho). Methods accept scalars or
numpy arrays.
"""

import math

import numpy as np

from .errors import EosDomainError

DEFAULT_RHO_MIN = 1e-9
DEFAULT_RHO_MAX = 1e9


def _out(x):
    # keep python floats for scalar input
    return float(x) if np.ndim(x) == 0 else x


class IsentropicEos:
    """Base class. Subclasses implement ``_f``, ``_fprime`` and ``_g``."""

    kind = "abstract"

    def __init__(self, I0=0.0, rho_min=DEFAULT_RHO_MIN, rho_max=DEFAULT_RHO_MAX):
        if not 0.0 < rho_min < rho_max:
            raise ValueError(f"invalid validity interval ({rho_min}, {rho_max})")
        self.I0 = float(I0)
        self.rho_min = float(rho_min)
        self.rho_max = float(rho_max)

    def _f(self, rho):
        raise NotImplementedError

    def _fprime(self, rho):
        raise NotImplementedError

    def _g(self, rho):
        raise NotImplementedError

    def _check(self, rho):
        rho = np.asarray(rho, dtype=float)
        bad = ~((rho >= self.rho_min) & (rho <= self.rho_max))
        if np.any(bad):
            first = rho[bad].flat[0]
            raise EosDomainError(
                f"density {first!r} outside validity interval "
                f"[{self.rho_min:g}, {self.rho_max:g}] of {self.kind} EOS"
            )
        return rho

    def pressure(self, rho):
        """Pressure f(rho)."""
        return _out(self._f(self._check(rho)))

    def dpdrho(self, rho):
        """Derivative f'(rho) along the isentrope."""
        return _out(self._fprime(self._check(rho)))

    def bulk_modulus(self, rho):
        """Adiabatic bulk modulus K_S = rho f'(rho)."""
        rho = self._check(rho)
        return _out(rho * self._fprime(rho))

    def sound_speed(self, rho):
        rho = self._check(rho)
        ks = rho * self._fprime(rho)
        if np.any(ks < 0.0):
            raise EosDomainError("negative bulk modulus; EOS is not hyperbolic here")
        return _out(np.sqrt(ks / rho))

    def sie(self, rho):
        """Specific internal energy g(rho) + I0."""
        return _out(self._g(self._check(rho)) + self.I0)

    def entropy_invariant(self, rho, P):
        """P - f(rho); zero exactly when (rho, P) lies on this isentrope."""
        return _out(np.asarray(P, dtype=float) - self._f(self._check(rho)))

    def with_sie_zero_at(self, rho0):
        """Copy of this EOS with I0 chosen so that sie(rho0) == 0."""
        params = self.to_dict()
        params["I0"] = -float(self._g(self._check(float(rho0))))
        return eos_from_dict(params)

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "type")
        return f"{type(self).__name__}({args})"

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))


class TaitEos(IsentropicEos):
    """Modified Tait EOS, P = B [(rho/rho_ref)^gamma - 1].

    B and gamma may both be negative (the shock-free bubble needs gamma < 0);
    only B*gamma > 0 is required so that K_S > 0. gamma = 1 is excluded
    because the SIE has a 1/(gamma - 1) factor.
    """

    kind = "tait"

    def __init__(self, B, gamma, rho_ref, I0=0.0,
                 rho_min=DEFAULT_RHO_MIN, rho_max=DEFAULT_RHO_MAX):
        super().__init__(I0, rho_min, rho_max)
        B, gamma, rho_ref = float(B), float(gamma), float(rho_ref)
        if rho_ref <= 0.0:
            raise ValueError("rho_ref must be positive")
        if gamma == 0.0 or gamma == 1.0:
            raise ValueError("Tait gamma must differ from 0 and 1")
        if not B * gamma > 0.0:
            raise ValueError("Tait EOS requires B*gamma > 0 (positive bulk modulus)")
        self.B = B
        self.gamma = gamma
        self.rho_ref = rho_ref

    @classmethod
    def water(cls, **kwargs):
        """Water parameters: rho_ref = 1 g/cm^3, B = 3.214e-3 Mbar, gamma = 7."""
        return cls(B=3.214e-3, gamma=7.0, rho_ref=1.0, **kwargs)

    def _f(self, rho):
        return self.B * ((rho / self.rho_ref) ** self.gamma - 1.0)

    def _fprime(self, rho):
        return self.B * self.gamma * (rho / self.rho_ref) ** self.gamma / rho

    def _g(self, rho):
        return (self._f(rho) + self.gamma * self.B) / ((self.gamma - 1.0) * rho)

    def to_dict(self):
        return {"type": "tait", "B": self.B, "gamma": self.gamma,
                "rho_ref": self.rho_ref, "I0": self.I0,
                "rho_min": self.rho_min, "rho_max": self.rho_max}


class PolytropicCaseIEos(IsentropicEos):
    """Pure power law K_S = A1 rho^psi, P = A1 rho^psi / psi.

    This is the only EOS family admitting the three-parameter scaling group
    with a1 != a2, a3 != 0. Both integration constants P0 and I0 vanish, so
    P = (psi - 1) rho I holds exactly.
    """

    kind = "polytropic"

    def __init__(self, A1, psi, rho_min=DEFAULT_RHO_MIN, rho_max=DEFAULT_RHO_MAX):
        super().__init__(0.0, rho_min, rho_max)
        A1, psi = float(A1), float(psi)
        if A1 <= 0.0:
            raise ValueError("A1 must be positive")
        if psi <= 1.0:
            raise ValueError("psi must exceed 1 for positive P and I")
        self.A1 = A1
        self.psi = psi

    def _f(self, rho):
        return self.A1 * rho**self.psi / self.psi

    def _fprime(self, rho):
        return self.A1 * rho ** (self.psi - 1.0)

    def _g(self, rho):
        return self.A1 * rho ** (self.psi - 1.0) / (self.psi * (self.psi - 1.0))

    def with_sie_zero_at(self, rho0):
        raise ValueError("polytropic EOS requires I0 = 0")

    def to_dict(self):
        return {"type": "polytropic", "A1": self.A1, "psi": self.psi,
                "rho_min": self.rho_min, "rho_max": self.rho_max}


class ZeroPressureEos(IsentropicEos):
    """P = 0 for every density; K_S = 0 and I = I0."""

    kind = "zero"

    def _f(self, rho):
        return np.zeros_like(rho)

    def _fprime(self, rho):
        return np.zeros_like(rho)

    def _g(self, rho):
        return np.zeros_like(rho)

    def to_dict(self):
        return {"type": "zero", "I0": self.I0,
                "rho_min": self.rho_min, "rho_max": self.rho_max}


class FunctionEos(IsentropicEos):
    """EOS built from user callables f, f' and g (no JSON form)."""

    kind = "custom"

    def __init__(self, f, fprime, g, I0=0.0,
                 rho_min=DEFAULT_RHO_MIN, rho_max=DEFAULT_RHO_MAX):
        super().__init__(I0, rho_min, rho_max)
        self._user = (f, fprime, g)

    def _f(self, rho):
        return self._user[0](rho)

    def _fprime(self, rho):
        return self._user[1](rho)

    def _g(self, rho):
        return self._user[2](rho)

    def to_dict(self):
        raise TypeError("FunctionEos cannot be serialized")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"FunctionEos(I0={self.I0!r})"


_KEYS = {
    "tait": {"B", "gamma", "rho_ref", "I0", "rho_min", "rho_max"},
    "polytropic": {"A1", "psi", "rho_min", "rho_max"},
    "zero": {"I0", "rho_min", "rho_max"},
}
_REQUIRED = {"tait": {"B", "gamma", "rho_ref"}, "polytropic": {"A1", "psi"}, "zero": set()}
_CLASSES = {"tait": TaitEos, "polytropic": PolytropicCaseIEos, "zero": ZeroPressureEos}


def eos_from_dict(data):
    """Build an EOS from its JSON object form.

    ``{"type": "tait", "B": ..., "gamma": ..., "rho_ref": ..., "I0": ...}``,
    ``{"type": "polytropic", "A1": ..., "psi": ...}`` or ``{"type": "zero"}``.
    A polytropic entry may carry ``"I0": 0``; any other value is rejected.
    Unknown keys raise ``KeyError`` naming the key.
    """
    data = dict(data)
    kind = data.pop("type", None)
    if kind not in _CLASSES:
        raise KeyError(f"type: unknown EOS type {kind!r}")
    if kind == "polytropic" and "I0" in data:
        if data.pop("I0") != 0:
            raise ValueError("I0: polytropic EOS requires I0 = 0")
    unknown = set(data) - _KEYS[kind]
    if unknown:
        raise KeyError(f"{sorted(unknown)[0]}: unknown key for {kind} EOS")
    missing = _REQUIRED[kind] - set(data)
    if missing:
        raise KeyError(f"{sorted(missing)[0]}: missing key for {kind} EOS")
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ValueError(f"{key}: expected a finite number, got {value!r}")
    return _CLASSES[kind](**data)


def eos_to_dict(eos):
    return eos.to_dict()
