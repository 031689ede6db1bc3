"""Scale-invariant solutions of the one-dimensional Euler equations for isentropic fluids."""

from .eos import (
    FunctionEos,
    IsentropicEos,
    PolytropicCaseIEos,
    TaitEos,
    ZeroPressureEos,
    eos_from_dict,
    eos_to_dict,
)
from .errors import (
    BracketError,
    ConfigError,
    EosDomainError,
    IsoEulerError,
    OutsideBubbleError,
    PositivityError,
    SingularPointError,
)
from .rh import ideal_gas_noh_reference, jump_residuals, solve_noh_shock, solve_noh_shock_tait
from .scaling import SymmetryCase, classify, derive_exponents
from .solutions import (
    bubble_fields,
    bubble_solution,
    noh_fields,
    noh_solution,
    noh_symmetry_constraints,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError", "ConfigError", "EosDomainError", "FunctionEos", "IsentropicEos",
    "IsoEulerError", "OutsideBubbleError", "PolytropicCaseIEos", "PositivityError",
    "SingularPointError", "SymmetryCase", "TaitEos", "ZeroPressureEos", "bubble_fields",
    "bubble_solution", "classify", "derive_exponents", "eos_from_dict", "eos_to_dict",
    "ideal_gas_noh_reference", "jump_residuals", "noh_fields", "noh_solution",
    "noh_symmetry_constraints", "solve_noh_shock", "solve_noh_shock_tait",
]
