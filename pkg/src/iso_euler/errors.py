"""Exception types raised by the library."""


class IsoEulerError(Exception):
    """Base class for all library errors."""


class EosDomainError(IsoEulerError, ValueError):
    """Density outside an EOS validity interval, or a negative bulk modulus."""


class SingularPointError(IsoEulerError, ArithmeticError):
    """Reduced ODE evaluated on a sonic or critical locus.

    The offending similarity coordinate is kept in ``xi`` (``None`` when the
    system is autonomous and has no natural coordinate, e.g. the Delta-system).
    """

    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class BracketError(IsoEulerError, RuntimeError):
    """No sign change found while bracketing a root."""


class PositivityError(IsoEulerError, RuntimeError):
    """Finite-volume update produced a non-positive density."""

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = tuple(cells)


class OutsideBubbleError(IsoEulerError, ValueError):
    """Bubble solution evaluated past its zero-pressure surface."""


class ConfigError(IsoEulerError, ValueError):
    """Invalid CLI run configuration."""
