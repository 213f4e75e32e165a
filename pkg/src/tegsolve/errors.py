"""Exception hierarchy for tegsolve.

Every failure mode that callers are expected to branch on gets its own class;
the CLI maps groups of these onto distinct exit codes.
"""


class TegError(Exception):
    """Base class for all tegsolve errors."""


class DomainError(TegError):
    """Evaluation requested outside a model's valid temperature range."""


class NonPositiveValue(TegError):
    """A material property evaluated to a value <= 0."""


class RangeError(TegError):
    """Inverse-transform target outside [T_c, K_infinity)."""


class InvalidMaterial(TegError):
    """Material model rejected at construction (bad parameters, bad knots, ...)."""


class DegenerateError(TegError):
    """T_h = T_c: the figure of merit and efficiency formulas are undefined."""


class ZeroSeebeck(TegError):
    """alpha0 = 0 where a nonzero Seebeck coefficient is required."""


class ZeroVoltage(TegError):
    """V = alpha0 * (T_h - T_c) = 0 where a nonzero voltage is required."""


class NumericalBlowup(TegError):
    """The integrator could not reach the cold-side crossing; usually a bad
    material model (the well-posedness assumptions rule this out)."""


class NonPositiveHotFlux(TegError):
    """Hot-side heat flux q_h <= 0; flux-ratio efficiency is not meaningful."""


class ScanIncomplete(TegError):
    """Root scan found no bracket and both endpoints sit on the same side of
    the target level.  Carries diagnostics instead of returning silently."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConfigError(TegError):
    """CLI configuration file failed to parse or validate."""
