#!/usr/bin/env python
"""
Error hierarchy shared by the kernel library and the experiment CLI.

Every error maps to a process exit code and serializes to a flat dict,
so the CLI can emit it as structured JSON on stderr.
"""
import typing as _t

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARAMETER = 2
EXIT_NUMERICAL = 3
EXIT_TOLERANCE = 4


# ───────────────────────────────────────── Error Classes ────
class KernelError(Exception):
    """Base class for all library errors."""
    exit_code = EXIT_INTERNAL

    def __init__(self, message: str, **details: _t.Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        data = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        for key, value in self.details.items():
            data[key] = _jsonable(value)
        return data


class ParameterError(KernelError, ValueError):
    """Raised when parameters violate a precondition."""
    exit_code = EXIT_PARAMETER


class DomainError(ParameterError):
    """Raised when an argument lies outside the domain of a function."""
    pass


class BranchError(ParameterError):
    """Raised when an argument lies on a branch cut and no side was given."""
    pass


class PoleError(ParameterError):
    """Raised when a residual is evaluated on a pole of its equation."""
    pass


class ConfluentPointError(ParameterError):
    """Raised when the off-diagonal kernel form is asked for x close to y."""
    pass


class InsufficientRangeError(ParameterError):
    """Raised when a trajectory does not reach far enough for a fit."""
    pass


class OutputError(ParameterError):
    """Raised when a result file cannot be written to the output directory."""
    pass


class NumericalBreakdownError(KernelError, RuntimeError):
    """Raised when a numerical procedure loses accuracy or positivity."""
    exit_code = EXIT_NUMERICAL


class SingularityError(NumericalBreakdownError):
    """Raised when an ODE trajectory runs into a singularity."""

    def __init__(self, message: str, last_s: float, **details: _t.Any):
        super().__init__(message, last_s=last_s, **details)
        self.last_s = last_s


class StiffnessError(NumericalBreakdownError):
    """Raised when the integrator step size underflows."""
    pass


class AccuracyError(NumericalBreakdownError):
    """Raised when a series or quadrature misses its tolerance."""
    pass


class RangeError(NumericalBreakdownError):
    """Raised when a special function overflows or returns a non-finite value."""
    pass


class TransformationSingularError(NumericalBreakdownError):
    """Raised when the Bäcklund denominator vanishes."""
    pass


class EnvelopeRefinementError(NumericalBreakdownError):
    """Raised when rejection sampling efficiency drops below the floor."""
    pass


class ToleranceError(KernelError):
    """Raised by --assert gates when an experiment error exceeds the tolerance."""
    exit_code = EXIT_TOLERANCE


class InternalError(KernelError):
    """Wraps an unexpected exception so it still reaches stderr as JSON."""
    pass


def _jsonable(value: _t.Any) -> _t.Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
