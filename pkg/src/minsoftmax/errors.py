"""Structured errors raised by the toolkit.

Every constructor or solver either produces a fully valid object or raises
one of these; no partially valid instance is ever observable.
"""

from __future__ import annotations

from dataclasses import dataclass

# Violation kinds reported by core validation.
NON_STOCHASTIC_ROW = "non_stochastic_row"
OUT_OF_RANGE_TRANSITION = "out_of_range_transition"
NON_FINITE_COST = "non_finite_cost"
BAD_SHAPE = "bad_shape"
BAD_VALUE = "bad_value"


@dataclass(frozen=True)
class Violation:
    """One validation failure: what kind, where, and a readable message."""

    kind: str
    where: tuple
    message: str

    def __str__(self) -> str:
        loc = ",".join(str(i) for i in self.where)
        return f"{self.kind}@({loc}): {self.message}"


class MinsoftmaxError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(MinsoftmaxError):
    """Input data violates a declared invariant.

    Carries the full list of violations so callers can report every
    problem at once instead of fixing them one by one.
    """

    def __init__(self, violations: list[Violation], context: str = ""):
        self.violations = list(violations)
        head = f"{context}: " if context else ""
        shown = "; ".join(str(v) for v in self.violations[:20])
        extra = len(self.violations) - 20
        if extra > 0:
            shown += f"; (+{extra} more)"
        super().__init__(f"{head}{len(self.violations)} violation(s): {shown}")


class AllAlphasInfinite(MinsoftmaxError):
    """Every disturbance was excluded (alpha = -inf across the row)."""

    def __init__(self, stage=None, state=None, inp=None):
        self.stage, self.state, self.inp = stage, state, inp
        where = f" at (k={stage}, x={state}, u={inp})" if stage is not None else ""
        super().__init__(f"all alpha entries are -inf{where}; empirical row has no support")


class TemperatureZero(MinsoftmaxError):
    """Softmax adversary requested with gamma_e = 0; use the worst-case index."""


class SupportViolation(MinsoftmaxError):
    """Candidate distribution puts mass where the empirical has none (gamma_h > 0)."""


class DimensionTooLarge(MinsoftmaxError):
    """Simplex enumeration requested above the supported dimension."""


class DivergentIntegrand(MinsoftmaxError):
    """Quadrature integrand does not decay (feasibility matrix not positive definite)."""


class MBelowCritical(MinsoftmaxError):
    """Adversary feasibility matrix gamma_h*I - 2*D'PD failed positive definiteness.

    Attributes:
        stage: recursion stage k at which the check failed (None for fixed point).
        min_eigenvalue: smallest eigenvalue observed.
    """

    def __init__(self, stage=None, min_eigenvalue=None):
        self.stage = stage
        self.min_eigenvalue = min_eigenvalue
        at = "at the fixed point" if stage is None else f"at stage k={stage}"
        ev = "" if min_eigenvalue is None else f" (min eigenvalue {min_eigenvalue:.6g})"
        super().__init__(f"gamma_h is below critical: M not positive definite {at}{ev}")


class NoConvergence(MinsoftmaxError):
    """Fixed-point iteration did not converge within max_iters."""


class NoFiniteCritical(MinsoftmaxError):
    """No finite likelihood factor makes the recursion feasible."""


class UnstableClosedLoop(MinsoftmaxError):
    """Closed-loop spectral radius >= 1; attenuation certificate undefined."""


class ModelMismatch(MinsoftmaxError):
    """Rollout disturbance model is incompatible with the solve result."""


class DegenerateGrid(MinsoftmaxError):
    """Discretization grid too coarse to be meaningful."""


class ParseError(MinsoftmaxError):
    """Scenario file is not readable as structured text."""


class SchemaVersionUnsupported(MinsoftmaxError):
    """Scenario file declares a schema version this build does not understand."""
