"""Exception hierarchy shared by all condcensus modules."""

from __future__ import annotations


class CondCensusError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CondCensusError):
    """Missing or inconsistent configuration (field data, splitting tables, ...)."""


class DivergenceError(CondCensusError):
    """An integral or series was requested outside its region of convergence."""


class UnsupportedCaseError(CondCensusError):
    """A (field, n, discrete datum) combination with no implemented closed form.

    Raised instead of silently returning a wrong constant.
    """


class PrecisionError(CondCensusError):
    """A quadrature could not reach the requested tolerance within its node budget."""

    def __init__(self, message, required_nodes=None):
        super().__init__(message)
        self.required_nodes = required_nodes


class OscillationBudgetError(PrecisionError):
    """Oscillatory integral outside the supported parameter range."""


class TuningError(CondCensusError):
    """An adaptive sampler failed to reach a usable operating point."""


class FitError(CondCensusError):
    """Not enough data points for the requested least-squares fit."""


class NonConvergenceError(CondCensusError):
    """An optimizer or truncation failed to converge; see the attached diagnostics."""
