"""Exception hierarchy shared across the toolkit.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class CircthermoError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CircthermoError):
    """Invalid configuration, parameters out of range, or malformed input."""


class HypothesisError(CircthermoError):
    """A run was gated on the standing hypotheses and they failed."""


class SolverError(CircthermoError):
    """An iterative solver (root finder, eigensolver, resolvent) failed."""


class ResourceLimitError(CircthermoError):
    """A guarded computation would exceed its resource budget."""


class SmoothnessError(CircthermoError):
    """An operation requires more smoothness than the input carries."""


class SchemeQualityError(CircthermoError):
    """A discretization produced results too distorted to trust."""
