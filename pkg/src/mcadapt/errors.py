"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class LengthMismatch(ValueError):
    """A bit sequence does not have the required length."""


class InvalidBracket(ValueError):
    """A minimization bracket with lo >= hi."""


class NonConvergence(RuntimeError):
    """Adaptive refinement exhausted its budget without meeting tolerance."""


class DegenerateStats(ValueError):
    """Binding statistics with non-positive variance."""


class ConfigError(ValueError):
    """An operation was invoked with an unresolved or inconsistent setup."""


class ParseError(ValueError):
    """Malformed or unknown content in a run-configuration file."""


class ValidationError(ValueError):
    """A configuration value violates a documented invariant."""
