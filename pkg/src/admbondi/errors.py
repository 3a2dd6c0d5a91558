"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad sizes, malformed config files, unknown keys."""


class DomainError(ValueError):
    """Evaluation outside an evaluator's validity region (horizon, r_min,
    degenerate metric, non-spacelike slice)."""
