"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


class InfeasibleError(ValueError):
    """Requested quantity lies outside the physically feasible range."""


class HeraldError(ValueError):
    """Heralding is impossible for the given source (e.g. vacuum input)."""


class FitError(RuntimeError):
    """A numerical fit failed to converge or the data are unidentifiable."""


class GridError(ValueError):
    """A numerical grid is too coarse or otherwise unusable."""
