"""Exception types shared across the package."""


class SwarmSimError(Exception):
    """Base class for all swarmsim errors."""


class ConfigError(SwarmSimError):
    """Invalid configuration: bad value, unknown key, or parse failure."""


class TickOverflowError(SwarmSimError):
    """advance_tick called on a world whose clock is already at max_ticks."""


class DegenerateWeightsError(SwarmSimError):
    """Fusion weights undefined because every snr*dos product is zero."""
