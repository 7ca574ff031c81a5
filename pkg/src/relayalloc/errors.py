"""Exception types shared across the package."""


class RelayAllocError(Exception):
    """Base class for all package-specific errors."""


class InvalidInstance(RelayAllocError, ValueError):
    """A channel instance or allocation fails its structural invariants."""


class MissingSourceRelayData(RelayAllocError):
    """An operation needs source-relay SNRs but the instance has none."""


class InfeasibleLowerBounds(RelayAllocError):
    """Per-user power floors exceed the relay budget."""


class Infeasible(RelayAllocError):
    """No power allocation satisfies the requested rate targets."""


class TooLarge(RelayAllocError):
    """Exhaustive enumeration would exceed the configured limit."""


class ConfigError(RelayAllocError, ValueError):
    """A config or instance file failed to parse or validate."""
