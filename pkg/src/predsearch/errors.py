"""Exception types shared across the package."""


class InputError(ValueError):
    """Bad argument: invalid vertex id, malformed graph, out-of-scope parameter."""


class GraphValidationError(InputError):
    """Graph violates a structural invariant (negative weight, dangling id, not a tree)."""


class CapacityError(InputError):
    """Exact routine asked to handle an input above its size cap."""


class InfeasibleError(ValueError):
    """Required vertices are not mutually reachable."""


class DegenerateMetricError(ValueError):
    """Two distinct points sit at distance zero, so ratios are undefined."""


class ProtocolViolation(RuntimeError):
    """A strategy tried to move somewhere the exploration model forbids."""


class DisconnectedInstanceError(RuntimeError):
    """The frontier ran dry before the goal was reached."""


class ModelViolationError(RuntimeError):
    """Predictions break the relative-error model the strategy relies on."""


class GenerationError(RuntimeError):
    """A random generator exhausted its rejection budget."""


class InstanceFormatError(ValueError):
    """Instance file could not be parsed; message carries line/field context."""
