"""Exception types shared across the toolkit."""


class LampbotError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(LampbotError):
    """A caller-supplied value fails validation."""


class InvalidConfig(LampbotError):
    """A configuration document is malformed or has an unsupported version."""


class UnknownScenario(LampbotError):
    """Requested scenario name is not in the registry."""


class TargetMissing(LampbotError):
    """A named gaze or motion target is absent from the world."""


class Infeasible(LampbotError):
    """A gesture cannot fit within joint limits even after time dilation."""


class Unreachable(LampbotError):
    """Inverse kinematics could not reach the requested goal.

    Carries the best configuration found so that callers can fall back to a
    best-effort trajectory (e.g. straining toward an out-of-reach target).
    """

    def __init__(self, message, best_q=None, best_error=None):
        super().__init__(message)
        self.best_q = best_q
        self.best_error = best_error
