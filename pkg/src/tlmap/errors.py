"""Exception types shared across the toolkit.

Two broad families matter for the CLI exit codes: `ValidationError`
(malformed inputs, violated preconditions, exit code 2) and
`NumericError` (numerically impossible or failed computations on
well-formed inputs, exit code 3).
"""


class TlmapError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(TlmapError):
    """Invalid argument, file, or violated precondition."""


class NumericError(TlmapError):
    """Numerical failure on otherwise valid inputs."""


class DomainMismatchError(ValidationError):
    """Operands live in different domains (s vs z) or sample periods."""


class NotMinimumPhaseError(ValidationError):
    """The source system is not minimum-phase, so its inverse is unstable."""


class UnstableSystemError(ValidationError):
    """A system that must be BIBO stable is not."""


class UnstableTargetError(UnstableSystemError):
    """The target system of a map construction is unstable."""


class NonCausalError(ValidationError):
    """Operation requires a causal system (relative degree >= 0)."""


class SimulationDivergedError(NumericError):
    """State norm blew up during integration."""

    def __init__(self, time_index, message=None):
        self.time_index = time_index
        super().__init__(message or f"state diverged at sample {time_index}")


class NoResponseError(NumericError):
    """A step response never exceeded the detection threshold."""


class InconclusiveError(NumericError):
    """Relative-degree estimation could not find a defensible answer."""


class NoExcitationError(ValidationError):
    """The input signal carries no energy, nothing can be fitted."""


class RankDeficientError(NumericError):
    """Regressor matrix too ill-conditioned to solve without regularization."""

    def __init__(self, condition_number, message=None):
        self.condition_number = condition_number
        super().__init__(
            message
            or f"regressor condition number {condition_number:.3e} exceeds 1e12 with ridge=0"
        )


class ConstantReferenceError(ValidationError):
    """Fit metric undefined: the reference signal has zero variance."""
