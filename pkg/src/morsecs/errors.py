"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class CapabilityError(RuntimeError):
    """The request is valid but exceeds what this implementation supports."""


class ConsistencyError(RuntimeError):
    """Two internal evaluation routes disagree beyond their shared tolerance."""


class MarginalStateWarning(UserWarning):
    """The top bound state sits exactly at the continuum threshold.

    Emitted for integer shape parameters, where the counting convention
    includes a state whose energy equals (s + 1/2)^2 and whose
    normalizability is not asserted here.
    """


class TruncationWarning(UserWarning):
    """A truncated integration box leaves out estimated mass above tolerance."""
