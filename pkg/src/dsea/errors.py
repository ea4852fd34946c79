"""Exception hierarchy shared by the cipher, the attacks and the file formats."""


class DSEAError(Exception):
    """Base class for every error raised by this package."""


class KeyIncompatibleError(DSEAError, ValueError):
    """The block length L exceeds the message length M."""


class LengthMismatchError(DSEAError, ValueError):
    pass


class InsufficientDataError(DSEAError, ValueError):
    pass


class InconsistentPairError(DSEAError, ValueError):
    """The plaintext/ciphertext pair cannot come from any DSEA key."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class NoConsistentMuError(DSEAError):
    pass


class SignalTooShortError(DSEAError, ValueError):
    pass


class BudgetExceededError(DSEAError):
    pass


class IterationCapExceededError(DSEAError):
    pass


class MalformedPGMError(DSEAError, ValueError):
    pass


class NoShapeError(DSEAError, ValueError):
    pass


class MalformedKeyError(DSEAError, ValueError):
    pass
