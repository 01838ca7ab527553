"""Exception types shared across the package."""


class HyperconfusionError(Exception):
    """Base class for all library errors."""


class InputError(HyperconfusionError, ValueError):
    """Malformed user input (bad labels, sets, pmfs, tables ...)."""


class MalformedSetError(InputError):
    pass


class SpaceMismatchError(InputError):
    pass


class SizeLimitError(HyperconfusionError):
    """A computation would exceed one of the documented size caps."""


class ZeroProbabilityError(InputError):
    pass


class UndefinedValueError(HyperconfusionError, ArithmeticError):
    """An information quantity has the indeterminate form inf - inf."""


class UnboundAtomError(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotExtractableError(InputError):
    """The message atom occurs in a position that cannot be curried out."""


class InfeasibleRequirementError(HyperconfusionError):
    """No binding of the message makes the requirement evaluate to the top element."""
