"""Exception types shared across the package.

Every error the library raises deliberately derives from CoplanarError so
callers (and the CLI exit-code mapping) can distinguish input problems,
budget exhaustion, and internal invariant violations.
"""


class CoplanarError(Exception):
    """Base class for all deliberate errors raised by this package."""


class InputError(CoplanarError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class BudgetExceededError(CoplanarError):
    """A configured enumeration/search budget was exhausted (exit code 3)."""


class InvariantViolationError(CoplanarError):
    """An internal consistency check failed (exit code 4)."""


# -- field ------------------------------------------------------------------

class NotPrimePowerError(InputError):
    pass


class DivisionByZeroError(InputError):
    pass


class MixedFieldsError(InputError):
    pass


# -- geometry ---------------------------------------------------------------

class EmptySetError(InputError):
    pass


class TooSmallError(InputError):
    pass


class NotInSpanError(InputError):
    pass


class NotIGPError(InputError):
    pass


# -- classify ---------------------------------------------------------------

class BadDimensionError(InputError):
    pass


class EmptyIntersectionError(InputError):
    pass


class BadParamsError(InputError):
    pass


class BadSizeError(InputError):
    pass


class BadFlatError(InputError):
    pass


# -- auxgraph ---------------------------------------------------------------

class TooFewPointsError(InputError):
    pass


class NoCycleFoundError(CoplanarError):
    """Tight-Hamiltonian-cycle search exhausted without success."""


class SizeMismatchError(InputError):
    pass


class HeavinessViolatedError(InputError):
    pass


# -- supersat ---------------------------------------------------------------

class ProbabilityOverflowError(CoplanarError):
    """A retention probability exceeded 1; parameters are outside the
    regime the construction is designed for."""

    def __init__(self, msg, flat=None, probability=None):
        super().__init__(msg)
        self.flat = flat
        self.probability = probability


class PreconditionViolatedError(InputError):
    """A named precondition of the substitution machinery failed."""

    def __init__(self, clause, msg=""):
        super().__init__(f"{clause}: {msg}" if msg else clause)
        self.clause = clause


class SubstitutionStuckError(CoplanarError):
    """A replacement pool or neighbor set was exhausted mid-substitution.
    Callers skip the instance and log it; never fabricated around."""


class BadJError(InputError):
    pass
