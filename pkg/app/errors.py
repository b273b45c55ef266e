"""
Exception hierarchy for the Welch equation toolkit

Every error derives from WelchError, so callers that only care about bad
input can catch one class. WelchError is not a ValueError: raised inside a
pydantic validator it propagates unchanged instead of being wrapped.
"""


class WelchError(Exception):
    """Base class for all toolkit errors"""


class InvalidModulusError(WelchError):
    """p is not a prime, e < 1, or p exceeds the configured bound"""


class NonUnitError(WelchError):
    """An argument that must be a unit mod p is divisible by p"""


class NonUnitBaseError(NonUnitError):
    """Negative exponent on a base that is not invertible"""


class NonUnitXError(NonUnitError):
    """x is divisible by p"""


class EvenGError(NonUnitError):
    """g is even while p = 2"""


class OddPrimeRequiredError(WelchError):
    """The operation is only defined for odd p"""


class PrimeTwoRequiredError(WelchError):
    """The operation is only defined for p = 2"""


class DomainError(WelchError):
    """A p-adic series was asked to evaluate outside its disk of convergence"""


class NotARootError(WelchError):
    """The base residue of a lift is not a root mod p"""


class SingularRootError(WelchError):
    """The derivative vanishes mod p at the base residue"""


class NotPrimitiveRootError(WelchError):
    """g does not generate the full unit group mod p^e"""


class NotASolutionError(WelchError):
    """A pair (x, c) does not satisfy g^(x-1+c) = x mod p^e"""


class EvenXError(WelchError):
    """The 2-adic interpolants are only defined on odd x"""


class BudgetExceededError(WelchError):
    """A brute-force scan would exceed its ScanBudget"""


class CountMismatchError(WelchError):
    """A constructive solver disagrees with the count its theorem predicts"""


class InvalidInputError(WelchError):
    """A CLI request failed validation before dispatch"""
