"""Exception hierarchy.

Two families: ``InputError`` for bad arguments or violated preconditions
(CLI exit code 2), ``CheckFailed`` for a mathematical verification that
did not hold (CLI exit code 3).
"""


class CentralAutError(Exception):
    pass


class InputError(CentralAutError, ValueError):
    pass


class CheckFailed(CentralAutError):
    pass


# -- input / precondition errors ------------------------------------------

class NonPrime(InputError):
    pass


class EmptyExponents(InputError):
    pass


class NonPositiveExponent(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotInRp(InputError):
    pass


class ExponentTooSmall(InputError):
    pass


class HypothesisViolation(InputError):
    def __init__(self, failed):
        if isinstance(failed, str):
            failed = [failed]
        self.failed = list(failed)
        super().__init__("hypothesis violated: " + "; ".join(self.failed))


class NotRestricted(InputError):
    pass


class NotNormalized(InputError):
    pass


class EnumerationTooLarge(InputError):
    pass


class GroupTooLarge(InputError):
    pass


class NotAPGroup(InputError):
    pass


class NotPCentral(InputError):
    pass


# -- verification failures -------------------------------------------------

class GroupAxiomError(CheckFailed):
    pass


class CocycleIdentityFailed(CheckFailed):
    def __init__(self, witness):
        self.witness = witness
        x, y, z = witness
        super().__init__(f"2-cocycle identity fails at (x, y, z) = ({x}, {y}, {z})")


class IdentityFailed(CheckFailed):
    pass


class DivisionImpossible(CheckFailed):
    pass


class HomomorphismCheckFailed(CheckFailed):
    pass
