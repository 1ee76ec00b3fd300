class SltcError(Exception):
    pass


# network

class UnreachableDestination(SltcError, ValueError):
    pass


class NetworkValidationError(SltcError, ValueError):
    pass


# freight demand

class MissingGroupParams(SltcError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonPositiveLogArgument(SltcError, ValueError):
    pass


class NoCandidateSupplier(SltcError, ValueError):
    pass


class NoCarrierAvailable(SltcError, ValueError):
    pass


class ShipmentExceedsCapacity(SltcError, ValueError):
    pass


# slb and adjustment

class MissingRoute(SltcError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DimensionMismatch(SltcError, ValueError):
    pass


class InfeasibleAdjustment(SltcError, ValueError):
    pass


# estimation

class ZeroInitialFrequency(SltcError, ValueError):
    pass


class InsufficientObservations(SltcError, ValueError):
    pass


class EmptyOriginRow(SltcError, ValueError):
    pass


class NonConvergence(SltcError, RuntimeError):
    pass


# loop and command line

class EmptyInput(SltcError, ValueError):
    pass


class InvalidConfig(SltcError, ValueError):
    pass


class MissingInput(SltcError, FileNotFoundError):
    pass


class SchemaViolation(SltcError, ValueError):
    pass
