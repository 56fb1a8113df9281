"""Exception types raised across the simulator."""


class StakeSimError(Exception):
    """Base class for all simulator errors."""


# -- chain ----------------------------------------------------------------

class AmountNot32Eth(StakeSimError):
    pass


class NotActive(StakeSimError):
    pass


class AlreadyQueued(StakeSimError):
    pass


class UnknownValidator(StakeSimError):
    pass


# -- wait-time estimator --------------------------------------------------

class ActiveOutOfTableRange(StakeSimError):
    pass


class MalformedRow(StakeSimError):
    def __init__(self, row_index, message=""):
        self.row_index = row_index
        super().__init__(f"row {row_index}: {message}" if message else f"row {row_index}")


# -- liquid pool ----------------------------------------------------------

class ZeroAmount(StakeSimError):
    pass


class InsufficientShares(StakeSimError):
    pass


class StaleReport(StakeSimError):
    pass


class NoOperators(StakeSimError):
    pass


class NotClaimable(StakeSimError):
    pass


# -- restaking ------------------------------------------------------------

class DuplicateId(StakeSimError):
    pass


class OperatorFrozen(StakeSimError):
    pass


class AlreadyRestaked(StakeSimError):
    pass


class NotOptedIn(StakeSimError):
    pass


class DecentralizationConstraint(StakeSimError):
    pass


# -- analytics ------------------------------------------------------------

class EmptyDistribution(StakeSimError):
    pass


# -- scenario / CLI -------------------------------------------------------

class ConfigError(StakeSimError):
    pass
