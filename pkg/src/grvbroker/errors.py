"""Exception hierarchy shared by the broker modules."""


class BrokerError(Exception):
    """Base class for every error raised by grvbroker."""


# qos model
class AttributeSetError(BrokerError, ValueError):
    pass


class WeightSumViolation(AttributeSetError):
    pass


class DegenerateBounds(AttributeSetError):
    pass


class NonPositiveWeight(AttributeSetError):
    pass


class NonPositiveOmega(AttributeSetError):
    pass


class LengthMismatch(BrokerError, ValueError):
    pass


# grv engine
class InvalidParams(BrokerError, ValueError):
    pass


class IndexOutOfEpoch(BrokerError, IndexError):
    pass


class SeriesLengthMismatch(BrokerError, ValueError):
    pass


class OutOfRangeSum(BrokerError, ValueError):
    pass


# ranking
class EmptyProviderList(BrokerError, ValueError):
    pass


class MeasurementFailure(BrokerError):
    def __init__(self, provider, reason=""):
        super().__init__(f"measurement failed for {provider}" + (f": {reason}" if reason else ""))
        self.provider = provider


class MissingProviderMeasures(BrokerError, KeyError):
    pass


class DuplicateProvider(BrokerError, KeyError):
    pass


class UnknownProvider(BrokerError, KeyError):
    pass


# selection
class EmptyRoster(BrokerError):
    pass


class UnknownClass(BrokerError, KeyError):
    pass


class UnqualifiedProvider(BrokerError, ValueError):
    pass


class AllZero(BrokerError, ValueError):
    pass


class EmptyList(BrokerError, ValueError):
    pass


class NonPositiveUserGrv(BrokerError, ValueError):
    pass


# content index
class EmptyName(BrokerError, ValueError):
    pass


class NotFound(BrokerError, KeyError):
    pass


class UnknownExcludedProvider(BrokerError, ValueError):
    pass


# simulation / io
class InvalidConfig(BrokerError, ValueError):
    pass


class DatasetError(BrokerError):
    pass


class NoMatches(DatasetError):
    pass


class MalformedDataset(DatasetError):
    pass
