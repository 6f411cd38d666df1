class SamplingError(ValueError):
    # Base class for every error raised by the library. It subclasses ValueError so
    # callers that only know about ValueError still catch bad inputs.
    pass


class ConstructionError(SamplingError):
    # Invalid topology, mixing matrix or schedule.
    pass


class ModelError(SamplingError):
    pass


class DataError(SamplingError):
    pass


class BalanceError(DataError):
    # Too few minority-class samples to reach the requested balanced size.
    pass


class StateError(SamplingError):
    # Sampler state does not line up with the model or the mixing matrix.
    pass


class MetricError(SamplingError):
    pass


class DomainError(SamplingError):
    # A theory formula was evaluated outside the range where it is defined.
    pass


class HarnessError(SamplingError):
    pass


class ConfigError(HarnessError):
    pass
