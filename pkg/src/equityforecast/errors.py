"""Exception hierarchy. Each family maps to one CLI exit code."""


class EquityForecastError(Exception):
    exit_code = 1


class ParseError(EquityForecastError):
    """Malformed snapshot header or unreadable table."""

    exit_code = 2


class DomainError(EquityForecastError, ValueError):
    """An argument outside the operation's mathematical domain."""

    exit_code = 3


class LabelingError(EquityForecastError):
    exit_code = 3


class EmptyDatasetError(LabelingError):
    pass


class BalanceError(LabelingError):
    pass


class TrainingError(EquityForecastError):
    exit_code = 4


class EvaluationError(EquityForecastError):
    exit_code = 5


class StratificationError(EvaluationError):
    pass


class ModelFormatError(EquityForecastError):
    exit_code = 6


class ModelVersionError(ModelFormatError):
    pass


class ConfigError(EquityForecastError):
    exit_code = 1
