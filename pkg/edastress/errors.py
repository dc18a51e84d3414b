"""Exception hierarchy.

Every class carries the process exit code the CLI returns for it:
0 success, 2 usage, 3 data, 4 protocol/statistics.
"""


class EdaStressError(Exception):
    exit_code = 1


class UsageError(EdaStressError):
    exit_code = 2


class ConfigError(UsageError, ValueError):
    pass


class DataError(EdaStressError, ValueError):
    exit_code = 3


class ParseError(DataError):

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super(ParseError, self).__init__(
            "%s:%d: %s" % (self.path, line, message)
        )


class SchemaError(DataError):
    pass


class DomainError(DataError):
    pass


class FilterDesignError(DataError):
    pass


class ProtocolError(EdaStressError, ValueError):
    exit_code = 4


class ContractError(ProtocolError):
    pass


class NumericFailureError(ProtocolError):

    def __init__(self, message, grid_point=None):
        self.grid_point = dict(grid_point or {})
        super(NumericFailureError, self).__init__(
            "%s (grid point: %s)" % (message, self.grid_point)
        )


class MetricError(ProtocolError):
    pass


class StatisticsError(EdaStressError, ValueError):
    exit_code = 4


class AuditError(StatisticsError):
    pass
