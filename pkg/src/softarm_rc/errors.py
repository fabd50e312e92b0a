"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command line front
end can translate failures without a lookup table of its own.
"""


class SoftArmError(Exception):
    exit_code = 1


class ContractError(SoftArmError, ValueError):
    """Argument outside the documented domain of an operation."""

    exit_code = 2


class ConfigError(SoftArmError, ValueError):
    exit_code = 2


class InvalidStateError(SoftArmError, ValueError):
    """Non-finite or non-physical arm configuration."""

    exit_code = 3


class IntegrationDivergedError(SoftArmError, RuntimeError):
    exit_code = 3

    def __init__(self, message, t=None, index=None, step=None):
        super().__init__(message)
        self.t = t
        self.index = index
        self.step = step


class TargetDivergedError(SoftArmError, RuntimeError):
    """A NARMA recurrence left its bounded range (input scaling is wrong)."""

    exit_code = 3

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class RankDeficiencyError(SoftArmError, ArithmeticError):
    exit_code = 4


class MetricError(SoftArmError, ValueError):
    exit_code = 4


class SchemaError(SoftArmError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    exit_code = 5

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
