"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the command line layer
can translate failures without a lookup table.
"""


class SkillScoreError(Exception):
    exit_code = 2


class UsageError(SkillScoreError):
    exit_code = 1


class InputError(SkillScoreError, ValueError):
    exit_code = 2


class ParseError(InputError):
    exit_code = 2


class InsufficientDataError(InputError):
    exit_code = 2


class DomainError(SkillScoreError, ValueError):
    exit_code = 3


class SingularDesignError(SkillScoreError, ArithmeticError):
    exit_code = 3

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class DegenerateDataError(SkillScoreError, ArithmeticError):
    exit_code = 3
