"""Exception hierarchy shared by every layer of the planner."""


class NmrdppError(Exception):
    """Base class for all planner errors."""

    exit_code = 1


class ConfigError(NmrdppError):
    """Incompatible or invalid run configuration."""

    exit_code = 2


class ParseError(NmrdppError):
    """Malformed formula, reward, domain or trace text."""

    exit_code = 3

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)


class FormulaSyntaxError(ParseError):
    pass


class DomainParseError(ParseError):
    pass


class CapExceeded(NmrdppError):
    """A configured size budget was exhausted.

    ``count`` records how far the computation got before aborting.
    """

    exit_code = 4

    def __init__(self, message, count=None):
        self.count = count
        super().__init__(message)


class EstateBudgetExceeded(CapExceeded):
    pass


class NodeBudgetExceeded(CapExceeded):
    pass


class ExplicitCapExceeded(CapExceeded):
    pass


class InfeasibleError(NmrdppError):
    """Control knowledge leaves no admissible behaviour from the start."""

    exit_code = 5


class UnboundAtomError(NmrdppError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EntailmentError(NmrdppError, KeyError):
    """A temporal subterm was looked up in a label that does not cover it."""

    def __str__(self):
        return Exception.__str__(self)
