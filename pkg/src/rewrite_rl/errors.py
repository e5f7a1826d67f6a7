"""Exception hierarchy shared by every module of the package."""


class RewriteRLError(Exception):
    """Base class for all domain errors (CLI exit code 1)."""


class SourceSyntaxError(RewriteRLError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class SemanticError(RewriteRLError):
    pass


class InterpretError(RewriteRLError):
    pass


class StepBudgetExceeded(InterpretError):
    pass


class DivisionByZero(InterpretError):
    pass


class OutOfBounds(InterpretError):
    pass


class UndefinedFunction(InterpretError):
    pass


class RegistrationError(RewriteRLError):
    pass


class UnknownRule(RewriteRLError):
    pass


class SiteMismatch(RewriteRLError):
    pass


class AmbiguousData(RewriteRLError):
    pass


class EmptyInput(RewriteRLError):
    pass


class NoActions(RewriteRLError):
    pass


class FinalStateUpdate(RewriteRLError):
    pass


class BadStart(RewriteRLError):
    pass


class GraphError(RewriteRLError):
    pass
