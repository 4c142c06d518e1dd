"""Exception hierarchy shared by every module."""


class HardyError(Exception):
    """Base class for all library errors."""


class OutsideDomain(HardyError, ValueError):
    """A point lies outside the closed unit disk (or a parameter outside the open disk)."""


class SingularPoint(HardyError, ValueError):
    """Evaluation requested at a listed singular boundary point."""


class NonConvergent(HardyError):
    """A doubling or refinement sequence failed to stabilise."""


class AliasingTooLarge(HardyError):
    """The Fourier tail at the sampling radius exceeds the tolerance."""


class Undecided(HardyError):
    """A stability criterion could not decide between the alternatives."""


class EmptyLevel(HardyError):
    """No sample reached the requested superlevel set."""


class NotBounded(HardyError):
    """An estimator that requires a bounded operator was handed an unbounded one."""


class NoConvergence(HardyError):
    """An iterative eigen-solver hit its iteration cap."""


class ValidationError(HardyError, ValueError):
    """Input parsed correctly but violates a semantic constraint."""


class ParseError(HardyError, ValueError):
    """Syntax error in a scenario document or function expression."""

    def __init__(self, message, line=1, col=1):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"line {line}, column {col}: {message}")
