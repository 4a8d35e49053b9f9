class InvalidProblemError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParseError(ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")


class StructuralError(RuntimeError):
    """The basis is not a spanning tree (cyclic, over-full or disconnected)."""


class SolverAbort(RuntimeError):
    """The pivot loop hit its iteration cap; usually a sign of cycling."""

    def __init__(self, message, pivots=0):
        self.pivots = pivots
        super().__init__(message)
