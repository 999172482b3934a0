"""Exception types shared across the package."""


class NetAppraisalError(Exception):
    """Base class for every error raised deliberately by this package."""


class InputError(NetAppraisalError, ValueError):
    """Malformed or semantically invalid input data."""


class ParseError(InputError):
    """A text input could not be parsed.

    Carries the file name, 1-based line and column so the CLI can point at
    the offending token.
    """

    def __init__(self, message: str, path: str = "<string>", line: int = 0, column: int = 0):
        self.path = str(path)
        self.line = line
        self.column = column
        super().__init__(f"{self.path}:{line}:{column}: {message}")


class DefectError(InputError):
    """Input parsed but violates invariants; ``defects`` lists every violation."""

    def __init__(self, defects, source: str = ""):
        self.defects = list(defects)
        head = f"{source}: " if source else ""
        lines = "\n".join(f"  - {d}" for d in self.defects)
        super().__init__(f"{head}{len(self.defects)} defect(s)\n{lines}")


class ScenarioEditError(InputError):
    """A scenario edit could not be applied to the network."""

    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"edit #{index}: {message}")


class UnreachableError(NetAppraisalError):
    """Demand exists between zones that the network does not connect."""

    def __init__(self, origin, dest):
        self.origin = origin
        self.dest = dest
        super().__init__(f"no path from zone {origin} to zone {dest}")


class ConvergenceError(NetAppraisalError):
    """An iterative procedure exhausted its iteration budget."""

    def __init__(self, message: str, achieved: float):
        self.achieved = achieved
        super().__init__(f"{message} (achieved {achieved:.3e})")
