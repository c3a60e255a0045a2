"""Error types shared across the runtime.

Exit-code mapping used by the CLI: SyntaxFault -> 2, BudgetExceeded -> 3,
every other EvalFault -> 1.
"""


class PhilangError(Exception):
    """Base class for everything this package raises on purpose."""


class SyntaxFault(PhilangError):
    def __init__(self, message, file=None, line=None):
        self.file = file
        self.line = line
        where = ""
        if file is not None and line is not None:
            where = f"{file}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class EvalFault(PhilangError):
    """Runtime error during evaluation. `kind` is a stable diagnostic tag."""

    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class BudgetExceeded(PhilangError):
    def __init__(self, limit):
        self.limit = limit
        super().__init__(f"evaluation budget exhausted ({limit} steps)")
