"""A runtime for a minimal object calculus.

Objects are formations with named attributes; execution is dataization;
everything impure lives in a small set of native atoms (memory, cage, heap,
goto, try). The in-package corpus reproduces one runnable program per
language-feature translation scheme.
"""

from .errors import BudgetExceeded, EvalFault, PhilangError, SyntaxFault
from .parser import attach_source, parse_program
from .runtime import Program, eval_expr, run_text

__all__ = [
    "BudgetExceeded",
    "EvalFault",
    "PhilangError",
    "SyntaxFault",
    "Program",
    "attach_source",
    "eval_expr",
    "parse_program",
    "run_text",
]
