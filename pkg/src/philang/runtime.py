"""Program assembly and execution.

Builds the root scope from a parsed module, picks the entry object
(`main`, else `app`, else the last top-level item) and dataizes it under a
step budget, with stdout captured or streamed.
"""

import io
import sys

from . import atoms
from .core import Closure, Interpreter, Signal
from .errors import EvalFault
from .heap import HeapStore
from .parser import attach_source, parse_entries
from .syntax import Formation, Name, SourceSpan


DEFAULT_MAX_STEPS = 1_000_000
DEFAULT_HEAP_SIZE = 1 << 20

# reduction recurses through decoration chains; deep programs need some
# headroom, but a limit past ~3000 risks exhausting the C stack instead of
# raising RecursionError
if sys.getrecursionlimit() < 3000:
    sys.setrecursionlimit(3000)


class Program:
    """A parsed module plus the interpreter it runs in."""

    def __init__(
        self,
        text,
        file="<input>",
        max_steps=DEFAULT_MAX_STEPS,
        heap_size=DEFAULT_HEAP_SIZE,
        trace=False,
        traceability=False,
        stdout=None,
        stderr=None,
        extra_builtins=None,
    ):
        self.file = file
        self.entries = parse_entries(text, file)
        self.stderr = stderr
        if traceability:
            for _name, _const, term in self.entries:
                attach_source(term, warn=self._warn)
        store = HeapStore(heap_size)
        self.interp = Interpreter(
            builtins=atoms.build_builtins(store, extra=extra_builtins),
            data_attr=atoms.data_attr,
            data_home=atoms.data_home,
            make_array=atoms.make_array,
            max_steps=max_steps,
            stdout=stdout,
            stderr=stderr,
            trace=trace,
        )
        self.heap_store = store
        root_term = Formation(
            params=[],
            variadic=False,
            bindings=[(n, t, c) for (n, c, t) in self.entries if n is not None],
            name="Q",
            span=SourceSpan(file, 0, max((t.span.last for (_n, _c, t) in self.entries), default=0)),
        )
        self.root = Closure(root_term, None)
        self.interp.root = self.root

    def _warn(self, message):
        sink = self.stderr
        if sink is not None:
            sink.write(f"warning: {message}\n".encode("utf-8"))
        else:
            sys.stderr.write(f"warning: {message}\n")

    def entry_target(self):
        names = [n for (n, _c, _t) in self.entries if n is not None]
        if "main" in names:
            return Name("main")
        if "app" in names:
            return Name("app")
        if not self.entries:
            raise EvalFault("empty-program", "nothing to dataize: the program is empty")
        name, _const, term = self.entries[-1]
        return Name(name) if name is not None else term

    def run(self):
        """Dataize the entry object; returns the final value."""
        target = self.entry_target()
        try:
            obj = self.interp.evaluate(target, self.root)
            return self.interp.final_value(obj)
        except Signal as s:
            raise EvalFault(
                "escaping-signal",
                f"a {s.kind} signal escaped the program root",
            ) from None
        except RecursionError:
            raise EvalFault(
                "deep-recursion",
                "object nesting exceeded the interpreter stack",
            ) from None

    def dataize_name(self, name):
        """Dataize a named top-level object (used by tests)."""
        obj = self.interp.evaluate(Name(name), self.root)
        return self.interp.final_value(obj)


def run_text(
    text,
    file="<input>",
    max_steps=DEFAULT_MAX_STEPS,
    heap_size=DEFAULT_HEAP_SIZE,
    trace=False,
    traceability=False,
    extra_builtins=None,
):
    """Run source text with captured output.

    Returns (stdout_bytes, stderr_bytes, value).
    """
    out = io.BytesIO()
    err = io.BytesIO()
    program = Program(
        text,
        file=file,
        max_steps=max_steps,
        heap_size=heap_size,
        trace=trace,
        traceability=traceability,
        stdout=out,
        stderr=err,
        extra_builtins=extra_builtins,
    )
    value = program.run()
    return out.getvalue(), err.getvalue(), value


def eval_expr(text, **kwargs):
    """Dataize a one-line expression; returns (stdout_bytes, value)."""
    out_bytes, _err, value = run_text(text, **kwargs)
    return out_bytes, value
