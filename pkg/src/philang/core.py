"""Object core: closures, thunks, attribute resolution, reduction and
dataization.

The evaluation discipline, pinned by the feature programs this runtime has
to reproduce:

- evaluate() is structural and effect-free: it builds closures and atom
  applications without running them;
- an attribute thunk caches the object it evaluated to, once per enclosing
  copy, so stateful atoms (memory, cage, heap allocations) keep their
  identity;
- a closure caches the reduced normal form of its decoration chain, so a
  constructor-style `seq` runs once per instance;
- cell-like native objects are re-read on every dataization, which is what
  the `!` suffix exists to stop: a `!` thunk dataizes eagerly on first force
  and pins the datum.

Control flow is threaded as Signal exceptions carrying a token with
identity; goto/try scopes absorb exactly their own token.
"""

import sys

from .errors import BudgetExceeded, EvalFault
from .syntax import (
    Anchor,
    Application,
    Dispatch,
    Formation,
    Literal,
    MetaImport,
    Name,
    SnapshotRef,
)

_MISS = object()


def is_datum(x):
    return isinstance(x, (bool, int, float, str, bytes))


class Signal(Exception):
    """Non-local outcome: forward/backward jump or a thrown payload."""

    def __init__(self, kind, token, payload=None):
        self.kind = kind
        self.token = token
        self.payload = payload
        super().__init__(kind)


class Thunk:
    __slots__ = ("term", "owner", "obj", "has_obj", "memo", "forcing")

    def __init__(self, term, owner, memo=False):
        self.term = term
        self.owner = owner
        self.obj = None
        self.has_obj = False
        self.memo = memo
        self.forcing = False

    @classmethod
    def of(cls, obj):
        t = cls(None, None)
        t.obj = obj
        t.has_obj = True
        return t

    def force(self, interp):
        if self.has_obj:
            return self.obj
        if self.forcing:
            raise EvalFault("circular-attribute", f"attribute depends on itself near {self.term!r}")
        self.forcing = True
        try:
            obj = interp.evaluate(self.term, self.owner)
            if self.memo:
                obj = interp.dataize(obj)
        finally:
            self.forcing = False
        self.obj = obj
        self.has_obj = True
        return obj


class Closure:
    """A formation instance: the unit of decoration, copying and scope."""

    __slots__ = ("term", "lexical", "bound", "_attrs", "_reduced", "_has_reduced", "_reducing")

    def __init__(self, term, lexical, bound=None):
        self.term = term
        self.lexical = lexical
        self.bound = bound or {}
        self._attrs = {}
        self._reduced = None
        self._has_reduced = False
        self._reducing = False

    def label(self):
        return self.term.name or "[]"

    def binding_term(self, name):
        return self.term.binding(name)

    def attr_thunk(self, name, interp):
        th = self._attrs.get(name)
        if th is None:
            found = None
            for bname, bterm, bconst in self.term.bindings:
                if bname == name:
                    found = (bterm, bconst)
                    break
            if found is None:
                return None
            interp.prepare_blocks(self, name)
            th = Thunk(found[0], self, memo=found[1])
            self._attrs[name] = th
        return th

    def copy_with(self, arg_thunks, interp):
        params = self.term.params
        unbound = [p for p in params if p not in self.bound]
        variadic = self.term.variadic
        new_bound = dict(self.bound)
        args = list(arg_thunks)
        for p in unbound:
            if variadic and p == params[-1]:
                new_bound[p] = Thunk.of(interp.make_array(args))
                args = []
                break
            if not args:
                break
            new_bound[p] = args.pop(0)
        if args:
            raise EvalFault(
                "too-many-arguments",
                f"{self.label()} takes {len(params)} argument(s); extra arguments supplied",
            )
        return Closure(self.term, self.lexical, new_bound)

    def __repr__(self):
        return f"<object {self.label()}>"


class NativeObject:
    """Base for runtime-native objects (cells, heap views, tokens, ...)."""

    label = "native"

    def native_attr(self, interp, name):
        return _MISS

    def native_dataize(self, interp):
        return _MISS

    def native_apply(self, interp, arg_thunks):
        raise EvalFault("not-applicable", f"{self.label} cannot be copied with arguments")

    def native_step(self, interp):
        """Optional reduction step; None means this object is a normal form."""
        return None

    def __repr__(self):
        return f"<{self.label}>"


class AtomFn(NativeObject):
    """A native function; copying it yields an AtomApp."""

    __slots__ = ("name", "fn", "bound")

    def __init__(self, name, fn, bound=None):
        self.name = name
        self.fn = fn
        self.bound = bound

    @property
    def label(self):
        return self.name

    def native_apply(self, interp, arg_thunks):
        return AtomApp(self.name, self.fn, self.bound, list(arg_thunks))


class AtomApp:
    """A fully-formed native application; running it is cached per instance."""

    __slots__ = ("name", "fn", "bound", "args", "result", "has_result")

    def __init__(self, name, fn, bound, args):
        self.name = name
        self.fn = fn
        self.bound = bound
        self.args = args
        self.result = None
        self.has_result = False

    def __repr__(self):
        return f"<{self.name}(...)>"


class HomeView(NativeObject):
    """`x.&`: resolves attributes along x, home(x), home(home(x)), ..."""

    __slots__ = ("start",)
    label = "home"

    def __init__(self, start):
        self.start = start

    def native_attr(self, interp, name):
        node = self.start
        while node is not None:
            found = interp.soft_resolve(node, name)
            if found is not _MISS:
                return found
            node = interp.home_of(node)
        return _MISS


class Interpreter:
    """One program instance: budget, heap, sinks and the root scope."""

    def __init__(
        self,
        builtins,
        data_attr,
        data_home,
        make_array,
        max_steps=1_000_000,
        stdout=None,
        stderr=None,
        trace=False,
    ):
        self.builtins = builtins
        self._data_attr = data_attr
        self._data_home = data_home
        self._make_array = make_array
        self.max_steps = max_steps
        self.steps = 0
        self.stdout = stdout if stdout is not None else sys.stdout.buffer
        self.stderr = stderr if stderr is not None else sys.stderr.buffer
        self.trace = trace
        self.depth = 0
        self.root = None
        self._running = set()

    # -- plumbing -----------------------------------------------------------

    def tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise BudgetExceeded(self.max_steps)

    def out(self, text):
        self.stdout.write(text.encode("utf-8"))
        try:
            self.stdout.flush()
        except (ValueError, OSError):
            pass

    def diag(self, text):
        self.stderr.write(text.encode("utf-8"))
        try:
            self.stderr.flush()
        except (ValueError, OSError):
            pass

    def make_array(self, thunks):
        return self._make_array(thunks)

    def trace_step(self, obj):
        if not self.trace:
            return
        self.diag("  " * self.depth + self.describe(obj) + "\n")

    def describe(self, obj):
        if is_datum(obj):
            text = repr(obj)
            return text if len(text) <= 40 else text[:37] + "..."
        if isinstance(obj, Closure):
            parts = [obj.label()]
            src = obj.binding_term("source")
            if isinstance(src, Literal) and isinstance(src.value, str):
                parts.append(src.value)
            return " ".join(parts)
        if isinstance(obj, AtomApp):
            return obj.name
        if isinstance(obj, NativeObject):
            return obj.label
        return repr(obj)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, term, owner):
        """Structurally evaluate a term in the scope of `owner` (a Closure)."""
        self.tick()
        if isinstance(term, Literal):
            return term.value
        if isinstance(term, Name):
            return self.lookup(term.ident, owner)
        if isinstance(term, Formation):
            return Closure(term, owner)
        if isinstance(term, Dispatch):
            if term.attr == "while":
                return AtomFn("while", self.builtins["__while__"][1], bound=Thunk(term.recv, owner))
            recv = self.evaluate(term.recv, owner)
            return self.resolve(recv, term.attr)
        if isinstance(term, Application):
            head = self.evaluate(term.head, owner)
            thunks = [Thunk(a, owner) for a in term.args]
            return self.apply(head, thunks)
        if isinstance(term, SnapshotRef):
            make = self.builtins["__snapshot_handle__"][1]
            return make(self, Thunk(term.target, owner))
        if isinstance(term, Anchor):
            anchor = self.builtins["__anchor__"][1]
            return AtomApp("anchor", anchor, None, [Thunk(term.recv, owner)])
        if isinstance(term, MetaImport):
            raise EvalFault("meta-eval", "+import lines are not evaluable objects")
        raise AssertionError(f"unknown term {term!r}")

    def evaluate_name(self, ident):
        """Evaluate a top-level name in the root scope."""
        return self.lookup(ident, self.root)

    def lookup(self, ident, owner):
        if ident == "Q":
            return self.root
        if ident == "^":
            if owner is None or owner.lexical is None:
                raise EvalFault("no-parent", "^ used where there is no enclosing object")
            return owner.lexical
        if ident == "&":
            return HomeView(owner)
        if ident == "@":
            return self._lookup_decoratee(owner)
        node = owner
        while node is not None:
            th = node.bound.get(ident)
            if th is None and ident in node.term.params:
                raise EvalFault(
                    "partial-application",
                    f"parameter {ident!r} of {node.label()} was never bound",
                )
            if th is None:
                th = node.attr_thunk(ident, self)
            if th is not None:
                return th.force(self)
            node = node.lexical
        made = self.builtin(ident)
        if made is not _MISS:
            return made
        raise EvalFault("unknown-name", f"nothing named {ident!r} is in scope")

    def _lookup_decoratee(self, owner):
        node = owner
        while node is not None:
            th = node.attr_thunk("@", self)
            if th is not None:
                busy = th.forcing or (th.has_obj and self.is_active(th.obj))
                if not busy:
                    return th.force(self)
            node = node.lexical
        raise EvalFault("unknown-name", "@ used where no enclosing object has a decoratee")

    def is_active(self, obj):
        if id(obj) in self._running:
            return True
        return isinstance(obj, Closure) and obj._reducing

    def builtin(self, ident):
        entry = self.builtins.get(ident, _MISS)
        if entry is _MISS:
            return _MISS
        kind, value = entry
        if kind == "factory":
            return value(self)
        return value

    def prepare_blocks(self, closure, upto_name):
        """Run earlier `.block` bindings so record fields pack in
        declaration order regardless of access order."""
        term = closure.term
        for bname, bterm, _c in term.bindings:
            if bname == upto_name:
                return
            if (
                isinstance(bterm, Application)
                and isinstance(bterm.head, Dispatch)
                and bterm.head.attr == "block"
            ):
                th = closure._attrs.get(bname)
                if th is None:
                    th = Thunk(bterm, closure)
                    closure._attrs[bname] = th
                self.deep_reduce(th.force(self))

    # -- resolution ---------------------------------------------------------

    def resolve(self, obj, name):
        found = self.soft_resolve(obj, name)
        if found is _MISS:
            raise EvalFault(
                "attribute-not-found",
                f"{self.describe(obj)} has no attribute {name!r}",
            )
        return found

    def soft_resolve(self, obj, name):
        seen = None
        while True:
            self.tick()
            if isinstance(obj, Closure):
                if name == "@":
                    th = obj.attr_thunk("@", self)
                    if th is None:
                        return _MISS
                    return th.force(self)
                if name == "^":
                    if obj.lexical is None:
                        raise EvalFault("no-parent", f"{obj.label()} has no enclosing object")
                    return obj.lexical
                if name == "&":
                    return HomeView(obj)
                if name == "Q":
                    return self.root
                th = obj.bound.get(name)
                if th is not None:
                    return th.force(self)
                th = obj.attr_thunk(name, self)
                if th is not None:
                    return th.force(self)
                if obj is self.root:
                    made = self.builtin(name)
                    if made is not _MISS:
                        return made
                at = obj.attr_thunk("@", self)
                if at is None:
                    return _MISS
                if seen is None:
                    seen = set()
                if id(obj) in seen:
                    raise EvalFault(
                        "circular-reduction",
                        f"decoration of {obj.label()} loops back on itself",
                    )
                seen.add(id(obj))
                self.trace_step(obj)
                obj = at.force(self)
                continue
            if isinstance(obj, AtomApp):
                obj = self.run_cached(obj)
                continue
            if is_datum(obj):
                if name == "&":
                    return HomeView(obj)
                return self._data_attr(self, obj, name)
            if isinstance(obj, NativeObject):
                found = obj.native_attr(self, name)
                if found is not _MISS:
                    return found
                if name == "&":
                    return HomeView(obj)
                probe = obj.native_dataize(self)
                if probe is _MISS:
                    return _MISS
                obj = probe
                continue
            raise AssertionError(f"cannot resolve on {obj!r}")

    def home_of(self, obj):
        if isinstance(obj, Closure):
            return obj.lexical
        if is_datum(obj):
            return self._data_home(self, obj)
        return None

    # -- application --------------------------------------------------------

    def apply(self, obj, arg_thunks):
        self.tick()
        if isinstance(obj, Closure):
            return obj.copy_with(arg_thunks, self)
        if isinstance(obj, NativeObject):
            return obj.native_apply(self, arg_thunks)
        if isinstance(obj, AtomApp):
            return self.apply(self.run_cached(obj), arg_thunks)
        if is_datum(obj):
            raise EvalFault("not-applicable", f"a data value ({obj!r}) cannot take arguments")
        raise AssertionError(f"cannot apply {obj!r}")

    # -- reduction & dataization ---------------------------------------------

    def run_cached(self, app):
        if app.has_result:
            return app.result
        if id(app) in self._running:
            raise EvalFault(
                "circular-reduction", f"{app.name} depends on its own result"
            )
        self.tick()
        self.trace_step(app)
        self._running.add(id(app))
        self.depth += 1
        try:
            result = app.fn(self, app.bound, app.args)
        finally:
            self.depth -= 1
            self._running.discard(id(app))
        app.result = result
        app.has_result = True
        return result

    def deep_reduce(self, obj):
        """Reduce to a normal form: a datum, an abstract closure, or a
        native object. Runs whatever the chain passes through."""
        while True:
            self.tick()
            if is_datum(obj):
                return obj
            if isinstance(obj, AtomApp):
                obj = self.run_cached(obj)
                continue
            if isinstance(obj, Closure):
                if obj._has_reduced:
                    return obj._reduced
                th = obj.attr_thunk("@", self)
                if th is None:
                    return obj
                if obj._reducing:
                    raise EvalFault(
                        "circular-reduction",
                        f"{obj.label()} decorates its own reduction",
                    )
                missing = [p for p in obj.term.params if p not in obj.bound]
                if missing:
                    raise EvalFault(
                        "partial-application",
                        f"{obj.label()} dataized with unbound parameter(s): {', '.join(missing)}",
                    )
                self.trace_step(obj)
                obj._reducing = True
                self.depth += 1
                try:
                    reduced = self.deep_reduce(th.force(self))
                finally:
                    self.depth -= 1
                    obj._reducing = False
                obj._reduced = reduced
                obj._has_reduced = True
                return reduced
            if isinstance(obj, NativeObject):
                step = obj.native_step(self)
                if step is None:
                    return obj
                obj = step
                continue
            raise AssertionError(f"cannot reduce {obj!r}")

    def dataize(self, obj):
        """Reduce and then demand a terminal datum."""
        r = self.deep_reduce(obj)
        if is_datum(r):
            return r
        if isinstance(r, NativeObject):
            probe = r.native_dataize(self)
            if probe is not _MISS:
                if is_datum(probe):
                    return probe
                return self.dataize(probe)
            raise EvalFault("missing-decoratee", f"{r.label} does not reduce to a datum")
        raise EvalFault(
            "missing-decoratee",
            f"{self.describe(r)} has neither an atom behavior nor a decoratee",
        )

    def final_value(self, obj):
        """Program-result flavor of dataization: abstract objects are
        acceptable outcomes, cells are read."""
        if is_datum(obj):
            self.trace_step(obj)
        r = self.deep_reduce(obj)
        if is_datum(r) or isinstance(r, Closure):
            return r
        if isinstance(r, NativeObject):
            probe = r.native_dataize(self)
            if probe is not _MISS:
                return self.final_value(probe) if not is_datum(probe) else probe
        return r


def snapshot(obj):
    """Shallow copy: the attribute map is duplicated at this moment."""
    if is_datum(obj):
        return obj
    if isinstance(obj, Closure):
        twin = Closure(obj.term, obj.lexical, dict(obj.bound))
        twin._attrs = dict(obj._attrs)
        twin._reduced = obj._reduced
        twin._has_reduced = obj._has_reduced
        return twin
    return obj
