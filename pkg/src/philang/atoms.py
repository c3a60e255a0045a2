"""Native atoms: control flow (seq/if/while/goto/try), mutable cells
(memory/cage), data and array operations, heap access, and I/O.

Everything impure lives here; the object core only knows how to run an
AtomApp and how to ask a native object for attributes, a datum, or a step.
"""

from . import heap as heapmod
from .core import (
    _MISS,
    AtomApp,
    AtomFn,
    Closure,
    NativeObject,
    Signal,
    Thunk,
    snapshot,
)
from .errors import EvalFault

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


def _check_int64(v):
    if not (_INT64_MIN <= v <= _INT64_MAX):
        raise EvalFault("int64-overflow", f"{v} does not fit in a signed 64-bit integer")
    return v


def to_text(v):
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    if isinstance(v, str):
        return v
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, bytes):
        return heapmod.decode_string(v)
    raise EvalFault("not-text", f"{v!r} has no text form")


def _arity(args, n, what):
    if len(args) != n:
        raise EvalFault("arity", f"{what} expects {n} argument(s), got {len(args)}")


# -- control flow -------------------------------------------------------------


class JumpToken(NativeObject):
    """Identity-bearing capability handed into a goto or try scope."""

    __slots__ = ("kind", "alive")

    def __init__(self, kind):
        self.kind = kind
        self.alive = True

    @property
    def label(self):
        return f"{self.kind}-token"

    def native_attr(self, interp, name):
        if self.kind == "goto" and name in ("forward", "backward"):
            return Raiser(self, name, None)
        return _MISS

    def native_apply(self, interp, arg_thunks):
        if self.kind != "try":
            raise EvalFault("not-applicable", "a goto token is not applicable; use .forward/.backward")
        _arity(arg_thunks, 1, "throw")
        return Raiser(self, "thrown", arg_thunks[0])

    def native_dataize(self, interp):
        if self.kind == "try":
            raise EvalFault(
                "bare-token",
                "a throw token must be applied to a payload before dataization",
            )
        raise EvalFault(
            "bare-token",
            "a jump token is not a datum; use .forward/.backward",
        )


class Raiser(NativeObject):
    """Reducing this raises the token's signal; applying it adds a payload."""

    __slots__ = ("token", "kind", "payload_thunk")

    def __init__(self, token, kind, payload_thunk):
        self.token = token
        self.kind = kind
        self.payload_thunk = payload_thunk

    @property
    def label(self):
        return f"{self.kind}-signal"

    def native_apply(self, interp, arg_thunks):
        if self.payload_thunk is not None:
            raise EvalFault("arity", f"{self.kind} already carries a payload")
        _arity(arg_thunks, 1, self.kind)
        return Raiser(self.token, self.kind, arg_thunks[0])

    def native_step(self, interp):
        if not self.token.alive:
            raise EvalFault(
                "dead-token",
                f"{self.kind} signal raised outside its {self.token.kind} scope",
            )
        payload = None
        if self.payload_thunk is not None:
            payload = interp.deep_reduce(self.payload_thunk.force(interp))
        raise Signal(self.kind, self.token, payload)


def _run_seq(interp, _bound, args):
    if not args:
        raise EvalFault("arity", "seq needs at least one object")
    value = None
    for t in args:
        value = interp.deep_reduce(t.force(interp))
    return value


def _run_if_bool(interp, cond, args):
    _arity(args, 2, "if")
    chosen = args[0] if cond else args[1]
    return interp.deep_reduce(chosen.force(interp))


def _run_if3(interp, _bound, args):
    _arity(args, 3, "if")
    cond = interp.dataize(args[0].force(interp))
    if not isinstance(cond, bool):
        raise EvalFault("non-boolean-condition", f"if condition reduced to {cond!r}")
    chosen = args[1] if cond else args[2]
    return interp.deep_reduce(chosen.force(interp))


def _run_while(interp, cond_thunk, args):
    _arity(args, 1, "while")
    body = args[0].force(interp)
    index = 0
    while True:
        interp.tick()
        cond_obj = (
            interp.evaluate(cond_thunk.term, cond_thunk.owner)
            if cond_thunk.term is not None
            else cond_thunk.force(interp)
        )
        cond = interp.dataize(cond_obj)
        if not isinstance(cond, bool):
            raise EvalFault("non-boolean-condition", f"while condition reduced to {cond!r}")
        if not cond:
            return False
        copy = interp.apply(body, [Thunk.of(index)])
        interp.deep_reduce(copy)
        index += 1


def _run_goto(interp, _bound, args):
    _arity(args, 1, "goto")
    scope = args[0].force(interp)
    if not isinstance(scope, Closure) or len(scope.term.params) != 1:
        raise EvalFault("bad-scope", "goto expects a one-parameter object")
    token = JumpToken("goto")
    try:
        while True:
            interp.tick()
            copy = interp.apply(scope, [Thunk.of(token)])
            try:
                return interp.deep_reduce(copy)
            except Signal as s:
                if s.token is not token:
                    raise
                if s.kind == "backward":
                    continue
                return s.payload if s.payload is not None else True
    finally:
        token.alive = False


def _run_try(interp, _bound, args):
    _arity(args, 3, "try")
    body = args[0].force(interp)
    catch = args[1].force(interp)
    if not isinstance(body, Closure) or len(body.term.params) != 1:
        raise EvalFault("bad-scope", "try expects a one-parameter body object")
    if not isinstance(catch, Closure) or len(catch.term.params) != 1:
        raise EvalFault("bad-scope", "try expects a one-parameter catch object")
    token = JumpToken("try")
    try:
        try:
            copy = interp.apply(body, [Thunk.of(token)])
            return interp.deep_reduce(copy)
        except Signal as s:
            if s.kind == "thrown" and s.token is token:
                handler = interp.apply(catch, [Thunk.of(s.payload)])
                return interp.deep_reduce(handler)
            raise
    finally:
        token.alive = False
        interp.deep_reduce(args[2].force(interp))


# -- mutable cells ------------------------------------------------------------


class MemoryCell(NativeObject):
    __slots__ = ("value", "written")
    label = "memory"

    def __init__(self):
        self.value = None
        self.written = False

    def native_attr(self, interp, name):
        if name == "write":
            return AtomFn("memory-write", _run_memory_write, bound=self)
        return _MISS

    def native_dataize(self, interp):
        if not self.written:
            raise EvalFault("memory-unset", "memory read before the first write")
        return self.value


def _run_memory_write(interp, cell, args):
    _arity(args, 1, "memory.write")
    value = interp.dataize(args[0].force(interp))
    cell.value = value
    cell.written = True
    return value


class CageSlot(NativeObject):
    __slots__ = ("stored",)
    label = "cage"

    def __init__(self):
        self.stored = None

    def native_attr(self, interp, name):
        if name == "write":
            return AtomFn("cage-write", _run_cage_write, bound=self)
        if self.stored is None:
            raise EvalFault("cage-empty", f"cage read ({name}) before the first write")
        return interp.soft_resolve(self.stored, name)

    def native_apply(self, interp, arg_thunks):
        if self.stored is None:
            raise EvalFault("cage-empty", "cage applied before the first write")
        return interp.apply(self.stored, arg_thunks)

    def native_dataize(self, interp):
        if self.stored is None:
            raise EvalFault("cage-empty", "cage dataized before the first write")
        return self.stored


def _run_cage_write(interp, slot, args):
    _arity(args, 1, "cage.write")
    slot.stored = args[0].force(interp)  # stored unevaluated: no reduction here
    return True


class SnapshotHandle(NativeObject):
    """`x' > c` makes this handle; `c.<` captures x's current content."""

    __slots__ = ("target_thunk", "captured", "anchored")
    label = "snapshot"

    def __init__(self, target_thunk):
        self.target_thunk = target_thunk
        self.captured = None
        self.anchored = False

    def _need(self):
        if not self.anchored:
            raise EvalFault("snapshot-unanchored", "snapshot used before its .< anchor")
        return self.captured

    def anchor(self, interp):
        target = self.target_thunk.force(interp)
        if isinstance(target, CageSlot):
            if target.stored is None:
                raise EvalFault("cage-empty", "snapshot anchor on an empty cage")
            self.captured = snapshot(target.stored)
        else:
            self.captured = snapshot(target)
        self.anchored = True
        return True

    def native_attr(self, interp, name):
        return interp.soft_resolve(self._need(), name)

    def native_apply(self, interp, arg_thunks):
        return interp.apply(self._need(), arg_thunks)

    def native_dataize(self, interp):
        return self._need()


def _run_anchor(interp, _bound, args):
    handle = args[0].force(interp)
    if not isinstance(handle, SnapshotHandle):
        raise EvalFault("bad-anchor", ".< works only on a snapshot handle")
    return handle.anchor(interp)


def _make_snapshot_handle(interp, thunk):
    return SnapshotHandle(thunk)


# -- arrays -------------------------------------------------------------------


class ArrayObject(NativeObject):
    __slots__ = ("items",)
    label = "array"

    def __init__(self, items):
        self.items = list(items)

    def native_attr(self, interp, name):
        if name == "get":
            return AtomFn("array-get", _run_array_get, bound=self)
        if name == "each":
            return AtomFn("array-each", _run_array_each, bound=self)
        if name == "length":
            return len(self.items)
        return _MISS


def _run_array_get(interp, arr, args):
    _arity(args, 1, "array.get")
    index = interp.dataize(args[0].force(interp))
    if not isinstance(index, int) or isinstance(index, bool):
        raise EvalFault("bad-index", f"array index must be an integer, got {index!r}")
    if not (0 <= index < len(arr.items)):
        raise EvalFault("index-out-of-range", f"index {index} outside 0..{len(arr.items) - 1}")
    return interp.deep_reduce(arr.items[index].force(interp))


def _run_array_each(interp, arr, args):
    _arity(args, 1, "array.each")
    body = args[0].force(interp)
    for item in arr.items:
        interp.deep_reduce(interp.apply(body, [item]))
    return True


def _run_array_make(interp, _bound, args):
    return ArrayObject(args)


def make_array(thunks):
    return ArrayObject(thunks)


# -- data operations ----------------------------------------------------------


def _num(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise EvalFault("type-error", f"{what} needs a number, got {v!r}")
    return v


def _run_arith(op):
    def run(interp, left, args):
        _arity(args, 1, op)
        a = _num(left, op)
        b = _num(interp.dataize(args[0].force(interp)), op)
        if op == "add":
            r = a + b
        elif op == "sub":
            r = a - b
        elif op == "mul":
            r = a * b
        else:  # div
            if b == 0:
                raise EvalFault("division-by-zero", f"{a} divided by zero")
            if isinstance(a, int) and isinstance(b, int):
                r = abs(a) // abs(b)
                if (a < 0) != (b < 0):
                    r = -r
            else:
                r = a / b
        if isinstance(a, int) and isinstance(b, int):
            return _check_int64(r)
        return float(r)

    return run


_ARITH = {op: _run_arith(op) for op in ("add", "sub", "mul", "div")}


def _run_eq(interp, left, args):
    _arity(args, 1, "eq")
    right = interp.dataize(args[0].force(interp))
    if isinstance(left, bool) or isinstance(right, bool):
        return isinstance(left, bool) and isinstance(right, bool) and left == right
    if isinstance(left, (int, float)) and isinstance(right, (int, float)):
        return left == right
    return type(left) is type(right) and left == right


def _run_cmp(op):
    def run(interp, left, args):
        _arity(args, 1, op)
        a = _num(left, op)
        b = _num(interp.dataize(args[0].force(interp)), op)
        return a < b if op == "less" else a > b

    return run


def _run_as_string(interp, left, args):
    _arity(args, 0, "as-string")
    return to_text(left)


def _run_as_int(interp, left, args):
    _arity(args, 0, "as-int")
    if isinstance(left, bool):
        raise EvalFault("type-error", "as-int is not defined on booleans")
    if isinstance(left, int):
        return left
    if isinstance(left, float):
        return _check_int64(int(left))
    if isinstance(left, bytes):
        return heapmod.decode_int(left)
    raise EvalFault("type-error", f"as-int is not defined on {left!r}")


def _run_starts(interp, left, args):
    _arity(args, 1, "starts")
    prefix = interp.dataize(args[0].force(interp))
    if not isinstance(left, str) or not isinstance(prefix, str):
        raise EvalFault("type-error", "starts compares strings")
    return left.startswith(prefix)


def data_attr(interp, value, name):
    """Native attributes of terminal data."""
    if name == "eq":
        return AtomFn("eq", _run_eq, bound=value)
    if name == "as-string":
        return AtomApp("as-string", _run_as_string, value, [])
    if name == "if":
        if isinstance(value, bool):
            return AtomFn("if", _run_if_bool, bound=value)
        raise EvalFault("non-boolean-condition", f"if condition reduced to {value!r}")
    if isinstance(value, bool):
        return _MISS
    if isinstance(value, (int, float)):
        if name in _ARITH:
            return AtomFn(name, _ARITH[name], bound=value)
        if name in ("less", "greater"):
            return AtomFn(name, _run_cmp(name), bound=value)
        if name == "as-int":
            return AtomApp("as-int", _run_as_int, value, [])
        return _MISS
    if isinstance(value, str):
        if name == "starts":
            return AtomFn("starts", _run_starts, bound=value)
        return _MISS
    if isinstance(value, bytes):
        if name == "as-int":
            return AtomApp("as-int", _run_as_int, value, [])
        return _MISS
    return _MISS


class DataHome(NativeObject):
    """Built-in home of data literals; answers subtype-of with the type name."""

    __slots__ = ("type_name",)

    def __init__(self, type_name):
        self.type_name = type_name

    @property
    def label(self):
        return f"{self.type_name}-home"

    def native_attr(self, interp, name):
        if name == "subtype-of":
            return AtomFn("subtype-of", _run_subtype, bound=self.type_name)
        return _MISS


def _run_subtype(interp, type_name, args):
    _arity(args, 1, "subtype-of")
    asked = interp.dataize(args[0].force(interp))
    return asked == type_name


_HOMES = {
    bool: DataHome("Bool"),
    int: DataHome("Int"),
    float: DataHome("Float"),
    str: DataHome("String"),
    bytes: DataHome("Bytes"),
}


def data_home(interp, value):
    return _HOMES[type(value)]


# -- I/O and text -------------------------------------------------------------


def _run_stdout(interp, _bound, args):
    _arity(args, 1, "stdout")
    text = to_text(interp.dataize(args[0].force(interp)))
    interp.out(text)
    return True


def _run_sprintf(interp, _bound, args):
    if not args:
        raise EvalFault("arity", "sprintf needs a format string")
    fmt = interp.dataize(args[0].force(interp))
    if not isinstance(fmt, str):
        raise EvalFault("bad-format", f"sprintf format must be a string, got {fmt!r}")
    rest = list(args[1:])
    out = []
    i = 0
    while i < len(fmt):
        c = fmt[i]
        if c != "%":
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(fmt):
            raise EvalFault("bad-format", "dangling % at end of format string")
        verb = fmt[i + 1]
        i += 2
        if verb == "%":
            out.append("%")
            continue
        if not rest:
            raise EvalFault("bad-format", f"no argument left for %{verb}")
        value = interp.dataize(rest.pop(0).force(interp))
        if verb == "d":
            if isinstance(value, bool) or not isinstance(value, int):
                raise EvalFault("bad-format", f"%d needs an integer, got {value!r}")
            out.append(str(value))
        elif verb == "s":
            out.append(to_text(value))
        elif verb == "f":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise EvalFault("bad-format", f"%f needs a number, got {value!r}")
            out.append(f"{float(value):f}")
        else:
            raise EvalFault("bad-format", f"unsupported verb %{verb}")
    if rest:
        raise EvalFault("bad-format", f"{len(rest)} sprintf argument(s) left over")
    return "".join(out)


# -- heap bridge --------------------------------------------------------------


class HeapObject(NativeObject):
    __slots__ = ("store",)
    label = "heap"

    def __init__(self, store):
        self.store = store

    def native_attr(self, interp, name):
        if name == "malloc":
            return AtomFn("malloc", _run_malloc, bound=self)
        if name == "free":
            return AtomFn("free", _run_free, bound=self)
        if name == "pointer":
            return AtomFn("heap-pointer", _run_heap_pointer, bound=self)
        return _MISS


def _want_int(interp, thunk, what):
    v = interp.dataize(thunk.force(interp))
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalFault("type-error", f"{what} needs an integer, got {v!r}")
    return v


def _run_malloc(interp, heap_obj, args):
    _arity(args, 1, "malloc")
    size = _want_int(interp, args[0], "malloc")
    return AllocObj(heap_obj.store, heap_obj.store.malloc(size))


def _run_free(interp, heap_obj, args):
    _arity(args, 1, "free")
    target = interp.deep_reduce(args[0].force(interp))
    if not isinstance(target, AllocObj):
        raise EvalFault("bad-free", "free expects a malloc allocation")
    heap_obj.store.free(target.alloc)
    return True


def _run_heap_pointer(interp, heap_obj, args):
    _arity(args, 2, "heap.pointer")
    address = _want_int(interp, args[0], "heap.pointer address")
    stride = _want_int(interp, args[1], "heap.pointer stride")
    heap_obj.store.ensure_mapped(address)
    return PtrObj(heapmod.PointerValue(heap_obj.store, address, stride))


class AllocObj(NativeObject):
    __slots__ = ("store", "alloc")
    label = "allocation"

    def __init__(self, store, alloc):
        self.store = store
        self.alloc = alloc

    def native_attr(self, interp, name):
        if name == "pointer":
            return AtomFn("alloc-pointer", _run_alloc_pointer, bound=self)
        return _MISS

    def native_dataize(self, interp):
        return self.alloc.base


def _run_alloc_pointer(interp, alloc_obj, args):
    _arity(args, 2, "pointer")
    offset = _want_int(interp, args[0], "pointer offset")
    stride = _want_int(interp, args[1], "pointer stride")
    return PtrObj(heapmod.PointerValue(alloc_obj.store, alloc_obj.alloc.base + offset, stride))


class PtrObj(NativeObject):
    __slots__ = ("pv",)
    label = "pointer"

    def __init__(self, pv):
        self.pv = pv

    def native_attr(self, interp, name):
        if name == "add":
            return AtomFn("pointer-add", _run_ptr_shift(1), bound=self)
        if name == "sub":
            return AtomFn("pointer-sub", _run_ptr_shift(-1), bound=self)
        if name == "block":
            return AtomFn("block", _run_block, bound=self)
        if name == "address":
            return self.pv.address
        return _MISS

    def native_dataize(self, interp):
        return self.pv.address


def _run_ptr_shift(sign):
    def run(interp, ptr_obj, args):
        _arity(args, 1, "pointer shift")
        k = _want_int(interp, args[0], "pointer shift")
        return PtrObj(ptr_obj.pv.shifted(sign * k))

    return run


def _run_block(interp, ptr_obj, args):
    _arity(args, 2, "block")
    length = _want_int(interp, args[0], "block length")
    decoder = args[1]
    return ViewObj(heapmod.make_block(ptr_obj.pv, length), decoder)


class ViewObj(NativeObject):
    __slots__ = ("view", "decoder_thunk")
    label = "block"

    def __init__(self, view, decoder_thunk):
        self.view = view
        self.decoder_thunk = decoder_thunk

    def native_attr(self, interp, name):
        if name == "write":
            return AtomFn("block-write", _run_block_write, bound=self)
        if name == "address":
            return self.view.address
        return _MISS

    def native_dataize(self, interp):
        data = heapmod.block_read_bytes(self.view)
        decoder = self.decoder_thunk.force(interp)
        return interp.dataize(interp.apply(decoder, [Thunk.of(data)]))


def _run_block_write(interp, view_obj, args):
    _arity(args, 1, "block.write")
    value = interp.dataize(args[0].force(interp))
    heapmod.block_write(view_obj.view, value)
    return True


# -- namespaces and the builtin table ------------------------------------------


class Namespace(NativeObject):
    __slots__ = ("path", "children")

    def __init__(self, path, children):
        self.path = path
        self.children = children

    @property
    def label(self):
        return self.path

    def native_attr(self, interp, name):
        entry = self.children.get(name)
        if entry is None:
            return _MISS
        kind, value = entry
        if kind == "factory":
            return value(interp)
        return value


def build_builtins(heap_store, extra=None):
    """The global vocabulary of one program instance."""
    heap_obj = HeapObject(heap_store)
    values = {
        "seq": AtomFn("seq", _run_seq),
        "if": AtomFn("if", _run_if3),
        "goto": AtomFn("goto", _run_goto),
        "try": AtomFn("try", _run_try),
        "stdout": AtomFn("stdout", _run_stdout),
        "sprintf": AtomFn("sprintf", _run_sprintf),
        "array": AtomFn("array", _run_array_make),
    }
    factories = {
        "memory": lambda interp: MemoryCell(),
        "cage": lambda interp: CageSlot(),
    }
    gray = {name: ("value", values[name]) for name in ("goto", "try")}
    gray["cage"] = ("factory", factories["cage"])
    gray["heap"] = ("value", heap_obj)
    eolang = {
        "io": ("value", Namespace("org.eolang.io", {"stdout": ("value", values["stdout"])})),
        "txt": ("value", Namespace("org.eolang.txt", {"sprintf": ("value", values["sprintf"])})),
        "gray": ("value", Namespace("org.eolang.gray", gray)),
        "memory": ("factory", factories["memory"]),
        "array": ("value", values["array"]),
    }
    builtins = {name: ("value", obj) for name, obj in values.items()}
    builtins.update({name: ("factory", fn) for name, fn in factories.items()})
    builtins["heap"] = ("value", heap_obj)
    builtins["org"] = (
        "value",
        Namespace("org", {"eolang": ("value", Namespace("org.eolang", eolang))}),
    )
    builtins["__while__"] = ("value", _run_while)
    builtins["__snapshot_handle__"] = ("value", _make_snapshot_handle)
    builtins["__anchor__"] = ("value", _run_anchor)
    if extra:
        builtins.update(extra)
    return builtins
