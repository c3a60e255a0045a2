"""Simulated random-access memory.

One flat byte array per program instance. malloc hands out first-fit
segments; absolute addresses (the ones a program mentions literally, like
0x1A76EC09) are mapped through translation windows claimed from the same
array, so a pointer into the billions works without a billion-byte buffer.
Pointer arithmetic is scaled by the pointed-to size and happens in the
simulated address space.
"""

from .errors import EvalFault

WINDOW_SIZE = 4096

_INT64_MIN = -(1 << 63)
_INT64_MAX = (1 << 63) - 1


class Allocation:
    __slots__ = ("base", "size", "alive")

    def __init__(self, base, size):
        self.base = base
        self.size = size
        self.alive = True


class Window:
    """Maps simulated [start, start+size) onto array offset `base`."""

    __slots__ = ("start", "size", "base")

    def __init__(self, start, size, base):
        self.start = start
        self.size = size
        self.base = base

    def covers(self, addr):
        return self.start <= addr < self.start + self.size


class HeapStore:
    def __init__(self, capacity=1 << 20):
        if capacity < 16:
            raise EvalFault("heap-config", "heap capacity must be at least 16 bytes")
        self.capacity = capacity
        self.bytes = bytearray(capacity)
        self.allocations = []
        self.windows = []

    # -- allocation ---------------------------------------------------------

    def _gaps(self):
        taken = sorted(
            [(a.base, a.size) for a in self.allocations if a.alive]
            + [(w.base, w.size) for w in self.windows]
        )
        cursor = 0
        for base, size in taken:
            if base > cursor:
                yield (cursor, base - cursor)
            cursor = max(cursor, base + size)
        if cursor < self.capacity:
            yield (cursor, self.capacity - cursor)

    def _claim(self, size):
        for base, room in self._gaps():
            if room >= size:
                return base
        raise EvalFault("out-of-capacity", f"cannot claim {size} bytes of heap")

    def malloc(self, size):
        if not isinstance(size, int) or size <= 0:
            raise EvalFault("bad-malloc", f"malloc needs a positive byte count, got {size!r}")
        base = self._claim(size)
        alloc = Allocation(base, size)
        self.allocations.append(alloc)
        return alloc

    def free(self, alloc):
        if not alloc.alive:
            raise EvalFault("double-free", f"allocation at {alloc.base} was already freed")
        alloc.alive = False

    # -- address translation ------------------------------------------------

    def window_for(self, addr, create=True):
        for w in self.windows:
            if w.covers(addr):
                return w
        if not create:
            return None
        start = max(0, addr - WINDOW_SIZE // 2)
        base = self._claim(WINDOW_SIZE)
        w = Window(start, WINDOW_SIZE, base)
        self.windows.append(w)
        return w

    def ensure_mapped(self, addr):
        """Register an absolute address the program mentioned explicitly."""
        if 0 <= addr < self.capacity:
            return
        self.window_for(addr, create=True)

    def _translate(self, addr, length):
        for w in self.windows:
            if w.covers(addr):
                if addr + length > w.start + w.size:
                    raise EvalFault(
                        "out-of-bounds",
                        f"access of {length} bytes at {addr} leaves its address window",
                    )
                return w.base + (addr - w.start)
        if 0 <= addr and addr + length <= self.capacity:
            for a in self.allocations:
                if a.alive and a.base <= addr and addr + length <= a.base + a.size:
                    return addr
            for a in self.allocations:
                if not a.alive and a.base <= addr < a.base + a.size:
                    raise EvalFault("freed-access", f"access at {addr} hits a freed allocation")
            raise EvalFault("unmapped-address", f"address {addr} lies outside any live allocation")
        raise EvalFault("unmapped-address", f"address {addr} is not mapped into the heap")

    # -- raw access ---------------------------------------------------------

    def read(self, addr, length):
        off = self._translate(addr, length)
        return bytes(self.bytes[off : off + length])

    def write(self, addr, data):
        off = self._translate(addr, len(data))
        self.bytes[off : off + len(data)] = data


class PointerValue:
    """A simulated address plus the size of the thing it points at."""

    __slots__ = ("store", "address", "stride", "block_cursor")

    def __init__(self, store, address, stride):
        if stride <= 0:
            raise EvalFault("bad-pointer", f"pointer stride must be positive, got {stride}")
        if address < 0:
            raise EvalFault("bad-pointer", f"pointer address must be non-negative, got {address}")
        self.store = store
        self.address = address
        self.stride = stride
        self.block_cursor = 0

    def shifted(self, k):
        return PointerValue(self.store, self.address + k * self.stride, self.stride)


def pointer_add(p, k):
    return p.shifted(k)


def pointer_sub(p, k):
    return p.shifted(-k)


class BlockView:
    """A typed window of `length` bytes at a fixed offset within a record."""

    __slots__ = ("pointer", "offset", "length")

    def __init__(self, pointer, offset, length):
        if length <= 0:
            raise EvalFault("bad-block", f"block length must be positive, got {length}")
        self.pointer = pointer
        self.offset = offset
        self.length = length

    @property
    def address(self):
        return self.pointer.address + self.offset


def make_block(pointer, length):
    """Blocks declared against one pointer pack contiguously from offset 0."""
    view = BlockView(pointer, pointer.block_cursor, length)
    pointer.block_cursor += length
    return view


def block_read_bytes(view):
    return view.pointer.store.read(view.address, view.length)


def block_write(view, value):
    if isinstance(value, bool):
        raise EvalFault("bad-write", "booleans cannot be written into a heap block")
    if isinstance(value, int):
        if view.length != 8:
            raise EvalFault(
                "bad-write", f"an integer needs an 8-byte block, this one has {view.length}"
            )
        if not (_INT64_MIN <= value <= _INT64_MAX):
            raise EvalFault("int64-overflow", f"{value} does not fit in a signed 64-bit cell")
        data = value.to_bytes(8, "little", signed=True)
    elif isinstance(value, str):
        data = value.encode("utf-8")
        if len(data) > view.length:
            raise EvalFault(
                "oversize-string",
                f"string of {len(data)} bytes does not fit a {view.length}-byte block",
            )
        data = data + b"\x00" * (view.length - len(data))
    elif isinstance(value, bytes):
        if len(value) != view.length:
            raise EvalFault(
                "bad-write", f"byte value of {len(value)} does not match block length {view.length}"
            )
        data = value
    else:
        raise EvalFault("bad-write", f"cannot encode {value!r} into heap bytes")
    view.pointer.store.write(view.address, data)


def decode_int(data):
    if len(data) != 8:
        raise EvalFault("bad-bytes", f"as-int needs exactly 8 bytes, got {len(data)}")
    return int.from_bytes(data, "little", signed=True)


def decode_string(data):
    nul = data.find(b"\x00")
    if nul >= 0:
        data = data[:nul]
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EvalFault("bad-bytes", f"bytes are not valid UTF-8: {exc}") from None
