import io

import pytest

from philang.core import AtomApp, NativeObject, _MISS
from philang.errors import EvalFault
from philang.runtime import Program, run_text


class Probe(NativeObject):
    """Counts dataizations; resolving `bump` yields a runnable counter app."""

    label = "probe"

    def __init__(self):
        self.count = 0

    def native_attr(self, interp, name):
        if name == "bump":
            return AtomApp("probe-bump", self._run_bump, self, [])
        if name == "peek":
            return self.count
        return _MISS

    def native_dataize(self, interp):
        self.count += 1
        return self.count

    @staticmethod
    def _run_bump(interp, probe, args):
        probe.count += 1
        return probe.count


@pytest.fixture
def probes():
    """Run source with named probe objects injected as globals.

    Usage: out, value, p = probes(src, 'p1', 'p2') -> p['p1'].count ...
    """

    def run(text, *names, **kwargs):
        objs = {n: Probe() for n in names}
        extra = {n: ("value", o) for n, o in objs.items()}
        out, _err, value = run_text(text, extra_builtins=extra, **kwargs)
        return out, value, objs

    return run


def run_src(text, **kwargs):
    """Run source text; returns (stdout_bytes, value)."""
    out, _err, value = run_text(text, **kwargs)
    return out, value


def make_program(text, **kwargs):
    out = io.BytesIO()
    err = io.BytesIO()
    return Program(text, stdout=out, stderr=err, **kwargs), out, err


def fault_kind(excinfo):
    exc = excinfo.value
    assert isinstance(exc, EvalFault)
    return exc.kind
