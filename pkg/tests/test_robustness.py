import pytest

from philang.errors import BudgetExceeded, EvalFault

from conftest import fault_kind, run_src


def test_mutual_decoration_cycle():
    with pytest.raises(EvalFault) as e:
        run_src("[] > f\n  g > @\n[] > g\n  f > @\nf.add 1\n")
    assert fault_kind(e) == "circular-reduction"


def test_self_decoration_cycle():
    with pytest.raises(EvalFault) as e:
        run_src("[] > f\n  f > @\nf.add 1\n")
    assert fault_kind(e) == "circular-reduction"


def test_object_consuming_its_own_reduction():
    with pytest.raises(EvalFault) as e:
        run_src("[] > o\n  seq > @\n    o.x\no.add 1\n")
    assert fault_kind(e) == "circular-reduction"


def test_goto_inside_try_inside_goto():
    src = """\
[] > main
  goto > @
    [outer]
      try > @
        [t]
          goto > @
            [inner]
              seq > @
                inner.forward 5
                t "never"
        [e]
          stdout "caught" > @
        TRUE
"""
    out, value = run_src(src)
    assert out == b""
    assert value == 5


def test_throw_crosses_goto_scope():
    src = """\
[] > main
  try > @
    [t]
      goto > @
        [g]
          seq > @
            t "boom"
            g.forward 1
    [e]
      stdout e > @
    TRUE
"""
    out, _value = run_src(src)
    assert out == b"boom"


def test_backward_inside_each_crosses_to_goto():
    # a jump raised in an each body propagates out through the array atom
    src = """\
[] > main
  memory > hits
  seq > @
    hits.write 0
    goto
      [g]
        (array 1 2 3).each > @
          [t]
            seq > @
              hits.write (hits.add 1)
              g.forward
    hits
"""
    _out, value = run_src(src)
    assert value == 1


def test_backward_crosses_try_and_finally_still_runs(probes):
    # the jump is foreign to the try, so it propagates; the finally fires on
    # every pass through the scope (two aborted, one normal)
    src = """\
[] > main
  memory > n
  seq > @
    n.write 0
    goto
      [g]
        try > @
          [t]
            seq > @
              n.write (n.add 1)
              if.
                n.less 3
                g.backward
                TRUE
          [e]
            99 > @
          fin.bump
    n
"""
    _out, value, p = probes(src, "fin")
    assert value == 3
    assert p["fin"].count == 3


def test_deep_but_finite_decoration_chain():
    depth = 120
    lines = ["[] > o0\n  42 > @\n"]
    for i in range(1, depth):
        lines.append(f"[] > o{i}\n  o{i - 1} > @\n")
    lines.append(f"o{depth - 1}.add 0\n")
    _out, value = run_src("".join(lines))
    assert value == 42


def test_signal_through_memo_thunk_is_not_cached():
    # a memoized binding that throws must re-raise on every ask, not cache
    src = """\
[] > main
  goto > @
    [g]
      seq > @
        g.forward 7
        TRUE
"""
    _out, value = run_src(src)
    assert value == 7


def test_sprintf_arg_failure_aborts_before_output():
    src = """\
[] > main
  try > @
    [t]
      stdout (sprintf "price: %d" (t "no")) > @
    [e]
      stdout "handled" > @
    TRUE
"""
    out, _value = run_src(src)
    assert out == b"handled"


def test_while_index_values_are_zero_based():
    src = """\
[] > main
  memory > i
  memory > acc
  seq > @
    i.write 0
    acc.write 0
    while.
      seq (i.write (i.add 1)) (i.less 4)
      [idx]
        acc.write (acc.add idx) > @
    acc
"""
    # three body passes with idx 0, 1, 2
    _out, value = run_src(src)
    assert value == 3


def test_empty_formation_is_a_value():
    _out, value = run_src("[] > f\nf\n")
    from philang.core import Closure

    assert isinstance(value, Closure)


def test_heap_config_minimum():
    with pytest.raises(EvalFault) as e:
        run_src("42\n", heap_size=8)
    assert fault_kind(e) == "heap-config"


def test_budget_is_deterministic():
    src = "[] > main\n  goto > @\n    [g]\n      g.backward > @\n"
    counts = []
    for _ in range(2):
        try:
            run_src(src, max_steps=777)
        except BudgetExceeded as e:
            counts.append(e.limit)
    assert counts == [777, 777]
