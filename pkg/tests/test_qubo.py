import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spni import (
    InputError,
    Network,
    ProblemInstance,
    build_full_qubo,
    build_sub_qubo,
    decode,
    default_penalty,
    encode_bounded,
    export_qubo,
    generate_grid,
    make_spec,
    pi_upper_bound,
    read_qubo,
)
from spni.qubo import dumps_qubo, loads_qubo


def assignment(q, x=(), pi=None, m=None, n=0):
    """Bits for the given integer values, filling each encoding greedily from the top."""
    pi = pi or {}
    m = m or {}
    want = {}
    for v, role in enumerate(q.registry):
        if role.kind == "x":
            want[v] = int(role.index in x)
    groups = {}
    for v, role in enumerate(q.registry):
        if role.kind != "x":
            groups.setdefault((role.kind, role.index), []).append((v, role.weight))
    for (kind, idx), items in groups.items():
        target = {"pi": pi.get(idx, 0), "m": m.get(idx, 0), "n": n}[kind]
        for v, w in sorted(items, key=lambda t: -t[1]):
            take = int(w <= target)
            want[v] = take
            target -= w * take
        assert target == 0
    return [want[v] for v in range(q.var_count)]


def test_encoding_examples():
    assert encode_bounded(12).coefficients == (1, 2, 4, 5)
    assert encode_bounded(1).coefficients == (1,)
    assert encode_bounded(0).coefficients == ()
    enc = encode_bounded(12)
    image = {enc.decode(bits) for bits in itertools.product((0, 1), repeat=4)}
    assert image == set(range(13))
    with pytest.raises(InputError):
        encode_bounded(-1)


def test_upper_bound_and_penalty(p3):
    assert pi_upper_bound(p3) == 15
    assert default_penalty(p3) == 16
    zero = ProblemInstance(Network(2, [(0, 1, 0, 0)]), 0, 1, 0)
    assert pi_upper_bound(zero) == 0 and default_penalty(zero) == 1
    g = generate_grid(3, 3, 0)
    arcs = [(u, v, c and 10, d and 10) for u, v, c, d in g.network.arcs()]
    g10 = ProblemInstance(Network(11, arcs), 0, 10, 0)
    assert pi_upper_bound(g10) == 220 and default_penalty(g10) == 221


def test_full_qubo_p3(p3):
    q = build_full_qubo(p3)
    assert q.var_count == 21
    kinds = [r.kind for r in q.registry]
    assert kinds.count("x") == 2 and kinds.count("pi") == 8 and kinds.count("m") == 10 and kinds.count("n") == 1
    bits = assignment(q, x={0}, pi={1: 5, 2: 9})
    assert q.evaluate(bits) == 9
    dec = decode(q, bits)
    assert dec.x == {0} and dec.pi == {0: 0, 1: 5, 2: 9} and dec.residuals == [0, 0, 0]


def test_decode_all_zero(p3):
    q = build_full_qubo(p3)
    dec = decode(q, [0] * q.var_count)
    assert dec.x == set()
    assert set(dec.pi.values()) == {0}
    assert dec.residuals[-1] == 1
    with pytest.raises(InputError):
        decode(q, [0])


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_flipping_pi_bit_breaks_feasibility(data):
    # feasible assignments of P3: the interdiction and labels satisfying every arc with slack
    inst = ProblemInstance(Network(3, [(0, 1, 2, 3), (1, 2, 4, 1)]), 0, 2, 1)
    q = build_full_qubo(inst)
    x = data.draw(st.sampled_from([(), (0,), (1,)]))
    c0 = 2 + 3 * (0 in x)
    c1 = 4 + 1 * (1 in x)
    pa = data.draw(st.integers(0, c0))
    pt = data.draw(st.integers(0, min(15, pa + c1)))
    m = {0: c0 - pa, 1: c1 - (pt - pa)}
    if m[1] > q.penalty_weight + 4:  # outside the slack encoding
        return
    bits = assignment(q, x=set(x), pi={1: pa, 2: pt}, m=m, n=1 - len(x))
    assert decode(q, bits).residuals == [0, 0, 0]
    assert q.evaluate(bits) == pt
    pi_vars = [v for v, r in enumerate(q.registry) if r.kind == "pi"]
    v = data.draw(st.sampled_from(pi_vars))
    bits[v] ^= 1
    assert any(decode(q, bits).residuals)
    assert q.evaluate(bits) < pt


def test_sub_qubo_requires_sink_in_block(p3):
    spec = make_spec(p3, [1, 2], 2, ())
    q = build_sub_qubo(spec)
    assert q.var_count > 0
    object.__setattr__(spec, "sink", 0)
    with pytest.raises(InputError):
        build_sub_qubo(spec)


def test_whole_block_sub_equals_full():
    inst = generate_grid(2, 2, 3).with_budget(2)
    full = build_full_qubo(inst)
    sub = build_sub_qubo(make_spec(inst, range(6), inst.sink, ()))
    assert sub.var_count == full.var_count
    assert sub.linear == full.linear and sub.quadratic == full.quadratic and sub.constant == full.constant
    assert sub.registry == full.registry


def test_export_round_trip_and_min_sense(tmp_path, p3):
    q = build_full_qubo(p3)
    export_qubo(q, tmp_path / "q.txt")
    back = read_qubo(tmp_path / "q.txt")
    mn = loads_qubo(dumps_qubo(q, "min"))
    rng = np.random.default_rng(0)
    for _ in range(100):
        bits = rng.integers(0, 2, q.var_count).tolist()
        assert back.evaluate(bits) == q.evaluate(bits)
        assert mn.evaluate(bits) == -q.evaluate(bits)
        assert decode(back, bits) == decode(q, bits)
    assert mn.sense == "min"


def test_empty_qubo_header_only():
    inst = ProblemInstance(Network(2, []), 0, 1, 0)
    q = build_full_qubo(inst)
    text = dumps_qubo(q)
    assert q.var_count == 0
    assert all(line.startswith("#") for line in text.splitlines())
    assert loads_qubo(text).evaluate([]) == q.evaluate([])


def test_loads_rejects_garbage():
    from spni import ParseError

    with pytest.raises(ParseError):
        loads_qubo("# var_count 2\n0 1\n")
    with pytest.raises(ParseError):
        loads_qubo("# var_count 2\n1 0 3\n")
    with pytest.raises(ParseError):
        loads_qubo("0 0 1\n")
