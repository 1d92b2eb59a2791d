import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spni import (
    UNREACHABLE,
    InputError,
    Network,
    ProblemInstance,
    UnreachableError,
    all_labels,
    calc_length,
    calc_path,
    generate_grid,
    is_weakly_connected,
)

from .oracles import oracle_length


def test_calc_length_examples(p3):
    assert calc_length(p3, set()) == 6
    assert calc_length(p3, {0}) == 9
    assert calc_length(p3, {1}) == 7


def test_calc_length_unreachable():
    inst = ProblemInstance(Network(3, [(0, 1, 1, 1)]), 0, 2, 0)
    assert calc_length(inst, ()) is UNREACHABLE
    with pytest.raises(TypeError):
        calc_length(inst, ()) + 1


def test_calc_length_bad_arc(p3):
    with pytest.raises(InputError):
        calc_length(p3, {5})


def test_calc_path_examples(p3, d4):
    assert calc_path(p3, set()) == {0, 1, 2}
    assert calc_path(p3, {1}) == {0, 1, 2}
    # both routes cost 2; the smaller predecessor id (node 1) wins
    assert calc_path(d4, set()) == {0, 1, 3}
    # interdicting the 0-1 arc moves the route to node 2
    assert calc_path(d4, {0}) == {0, 2, 3}


def test_calc_path_unreachable_is_distinct_error():
    inst = ProblemInstance(Network(3, [(0, 1, 1, 1)]), 0, 2, 0)
    with pytest.raises(UnreachableError):
        calc_path(inst, ())
    assert not issubclass(UnreachableError, InputError)


def test_all_labels(p3):
    assert all_labels(p3, set()).tolist() == [0, 2, 6]
    assert all_labels(p3, {0}).tolist() == [0, 5, 9]
    isolated = ProblemInstance(Network(4, [(0, 1, 2, 3), (1, 2, 4, 1)]), 0, 2, 1)
    # sentinel is |N| * max(c + d) = 4 * 5 for this variant
    assert all_labels(isolated, ()).tolist() == [0, 2, 6, 20]


def test_all_labels_isolated_node_three_node_variant():
    inst = ProblemInstance(Network(3, [(0, 2, 2, 3)]), 0, 2, 1)
    assert all_labels(inst, ())[1] == 15


def test_weak_connectivity(p3):
    assert is_weakly_connected(p3.network, {0, 1})
    assert not is_weakly_connected(p3.network, {0, 2})
    assert is_weakly_connected(p3.network, {2})
    assert not is_weakly_connected(p3.network, set())
    assert is_weakly_connected(p3.network, {0, 1, 2})


def test_parallel_arcs():
    inst = ProblemInstance(Network(2, [(0, 1, 3, 5), (0, 1, 4, 0)]), 0, 1, 1)
    assert calc_length(inst, ()) == 3
    assert calc_length(inst, {0}) == 4
    assert calc_length(inst, {0, 1}) == 4


@st.composite
def instances(draw):
    n = draw(st.integers(2, 8))
    m = draw(st.integers(0, 16))
    arcs = [
        (draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)), draw(st.integers(0, 10)), draw(st.integers(0, 10)))
        for _ in range(m)
    ]
    inst = ProblemInstance(Network(n, arcs), 0, n - 1, 0)
    sub = draw(st.sets(st.integers(0, max(m - 1, 0)), max_size=m)) if m else set()
    extra = draw(st.sets(st.integers(0, max(m - 1, 0)), max_size=m)) if m else set()
    return inst, frozenset(sub), frozenset(sub | extra)


@settings(max_examples=200, deadline=None)
@given(instances())
def test_matches_independent_oracle(case):
    inst, s, bigger = case
    for S in (frozenset(), s, bigger):
        expected = oracle_length(inst, S)
        got = calc_length(inst, S)
        assert (got is UNREACHABLE) == (expected is None)
        if expected is not None:
            assert got == expected
            labels = all_labels(inst, S)
            assert labels[inst.sink] == got


@settings(max_examples=200, deadline=None)
@given(instances())
def test_monotone_in_interdiction(case):
    inst, s, bigger = case
    a, b = calc_length(inst, s), calc_length(inst, bigger)
    if a is UNREACHABLE:
        assert b is UNREACHABLE
    else:
        assert b is UNREACHABLE or a <= b


@settings(max_examples=100, deadline=None)
@given(instances())
def test_interdiction_equals_reweighted_arcs(case):
    inst, s, _ = case
    net = inst.network
    rebuilt = [(u, v, c + d, 0) if k in s else (u, v, c, d) for k, (u, v, c, d) in enumerate(net.arcs())]
    plain = ProblemInstance(Network(net.node_count, rebuilt), inst.source, inst.sink, 0)
    assert calc_length(plain, ()) == calc_length(inst, s) or (
        calc_length(plain, ()) is UNREACHABLE and calc_length(inst, s) is UNREACHABLE
    )


@settings(max_examples=100, deadline=None)
@given(instances())
def test_path_is_a_shortest_path(case):
    inst, s, _ = case
    length = calc_length(inst, s)
    if length is UNREACHABLE:
        return
    nodes = calc_path(inst, s)
    assert inst.source in nodes and inst.sink in nodes
    # the shortest path restricted to the returned nodes has the same length
    net = inst.network
    kept = [
        (u, v, c + (d if k in s else 0), 0)
        for k, (u, v, c, d) in enumerate(net.arcs())
        if u in nodes and v in nodes
    ]
    sub = ProblemInstance(Network(net.node_count, kept), inst.source, inst.sink, 0)
    assert calc_length(sub, ()) == length


def test_grid_labels_are_exact_integers():
    inst = generate_grid(4, 4, 11)
    labels = all_labels(inst, {5, 9})
    assert labels.dtype == np.int64
    assert labels[inst.sink] == calc_length(inst, {5, 9})
