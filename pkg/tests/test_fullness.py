import random

from hypothesis import given, settings, strategies as st

from skelcheck.examples import blocked_net, colour_copy_net, full_class_net, philosophers, philosophers_formula
from skelcheck.folding import fold
from skelcheck.fullness import (
    DeadlockPreservation,
    binomial_certificate,
    class_automaton,
    folded_fullness_check,
    full_by_enumeration,
    has_deadlock_preserving_skeleton,
    is_full,
    minimal_class_fullness,
    transition_classes,
)
from skelcheck.generators import NetShape, random_coloured_net
from skelcheck.logic import parse_formula
from skelcheck.nets import unfold


def test_two_guards_cover_the_class():
    net = full_class_net()
    a = class_automaton(net, ("t1", "t2"))
    assert a.n_states == 3
    assert a.edge_labels() == [[(1, 4)], [(1, 3)]]
    assert a.is_universal()
    assert minimal_class_fullness(net) == {("t1", "t2"): True}
    assert has_deadlock_preserving_skeleton(net) is DeadlockPreservation.YES


def test_single_guard_is_not_full():
    net = full_class_net()
    assert not is_full(net, ("t1",))
    assert not full_by_enumeration(net, ("t1",))


def test_blocked_net_not_full():
    net = blocked_net()
    assert minimal_class_fullness(net) == {("t",): False}
    assert has_deadlock_preserving_skeleton(net).value == "no-or-unknown"


def test_classes_group_equal_input_vectors():
    tc = transition_classes(full_class_net())
    assert tc.minimal_classes() == [("t1", "t2")]


def test_certificate_folded_philosophers():
    res = fold(philosophers(), philosophers_formula())
    c = binomial_certificate(res.net, ("tl",))
    assert (c.required, c.distinct, c.certified) == (50, 5, False)


def test_certificate_folded_colour_copy():
    u = unfold(colour_copy_net(), 1000)
    res = fold(u.net, parse_formula('"q.r" + "q.g" + "q.b" <= 0'))
    assert res.net.transitions == ("t",)
    c = binomial_certificate(res.net, ("t",))
    assert (c.required, c.distinct, c.certified) == (3, 3, True)
    assert folded_fullness_check(res.net) == {("t",): True}


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_automaton_agrees_with_enumeration(seed):
    net = random_coloured_net(random.Random(seed))
    for cls in transition_classes(net).minimal_classes():
        assert is_full(net, cls) == full_by_enumeration(net, cls)


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_certificate_implies_full(seed):
    net = random_coloured_net(random.Random(seed), NetShape(max_arc_vars=2))
    for cls in transition_classes(net).minimal_classes():
        c = binomial_certificate(net, cls)
        if c is not None and c.certified:
            assert full_by_enumeration(net, cls)
