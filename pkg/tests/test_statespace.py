import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skelcheck.examples import blocked_net, colour_copy_net
from skelcheck.fullness import DeadlockPreservation, _simplified, has_deadlock_preserving_skeleton
from skelcheck.generators import NetShape, random_coloured_net
from skelcheck.injection import inject_deadlocks
from skelcheck.logic import AtomicProposition
from skelcheck.nets import NetError, induced_morphism, make_pt, skeleton, unfold
from skelcheck.statespace import (
    TAU,
    Cancelled,
    StateCapExceeded,
    build_kripke,
    check_abstraction,
    check_simulation,
    check_stuttering_simulation,
    deadlocks,
    enabled,
    fire,
    morphism_relation,
    relation_by,
)


def test_fire_and_enabled():
    net = make_pt(["p", "q"], ["t"], [("p", "t", 2)], [("t", "q", 1)], {"p": 3})
    m = net.initial_marking()
    assert enabled(net, m) == ["t"]
    m2 = fire(net, m, "t")
    assert m2 == (1, 1)
    assert enabled(net, m2) == []
    with pytest.raises(NetError):
        fire(net, m2, "t")


def test_kripke_completion_at_deadlock():
    k = build_kripke(skeleton(blocked_net()))
    assert len(k) == 2
    assert deadlocks(k) == {1}
    assert (1, TAU, 1) in k.edges


def test_coloured_example1_is_dead():
    k = build_kripke(_simplified(blocked_net()))
    assert len(k) == 1
    assert k.edges == [(0, TAU, 0)]


def test_colour_copy_state_space():
    k = build_kripke(_simplified(colour_copy_net()))
    assert len(k) == 8
    assert len(deadlocks(k)) == 1


def test_state_cap_and_cancel():
    pump = make_pt(["p"], ["t"], [], [("t", "p", 1)])
    with pytest.raises(StateCapExceeded):
        build_kripke(pump, (), 50)
    with pytest.raises(Cancelled):
        build_kripke(pump, (), 10**6, cancel=lambda: True)


def test_example1_simulation_fails_at_tau():
    net = blocked_net()
    u = unfold(net)
    ku, ks = build_kripke(u.net), build_kripke(skeleton(net))
    res = check_simulation(ku, ks, morphism_relation(ku, ks, induced_morphism(net, u)))
    assert not res
    assert res.counterexample == (0, 0, (0, TAU, 0))


def test_abstraction_labels():
    net = blocked_net()
    u = unfold(net)
    ap = AtomicProposition(((1, "p"),), 1)
    ks = build_kripke(skeleton(net), [ap])
    unfolded_ap = AtomicProposition(((1, "p.r"), (1, "p.g")), 1)
    ku = build_kripke(u.net, [unfolded_ap])
    sigma = morphism_relation(ku, ks, induced_morphism(net, u))
    # the relation pairs markings with their images, so labels agree
    ku.props, ks.props = (), ()
    assert all(ku.holds(q, unfolded_ap) == ks.holds(r, ap) for q, r in sigma)
    assert check_abstraction(ku, ku, {(0, 0)}, [unfolded_ap])


def test_injected_example1_stutter_simulates():
    net = blocked_net()
    u = unfold(net)
    mu = induced_morphism(net, u)
    sm = inject_deadlocks(net)
    ku = build_kripke(u.net)
    ks = build_kripke(sm.net, silent=sm.silent)
    sigma = relation_by(ku, ks, sm.collapse, mu.map_tuple)
    assert check_stuttering_simulation(ku, ks, sigma)
    # the plain skeleton cannot reach a dead state, so it fails
    k0 = build_kripke(skeleton(net))
    assert not check_stuttering_simulation(ku, k0, morphism_relation(ku, k0, mu))


def _structures(seed):
    net = _simplified(random_coloured_net(random.Random(seed), NetShape(conservative=True)))
    u = unfold(net)
    mu = induced_morphism(net, u)
    return net, u, mu, build_kripke(u.net, (), 20_000)


@given(st.integers(0, 10**6))
def test_unfolding_edges_map_to_skeleton_edges(seed):
    net, u, mu, ku = _structures(seed)
    ks = build_kripke(skeleton(net), (), 20_000)
    index = {m: i for i, m in enumerate(ks.states)}
    edges = set(ks.edges)
    for a, t, b in ku.edges:
        if t == TAU:
            continue
        image = (index[mu.map_tuple(ku.states[a])], mu.transition_map[t], index[mu.map_tuple(ku.states[b])])
        assert image in edges


@given(st.integers(0, 10**6))
def test_deadlock_preserving_implies_simulation(seed):
    net, u, mu, ku = _structures(seed)
    if has_deadlock_preserving_skeleton(net) is DeadlockPreservation.YES:
        ks = build_kripke(skeleton(net), (), 20_000)
        assert check_simulation(ku, ks, morphism_relation(ku, ks, mu))


@given(st.integers(0, 10**6))
def test_modified_skeleton_stutter_simulates(seed):
    net, u, mu, ku = _structures(seed)
    sm = inject_deadlocks(net)
    ks = build_kripke(sm.net, (), 50_000, silent=sm.silent)
    assert check_stuttering_simulation(ku, ks, relation_by(ku, ks, sm.collapse, mu.map_tuple))
