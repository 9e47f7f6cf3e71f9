import random

import networkx as nx
from hypothesis import given, settings, strategies as st

from skelcheck.examples import philosophers, philosophers_formula
from skelcheck.folding import fold, folding_worthwhile, initial_partition, refine, split
from skelcheck.generators import random_actl, random_pt_net
from skelcheck.logic import atoms
from skelcheck.nets import make_pt, unfold

from oracles import pt_reachability

N = 5


def _names(prefixes):
    return frozenset(f"{k}{i}" for k in prefixes for i in range(N))


def test_philosophers_partition():
    res = fold(philosophers(), philosophers_formula())
    res.partition.check()
    expect = {_names(["th", "ea"])} | {_names([k]) for k in ("hl", "hr", "fo", "tl", "tr", "rl", "rr")}
    assert res.partition.class_sets() == expect


def test_philosophers_folded_net():
    res = fold(philosophers(), philosophers_formula())
    net = res.net
    assert len(net.places) == 4 and len(net.transitions) == 4
    assert len(net.guards["tl"].modes) == 5
    assert net.domains["thea"].size == 10
    assert sum(net.initial["thea"]) == 5
    assert sum(net.initial["fo"]) == 5
    assert {ap.terms for ap in atoms(res.formula)} == {((1, "hr"),), ((-1, "hr"),), ((1, "hl"),), ((-1, "hl"),)}
    assert folding_worthwhile(philosophers(), net)


def test_fold_without_formula_is_coarser():
    res = fold(philosophers())
    assert res.formula is None
    assert len(res.partition.classes()) == 4
    coarse = res.partition.class_sets()
    for cls in fold(philosophers(), philosophers_formula()).partition.class_sets():
        assert any(cls <= c for c in coarse)


def test_split_is_stable_and_contiguous():
    net = make_pt(["a", "b", "c"], ["t"], [("a", "t", 1)], [("t", "c", 2)], {})
    part = split(initial_partition(net), lambda x: {"a": 1, "c": 1}.get(x, 0))
    part.check()
    assert part.classes() == [["b"], ["a", "c"], ["t"]]


def test_refine_separates_weights():
    net = make_pt(["a", "b"], ["t", "u"], [("a", "t", 1), ("b", "u", 2)], [], {"a": 1})
    part = refine(net)
    # the transitions differ in what they take from the place class {a, b}
    assert part.class_sets() == {frozenset("ab"), frozenset("t"), frozenset("u")}


def _round_trip(net, formula):
    res = fold(net, formula)
    u = unfold(res.net, 10_000)
    g1 = pt_reachability(net)
    g2 = pt_reachability(u.net)
    # explicit correspondence: original place -> (class, index in class)
    rename = {}
    for p in net.places:
        cls = res.node_map[p]
        rename[p] = u.place_of[(cls, res.net.domains[cls].labels.index(p))]
    mapped = nx.relabel_nodes(g1, lambda m: frozenset((rename[p], n) for p, n in m))
    return g1, g2, mapped


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_unfold_of_fold_reproduces_reachability(seed):
    rng = random.Random(seed)
    net = random_pt_net(rng)
    formula = random_actl(rng, net.places, depth=2)
    g1, g2, mapped = _round_trip(net, formula)
    assert set(mapped.nodes) == set(g2.nodes)
    assert set(mapped.edges) == set(g2.edges)
    assert nx.is_isomorphic(g1, g2)


def test_philosophers_round_trip():
    net = philosophers()
    g1, g2, mapped = _round_trip(net, philosophers_formula())
    assert g1.number_of_nodes() == 242
    assert set(mapped.edges) == set(g2.edges)
