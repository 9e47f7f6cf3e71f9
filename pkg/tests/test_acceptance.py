"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even
without ``-s``).  Sample sizes and time limits are the stated ones; nothing
here is relaxed to make a criterion pass.
"""

import random
import time

import networkx as nx
import pytest

from skelcheck.automata import harmonize, minimize, product, term_automaton
from skelcheck.checker import Basis, verify
from skelcheck.ctl import check_ctl
from skelcheck.examples import (
    BLOCKED_FORMULA,
    blocked_net,
    colour_copy_net,
    full_class_net,
    philosophers,
    philosophers_formula,
)
from skelcheck.folding import fold
from skelcheck.fullness import (
    DeadlockPreservation,
    _simplified,
    binomial_certificate,
    class_automaton,
    full_by_enumeration,
    has_deadlock_preserving_skeleton,
    is_full,
    minimal_class_fullness,
    transition_classes,
)
from skelcheck.generators import (
    NetShape,
    random_actl,
    random_ap,
    random_coloured_marking,
    random_coloured_net,
    random_pt_net,
    random_safety,
)
from skelcheck.injection import inject_deadlocks
from skelcheck.logic import atoms, eval_ap, parse_formula, unfold_ap
from skelcheck.nets import induced_morphism, skeleton, unfold
from skelcheck.statespace import (
    TAU,
    StateCapExceeded,
    build_kripke,
    check_simulation,
    check_stuttering_simulation,
    morphism_relation,
    relation_by,
)
from skelcheck.terms import Const, Domain, Succ, Var

from oracles import pt_reachability


class Criterion:
    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.failures = []
        self.notes = []
        self.start = time.perf_counter()

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)
        return ok

    def finish(self, capsys):
        elapsed = time.perf_counter() - self.start
        if self.limit is not None:
            self.check(elapsed < self.limit, f"took {elapsed:.2f}s, limit {self.limit}s")
        status = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.failures[:3] or self.notes)
        with capsys.disabled():
            print(f"\n{status} criterion {self.number} ({self.title}): {detail} [{elapsed:.2f}s]")
        assert not self.failures, self.failures


@pytest.fixture
def criterion(capsys):
    made = []

    def make(*args, **kw):
        c = Criterion(*args, **kw)
        made.append(c)
        return c

    yield make
    for c in made:
        c.finish(capsys)


def test_1_blocked_net_golden(criterion):
    c = criterion(1, "blocked net golden", limit=1.0)
    net = blocked_net()
    v = verify(net, BLOCKED_FORMULA)
    c.check(v.value == "FALSE", f"verdict {v.value}")
    c.check(v.basis is Basis.DIRECT, f"basis {v.basis.value}")
    f = parse_formula(BLOCKED_FORMULA)
    on_skeleton = check_ctl(build_kripke(skeleton(_simplified(net)), atoms(f)), f)
    c.check(on_skeleton, "skeleton does not satisfy the formula")
    c.notes.append(f"verify {v.value} via {v.basis.value}, skeleton {on_skeleton}")


def test_2_fullness_goldens(criterion):
    c = criterion(2, "fullness goldens", limit=1.0)
    net = full_class_net()
    full = minimal_class_fullness(net)
    c.check(full == {("t1", "t2"): True}, f"classes {full}")
    a = class_automaton(net, ("t1", "t2"))
    c.check(a.n_states == 3, f"or-product has {a.n_states} states")
    c.check(a.edge_labels() == [[(1, 4)], [(1, 3)]], f"labels {a.edge_labels()}")
    d = Domain.range("D", 1, 3)
    doms = {"x": d}
    succ = term_automaton(Succ(Var("x")), ("x",), doms)
    two = harmonize(term_automaton(Const(2, d), ("x",), doms), ["x"])
    m = minimize(product(succ, two, "=="))
    c.check(m.n_states == 3, f"x++=2 has {m.n_states} states")
    c.check(m.language() == [(1,)], f"x++=2 accepts {m.language()}")
    c.notes.append(f"class FULL, or-product {a.n_states} states {a.edge_labels()}; x++=2 -> {m.n_states} states, accepts x=1")


def _corpus(n, seed0=0):
    return [random_coloured_net(random.Random(seed0 + i), NetShape()) for i in range(n)]


def test_3_fullness_oracle_equivalence(criterion):
    c = criterion(3, "fullness vs enumeration", limit=60.0)
    classes = full_count = 0
    for i, net in enumerate(_corpus(200)):
        for cls in transition_classes(net).minimal_classes():
            a, b = is_full(net, cls), full_by_enumeration(net, cls)
            classes += 1
            full_count += a
            c.check(a == b, f"net {i} class {cls}: automaton {a}, enumeration {b}")
    c.notes.append(f"200 nets, {classes} minimal classes, {full_count} full, all agree")


def test_4_philosophers_folding(criterion):
    c = criterion(4, "philosophers folding", limit=1.0)
    res = fold(philosophers(), philosophers_formula())
    expect = {frozenset(f"{k}{i}" for k in group for i in range(5))
              for group in (("th", "ea"), ("hl",), ("hr",), ("fo",), ("tl",), ("tr",), ("rl",), ("rr",))}
    c.check(res.partition.class_sets() == expect, "partition differs")
    net = res.net
    c.check((len(net.places), len(net.transitions)) == (4, 4), f"{len(net.places)} places, {len(net.transitions)} transitions")
    modes = len(net.guards["tl"].modes)
    c.check(modes == 5, f"tl has {modes} modes")
    # thea->10 and fo->5 are the colour counts of the folded places; each
    # place carries the tokens of its class (th_i and fo_i are marked)
    sizes = (net.domains["thea"].size, net.domains["fo"].size)
    c.check(sizes == (10, 5), f"colour counts {sizes}")
    tokens = (sum(net.initial["thea"]), sum(net.initial["fo"]))
    c.check(tokens == (5, 5), f"token counts {tokens}")
    c.notes.append(f"8 classes, 4/4 net, tl 5 modes, |thea|={sizes[0]} |fo|={sizes[1]}, tokens {tokens}")


def test_5_fold_unfold_round_trip(criterion):
    c = criterion(5, "fold/unfold round trip", limit=120.0)
    checked = skipped = 0
    seed = 0
    while checked < 100:
        rng = random.Random(10_000 + seed)
        seed += 1
        net = random_pt_net(rng, max_nodes=12)
        formula = random_actl(rng, net.places, depth=2)
        try:
            g1 = pt_reachability(net, 10_000)
        except OverflowError:
            skipped += 1
            continue
        res = fold(net, formula)
        u = unfold(res.net, 10_000)
        g2 = pt_reachability(u.net, 10_000)
        rename = {p: u.place_of[(res.node_map[p], res.net.domains[res.node_map[p]].labels.index(p))] for p in net.places}
        mapped = nx.relabel_nodes(g1, lambda m: frozenset((rename[p], k) for p, k in m))
        c.check(set(mapped.nodes) == set(g2.nodes) and set(mapped.edges) == set(g2.edges),
                f"seed {seed - 1}: mapped graph differs")
        c.check(nx.is_isomorphic(g1, g2), f"seed {seed - 1}: not isomorphic")
        checked += 1
    c.notes.append(f"{checked} nets isomorphic ({skipped} over 10^4 states skipped)")


def test_6_morphism_and_simulation(criterion):
    c = criterion(6, "morphism and simulation", limit=120.0)
    dp = 0
    for i in range(100):
        net = _simplified(random_coloured_net(random.Random(20_000 + i), NetShape(conservative=True)))
        u = unfold(net)
        mu = induced_morphism(net, u)
        ku = build_kripke(u.net, (), 20_000)
        ks = build_kripke(skeleton(net), (), 20_000)
        index = {m: j for j, m in enumerate(ks.states)}
        edges = set(ks.edges)
        for a, t, b in ku.edges:
            if t != TAU:
                image = (index[mu.map_tuple(ku.states[a])], mu.transition_map[t], index[mu.map_tuple(ku.states[b])])
                if not c.check(image in edges, f"net {i}: edge {t} has no image"):
                    break
        if has_deadlock_preserving_skeleton(net) is DeadlockPreservation.YES:
            dp += 1
            c.check(bool(check_simulation(ku, ks, morphism_relation(ku, ks, mu))), f"net {i}: no simulation")
        sm = inject_deadlocks(net)
        km = build_kripke(sm.net, (), 50_000, silent=sm.silent)
        sigma = relation_by(ku, km, sm.collapse, mu.map_tuple)
        c.check(bool(check_stuttering_simulation(ku, km, sigma)), f"net {i}: no stuttering simulation")
    c.notes.append(f"100 nets: edges map, {dp} deadlock-preserving simulated, all stutter-simulated")


def test_7_safety_preservation(criterion):
    c = criterion(7, "safety preservation")
    skel_true = 0
    pairs = 0
    seed = 0
    while pairs < 100:
        rng = random.Random(30_000 + seed)
        seed += 1
        net = _simplified(random_coloured_net(rng, NetShape(conservative=True)))
        f = random_safety(rng, net.places)
        try:
            ks = build_kripke(skeleton(net), atoms(f), 20_000)
            kc = build_kripke(net, atoms(f), 20_000)
        except StateCapExceeded:
            continue
        pairs += 1
        if check_ctl(ks, f):
            skel_true += 1
            c.check(check_ctl(kc, f), f"seed {seed - 1}: skeleton TRUE, net FALSE")
    c.notes.append(f"{pairs} pairs, {skel_true} skeleton-TRUE, 0 violations")


def test_8_binomial_certificate(criterion):
    c = criterion(8, "binomial certificate")
    res = fold(philosophers(), philosophers_formula())
    cert = binomial_certificate(res.net, ("tl",))
    c.check((cert.required, cert.distinct, cert.certified) == (50, 5, False), f"philosophers tl {cert}")
    u = unfold(colour_copy_net())
    folded = fold(u.net, parse_formula('"q.r" + "q.g" + "q.b" <= 0')).net
    cert2 = binomial_certificate(folded, folded.transitions)
    c.check((cert2.required, cert2.distinct, cert2.certified) == (3, 3, True), f"colour copy {cert2}")
    certified = 0
    for i, net in enumerate(_corpus(200)):
        for cls in transition_classes(net).minimal_classes():
            k = binomial_certificate(net, cls)
            if k is not None and k.certified:
                certified += 1
                c.check(full_by_enumeration(net, cls), f"net {i} class {cls} certified but not full")
    c.notes.append(f"tl 50 vs 5, colour copy 3 = 3, {certified} certified classes in the corpus all full")


def test_9_ap_unfolding(criterion):
    c = criterion(9, "proposition unfolding")
    n = 0
    seed = 0
    while n < 1000:
        rng = random.Random(40_000 + seed)
        seed += 1
        net = random_coloured_net(rng)
        u = unfold(net)
        for _ in range(10):
            m = random_coloured_marking(rng, net)
            ap = random_ap(rng, net.places)
            lhs = eval_ap(dict(zip(net.places, m)), ap)
            rhs = eval_ap(dict(zip(u.net.places, u.marking_of(net, m))), unfold_ap(ap, net))
            c.check(lhs == rhs, f"seed {seed - 1}: {ap} differs")
            n += 1
    c.notes.append(f"{n} markings agree")
