"""Brute-force reference implementations used only by the tests.

None of these share code with the package's algorithms: CTL* is decided
through maximal consistent subformula sets and fair SCCs, firing modes are
found by evaluating raw inscriptions under every assignment, and automata
languages are compared with direct guard evaluation.
"""

from __future__ import annotations

import itertools
from collections import Counter

import networkx as nx

from skelcheck import logic as L
from skelcheck.logic import eval_ap
from skelcheck.nets import AllColours
from skelcheck.terms import evaluate, term_value

# --- CTL* -------------------------------------------------------------------------
# Path formulas are tuples: ("prop", frozenset), ("and", a, b), ("or", a, b),
# ("X", a), ("U", a, b), ("R", a, b).


def _state_set(k, f) -> frozenset:
    n = len(k.states)
    if isinstance(f, L.Const):
        return frozenset(range(n)) if f.value else frozenset()
    if isinstance(f, L.Atom):
        return frozenset(s for s in range(n) if eval_ap(dict(zip(k.places, k.states[s])), f.ap))
    if isinstance(f, L.Not):
        return frozenset(range(n)) - _state_set(k, f.arg)
    if isinstance(f, L.And):
        return _state_set(k, f.left) & _state_set(k, f.right)
    if isinstance(f, L.Or):
        return _state_set(k, f.left) | _state_set(k, f.right)
    if isinstance(f, L.E):
        return _exists(k, _path(k, f.arg, False))
    if isinstance(f, L.A):
        return frozenset(range(n)) - _exists(k, _path(k, f.arg, True))
    # bare path formula at top level: universal reading
    return frozenset(range(n)) - _exists(k, _path(k, f, True))


def _path(k, f, neg: bool):
    """Tuple form of a path formula with negation pushed inwards."""
    n = frozenset(range(len(k.states)))
    if isinstance(f, (L.Const, L.Atom, L.E, L.A)):
        s = _state_set(k, f)
        return ("prop", n - s if neg else s)
    if isinstance(f, L.Not):
        return _path(k, f.arg, not neg)
    if isinstance(f, (L.And, L.Or)):
        op = "and" if isinstance(f, L.And) != neg else "or"
        return (op, _path(k, f.left, neg), _path(k, f.right, neg))
    if isinstance(f, L.X):
        return ("X", _path(k, f.arg, neg))
    true = ("prop", n)
    false = ("prop", frozenset())
    if isinstance(f, L.F):  # F a = true U a
        a = _path(k, f.arg, neg)
        return ("R", false, a) if neg else ("U", true, a)
    if isinstance(f, L.G):  # G a = false R a
        a = _path(k, f.arg, neg)
        return ("U", true, a) if neg else ("R", false, a)
    a, b = _path(k, f.left, neg), _path(k, f.right, neg)
    if isinstance(f, L.U):
        return ("R", a, b) if neg else ("U", a, b)
    if isinstance(f, L.R):
        return ("U", a, b) if neg else ("R", a, b)
    # a W b = b R (a or b); negated: !b U (!a and !b)
    if neg:
        return ("U", b, ("and", a, b))
    return ("R", b, ("or", a, b))


def _closure(phi) -> list:
    out = []

    def walk(g):
        if g in out:
            return
        for c in g[1:] if g[0] != "prop" else ():
            walk(c)
        out.append(g)

    walk(phi)
    return out  # children before parents


def _exists(k, phi) -> frozenset:
    """States with a path satisfying ``phi`` (atoms of the closure + fair SCC)."""
    cl = _closure(phi)
    index = {g: i for i, g in enumerate(cl)}
    free = [g for g in cl if g[0] in ("X", "U", "R")]
    nodes = []
    for s in range(len(k.states)):
        for bits in itertools.product((False, True), repeat=len(free)):
            guess = dict(zip(free, bits))
            val = [False] * len(cl)
            ok = True
            for i, g in enumerate(cl):
                op = g[0]
                if op == "prop":
                    val[i] = s in g[1]
                elif op == "and":
                    val[i] = val[index[g[1]]] and val[index[g[2]]]
                elif op == "or":
                    val[i] = val[index[g[1]]] or val[index[g[2]]]
                elif op == "X":
                    val[i] = guess[g]
                elif op == "U":
                    a, b = val[index[g[1]]], val[index[g[2]]]
                    forced = True if b else (False if not a else None)
                    if forced is not None and guess[g] != forced:
                        ok = False
                    val[i] = guess[g]
                else:  # R
                    a, b = val[index[g[1]]], val[index[g[2]]]
                    forced = False if not b else (True if a else None)
                    if forced is not None and guess[g] != forced:
                        ok = False
                    val[i] = guess[g]
            if ok:
                nodes.append((s, tuple(val)))
    by_state: dict[int, list] = {}
    for nd in nodes:
        by_state.setdefault(nd[0], []).append(nd)
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    for s, va in nodes:
        for s2 in k.successors(s):
            for _, vb in by_state.get(s2, ()):
                good = True
                for i, f in enumerate(cl):
                    if f[0] == "X" and va[i] != vb[index[f[1]]]:
                        good = False
                    elif f[0] == "U" and va[i] and not va[index[f[2]]] and not vb[i]:
                        good = False
                    elif f[0] == "R" and va[i] and not va[index[f[1]]] and not vb[i]:
                        good = False
                    if not good:
                        break
                if good:
                    g.add_edge((s, va), (s2, vb))
    fair = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) == 1:
            (v,) = comp
            if not g.has_edge(v, v):
                continue
        fulfilled = True
        for i, f in enumerate(cl):
            if f[0] != "U":
                continue
            if any(v[1][i] for v in comp) and not any(v[1][index[f[2]]] for v in comp):
                fulfilled = False
                break
        if fulfilled:
            fair |= comp
    good_nodes = set(fair)
    for v in fair:
        good_nodes |= nx.ancestors(g, v)
    top = index[phi]
    return frozenset(s for s, v in good_nodes if v[top])


def ctl_oracle(k, f) -> bool:
    return k.initial in _state_set(k, f)


def ctl_oracle_sat(k, f) -> frozenset:
    return _state_set(k, f)


# --- firing modes -----------------------------------------------------------------------


def raw_effects(net, t) -> set:
    """Distinct (consume, produce) effects of ``t`` on the unsimplified net.

    Every variable ranges over its whole domain and the raw arc terms are
    evaluated directly; no inscription rewriting is involved.
    """
    vdoms = dict(net.variables[t])
    names = sorted(vdoms)
    out = set()
    for combo in itertools.product(*(range(vdoms[v].size) for v in names)):
        values = {v: vdoms[v].value(c) for v, c in zip(names, combo)}
        if evaluate(net.guards[t], values, vdoms) is not True:
            continue
        eff = []
        for arcs in (net.arcs_in, net.arcs_out):
            bag = Counter()
            for (p, u), ins in arcs.items():
                if u != t:
                    continue
                dom = net.domains[p]
                for a in ins:
                    choices = []
                    for c, cd in zip(a.components, dom.basic()):
                        if isinstance(c, AllColours):
                            choices.append(range(cd.size))
                        else:
                            choices.append([cd.index_of_value(term_value(c, values, vdoms))])
                    for parts in itertools.product(*choices):
                        bag[(p, dom.compose(parts))] += a.coef
            eff.append(frozenset((x, n) for x, n in bag.items() if n))
        if all(n >= 0 for x, n in eff[0]):
            out.add(tuple(eff))
    return out


def simplified_effects(net, t) -> set:
    out = set()
    for mode in net.modes(t):
        cons, prod = net.mode_effect(t, mode)
        out.add(tuple(
            frozenset(((p, c), n) for p, cs in side.items() for c, n in cs.items() if n)
            for side in (cons, prod)
        ))
    return out


# --- guards --------------------------------------------------------------------------


def guard_models(guard, order, domains) -> set:
    """Value tuples over ``order`` satisfying ``guard`` by direct evaluation."""
    out = set()
    for vals in itertools.product(*(range(domains[v].lo, domains[v].hi + 1) for v in order)):
        if evaluate(guard, dict(zip(order, vals)), domains) is True:
            out.add(vals)
    return out


def random_kripke(rng, n: int, places=("a", "b")):
    """Random total Kripke structure whose states are markings over ``places``."""
    from skelcheck.statespace import KripkeStructure

    states = []
    while len(states) < n:
        m = tuple(rng.randint(0, 2) for _ in places)
        if m not in states:
            states.append(m)
    edges = []
    for s in range(n):
        for d in rng.sample(range(n), rng.randint(1, min(3, n))):
            edges.append((s, f"e{s}_{d}", d))
    return KripkeStructure(states, 0, edges, [frozenset()] * n, frozenset(), (), tuple(places))


# --- P/T reachability ----------------------------------------------------------------


def pt_reachability(net, cap: int = 10_000) -> "nx.DiGraph":
    """Reachability graph of a P/T net by plain breadth-first firing.

    Nodes are markings as {place: tokens} frozensets of non-zero entries, so
    graphs of nets with differently named places can be compared directly.
    Deadlocks get no self-loop.
    """
    start = {p: net.initial.get(p, 0) for p in net.places}
    key = lambda m: frozenset((p, n) for p, n in m.items() if n)  # noqa: E731
    g = nx.DiGraph()
    g.add_node(key(start))
    todo = [start]
    while todo:
        m = todo.pop()
        for t in net.transitions:
            if any(m[p] < w for (p, u), w in net.weight_in.items() if u == t):
                continue
            m2 = dict(m)
            for (p, u), w in net.weight_in.items():
                if u == t:
                    m2[p] -= w
            for (p, u), w in net.weight_out.items():
                if u == t:
                    m2[p] += w
            k2 = key(m2)
            if k2 not in g:
                if g.number_of_nodes() >= cap:
                    raise OverflowError("reachability cap exceeded")
                todo.append(m2)
            g.add_edge(key(m), k2)
    return g
