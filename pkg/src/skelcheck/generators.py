"""Seeded random nets, markings and formulas for property tests and sweeps."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .logic import A, And, Atom, AtomicProposition, E, F, Formula, G, Not, Or, R, U, W, X
from .nets import ArcTerm, ColouredNet, PTNet, make_pt
from .terms import TRUE, Cmp, Const, Domain, Pred, Succ, Var, conjoin, disjoin


@dataclass
class NetShape:
    max_places: int = 4
    max_transitions: int = 3
    max_domain: int = 4
    max_arc_vars: int = 3
    max_transition_vars: int = 5  # keeps mode enumeration small
    max_tokens: int = 3  # initial tokens per place
    conservative: bool = False  # outputs never exceed inputs, so bounded
    fancy_terms: float = 0.15  # chance of constants, successors and coefficients on inputs
    products: float = 0.15  # chance of a two-component place domain


def random_domain(rng: random.Random, name: str, max_size: int) -> Domain:
    n = rng.randint(1, max_size)
    if rng.random() < 0.5:
        lo = rng.randint(0, 2)
        return Domain.range(name, lo, lo + n - 1)
    return Domain.enum(name, [f"{name.lower()}{i}" for i in range(n)])


def _random_term(rng, dom: Domain, var: str, shape: NetShape):
    if rng.random() >= shape.fancy_terms:
        return Var(var)
    pick = rng.random()
    if pick < 0.4:
        return Const(dom.value(rng.randrange(dom.size)), dom)
    return (Succ if pick < 0.7 else Pred)(Var(var))


def _random_guard(rng, vars_: dict[str, Domain]):
    names = list(vars_)
    if not names or rng.random() < 0.3:
        return TRUE
    parts = []
    for _ in range(rng.randint(1, 3)):
        a = rng.choice(names)
        op = rng.choice(("==", "!=", "<", "<=", ">", ">="))
        left = Var(a) if rng.random() < 0.8 else Succ(Var(a))
        if rng.random() < 0.5 and len(names) > 1:
            right = Var(rng.choice([n for n in names if n != a]))
        else:
            d = vars_[a]
            right = Const(d.value(rng.randrange(d.size)), d)
        parts.append(Cmp(op, left, right))
    return conjoin(*parts) if rng.random() < 0.6 else disjoin(*parts)


def random_coloured_net(rng: random.Random, shape: NetShape | None = None) -> ColouredNet:
    """A small symmetric net; every transition has at least one input arc."""
    shape = shape or NetShape()
    n_places = rng.randint(1, shape.max_places)
    basics = [random_domain(rng, f"D{i}", shape.max_domain) for i in range(3)]
    places, domains, initial = [], {}, {}
    for i in range(n_places):
        p = f"p{i}"
        if rng.random() < shape.products:
            small = [random_domain(rng, f"S{i}{j}", 2) for j in range(2)]
            dom = Domain.product(f"P{i}", small)
        else:
            dom = rng.choice(basics)
        places.append(p)
        domains[p] = dom
        vec = [0] * dom.size
        for _ in range(rng.randint(0, shape.max_tokens)):
            vec[rng.randrange(dom.size)] += 1
        initial[p] = tuple(vec)
    transitions, arcs_in, arcs_out, guards, variables = [], {}, {}, {}, {}
    for j in range(rng.randint(1, shape.max_transitions)):
        t = f"t{j}"
        transitions.append(t)
        budget = shape.max_transition_vars
        vdoms: dict[str, Domain] = {}
        counter = 0
        consumed = 0

        def fresh(dom):
            nonlocal counter
            counter += 1
            v = f"v{j}_{counter}"
            vdoms[v] = dom
            return v

        pre = rng.sample(places, rng.randint(1, min(2, len(places))))
        for p in pre:
            dom = domains[p]
            k = max(1, min(rng.randint(1, shape.max_arc_vars), budget // dom.arity))
            if budget < dom.arity:
                k = 1
            toks = []
            for _ in range(k):
                comps = []
                for cd in dom.basic():
                    comps.append(_random_term(rng, cd, fresh(cd), shape))
                coef = 2 if rng.random() < shape.fancy_terms / 3 else 1
                toks.append(ArcTerm(coef, tuple(comps)))
                consumed += coef
                budget -= dom.arity
            arcs_in[(p, t)] = tuple(toks)
        produced = 0
        limit = consumed if shape.conservative else consumed + 2
        for p in rng.sample(places, rng.randint(0, len(places))):
            dom = domains[p]
            room = limit - produced
            if room <= 0:
                break
            toks = []
            for _ in range(rng.randint(1, min(room, 2))):
                comps = []
                for cd in dom.basic():
                    same = [v for v, d in vdoms.items() if d == cd]
                    if same and (rng.random() < 0.7 or budget <= 0):
                        comps.append(Var(rng.choice(same)))
                    elif budget > 0:
                        comps.append(Var(fresh(cd)))
                        budget -= 1
                    else:
                        comps.append(Const(cd.value(rng.randrange(cd.size)), cd))
                toks.append(ArcTerm(1, tuple(comps)))
                produced += 1
            arcs_out[(p, t)] = tuple(toks)
        guards[t] = _random_guard(rng, {v: d for v, d in vdoms.items()})
        variables[t] = vdoms
    return ColouredNet(tuple(places), tuple(transitions), domains, arcs_in, arcs_out, guards, variables, initial)


def random_pt_net(rng: random.Random, max_nodes: int = 12, conservative: bool = True) -> PTNet:
    """A P/T net with at most ``max_nodes`` places plus transitions."""
    n_places = rng.randint(1, max(1, max_nodes // 2))
    n_trans = rng.randint(1, max(1, max_nodes - n_places))
    places = [f"p{i}" for i in range(n_places)]
    transitions = [f"t{j}" for j in range(n_trans)]
    arcs_in, arcs_out = [], []
    for t in transitions:
        consumed = 0
        for p in rng.sample(places, rng.randint(1, min(2, n_places))):
            w = rng.randint(1, 2)
            arcs_in.append((p, t, w))
            consumed += w
        room = consumed if conservative else consumed + 1
        for p in rng.sample(places, rng.randint(0, n_places)):
            if room <= 0:
                break
            w = rng.randint(1, min(2, room))
            arcs_out.append((t, p, w))
            room -= w
    initial = {p: rng.randint(0, 2) for p in places}
    return make_pt(places, transitions, arcs_in, arcs_out, initial)


def random_coloured_marking(rng: random.Random, net: ColouredNet, max_tokens: int = 4) -> tuple:
    out = []
    for p in net.places:
        vec = [0] * net.domains[p].size
        for _ in range(rng.randint(0, max_tokens)):
            vec[rng.randrange(len(vec))] += 1
        out.append(tuple(vec))
    return tuple(out)


# --- formulas ------------------------------------------------------------------------


def random_ap(rng: random.Random, places, max_terms: int = 2) -> AtomicProposition:
    chosen = rng.sample(list(places), rng.randint(1, min(max_terms, len(places))))
    terms = [(rng.choice((-1, 1, 1, 2)), p) for p in chosen]
    return AtomicProposition.of(terms, rng.randint(-1, 3))


def _atom(rng, places) -> Formula:
    ap = random_ap(rng, places)
    return Atom(ap) if ap.terms else Atom(AtomicProposition(((1, places[0]),), 0))


def random_path(rng, places, depth: int, ops: str) -> Formula:
    """Positive path formula over the temporal operators in ``ops``."""
    if depth <= 0 or rng.random() < 0.25:
        return _atom(rng, places)
    pick = rng.choice(ops + "&|")
    if pick == "&":
        return And(random_path(rng, places, depth - 1, ops), random_path(rng, places, depth - 1, ops))
    if pick == "|":
        return Or(random_path(rng, places, depth - 1, ops), random_path(rng, places, depth - 1, ops))
    unary = {"X": X, "F": F, "G": G}
    binary = {"U": U, "W": W, "R": R}
    if pick in unary:
        return unary[pick](random_path(rng, places, depth - 1, ops))
    return binary[pick](random_path(rng, places, depth - 1, ops), random_path(rng, places, depth - 1, ops))


def random_actl(rng: random.Random, places, depth: int = 3, allow_x: bool = True) -> Formula:
    """A universal formula: A applied to a positive LTL body."""
    return A(random_path(rng, list(places), depth, "XFGUWR" if allow_x else "FGUWR"))


def random_safety(rng: random.Random, places, depth: int = 3) -> Formula:
    return A(random_path(rng, list(places), depth, "GWR"))


def random_state_formula(rng: random.Random, places, depth: int = 3) -> Formula:
    """Arbitrary CTL* state formula, negations included."""
    places = list(places)
    if depth <= 0 or rng.random() < 0.2:
        return _atom(rng, places)
    pick = rng.random()
    if pick < 0.15:
        return Not(random_state_formula(rng, places, depth - 1))
    if pick < 0.3:
        op = And if rng.random() < 0.5 else Or
        return op(random_state_formula(rng, places, depth - 1), random_state_formula(rng, places, depth - 1))
    q = E if rng.random() < 0.5 else A
    return q(random_path(rng, places, depth - 1, "XFGUWR"))
