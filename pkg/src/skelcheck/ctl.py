"""Explicit-state CTL* model checking on Kripke structures.

State formulas are evaluated to state sets.  Path quantifiers over a single
temporal operator use the usual CTL fixpoints; anything else goes through
a tableau automaton for the path formula and a product with the structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count

import networkx as nx

from .logic import (
    A,
    And,
    Atom,
    Const,
    E,
    F,
    Formula,
    G,
    Not,
    Or,
    R,
    TEMPORAL,
    U,
    W,
    X,
    children,
    to_nnf,
)
from .statespace import KripkeStructure

DEFAULT_PRODUCT_BOUND = 2_000_000


class UnsupportedFormula(RuntimeError):
    pass


def is_state_formula(f: Formula) -> bool:
    if isinstance(f, (Atom, Const, E, A)):
        return True
    if isinstance(f, (Not, And, Or)):
        return all(is_state_formula(c) for c in children(f))
    return False


def check_ctl(k: KripkeStructure, f: Formula, product_bound: int = DEFAULT_PRODUCT_BOUND) -> bool:
    """Truth of ``f`` in the initial state (bare path formulas mean ``A f``)."""
    return k.initial in sat(k, f, product_bound)


def sat(k: KripkeStructure, f: Formula, product_bound: int = DEFAULT_PRODUCT_BOUND) -> frozenset:
    f = to_nnf(f)
    if not is_state_formula(f):
        f = A(f)
    return _Checker(k, product_bound).sat(f)


class _Checker:
    def __init__(self, k: KripkeStructure, bound: int):
        self.k = k
        self.bound = bound
        self.all = frozenset(range(len(k)))
        self.pred = [[] for _ in range(len(k))]
        for s in range(len(k)):
            for d in k.successors(s):
                self.pred[d].append(s)
        self.cache: dict = {}

    def sat(self, f: Formula) -> frozenset:
        if f in self.cache:
            return self.cache[f]
        if isinstance(f, Atom):
            res = frozenset(s for s in range(len(self.k)) if self.k.holds(s, f.ap))
        elif isinstance(f, Const):
            res = self.all if f.value else frozenset()
        elif isinstance(f, Not):
            res = self.all - self.sat(f.arg)
        elif isinstance(f, And):
            res = self.sat(f.left) & self.sat(f.right)
        elif isinstance(f, Or):
            res = self.sat(f.left) | self.sat(f.right)
        elif isinstance(f, E):
            res = self.exists(f.arg)
        elif isinstance(f, A):
            res = self.all - self.exists(to_nnf(f.arg, True))
        else:
            raise TypeError(f"not a state formula: {f}")
        self.cache[f] = res
        return res

    # CTL fixpoints ---------------------------------------------------------------

    def ex(self, s: frozenset) -> frozenset:
        return frozenset(p for d in s for p in self.pred[d])

    def eu(self, a: frozenset, b: frozenset) -> frozenset:
        res = set(b)
        stack = list(b)
        while stack:
            d = stack.pop()
            for p in self.pred[d]:
                if p not in res and p in a:
                    res.add(p)
                    stack.append(p)
        return frozenset(res)

    def er(self, a: frozenset, b: frozenset) -> frozenset:
        """Greatest fixpoint Z = b & (a | EX Z)."""
        z = set(b)
        changed = True
        while changed:
            changed = False
            for s in list(z):
                if s in a:
                    continue
                if not any(d in z for d in self.k.successors(s)):
                    z.discard(s)
                    changed = True
        return frozenset(z)

    def exists(self, p: Formula) -> frozenset:
        if is_state_formula(p):
            return self.sat(p)  # E over a state formula is the formula itself
        if isinstance(p, TEMPORAL) and all(is_state_formula(c) for c in children(p)):
            if isinstance(p, X):
                return self.ex(self.sat(p.arg))
            if isinstance(p, F):
                return self.eu(self.all, self.sat(p.arg))
            if isinstance(p, G):
                return self.er(frozenset(), self.sat(p.arg))
            a, b = self.sat(p.left), self.sat(p.right)
            if isinstance(p, U):
                return self.eu(a, b)
            if isinstance(p, R):
                return self.er(a, b)
            if isinstance(p, W):
                return self.er(b, a | b)
        return self.exists_ltl(p)

    # general path formulas ---------------------------------------------------------

    def exists_ltl(self, p: Formula) -> frozenset:
        phi = self.abstract(p)
        nodes = tableau(phi)
        return self.product_emptiness(phi, nodes)

    def abstract(self, p: Formula):
        """Replace maximal state subformulas by literal state sets."""
        if is_state_formula(p):
            return Lit(self.sat(p))
        if isinstance(p, And):
            return LAnd(self.abstract(p.left), self.abstract(p.right))
        if isinstance(p, Or):
            return LOr(self.abstract(p.left), self.abstract(p.right))
        if isinstance(p, X):
            return LX(self.abstract(p.arg))
        if isinstance(p, F):
            return LU(Lit(self.all), self.abstract(p.arg))
        if isinstance(p, G):
            return LR(Lit(frozenset()), self.abstract(p.arg))
        if isinstance(p, U):
            return LU(self.abstract(p.left), self.abstract(p.right))
        if isinstance(p, R):
            return LR(self.abstract(p.left), self.abstract(p.right))
        if isinstance(p, W):
            a, b = self.abstract(p.left), self.abstract(p.right)
            return LR(b, LOr(a, b))
        raise TypeError(f"unexpected path formula {p}")

    def product_emptiness(self, phi, nodes: list["_Node"]) -> frozenset:
        k = self.k
        untils = [g for g in _sub(phi) if isinstance(g, LU)]
        acc_sets = [
            {n.id for n in nodes if g not in n.old or g.right in n.old} for g in untils
        ]
        lits = {n.id: [g.states for g in n.old if isinstance(g, Lit)] for n in nodes}
        succs: dict[int, list[int]] = {n.id: [] for n in nodes}
        for n in nodes:
            for i in n.incoming:
                if i != INIT:
                    succs[i].append(n.id)

        def ok(s, nid):
            return all(s in st for st in lits[nid])

        graph = nx.DiGraph()
        init_pairs = []
        stack = []
        for n in nodes:
            if INIT in n.incoming:
                for s in range(len(k)):
                    if ok(s, n.id):
                        init_pairs.append((s, n.id))
                        if (s, n.id) not in graph:
                            graph.add_node((s, n.id))
                            stack.append((s, n.id))
        while stack:
            s, nid = stack.pop()
            for d in k.successors(s):
                for m in succs[nid]:
                    if ok(d, m):
                        v = (d, m)
                        if v not in graph:
                            if graph.number_of_nodes() >= self.bound:
                                raise UnsupportedFormula(
                                    f"product exceeds the bound of {self.bound} states"
                                )
                            graph.add_node(v)
                            stack.append(v)
                        graph.add_edge((s, nid), v)
        fair = set()
        for comp in nx.strongly_connected_components(graph):
            if len(comp) == 1:
                (v,) = comp
                if not graph.has_edge(v, v):
                    continue
            ids = {nid for _, nid in comp}
            if all(ids & acc for acc in acc_sets):
                fair |= comp
        good = set(fair)
        rev = graph.reverse(copy=False)
        stack = list(fair)
        while stack:
            v = stack.pop()
            for u in rev.successors(v):
                if u not in good:
                    good.add(u)
                    stack.append(u)
        return frozenset(s for s, nid in init_pairs if (s, nid) in good)


# --- tableau ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    states: frozenset


@dataclass(frozen=True)
class LAnd:
    left: object
    right: object


@dataclass(frozen=True)
class LOr:
    left: object
    right: object


@dataclass(frozen=True)
class LX:
    arg: object


@dataclass(frozen=True)
class LU:
    left: object
    right: object


@dataclass(frozen=True)
class LR:
    left: object
    right: object


def _sub(g):
    yield g
    if isinstance(g, LX):
        yield from _sub(g.arg)
    elif isinstance(g, (LAnd, LOr, LU, LR)):
        yield from _sub(g.left)
        yield from _sub(g.right)


INIT = -1


@dataclass
class _Node:
    id: int
    incoming: set
    new: set
    old: set = field(default_factory=set)
    next: set = field(default_factory=set)


def tableau(phi) -> list[_Node]:
    """Generalized Buchi tableau (Gerth, Peled, Vardi, Wolper)."""
    ids = count()
    nodes: list[_Node] = []
    work = [_Node(next(ids), {INIT}, {phi})]
    while work:
        node = work.pop()
        if not node.new:
            for other in nodes:
                if other.old == node.old and other.next == node.next:
                    other.incoming |= node.incoming
                    break
            else:
                nodes.append(node)
                work.append(_Node(next(ids), {node.id}, set(node.next)))
            continue
        eta = node.new.pop()
        if eta in node.old:
            work.append(node)
            continue
        if isinstance(eta, Lit):
            if not eta.states:
                continue
            node.old.add(eta)
            work.append(node)
        elif isinstance(eta, LAnd):
            node.old.add(eta)
            node.new |= {eta.left, eta.right} - node.old
            work.append(node)
        elif isinstance(eta, LX):
            node.old.add(eta)
            node.next.add(eta.arg)
            work.append(node)
        else:
            if isinstance(eta, LOr):
                new1, next1, new2 = {eta.left}, set(), {eta.right}
            elif isinstance(eta, LU):
                new1, next1, new2 = {eta.left}, {eta}, {eta.right}
            else:  # LR
                new1, next1, new2 = {eta.right}, {eta}, {eta.left, eta.right}
            old = node.old | {eta}
            n1 = _Node(next(ids), set(node.incoming), node.new | (new1 - old), set(old), node.next | next1)
            n2 = _Node(next(ids), set(node.incoming), node.new | (new2 - old), set(old), set(node.next))
            work.extend((n1, n2))
    return nodes
