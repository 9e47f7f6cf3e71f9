"""Firing rules, reachability graphs and brute-force relation oracles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .nets import ColouredMarking, ColouredNet, Marking, NetError, NetMorphism, PTNet

DEFAULT_STATE_CAP = 10**6
TAU = "tau"


class StateCapExceeded(RuntimeError):
    def __init__(self, cap: int, frontier: int):
        super().__init__(f"state cap {cap} exceeded with {frontier} states on the frontier")
        self.cap = cap
        self.frontier = frontier


class Cancelled(RuntimeError):
    pass


# --- P/T semantics -------------------------------------------------------------


def enabled(net: PTNet, m: Marking) -> list[str]:
    """Transitions whose input weights are covered by ``m``."""
    return [
        t for t, pre in zip(net.transitions, net._pre) if all(m[i] >= w for i, w in pre)
    ]


def fire(net: PTNet, m: Marking, t: str) -> Marking:
    k = net.transitions.index(t)
    out = list(m)
    for i, w in net._pre[k]:
        if out[i] < w:
            raise NetError(f"transition {t} is not enabled")
        out[i] -= w
    for i, w in net._post[k]:
        out[i] += w
    return tuple(out)


def _pt_successors(net: PTNet):
    pres, posts, names = net._pre, net._post, net.transitions

    def succ(m):
        for t, pre, post in zip(names, pres, posts):
            if all(m[i] >= w for i, w in pre):
                out = list(m)
                for i, w in pre:
                    out[i] -= w
                for i, w in post:
                    out[i] += w
                yield t, tuple(out)

    return succ


# --- coloured semantics ----------------------------------------------------------


def coloured_enabled(net: ColouredNet, m: ColouredMarking) -> list[tuple[str, object]]:
    """Enabled (transition, firing mode) pairs."""
    out = []
    for t in net.transitions:
        for mode, cons, _ in net.compiled(t):
            if all(m[i][c] >= n for i, c, n in cons):
                out.append((t, mode))
    return out


def coloured_fire(net: ColouredNet, m: ColouredMarking, t: str, mode) -> ColouredMarking:
    for md, cons, prod in net.compiled(t):
        if md == mode:
            break
    else:
        raise NetError(f"{mode} is not a firing mode of {t}")
    out = [list(v) for v in m]
    for i, c, n in cons:
        if out[i][c] < n:
            raise NetError(f"transition {t} is not enabled in this mode")
        out[i][c] -= n
    for i, c, n in prod:
        out[i][c] += n
    return tuple(tuple(v) for v in out)


def _coloured_successors(net: ColouredNet):
    from .nets import transition_name

    compiled = [(t, net.compiled(t)) for t in net.transitions]

    def succ(m):
        for t, modes in compiled:
            for mode, cons, prod in modes:
                if all(m[i][c] >= n for i, c, n in cons):
                    out = [list(v) for v in m]
                    for i, c, n in cons:
                        out[i][c] -= n
                    for i, c, n in prod:
                        out[i][c] += n
                    yield transition_name(net, t, mode), tuple(tuple(v) for v in out)

    return succ


# --- Kripke structures -----------------------------------------------------------


@dataclass
class KripkeStructure:
    """Reachability graph completed with silent loops at deadlocks.

    ``edges`` holds (source, action, target) triples.  ``labels[s]`` is the
    frozenset of indices into ``props`` that hold in state ``s``.
    """

    states: list
    initial: int
    edges: list[tuple[int, str, int]]
    labels: list[frozenset]
    tau_loops: frozenset
    props: tuple = ()
    places: tuple = ()
    coloured: bool = False
    silent: frozenset = frozenset()
    _succ: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self._succ = [[] for _ in self.states]
        for s, _, d in self.edges:
            self._succ[s].append(d)

    def __len__(self) -> int:
        return len(self.states)

    def successors(self, s: int) -> list[int]:
        return self._succ[s]

    def holds(self, s: int, atom) -> bool:
        """Truth of an atomic proposition in state ``s``."""
        try:
            return self.props.index(atom) in self.labels[s]
        except ValueError:
            pass
        from .logic import eval_ap

        return eval_ap(dict(zip(self.places, self.states[s])), atom)

    def to_dot(self) -> str:
        lines = ["digraph K {", f"  init -> s{self.initial};", "  init [shape=point];"]
        for s, a, d in self.edges:
            style = ' style="dashed"' if a == TAU or a in self.silent else ""
            lines.append(f'  s{s} -> s{d} [label="{a}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_kripke(
    net: PTNet | ColouredNet,
    props: Sequence = (),
    state_cap: int = DEFAULT_STATE_CAP,
    silent: Iterable[str] = (),
    cancel: Callable[[], bool] | None = None,
) -> KripkeStructure:
    """Breadth-first reachability graph with Kripke completion."""
    if state_cap < 1:
        raise ValueError("state cap must be positive")
    from .logic import eval_ap

    coloured = isinstance(net, ColouredNet)
    if coloured:
        succ = _coloured_successors(net)
    else:
        succ = _pt_successors(net)
    m0 = net.initial_marking()
    states = [m0]
    index = {m0: 0}
    edges = []
    queue = deque([0])
    dead = []
    while queue:
        if cancel is not None and cancel():
            raise Cancelled()
        s = queue.popleft()
        m = states[s]
        any_edge = False
        for t, m2 in succ(m):
            any_edge = True
            d = index.get(m2)
            if d is None:
                if len(states) >= state_cap:
                    raise StateCapExceeded(state_cap, len(queue) + 1)
                d = len(states)
                index[m2] = d
                states.append(m2)
                queue.append(d)
            edges.append((s, t, d))
        if not any_edge:
            dead.append(s)
            edges.append((s, TAU, s))
    places = tuple(net.places)
    labels = []
    props = tuple(props)
    for m in states:
        md = dict(zip(places, m))
        labels.append(frozenset(i for i, a in enumerate(props) if eval_ap(md, a)))
    return KripkeStructure(
        states, 0, edges, labels, frozenset(dead), props, places, coloured, frozenset(silent)
    )


def deadlocks(k: KripkeStructure) -> frozenset:
    return k.tau_loops


# --- relations -------------------------------------------------------------------


StateRelation = set  # set[tuple[int, int]]


def morphism_relation(k: KripkeStructure, khat: KripkeStructure, morphism: NetMorphism) -> StateRelation:
    """Pairs (q, q^) with q^ the image marking of q under the morphism."""
    index = {m: i for i, m in enumerate(khat.states)}
    rel = set()
    for q, m in enumerate(k.states):
        img = morphism.map_tuple(m)
        if img in index:
            rel.add((q, index[img]))
    return rel


def relation_by(k: KripkeStructure, khat: KripkeStructure, abstract: Callable, concrete: Callable) -> StateRelation:
    """Pairs whose images under the two maps coincide."""
    buckets: dict = {}
    for r, m in enumerate(khat.states):
        buckets.setdefault(abstract(m), []).append(r)
    return {(q, r) for q, m in enumerate(k.states) for r in buckets.get(concrete(m), ())}


def check_abstraction(k: KripkeStructure, khat: KripkeStructure, sigma: StateRelation, props: Sequence) -> bool:
    """Every related pair agrees on every proposition."""
    for q, r in sigma:
        for a in props:
            if k.holds(q, a) != khat.holds(r, a):
                return False
    return True


@dataclass
class RelationResult:
    holds: bool
    counterexample: tuple | None = None  # (q, q^, offending concrete edge)
    relation: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.holds


def _same_labels(k, khat, props):
    if props is None:
        return lambda q, r: True
    return lambda q, r: all(k.holds(q, a) == khat.holds(r, a) for a in props)


def check_simulation(
    k: KripkeStructure, khat: KripkeStructure, sigma: StateRelation, props: Sequence | None = None
) -> RelationResult:
    """Single-step simulation as a greatest fixpoint inside ``sigma``.

    Holds iff the pair of initial states survives.  With ``props`` given,
    pairs must also agree on those propositions.
    """
    same = _same_labels(k, khat, props)
    rel = {(q, r) for q, r in sigma if same(q, r)}
    first_bad = None
    by_q: dict[int, set[int]] = {}
    for q, r in rel:
        by_q.setdefault(q, set()).add(r)
    changed = True
    while changed:
        changed = False
        for q, r in sorted(rel):
            for q1 in k.successors(q):
                ok = by_q.get(q1, ())
                if not any(r1 in ok for r1 in khat.successors(r)):
                    rel.discard((q, r))
                    by_q[q].discard(r)
                    if first_bad is None:
                        first_bad = (q, r, (q, _action(k, q, q1), q1))
                    changed = True
                    break
    init = (k.initial, khat.initial)
    if init in rel:
        return RelationResult(True, None, frozenset(rel))
    if init not in sigma:
        return RelationResult(False, (k.initial, khat.initial, None), frozenset(rel))
    return RelationResult(False, first_bad, frozenset(rel))


def check_stuttering_simulation(
    k: KripkeStructure, khat: KripkeStructure, sigma: StateRelation, props: Sequence | None = None
) -> RelationResult:
    """Divergence-sensitive stuttering simulation as a greatest fixpoint.

    A pair (q, r) survives if every step q -> q1 is matched by an abstract
    path r = r0 -> ... -> rk with k >= 1, every ri (i < k) still related to
    q and rk related to q1.  Each concrete step costs at least one abstract
    step, so infinite runs (including the silent loops at deadlocks) are
    matched by infinite runs with the same label sequence up to stuttering.
    """
    same = _same_labels(k, khat, props)
    rel = {(q, r) for q, r in sigma if same(q, r)}
    by_q: dict[int, set[int]] = {}
    for q, r in rel:
        by_q.setdefault(q, set()).add(r)
    first_bad = None
    changed = True
    while changed:
        changed = False
        for q, r in sorted(rel):
            if (q, r) not in rel:
                continue
            block = by_q[q]
            for q1 in k.successors(q):
                if not _path_exists(khat, r, block, by_q.get(q1, set())):
                    rel.discard((q, r))
                    block.discard(r)
                    if first_bad is None:
                        first_bad = (q, r, (q, _action(k, q, q1), q1))
                    changed = True
                    break
    init = (k.initial, khat.initial)
    if init in rel:
        return RelationResult(True, None, frozenset(rel))
    return RelationResult(False, first_bad or (k.initial, khat.initial, None), frozenset(rel))


def _path_exists(khat: KripkeStructure, start: int, block: set, goal: set) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        r = stack.pop()
        for r1 in khat.successors(r):
            if r1 in goal:
                return True
            if r1 in block and r1 not in seen:
                seen.add(r1)
                stack.append(r1)
    return False


def _action(k: KripkeStructure, q: int, q1: int) -> str:
    for s, a, d in k.edges:
        if s == q and d == q1:
            return a
    return "?"
