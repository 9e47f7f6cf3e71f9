"""Leveled deterministic automata over ordered variable assignments.

An automaton reads one value per variable of its ``order``; all accepted
words have the same length.  Edges are labelled with closed integer
intervals and every state below the last level covers its variable's whole
domain, so automata are complete (dead states are kept).  Term automata
additionally map every final state to the value of the term.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .terms import (
    And,
    BoolConst,
    Cmp,
    Domain,
    Guard,
    Modes,
    MultisetMatch,
    Or,
    Term,
    compare,
    term_value,
    term_variable,
)

Edge = tuple  # (lo, hi, target)


class AutomatonError(ValueError):
    pass


@dataclass
class ModeAutomaton:
    universe: tuple[str, ...]
    domains: Mapping[str, Domain]
    order: tuple[str, ...]
    level: list[int]
    edges: list[tuple[Edge, ...]]
    finals: frozenset
    values: dict | None = None
    initial: int = 0

    @property
    def n_states(self) -> int:
        return len(self.level)

    def interval(self, v: str) -> tuple[int, int]:
        d = self.domains[v]
        return d.lo, d.hi

    def check(self) -> None:
        """Assert determinism, completeness and the level structure."""
        depth = len(self.order)
        for s, es in enumerate(self.edges):
            lvl = self.level[s]
            if lvl == depth:
                if es:
                    raise AutomatonError(f"state {s} on the last level has edges")
                continue
            lo, hi = self.interval(self.order[lvl])
            expect = lo
            for a, b, d in es:
                if a != expect or b < a:
                    raise AutomatonError(f"state {s}: intervals not disjoint and complete")
                if self.level[d] != lvl + 1:
                    raise AutomatonError(f"state {s}: edge skips a level")
                expect = b + 1
            if expect != hi + 1:
                raise AutomatonError(f"state {s}: domain not covered")
        for f in self.finals:
            if self.level[f] != depth:
                raise AutomatonError("final state below the last level")
        if self.values is not None and set(self.values) != set(self.finals):
            raise AutomatonError("value map must be defined exactly on finals")

    def step(self, s: int, value: int) -> int:
        for a, b, d in self.edges[s]:
            if a <= value <= b:
                return d
        raise AutomatonError(f"value {value} outside the domain")

    def run(self, assignment: Mapping[str, int]) -> int:
        s = self.initial
        for v in self.order:
            s = self.step(s, assignment[v])
        return s

    def accepts(self, assignment: Mapping[str, int]) -> bool:
        return self.run(assignment) in self.finals

    def count_accepted(self) -> int:
        """Number of accepted words (assignments to ``order``)."""
        memo: dict[int, int] = {}
        for s in sorted(range(self.n_states), key=lambda s: -self.level[s]):
            if self.level[s] == len(self.order):
                memo[s] = 1 if s in self.finals else 0
            else:
                memo[s] = sum((b - a + 1) * memo[d] for a, b, d in self.edges[s])
        return memo[self.initial]

    def word_count(self) -> int:
        n = 1
        for v in self.order:
            n *= self.domains[v].size
        return n

    def is_universal(self) -> bool:
        return self.count_accepted() == self.word_count()

    def language(self):
        """All accepted words as value tuples (test helper, exponential)."""
        out = []

        def walk(s, prefix):
            if self.level[s] == len(self.order):
                if s in self.finals:
                    out.append(tuple(prefix))
                return
            for a, b, d in self.edges[s]:
                for val in range(a, b + 1):
                    walk(d, prefix + [val])

        walk(self.initial, [])
        return out

    def edge_labels(self) -> list[list[tuple[int, int]]]:
        """Interval labels per level, from the initial state's BFS order."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.order]
        for s in _bfs(self):
            if self.level[s] < len(self.order):
                out[self.level[s]].extend((a, b) for a, b, _ in self.edges[s])
        return out

    def to_dot(self, name: str = "A") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", f"  init -> q{self.initial};", "  init [shape=point];"]
        for s in range(self.n_states):
            shape = "doublecircle" if s in self.finals else "circle"
            label = f"q{s}" + (f"\\nV={self.values[s]}" if self.values and s in self.values else "")
            lines.append(f'  q{s} [shape={shape} label="{label}"];')
            for a, b, d in self.edges[s]:
                lab = str(a) if a == b else f"[{a},{b}]"
                lines.append(f'  q{s} -> q{d} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bfs(a: ModeAutomaton) -> list[int]:
    seen = [a.initial]
    index = {a.initial}
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        for _, _, d in a.edges[s]:
            if d not in index:
                index.add(d)
                seen.append(d)
                queue.append(d)
    return seen


# --- basic automata ------------------------------------------------------------------


def constant_automaton(value, universe, domains) -> ModeAutomaton:
    """Automaton over no variables; boolean values give true/false automata."""
    if isinstance(value, bool):
        return ModeAutomaton(tuple(universe), domains, (), [0], [()], frozenset([0]) if value else frozenset())
    return ModeAutomaton(tuple(universe), domains, (), [0], [()], frozenset([0]), {0: value})


def term_automaton(term: Term, universe: Sequence[str], domains: Mapping[str, Domain]) -> ModeAutomaton:
    """Reads the term's variable (if any); V maps finals to the term value."""
    v = term_variable(term)
    if v is None:
        return constant_automaton(term_value(term, {}, domains), universe, domains)
    if v not in universe:
        raise AutomatonError(f"variable {v} not in the variable order")
    d = domains[v]
    level = [0]
    edges: list = [()]
    values = {}
    out = []
    for i in range(d.size):
        val = d.lo + i
        s = len(level)
        level.append(1)
        edges.append(())
        values[s] = term_value(term, {v: val}, domains)
        out.append((val, val, s))
    edges[0] = tuple(out)
    return ModeAutomaton(tuple(universe), domains, (v,), level, edges, frozenset(values), values)


def insert_variable(a: ModeAutomaton, v: str, position: int | None = None) -> ModeAutomaton:
    """Extend the language by an unconstrained variable ``v``.

    Every state on the insertion level is preceded by a fresh state that
    reads ``v`` with one full-domain edge; inserting after the last level
    makes the former last-level states read ``v`` into their copies.
    """
    if v in a.order:
        raise AutomatonError(f"variable {v} already read")
    rank = {x: i for i, x in enumerate(a.universe)}
    if v not in rank:
        raise AutomatonError(f"variable {v} not in the variable order")
    if position is None:
        position = sum(1 for x in a.order if rank[x] < rank[v])
    lo, hi = a.domains[v].lo, a.domains[v].hi
    level = [l + 1 if l >= position else l for l in a.level]
    edges = [list(es) for es in a.edges]
    entry = {}
    for s, l in enumerate(a.level):
        if l == position:
            e = len(level)
            entry[s] = e
            level.append(position)
            edges.append([(lo, hi, s)])
    for s, l in enumerate(a.level):
        if l == position - 1:
            edges[s] = [(x, y, entry[d]) for x, y, d in edges[s]]
    initial = entry[a.initial] if position == 0 else a.initial
    order = a.order[:position] + (v,) + a.order[position:]
    return ModeAutomaton(
        a.universe, a.domains, order, level, [tuple(es) for es in edges], a.finals,
        None if a.values is None else dict(a.values), initial,
    )


def harmonize(a: ModeAutomaton, variables) -> ModeAutomaton:
    for v in variables:
        if v not in a.order:
            a = insert_variable(a, v)
    return a


def _intersect(e1, e2):
    out = []
    i = j = 0
    while i < len(e1) and j < len(e2):
        a1, b1, d1 = e1[i]
        a2, b2, d2 = e2[j]
        lo, hi = max(a1, a2), min(b1, b2)
        if lo <= hi:
            out.append((lo, hi, d1, d2))
        if b1 < b2:
            i += 1
        else:
            j += 1
    return out


def product(a1: ModeAutomaton, a2: ModeAutomaton, combiner: str) -> ModeAutomaton:
    """Synchronous product; ``combiner`` is "and", "or" or a comparison."""
    if a1.universe != a2.universe:
        raise AutomatonError("incompatible variable orders")
    union = set(a1.order) | set(a2.order)
    a1 = harmonize(a1, [v for v in a1.universe if v in union])
    a2 = harmonize(a2, [v for v in a2.universe if v in union])
    if combiner not in ("and", "or") and (a1.values is None or a2.values is None):
        raise AutomatonError("comparisons need term automata")
    depth = len(a1.order)
    start = (a1.initial, a2.initial)
    index = {start: 0}
    pairs = [start]
    level = [0]
    edges: list = [None]
    queue = deque([0])
    while queue:
        s = queue.popleft()
        q1, q2 = pairs[s]
        if level[s] == depth:
            edges[s] = ()
            continue
        out = []
        for lo, hi, d1, d2 in _intersect(a1.edges[q1], a2.edges[q2]):
            key = (d1, d2)
            d = index.get(key)
            if d is None:
                d = len(pairs)
                index[key] = d
                pairs.append(key)
                level.append(level[s] + 1)
                edges.append(None)
                queue.append(d)
            out.append((lo, hi, d))
        edges[s] = tuple(out)
    finals = set()
    for s, (q1, q2) in enumerate(pairs):
        if level[s] != depth:
            continue
        if combiner == "and":
            ok = q1 in a1.finals and q2 in a2.finals
        elif combiner == "or":
            ok = q1 in a1.finals or q2 in a2.finals
        else:
            ok = compare(combiner, a1.values[q1], a2.values[q2])
        if ok:
            finals.add(s)
    return ModeAutomaton(a1.universe, a1.domains, a1.order, level, edges, frozenset(finals))


def minimize(a: ModeAutomaton) -> ModeAutomaton:
    """Level-wise minimisation by signatures; merges adjacent intervals."""
    reach = _bfs(a)
    depth = len(a.order)
    by_level: list[list[int]] = [[] for _ in range(depth + 1)]
    for s in reach:
        by_level[a.level[s]].append(s)
    cls: dict[int, int] = {}
    sigs: list = []
    sig_edges: dict[int, tuple] = {}
    for lvl in range(depth, -1, -1):
        table: dict = {}
        for s in by_level[lvl]:
            if lvl == depth:
                sig = (s in a.finals, None if a.values is None else a.values.get(s))
                merged = ()
            else:
                merged = _merge_edges((x, y, cls[d]) for x, y, d in a.edges[s])
                sig = merged
            key = (lvl, sig)
            if key not in table:
                table[key] = len(sigs)
                sigs.append((lvl, sig))
                sig_edges[table[key]] = merged
            cls[s] = table[key]
    # renumber in BFS order from the initial class
    start = cls[a.initial]
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for _, _, d in sig_edges[c]:
            if d not in seen:
                seen.add(d)
                order.append(d)
                queue.append(d)
    new = {c: i for i, c in enumerate(order)}
    level = [sigs[c][0] for c in order]
    edges = [tuple((x, y, new[d]) for x, y, d in sig_edges[c]) for c in order]
    finals = frozenset(new[c] for c in order if sigs[c][0] == depth and sigs[c][1][0])
    values = None
    if a.values is not None:
        values = {new[c]: sigs[c][1][1] for c in order if sigs[c][0] == depth and sigs[c][1][0]}
    return ModeAutomaton(a.universe, a.domains, a.order, level, edges, finals, values, 0)


def _merge_edges(edges) -> tuple:
    out: list = []
    for x, y, d in edges:
        if out and out[-1][2] == d and out[-1][1] + 1 == x:
            out[-1] = (out[-1][0], y, d)
        else:
            out.append((x, y, d))
    return tuple(out)


def project_prefix(a: ModeAutomaton, n: int) -> ModeAutomaton:
    """Existentially quantify every variable after the first ``n``.

    States on level ``n`` become final iff some final state is reachable
    from them; deeper states are dropped.
    """
    depth = len(a.order)
    if n > depth:
        raise AutomatonError("prefix longer than the order")
    alive = set(a.finals)
    for s in sorted(range(a.n_states), key=lambda s: -a.level[s]):
        if a.level[s] < depth and any(d in alive for _, _, d in a.edges[s]):
            alive.add(s)
    keep = [s for s in range(a.n_states) if a.level[s] <= n]
    new = {s: i for i, s in enumerate(keep)}
    level = [a.level[s] for s in keep]
    edges = [
        () if a.level[s] == n else tuple((x, y, new[d]) for x, y, d in a.edges[s]) for s in keep
    ]
    finals = frozenset(new[s] for s in keep if a.level[s] == n and s in alive)
    return ModeAutomaton(a.universe, a.domains, a.order[:n], level, edges, finals, None, new[a.initial])


# --- guards --------------------------------------------------------------------------


def modes_automaton(guard: Modes, universe, domains) -> ModeAutomaton:
    """Trie over the explicit modes (assignments of colour indices)."""
    rank = {v: i for i, v in enumerate(universe)}
    vars_ = sorted({v for m in guard.modes for v, _ in m.assignment}, key=rank.__getitem__)
    depth = len(vars_)
    children: list[dict[int, int]] = [{}]
    level = [0]
    finals = set()
    for m in guard.modes:
        asg = m.as_dict()
        s = 0
        for i, v in enumerate(vars_):
            val = domains[v].lo + asg[v]
            nxt = children[s].get(val)
            if nxt is None:
                nxt = len(level)
                children[s][val] = nxt
                children.append({})
                level.append(i + 1)
            s = nxt
        finals.add(s)
    # complete with one sink per level
    sinks: dict[int, int] = {}

    def sink(lvl):
        if lvl not in sinks:
            sinks[lvl] = len(level)
            level.append(lvl)
            children.append({})
        return sinks[lvl]

    edges: list = []
    s = 0
    while s < len(level):
        lvl = level[s]
        if lvl == depth:
            edges.append(())
        else:
            d = domains[vars_[lvl]]
            out = []
            for val in range(d.lo, d.hi + 1):
                tgt = children[s].get(val)
                out.append((val, val, tgt if tgt is not None else sink(lvl + 1)))
            edges.append(tuple(out))
        s += 1
    return minimize(ModeAutomaton(tuple(universe), domains, tuple(vars_), level, edges, frozenset(finals)))


def guard_automaton(guard: Guard, universe: Sequence[str], domains: Mapping[str, Domain]) -> ModeAutomaton:
    """Automaton accepting exactly the assignments that satisfy ``guard``."""
    universe = tuple(universe)
    if isinstance(guard, BoolConst):
        return constant_automaton(guard.value, universe, domains)
    if isinstance(guard, Cmp):
        left = term_automaton(guard.left, universe, domains)
        right = term_automaton(guard.right, universe, domains)
        return minimize(product(left, right, guard.op))
    if isinstance(guard, (And, Or)):
        comb = "and" if isinstance(guard, And) else "or"
        parts = [guard_automaton(p, universe, domains) for p in guard.parts]
        parts.sort(key=lambda a: len(a.order))
        acc = parts[0]
        for p in parts[1:]:
            acc = minimize(product(acc, p, comb))
        return acc
    if isinstance(guard, Modes):
        return modes_automaton(guard, universe, domains)
    if isinstance(guard, MultisetMatch):
        raise AutomatonError("multiset matches are not translated to automata")
    raise TypeError(f"unknown guard {guard!r}")
