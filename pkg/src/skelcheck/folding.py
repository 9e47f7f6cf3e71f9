"""Folding P/T nets into coloured nets by partition refinement."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Callable

from .logic import Atom, AtomicProposition, Formula, atoms, map_atoms
from .nets import ColouredNet, PTNet, simple_inscription
from .terms import Domain, FiringMode, Modes


@dataclass
class Partition:
    """Nodes in an array; each class is a contiguous ``[start, end)`` range."""

    nodes: list[str]
    bounds: list[tuple[int, int]]
    kinds: list[str]  # "place" or "transition", per class
    rank: dict[str, int]  # original position of every node

    def classes(self) -> list[list[str]]:
        return [self.nodes[a:b] for a, b in self.bounds]

    def class_sets(self) -> set[frozenset]:
        return {frozenset(c) for c in self.classes()}

    def check(self) -> None:
        pos = 0
        for a, b in self.bounds:
            if a != pos or b <= a:
                raise AssertionError("classes must be contiguous and non-empty")
            pos = b
        if pos != len(self.nodes) or len(set(self.nodes)) != len(self.nodes):
            raise AssertionError("classes must cover every node exactly once")


def initial_partition(net: PTNet) -> Partition:
    nodes = list(net.places) + list(net.transitions)
    bounds, kinds = [], []
    if net.places:
        bounds.append((0, len(net.places)))
        kinds.append("place")
    if net.transitions:
        bounds.append((len(net.places), len(nodes)))
        kinds.append("transition")
    return Partition(nodes, bounds, kinds, {x: i for i, x in enumerate(nodes)})


def split(part: Partition, f: Callable[[str], int]) -> Partition:
    """Sort every class by (f, original position) and cut where f changes."""
    nodes: list[str] = []
    bounds, kinds = [], []
    for (a, b), kind in zip(part.bounds, part.kinds):
        members = sorted(part.nodes[a:b], key=lambda x: (f(x), part.rank[x]))
        start = len(nodes)
        prev = None
        for i, x in enumerate(members):
            v = f(x)
            if i and v != prev:
                bounds.append((start, len(nodes)))
                kinds.append(kind)
                start = len(nodes)
            nodes.append(x)
            prev = v
        bounds.append((start, len(nodes)))
        kinds.append(kind)
    return Partition(nodes, bounds, kinds, part.rank)


@dataclass
class FoldingResult:
    net: ColouredNet
    partition: Partition
    node_map: dict[str, str]  # original node -> folded node
    formula: Formula | None
    modes: dict[str, tuple[str, FiringMode]]  # original transition -> (class, mode)


def refine(net: PTNet, formula: Formula | None = None) -> Partition:
    """Degree, proposition and uniformity splits up to a fixpoint."""
    pre_card: dict[str, int] = {x: 0 for x in net.places + net.transitions}
    post_card = dict(pre_card)
    for (p, t) in net.weight_in:
        post_card[p] += 1
        pre_card[t] += 1
    for (p, t) in net.weight_out:
        pre_card[p] += 1
        post_card[t] += 1
    part = initial_partition(net)
    part = split(part, pre_card.__getitem__)
    part = split(part, post_card.__getitem__)
    for ap in atoms(formula) if formula is not None else ():
        coef = {p: k for k, p in ap.terms}
        part = split(part, lambda x: coef.get(x, 0))
    while True:
        before = len(part.bounds)
        for cls, kind in zip(part.classes(), part.kinds):
            if kind != "place":
                continue
            members = set(cls)
            w_in: dict[str, int] = {}
            w_out: dict[str, int] = {}
            for (p, t), w in net.weight_in.items():
                if p in members:
                    w_in[t] = w_in.get(t, 0) + w
            for (p, t), w in net.weight_out.items():
                if p in members:
                    w_out[t] = w_out.get(t, 0) + w
            part = split(part, lambda x: w_in.get(x, 0))
            part = split(part, lambda x: w_out.get(x, 0))
        if len(part.bounds) == before:
            return part


def _class_name(members: list[str]) -> str:
    prefix = os.path.commonprefix(members).rstrip("._-")
    if prefix:
        return re.sub(r"\d+$", "", prefix) or prefix
    stems: list[str] = []
    for m in members:
        s = re.sub(r"\d+$", "", m) or m
        if s not in stems:
            stems.append(s)
    return "".join(stems)


def fold(net: PTNet, formula: Formula | None = None) -> FoldingResult:
    """Fold ``net`` so that the atomic propositions of ``formula`` survive."""
    part = refine(net, formula)
    names: list[str] = []
    used: set[str] = set()
    for cls in part.classes():
        name = _class_name(cls) if len(cls) > 1 else cls[0]
        base, k = name, 1
        while name in used:
            name = f"{base}_{k}"
            k += 1
        used.add(name)
        names.append(name)
    node_map = {x: names[i] for i, cls in enumerate(part.classes()) for x in cls}
    place_classes = [(n, c) for n, c, k in zip(names, part.classes(), part.kinds) if k == "place"]
    trans_classes = [(n, c) for n, c, k in zip(names, part.classes(), part.kinds) if k == "transition"]
    domains = {n: Domain.enum(n, c) for n, c in place_classes}
    initial = {n: tuple(net.initial.get(p, 0) for p in c) for n, c in place_classes}
    arcs_in: dict = {}
    arcs_out: dict = {}
    guards: dict = {}
    variables: dict = {}
    modes_of: dict = {}
    counter = 0
    for tname, members in trans_classes:
        rep = members[0]
        var_doms: dict[str, Domain] = {}
        layout = []  # (direction, class members, variables)
        for direction, weights, arcs in (("in", net.weight_in, arcs_in), ("out", net.weight_out, arcs_out)):
            for pname, pcls in place_classes:
                w = sum(weights.get((p, rep), 0) for p in pcls)
                if not w:
                    continue
                vs = [f"x{counter + i + 1}" for i in range(w)]
                counter += w
                arcs[(pname, tname)] = simple_inscription(vs)
                for v in vs:
                    var_doms[v] = domains[pname]
                layout.append((weights, pcls, vs))
        modes = []
        for t in members:
            asg = []
            for weights, pcls, vs in layout:
                i = 0
                for c, p in enumerate(pcls):
                    for _ in range(weights.get((p, t), 0)):
                        asg.append((vs[i], c))
                        i += 1
                if i != len(vs):
                    raise ValueError(f"transition {t} breaks uniformity of class {tname}")
            mode = FiringMode(tuple(asg))
            modes.append(mode)
            modes_of[t] = (tname, mode)
        guards[tname] = Modes(tuple(modes))
        variables[tname] = var_doms
    cnet = ColouredNet(
        tuple(n for n, _ in place_classes),
        tuple(n for n, _ in trans_classes),
        domains, arcs_in, arcs_out, guards, variables, initial,
    )
    folded_formula = None if formula is None else translate_formula(formula, node_map)
    return FoldingResult(cnet, part, node_map, folded_formula, modes_of)


def translate_formula(formula: Formula, node_map: dict[str, str]) -> Formula:
    """Rewrite propositions over original places into ones over classes."""

    def tr(ap: AtomicProposition):
        coef: dict[str, int] = {}
        for k, p in ap.terms:
            c = node_map[p]
            if coef.setdefault(c, k) != k:
                raise ValueError(f"class {c} mixes coefficients in {ap}")
        return Atom(AtomicProposition(tuple((k, c) for c, k in coef.items()), ap.bound))

    return map_atoms(formula, tr)


def folding_worthwhile(original: PTNet, folded: ColouredNet) -> bool:
    """The folded skeleton must be smaller than a third of the original."""
    return 3 * folded.size < original.size
