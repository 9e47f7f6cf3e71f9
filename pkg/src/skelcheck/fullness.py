"""Transition classes, full classes and the deadlock-preservation test.

A class groups transitions with the same input vector (tokens consumed per
place).  It is full when every token distribution of that shape enables
one of its members.  If every minimal class is full, each dead coloured
marking has a dead skeleton image.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

from .automata import (
    AutomatonError,
    ModeAutomaton,
    guard_automaton,
    harmonize,
    minimize,
    product,
    project_prefix,
)
from .nets import ColouredNet, enumerate_multisets
from .simplify import simplify_inscriptions
from .terms import Cmp, Var, conjoin, disjoin, rename_guard

CERTIFICATE_LIMIT = 1 << 63

InputVector = tuple  # tokens consumed per place, in place order


def _simplified(net: ColouredNet) -> ColouredNet:
    if net.is_simplified():
        return net
    key = ("simplified",)
    if key not in net._cache:
        net._cache[key] = simplify_inscriptions(net)
    return net._cache[key]


def input_vector(net: ColouredNet, t: str) -> InputVector:
    return tuple(net.weight(p, t, "in") for p in net.places)


@dataclass
class TransitionClassification:
    classes: list[tuple[str, ...]]
    vectors: list[InputVector]
    order: frozenset  # (i, j): class i strictly below class j
    minimal: list[int]

    def class_of(self, t: str) -> int:
        for i, c in enumerate(self.classes):
            if t in c:
                return i
        raise KeyError(t)

    def minimal_classes(self) -> list[tuple[str, ...]]:
        return [self.classes[i] for i in self.minimal]


def transition_classes(net: ColouredNet) -> TransitionClassification:
    groups: dict[InputVector, list[str]] = {}
    for t in net.transitions:
        groups.setdefault(input_vector(net, t), []).append(t)
    vectors = list(groups)
    classes = [tuple(groups[v]) for v in vectors]
    order = set()
    for i, a in enumerate(vectors):
        for j, b in enumerate(vectors):
            if i != j and all(x <= y for x, y in zip(a, b)):
                order.add((i, j))
    minimal = [j for j in range(len(classes)) if not any((i, j) in order for i in range(len(classes)))]
    return TransitionClassification(classes, vectors, frozenset(order), minimal)


# --- automata route -----------------------------------------------------------------


def canonical_inputs(net: ColouredNet, t: str) -> list[tuple[str, list[list[str]]]]:
    """Position-aligned names for the consumed tokens of ``t``, per pre-place."""
    out = []
    for p in net.preset(t):
        comps = net.domains[p].basic()
        k = len(net.tokens(p, t, "in"))
        if len(comps) == 1:
            out.append((p, [[f"{p}#{i}"] for i in range(k)]))
        else:
            out.append((p, [[f"{p}#{i}.{j}" for j in range(len(comps))] for i in range(k)]))
    return out


def consumption_automaton(net: ColouredNet, t: str) -> ModeAutomaton:
    """Token distributions on the pre-places consumable by some mode of ``t``.

    The automaton reads one position-aligned variable per consumed token
    component.  Tokens of one arc are matched up to permutation, so the
    language is closed under reordering tokens of the same place.
    """
    net = _simplified(net)
    doms = dict(net.variables[t])
    rename: dict[str, str] = {}
    extra = []
    canon: list[str] = []
    for p, ys in canonical_inputs(net, t):
        toks = net.tokens(p, t, "in")
        for row in ys:
            for y, cd in zip(row, net.domains[p].basic()):
                doms[y] = cd
                canon.append(y)
        if len(toks) == 1:
            rename.update(zip(toks[0], ys[0]))
        else:
            extra.append(disjoin(*(
                conjoin(*(
                    Cmp("==", Var(y), Var(x))
                    for k, row in enumerate(ys)
                    for y, x in zip(row, toks[perm[k]])
                ))
                for perm in itertools.permutations(range(len(toks)))
            )))
    guard = conjoin(*extra, rename_guard(net.guards[t], rename))
    rest = [rename.get(v, v) for v in net.all_variables(t)]
    universe = tuple(canon) + tuple(v for v in rest if v not in canon)
    for v in list(doms):
        if v in rename:
            doms.setdefault(rename[v], doms[v])
    a = guard_automaton(guard, universe, doms)
    a = project_prefix(harmonize(a, canon), len(canon))
    a.universe = tuple(canon)
    a.domains = {v: doms[v] for v in canon}
    return minimize(a)


def class_automaton(net: ColouredNet, cls) -> ModeAutomaton:
    """Minimised or-product of the members' consumption automata."""
    net = _simplified(net)
    autos = [consumption_automaton(net, t) for t in cls]
    acc = autos[0]
    for a in autos[1:]:
        if a.order != acc.order or a.domains != acc.domains:
            raise AutomatonError("class members disagree on their input positions")
        acc = minimize(product(acc, a, "or"))
    return acc


def is_full(net: ColouredNet, cls) -> bool:
    """Automaton-based fullness test; flagged classes count as not full."""
    net = _simplified(net)
    cls = tuple(cls)
    if any(t in net.assumed_nonfull for t in cls):
        return False
    if len({input_vector(net, t) for t in cls}) != 1:
        raise ValueError("class members must share their input vector")
    try:
        return class_automaton(net, cls).is_universal()
    except AutomatonError:
        return False


def consumption_signature(net: ColouredNet, t: str, mode) -> tuple:
    cons, _ = net.mode_effect(t, mode)
    out = []
    for p in net.preset(t):
        vec = [0] * net.domains[p].size
        for c, n in cons.get(p, {}).items():
            vec[c] = n
        out.append(tuple(vec))
    return tuple(out)


def full_by_enumeration(net: ColouredNet, cls) -> bool:
    """Oracle: enumerate every distribution and look for an enabling mode."""
    net = _simplified(net)
    cls = tuple(cls)
    covered = set()
    for t in cls:
        for mode in net.modes(t):
            covered.add(consumption_signature(net, t, mode))
    t0 = cls[0]
    shapes = [
        list(enumerate_multisets(net.domains[p].size, len(net.tokens(p, t0, "in"))))
        for p in net.preset(t0)
    ]
    return all(dist in covered for dist in itertools.product(*shapes))


class DeadlockPreservation(enum.Enum):
    YES = "yes"
    NO_OR_UNKNOWN = "no-or-unknown"

    def __bool__(self) -> bool:
        return self is DeadlockPreservation.YES


def minimal_class_fullness(net: ColouredNet) -> dict[tuple[str, ...], bool]:
    net = _simplified(net)
    tc = transition_classes(net)
    return {cls: is_full(net, cls) for cls in tc.minimal_classes()}


def has_deadlock_preserving_skeleton(net: ColouredNet) -> DeadlockPreservation:
    if all(minimal_class_fullness(net).values()):
        return DeadlockPreservation.YES
    return DeadlockPreservation.NO_OR_UNKNOWN


# --- counting certificate for folded nets ------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    required: int  # number of token distributions of the class shape
    distinct: int  # distinct consumption multisets among the modes
    certified: bool


def binomial_certificate(net: ColouredNet, cls) -> Certificate | None:
    """Compare the number of distributions with the distinct mode count.

    A pre-place with ``n`` colours and weight ``w`` admits
    ``C(n + w - 1, w)`` token multisets.  Since every distinct consumption
    multiset of a mode is one such distribution, equality of the two counts
    means every distribution is covered.  Returns None when the count
    exceeds the arithmetic limit.
    """
    net = _simplified(net)
    cls = tuple(cls)
    t0 = cls[0]
    required = 1
    for p in net.preset(t0):
        n = net.domains[p].size
        w = len(net.tokens(p, t0, "in"))
        required *= math.comb(n + w - 1, w)
        if required > CERTIFICATE_LIMIT:
            return None
    sigs = {consumption_signature(net, t, m) for t in cls for m in net.modes(t)}
    return Certificate(required, len(sigs), required == len(sigs))


def folded_fullness_check(net: ColouredNet) -> dict[tuple[str, ...], bool | None]:
    """Certificate verdict per minimal class (None: too large to count)."""
    net = _simplified(net)
    out = {}
    for cls in transition_classes(net).minimal_classes():
        c = binomial_certificate(net, cls)
        out[cls] = None if c is None else c.certified
    return out
