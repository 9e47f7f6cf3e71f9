"""P/T nets, coloured nets and the structural constructions between them.

Markings are tuples in place order.  A P/T marking is a tuple of ints, a
coloured marking a tuple of per-place colour count vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .terms import (
    TRUE,
    BoolConst,
    Domain,
    FiringMode,
    Guard,
    Modes,
    Term,
    Var,
    evaluate,
    guard_variables,
)

DEFAULT_UNFOLD_CAP = 1 << 20

Marking = tuple  # tuple[int, ...] for P/T nets
ColouredMarking = tuple  # tuple[tuple[int, ...], ...]


class NetError(ValueError):
    """Malformed net or invalid use of a net."""


class UnfoldingTooLarge(NetError):
    def __init__(self, cap: int):
        super().__init__(f"unfolding exceeds the cap of {cap} transitions")
        self.cap = cap


# --- P/T nets ----------------------------------------------------------------


@dataclass
class PTNet:
    """Place/transition net.

    ``weight_in[(p, t)]`` is W(p,t) and ``weight_out[(p, t)]`` is W(t,p).
    Absent keys mean weight 0; zero weights are dropped on construction.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    weight_in: dict[tuple[str, str], int]
    weight_out: dict[tuple[str, str], int]
    initial: dict[str, int]
    _pre: list = field(default=None, repr=False, compare=False)
    _post: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.places = tuple(self.places)
        self.transitions = tuple(self.transitions)
        names = self.places + self.transitions
        if len(set(names)) != len(names):
            raise NetError("place and transition names must be distinct")
        pset, tset = set(self.places), set(self.transitions)
        for arcs in (self.weight_in, self.weight_out):
            for (p, t), w in list(arcs.items()):
                if p not in pset or t not in tset:
                    raise NetError(f"arc ({p}, {t}) refers to an unknown node")
                if w < 0:
                    raise NetError(f"negative weight on arc ({p}, {t})")
                if w == 0:
                    del arcs[(p, t)]
        for p, n in self.initial.items():
            if p not in pset:
                raise NetError(f"initial marking refers to unknown place {p}")
            if n < 0:
                raise NetError(f"negative initial marking on {p}")
        self.initial = {p: n for p, n in self.initial.items() if n}
        pidx = {p: i for i, p in enumerate(self.places)}
        tidx = {t: i for i, t in enumerate(self.transitions)}
        self._pre = [[] for _ in self.transitions]
        self._post = [[] for _ in self.transitions]
        for (p, t), w in self.weight_in.items():
            self._pre[tidx[t]].append((pidx[p], w))
        for (p, t), w in self.weight_out.items():
            self._post[tidx[t]].append((pidx[p], w))
        for lst in self._pre + self._post:
            lst.sort()

    @property
    def size(self) -> int:
        return len(self.places) + len(self.transitions)

    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    def initial_marking(self) -> Marking:
        return tuple(self.initial.get(p, 0) for p in self.places)

    def marking(self, m: Mapping[str, int]) -> Marking:
        idx = self.place_index()
        for p in m:
            if p not in idx:
                raise KeyError(f"unknown place {p}")
        return tuple(m.get(p, 0) for p in self.places)

    def preset(self, t: str) -> dict[str, int]:
        return {p: w for (p, u), w in self.weight_in.items() if u == t}

    def postset(self, t: str) -> dict[str, int]:
        return {p: w for (p, u), w in self.weight_out.items() if u == t}


# --- coloured nets -----------------------------------------------------------


@dataclass(frozen=True)
class AllColours:
    """The ``all`` term: one token of every colour of the component domain."""

    def __str__(self) -> str:
        return "all"


ALL = AllColours()


@dataclass(frozen=True)
class ArcTerm:
    """``coef * <c1, ..., ck>``; one component per basic component domain."""

    coef: int
    components: tuple[Union[Term, AllColours], ...]

    def __str__(self) -> str:
        body = str(self.components[0]) if len(self.components) == 1 else (
            "<" + ", ".join(map(str, self.components)) + ">"
        )
        if self.coef == 1:
            return body
        if self.coef == -1:
            return "-" + body
        return f"{self.coef}*{body}"


Inscription = tuple  # tuple[ArcTerm, ...]


def var_token(*names: str) -> ArcTerm:
    return ArcTerm(1, tuple(Var(n) for n in names))


def simple_inscription(tokens: Iterable) -> Inscription:
    """Build an inscription from variable names or tuples of names."""
    out = []
    for tok in tokens:
        out.append(var_token(tok) if isinstance(tok, str) else var_token(*tok))
    return tuple(out)


def is_simple_term(a: ArcTerm) -> bool:
    return a.coef == 1 and all(isinstance(c, Var) for c in a.components)


@dataclass
class ColouredNet:
    """Coloured (symmetric) net.

    Arcs carry inscriptions.  After simplification every inscription is a
    list of tokens whose components are distinct variables, which is the
    form all semantic constructions work on.  ``variables[t]`` gives the
    (basic) domain of every variable of ``t``, including guard-only ones.
    ``assumed_nonfull`` lists transitions whose class is treated as not full.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    domains: dict[str, Domain]
    arcs_in: dict[tuple[str, str], Inscription]
    arcs_out: dict[tuple[str, str], Inscription]
    guards: dict[str, Guard]
    variables: dict[str, dict[str, Domain]]
    initial: dict[str, tuple[int, ...]]
    assumed_nonfull: frozenset = frozenset()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.places = tuple(self.places)
        self.transitions = tuple(self.transitions)
        names = self.places + self.transitions
        if len(set(names)) != len(names):
            raise NetError("place and transition names must be distinct")
        for p in self.places:
            if p not in self.domains:
                raise NetError(f"place {p} has no colour domain")
        pset, tset = set(self.places), set(self.transitions)
        for arcs in (self.arcs_in, self.arcs_out):
            for (p, t), ins in list(arcs.items()):
                if p not in pset or t not in tset:
                    raise NetError(f"arc ({p}, {t}) refers to an unknown node")
                ins = tuple(ins)
                for a in ins:
                    if len(a.components) != self.domains[p].arity:
                        raise NetError(f"arc ({p}, {t}): token arity does not match domain")
                if ins:
                    arcs[(p, t)] = ins
                else:
                    del arcs[(p, t)]
        for t in self.transitions:
            self.guards.setdefault(t, TRUE)
            self.variables.setdefault(t, {})
        for p, vec in list(self.initial.items()):
            if p not in pset:
                raise NetError(f"initial marking refers to unknown place {p}")
            vec = tuple(vec)
            if len(vec) != self.domains[p].size or min(vec, default=0) < 0:
                raise NetError(f"initial marking of {p} is not a count vector over its domain")
            self.initial[p] = vec
        self.assumed_nonfull = frozenset(self.assumed_nonfull)

    # structure ---------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.places) + len(self.transitions)

    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    def is_simplified(self) -> bool:
        for t in self.transitions:
            seen: set[str] = set()
            for arcs in (self.arcs_in, self.arcs_out):
                for p in self.places:
                    for a in arcs.get((p, t), ()):
                        if not is_simple_term(a):
                            return False
                        for c in a.components:
                            if c.name in seen:
                                return False
                            seen.add(c.name)
        return True

    def tokens(self, p: str, t: str, direction: str = "in") -> tuple[tuple[str, ...], ...]:
        """Variable tuples on the arc, one per token (simplified nets only)."""
        arcs = self.arcs_in if direction == "in" else self.arcs_out
        out = []
        for a in arcs.get((p, t), ()):
            if not is_simple_term(a):
                raise NetError(f"arc ({p}, {t}) is not simplified")
            out.append(tuple(c.name for c in a.components))
        return tuple(out)

    def arc_variables(self, p: str, t: str, direction: str = "in") -> tuple[str, ...]:
        return tuple(v for tok in self.tokens(p, t, direction) for v in tok)

    def weight(self, p: str, t: str, direction: str = "in") -> int:
        """Skeleton weight: number of tokens moved by every firing."""
        arcs = self.arcs_in if direction == "in" else self.arcs_out
        return sum(_token_count(a, self.domains[p]) for a in arcs.get((p, t), ()))

    def preset(self, t: str) -> list[str]:
        return [p for p in self.places if (p, t) in self.arcs_in]

    def postset(self, t: str) -> list[str]:
        return [p for p in self.places if (p, t) in self.arcs_out]

    def transition_variables(self, t: str) -> list[str]:
        """Arc variables of ``t`` in canonical order: inputs, then outputs."""
        out: list[str] = []
        for direction in ("in", "out"):
            for p in self.places:
                for v in self.arc_variables(p, t, direction):
                    if v not in out:
                        out.append(v)
        return out

    def all_variables(self, t: str) -> list[str]:
        """Arc variables followed by guard-only variables."""
        out = self.transition_variables(t)
        extra = sorted(set(self.variables[t]) - set(out))
        missing = guard_variables(self.guards[t]) - set(out) - set(extra)
        if missing:
            raise NetError(f"transition {t}: guard variables {sorted(missing)} have no domain")
        return out + extra

    def initial_marking(self) -> ColouredMarking:
        return tuple(
            self.initial.get(p, (0,) * self.domains[p].size) for p in self.places
        )

    # modes ---------------------------------------------------------------

    def modes(self, t: str, cap: int | None = None) -> list[FiringMode]:
        """All firing modes of ``t``, deduplicated on arc variables.

        Assignments map variables to colour indices.  Guard-only variables
        are existentially quantified.
        """
        key = ("modes", t)
        if key in self._cache:
            return self._cache[key]
        modes = list(_enumerate_modes(self, t, cap))
        self._cache[key] = modes
        return modes

    def mode_effect(self, t: str, mode: FiringMode):
        """(consumption, production) as sparse per-place colour count dicts."""
        return (_effect(self, t, mode, "in"), _effect(self, t, mode, "out"))

    def compiled(self, t: str):
        """Cached list of (mode, consume, produce) with dense colour vectors."""
        key = ("compiled", t)
        if key not in self._cache:
            pidx = self.place_index()
            out = []
            for mode in self.modes(t):
                cons, prod = self.mode_effect(t, mode)
                out.append((
                    mode,
                    tuple((pidx[p], c, n) for p, cs in cons.items() for c, n in cs.items()),
                    tuple((pidx[p], c, n) for p, cs in prod.items() for c, n in cs.items()),
                ))
            self._cache[key] = out
        return self._cache[key]


def _token_count(a: ArcTerm, dom: Domain) -> int:
    n = abs(a.coef)
    for comp, cdom in zip(a.components, dom.basic()):
        if isinstance(comp, AllColours):
            n *= cdom.size
    return n if a.coef >= 0 else -n


def _enumerate_modes(net: ColouredNet, t: str, cap: int | None) -> Iterator[FiringMode]:
    if not net.is_simplified():
        raise NetError("modes need simplified inscriptions")
    arc_vars = net.transition_variables(t)
    all_vars = net.all_variables(t)
    doms = {v: net.variables[t][v] for v in all_vars}
    guard = net.guards[t]
    count = 0
    if isinstance(guard, Modes) and set(guard_variables(guard)) >= set(arc_vars):
        seen = set()
        for m in guard.modes:
            proj = tuple((v, m[v]) for v in arc_vars)
            if proj not in seen and all(0 <= c < doms[v].size for v, c in proj):
                seen.add(proj)
                count += 1
                if cap is not None and count > cap:
                    raise UnfoldingTooLarge(cap)
                yield FiringMode(proj)
        return
    seen: set = set()
    values: dict[str, int] = {}
    n_arc = len(arc_vars)

    def dfs(i: int) -> Iterator[tuple]:
        # guard-only variables only need one witness
        r = evaluate(guard, values, doms)
        if r is False:
            return
        if i == len(all_vars):
            if r:
                yield tuple((v, values[v] - doms[v].lo) for v in arc_vars)
            return
        v = all_vars[i]
        d = doms[v]
        for idx in range(d.size):
            values[v] = d.lo + idx
            if i >= n_arc:
                found = next(dfs(i + 1), None)
                if found is not None:
                    del values[v]
                    yield found
                    return
            else:
                yield from dfs(i + 1)
        del values[v]

    for proj in dfs(0):
        if proj in seen:
            continue
        seen.add(proj)
        count += 1
        if cap is not None and count > cap:
            raise UnfoldingTooLarge(cap)
        yield FiringMode(proj)


def _effect(net: ColouredNet, t: str, mode: FiringMode, direction: str) -> dict[str, dict[int, int]]:
    out: dict[str, dict[int, int]] = {}
    asg = mode.as_dict()
    for p in net.places:
        toks = net.tokens(p, t, direction)
        if not toks:
            continue
        dom = net.domains[p]
        counts: dict[int, int] = {}
        for tok in toks:
            c = dom.compose([asg[v] for v in tok]) if dom.is_product else asg[tok[0]]
            counts[c] = counts.get(c, 0) + 1
        out[p] = counts
    return out


# --- constructions -------------------------------------------------------------


def place_name(p: str, dom: Domain, c: int) -> str:
    return f"{p}.{dom.labels[c]}"


def transition_name(net: ColouredNet, t: str, mode: FiringMode) -> str:
    doms = net.variables[t]
    parts = [doms[v].labels[c] for v, c in mode.assignment]
    return f"{t}." + "_".join(parts) if parts else t


@dataclass
class Unfolding:
    """An unfolded net with its name table."""

    net: PTNet
    places: dict[str, tuple[str, int]]  # [p,c] name -> (p, colour)
    transitions: dict[str, tuple[str, FiringMode]]  # [t,g] name -> (t, g)
    place_of: dict[tuple[str, int], str]

    def marking_of(self, cnet: ColouredNet, m: ColouredMarking) -> Marking:
        """The unfolded marking of a coloured marking."""
        pidx = cnet.place_index()
        return tuple(m[pidx[p]][c] for p, c in (self.places[n] for n in self.net.places))


def unfold(net: ColouredNet, cap: int = DEFAULT_UNFOLD_CAP) -> Unfolding:
    """Unfold ``net``; raises UnfoldingTooLarge past ``cap`` transitions."""
    if not net.is_simplified():
        from .simplify import simplify_inscriptions

        net = simplify_inscriptions(net)
    places: list[str] = []
    ptable: dict[str, tuple[str, int]] = {}
    place_of: dict[tuple[str, int], str] = {}
    initial: dict[str, int] = {}
    for p in net.places:
        dom = net.domains[p]
        vec = net.initial.get(p, (0,) * dom.size)
        for c in range(dom.size):
            name = place_name(p, dom, c)
            places.append(name)
            ptable[name] = (p, c)
            place_of[(p, c)] = name
            if vec[c]:
                initial[name] = vec[c]
    transitions: list[str] = []
    ttable: dict[str, tuple[str, FiringMode]] = {}
    w_in: dict[tuple[str, str], int] = {}
    w_out: dict[tuple[str, str], int] = {}
    total = 0
    for t in net.transitions:
        for mode in net.modes(t, cap=cap - total):
            total += 1
            if total > cap:
                raise UnfoldingTooLarge(cap)
            name = transition_name(net, t, mode)
            transitions.append(name)
            ttable[name] = (t, mode)
            cons, prod = net.mode_effect(t, mode)
            for p, cs in cons.items():
                for c, n in cs.items():
                    w_in[(place_of[(p, c)], name)] = n
            for p, cs in prod.items():
                for c, n in cs.items():
                    w_out[(place_of[(p, c)], name)] = n
    pt = PTNet(places, transitions, w_in, w_out, initial)
    return Unfolding(pt, ptable, ttable, place_of)


def skeleton(net: ColouredNet) -> PTNet:
    """Replace colours by black tokens and inscriptions by their token counts."""
    w_in = {(p, t): net.weight(p, t, "in") for (p, t) in net.arcs_in}
    w_out = {(p, t): net.weight(p, t, "out") for (p, t) in net.arcs_out}
    for arcs in (w_in, w_out):
        for k, w in arcs.items():
            if w < 0:
                raise NetError(f"arc {k} has negative net token count")
    initial = {p: sum(vec) for p, vec in net.initial.items()}
    return PTNet(net.places, net.transitions, w_in, w_out, initial)


@dataclass
class NetMorphism:
    """Node map from a source net onto a target net."""

    place_map: dict[str, str]
    transition_map: dict[str, str]
    source: PTNet
    target: PTNet
    _index: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        tidx = self.target.place_index()
        self._index = tuple(tidx[self.place_map[p]] for p in self.source.places)

    def map_tuple(self, m: Marking) -> Marking:
        out = [0] * len(self.target.places)
        for i, n in zip(self._index, m):
            out[i] += n
        return tuple(out)


def induced_morphism(net: ColouredNet, unfolding: Unfolding | None = None) -> NetMorphism:
    """First-component projection from the unfolding to the skeleton."""
    u = unfolding or unfold(net)
    return NetMorphism(
        {n: p for n, (p, _) in u.places.items()},
        {n: t for n, (t, _) in u.transitions.items()},
        u.net,
        skeleton(net),
    )


def map_marking(morphism: NetMorphism, m: Union[Mapping[str, int], Sequence[int]]) -> dict[str, int]:
    """Sum source-place counts per target place."""
    if not isinstance(m, Mapping):
        m = dict(zip(morphism.source.places, m))
    out = {p: 0 for p in morphism.target.places}
    for p, n in m.items():
        if p not in morphism.place_map:
            raise KeyError(f"unknown place {p}")
        out[morphism.place_map[p]] += n
    return out


# --- convenience constructors ----------------------------------------------------


def make_pt(places, transitions, arcs_in=(), arcs_out=(), initial=None) -> PTNet:
    """Build a P/T net from (place, transition, weight) triples."""
    w_in: dict = {}
    w_out: dict = {}
    for p, t, w in arcs_in:
        w_in[(p, t)] = w_in.get((p, t), 0) + w
    for t, p, w in arcs_out:
        w_out[(p, t)] = w_out.get((p, t), 0) + w
    return PTNet(tuple(places), tuple(transitions), w_in, w_out, dict(initial or {}))


def make_coloured(
    places: Mapping[str, tuple[Domain, Mapping[str, int] | Sequence[int] | None]],
    transitions: Mapping[str, Mapping],
) -> ColouredNet:
    """Build a coloured net from compact dictionaries.

    ``places[p] = (domain, initial)`` with the initial marking given as
    a label -> count map or a count vector.  ``transitions[t]`` may hold
    ``in``/``out`` maps from places to inscriptions (lists of variable
    names / tuples, or ArcTerm tuples), a ``guard`` and extra ``vars``.
    """
    domains = {}
    initial = {}
    for p, (dom, m0) in places.items():
        domains[p] = dom
        if m0 is None:
            continue
        if isinstance(m0, Mapping):
            vec = [0] * dom.size
            for label, n in m0.items():
                vec[dom.index(label)] += n
            initial[p] = tuple(vec)
        else:
            initial[p] = tuple(m0)
    arcs_in: dict = {}
    arcs_out: dict = {}
    guards: dict = {}
    variables: dict = {}
    for t, spec in transitions.items():
        vdoms: dict[str, Domain] = dict(spec.get("vars", {}))
        for key, arcs in (("in", arcs_in), ("out", arcs_out)):
            for p, ins in spec.get(key, {}).items():
                ins = tuple(ins)
                if ins and not isinstance(ins[0], ArcTerm):
                    ins = simple_inscription(ins)
                arcs[(p, t)] = ins
                comps = domains[p].basic()
                for a in ins:
                    for c, cd in zip(a.components, comps):
                        name = _root_var(c)
                        if name is not None:
                            vdoms.setdefault(name, cd)
        guards[t] = spec.get("guard", TRUE)
        variables[t] = vdoms
    return ColouredNet(
        tuple(places), tuple(transitions), domains, arcs_in, arcs_out, guards, variables, initial
    )


def _root_var(c) -> str | None:
    from .terms import term_variable

    if isinstance(c, AllColours):
        return None
    return term_variable(c)


def enumerate_multisets(size: int, k: int) -> Iterator[tuple[int, ...]]:
    """Count vectors over ``size`` colours with ``k`` tokens in total."""
    for combo in itertools.combinations_with_replacement(range(size), k):
        vec = [0] * size
        for c in combo:
            vec[c] += 1
        yield tuple(vec)


__all__ = [
    "ALL",
    "AllColours",
    "ArcTerm",
    "BoolConst",
    "ColouredNet",
    "DEFAULT_UNFOLD_CAP",
    "NetError",
    "NetMorphism",
    "PTNet",
    "Unfolding",
    "UnfoldingTooLarge",
    "enumerate_multisets",
    "induced_morphism",
    "make_coloured",
    "make_pt",
    "map_marking",
    "simple_inscription",
    "skeleton",
    "unfold",
    "var_token",
]
