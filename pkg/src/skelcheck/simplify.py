"""Arc inscription simplification.

Every arc is rewritten so that it carries only distinct, otherwise unused
variables; whatever the original terms expressed moves into the guard.
"""

from __future__ import annotations

import itertools

from .nets import AllColours, ArcTerm, ColouredNet, NetError, Var
from .terms import Cmp, Const, Domain, MultisetMatch, conjoin, disjoin

# more positive terms than this are not expanded into bijections
MAX_PERMUTATION_TERMS = 6


def _expand(a: ArcTerm, comps: tuple[Domain, ...]):
    """Split an arc term into signed single tokens, expanding ``all``."""
    choices = []
    has_all = False
    for c, cd in zip(a.components, comps):
        if isinstance(c, AllColours):
            has_all = True
            choices.append([Const(cd.value(i), cd) for i in range(cd.size)])
        else:
            choices.append([c])
    sign = 1 if a.coef > 0 else -1
    tokens = [tuple(combo) for combo in itertools.product(*choices)]
    return [(sign, tok) for tok in tokens for _ in range(abs(a.coef))], has_all


def simplify_inscriptions(net: ColouredNet) -> ColouredNet:
    """Return an equivalent net whose arcs carry only fresh variables."""
    arcs_in: dict = {}
    arcs_out: dict = {}
    guards: dict = {}
    variables: dict = {}
    nonfull = set(net.assumed_nonfull)
    for t in net.transitions:
        vdoms = dict(net.variables[t])
        taken = set(vdoms)
        used: set[str] = set()
        extra = []
        counter = itertools.count(1)

        def fresh(dom: Domain) -> str:
            while True:
                name = f"_{t}_{next(counter)}"
                if name not in taken:
                    taken.add(name)
                    vdoms[name] = dom
                    return name

        for direction, src, dst in (("in", net.arcs_in, arcs_in), ("out", net.arcs_out, arcs_out)):
            for p in net.places:
                ins = src.get((p, t))
                if not ins:
                    continue
                comps = net.domains[p].basic()
                pos, neg = [], []
                for a in ins:
                    toks, has_all = _expand(a, comps)
                    if has_all:
                        nonfull.add(t)
                    for sign, tok in toks:
                        (pos if sign > 0 else neg).append(tok)
                if len(neg) > len(pos):
                    raise NetError(f"arc ({p}, {t}) has a negative token count")
                new_tokens = []
                if not neg:
                    for tok in pos:
                        names = []
                        for c, cd in zip(tok, comps):
                            if isinstance(c, Var) and c.name not in used and vdoms.get(c.name, cd) == cd:
                                vdoms[c.name] = cd
                                names.append(c.name)
                            else:
                                z = fresh(cd)
                                extra.append(Cmp("==", Var(z), c))
                                names.append(z)
                            used.add(names[-1])
                        new_tokens.append(ArcTerm(1, tuple(Var(n) for n in names)))
                else:
                    fresh_toks = []
                    for _ in range(len(pos) - len(neg)):
                        names = [fresh(cd) for cd in comps]
                        used.update(names)
                        fresh_toks.append(tuple(Var(n) for n in names))
                        new_tokens.append(ArcTerm(1, fresh_toks[-1]))
                    lhs = fresh_toks + neg
                    if len(pos) > MAX_PERMUTATION_TERMS:
                        nonfull.add(t)
                        extra.append(MultisetMatch(tuple(fresh_toks), tuple(pos), tuple(neg)))
                    else:
                        options = []
                        for perm in itertools.permutations(range(len(pos))):
                            options.append(conjoin(*(
                                Cmp("==", a, b)
                                for i, tok in enumerate(lhs)
                                for a, b in zip(tok, pos[perm[i]])
                            )))
                        extra.append(disjoin(*options))
                if new_tokens:
                    dst[(p, t)] = tuple(new_tokens)
        guards[t] = conjoin(net.guards[t], *extra)
        variables[t] = vdoms
    return ColouredNet(
        net.places,
        net.transitions,
        dict(net.domains),
        arcs_in,
        arcs_out,
        guards,
        variables,
        dict(net.initial),
        frozenset(nonfull),
    )
