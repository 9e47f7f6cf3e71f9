"""PNML input for P/T nets and a subset of the symmetric-net dialect.

Supported sorts: ``dot``, ``cyclicenumeration``/``finiteenumeration``,
``finiteintrange`` and ``productsort`` of those.  Terms: variables,
enumeration and range constants, ``dotconstant``, ``successor``,
``predecessor``, ``tuple``, ``numberof``, ``add``, ``subtract`` and ``all``.
Guards: the six comparisons, ``and``, ``or``, ``not`` and boolean
constants.  Anything else raises PnmlError naming the element path.
Nodes are identified by their ``id`` attribute.
"""

from __future__ import annotations

import itertools
import xml.etree.ElementTree as ET

from .nets import ALL, ArcTerm, ColouredNet, NetError, PTNet
from .terms import (
    TRUE,
    BoolConst,
    Cmp,
    Const,
    Domain,
    Pred,
    Succ,
    Var,
    conjoin,
    disjoin,
    guard_variables,
    negate,
    term_value,
    term_variable,
)


class PnmlError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


_CMP = {
    "equality": "==",
    "inequality": "!=",
    "lessthan": "<",
    "lessthanorequal": "<=",
    "greaterthan": ">",
    "greaterthanorequal": ">=",
}


def _tag(e: ET.Element) -> str:
    return e.tag.rsplit("}", 1)[-1]


def _kids(e: ET.Element, name: str | None = None) -> list[ET.Element]:
    return [c for c in e if name is None or _tag(c) == name]


def _child(e: ET.Element, name: str, path: str, required: bool = True):
    for c in e:
        if _tag(c) == name:
            return c
    if required:
        raise PnmlError(path, f"missing <{name}>")
    return None


def _step(path: str, e: ET.Element) -> str:
    ident = e.get("id")
    return f"{path}/{_tag(e)}" + (f"[{ident}]" if ident else "")


def _subterms(e: ET.Element, path: str) -> list[tuple[ET.Element, str]]:
    """The single element inside each <subterm> child."""
    out = []
    for i, s in enumerate(_kids(e, "subterm")):
        inner = list(s)
        sp = f"{path}/subterm[{i}]"
        if len(inner) != 1:
            raise PnmlError(sp, "expected exactly one term")
        out.append((inner[0], _step(sp, inner[0])))
    return out


def _text(e: ET.Element | None) -> str | None:
    if e is None:
        return None
    t = _child(e, "text", "", required=False)
    return None if t is None or t.text is None else t.text.strip()


class _Reader:
    def __init__(self, root: ET.Element):
        self.root = root
        self.sorts: dict[str, Domain] = {}
        self.constants: dict[str, tuple[Domain, int]] = {}
        self.variables: dict[str, Domain] = {}

    # sorts ----------------------------------------------------------------

    def sort(self, e: ET.Element, path: str, name: str) -> Domain:
        tag = _tag(e)
        if tag == "dot":
            return Domain.dot()
        if tag == "usersort":
            ref = e.get("declaration")
            if ref not in self.sorts:
                raise PnmlError(path, f"unknown sort {ref!r}")
            return self.sorts[ref]
        if tag in ("cyclicenumeration", "finiteenumeration"):
            consts = _kids(e, "feconstant")
            if not consts:
                raise PnmlError(path, "empty enumeration")
            dom = Domain.enum(name, [c.get("name") or c.get("id") for c in consts])
            for i, c in enumerate(consts):
                self.constants[c.get("id")] = (dom, i)
            return dom
        if tag == "finiteintrange":
            try:
                lo, hi = int(e.get("start")), int(e.get("end"))
            except (TypeError, ValueError):
                raise PnmlError(path, "finiteintrange needs integer start and end") from None
            if hi < lo:
                raise PnmlError(path, "empty range")
            return Domain.range(name, lo, hi)
        if tag == "productsort":
            comps = [self.sort(c, _step(path, c), name) for c in e]
            if any(c.is_product for c in comps):
                raise PnmlError(path, "nested product sorts are not supported")
            return Domain.product(name, comps)
        raise PnmlError(path, f"unsupported sort <{tag}>")

    def declarations(self, net: ET.Element, path: str) -> None:
        for decls in net.iter():
            if _tag(decls) != "declarations":
                continue
            dpath = f"{path}/declarations"
            for d in decls:
                p = _step(dpath, d)
                tag = _tag(d)
                if tag == "namedsort":
                    inner = list(d)
                    if len(inner) != 1:
                        raise PnmlError(p, "expected one sort")
                    self.sorts[d.get("id")] = self.sort(inner[0], _step(p, inner[0]), d.get("name") or d.get("id"))
                elif tag == "variabledecl":
                    inner = list(d)
                    if len(inner) != 1:
                        raise PnmlError(p, "expected one sort")
                    self.variables[d.get("id")] = self.sort(inner[0], _step(p, inner[0]), d.get("id"))
                else:
                    raise PnmlError(p, f"unsupported declaration <{tag}>")

    # terms ---------------------------------------------------------------

    def term(self, e: ET.Element, path: str, expected: Domain | None = None):
        tag = _tag(e)
        if tag == "variable":
            ref = e.get("refvariable")
            if ref not in self.variables:
                raise PnmlError(path, f"unknown variable {ref!r}")
            return Var(ref)
        if tag == "useroperator":
            ref = e.get("declaration")
            if ref not in self.constants:
                raise PnmlError(path, f"unknown constant {ref!r}")
            dom, i = self.constants[ref]
            return Const(dom.value(i), dom)
        if tag == "dotconstant":
            return Const(0, Domain.dot())
        if tag == "finiteintrangeconstant":
            try:
                value = int(e.get("value"))
            except (TypeError, ValueError):
                raise PnmlError(path, "finiteintrangeconstant needs an integer value") from None
            dom = expected
            if dom is None:
                rng = _child(e, "finiteintrange", path, required=False)
                if rng is not None:
                    dom = next((s for s in self.sorts.values()
                                if not s.is_product and s.labels and s.lo == int(rng.get("start"))
                                and s.hi == int(rng.get("end")) and s.labels[0] == str(s.lo)), None)
            if dom is not None and not dom.lo <= value <= dom.hi:
                raise PnmlError(path, f"constant {value} outside {dom.name}")
            return Const(value, dom)
        if tag in ("successor", "predecessor"):
            subs = _subterms(e, path)
            if len(subs) != 1:
                raise PnmlError(path, f"<{tag}> takes one subterm")
            inner = self.term(*subs[0], expected)
            return Succ(inner) if tag == "successor" else Pred(inner)
        raise PnmlError(path, f"unsupported term <{tag}>")

    def multiset(self, e: ET.Element, path: str, dom: Domain, sign: int = 1) -> list[ArcTerm]:
        tag = _tag(e)
        if tag == "add":
            out = []
            for s, sp in _subterms(e, path):
                out += self.multiset(s, sp, dom, sign)
            return out
        if tag == "subtract":
            subs = _subterms(e, path)
            if len(subs) != 2:
                raise PnmlError(path, "<subtract> takes two subterms")
            return self.multiset(*subs[0], dom, sign) + self.multiset(*subs[1], dom, -sign)
        if tag == "numberof":
            subs = _subterms(e, path)
            if len(subs) != 2 or _tag(subs[0][0]) != "numberconstant":
                raise PnmlError(path, "<numberof> needs a numberconstant and a term")
            k = int(subs[0][0].get("value"))
            return [ArcTerm(a.coef * k, a.components) for a in self.multiset(*subs[1], dom, sign)]
        if tag == "all":
            return [ArcTerm(sign, (ALL,) * dom.arity)]
        if tag == "tuple":
            subs = _subterms(e, path)
            if len(subs) != dom.arity or not dom.is_product:
                raise PnmlError(path, f"tuple does not match the sort {dom.name}")
            comps = []
            for (s, sp), cd in zip(subs, dom.basic()):
                comps.append(ALL if _tag(s) == "all" else self.term(s, sp, cd))
            return [ArcTerm(sign, tuple(comps))]
        if dom.is_product:
            raise PnmlError(path, f"expected a tuple for the product sort {dom.name}")
        return [ArcTerm(sign, (self.term(e, path, dom),))]

    def guard(self, e: ET.Element, path: str):
        tag = _tag(e)
        if tag in ("and", "or"):
            parts = [self.guard(s, sp) for s, sp in _subterms(e, path)]
            return conjoin(*parts) if tag == "and" else disjoin(*parts)
        if tag == "not":
            subs = _subterms(e, path)
            if len(subs) != 1:
                raise PnmlError(path, "<not> takes one subterm")
            return negate(self.guard(*subs[0]))
        if tag == "booleanconstant":
            return BoolConst(e.get("value") == "true")
        if tag in _CMP:
            subs = _subterms(e, path)
            if len(subs) != 2:
                raise PnmlError(path, f"<{tag}> takes two subterms")
            left = self.term(*subs[0])
            dom = self._var_domain(left)
            right = self.term(*subs[1], dom)
            if dom is None and self._var_domain(right) is not None:
                left = self.term(*subs[0], self._var_domain(right))
            return Cmp(_CMP[tag], left, right)
        raise PnmlError(path, f"unsupported guard <{tag}>")

    def _var_domain(self, t):
        v = term_variable(t)
        return self.variables[v] if v is not None else None


def _structure(e: ET.Element | None, path: str) -> tuple[ET.Element, str] | None:
    if e is None:
        return None
    s = _child(e, "structure", path, required=False)
    if s is None:
        return None
    inner = list(s)
    if len(inner) != 1:
        raise PnmlError(f"{path}/structure", "expected exactly one element")
    return inner[0], _step(f"{path}/structure", inner[0])


def parse_pnml(data: bytes | str) -> PTNet | ColouredNet:
    """Parse a PNML document holding exactly one net."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as e:
        raise PnmlError("pnml", f"malformed XML: {e}") from None
    if _tag(root) != "pnml":
        raise PnmlError(_tag(root), "root element must be <pnml>")
    nets = _kids(root, "net")
    if len(nets) != 1:
        raise PnmlError("pnml", f"expected one <net>, found {len(nets)}")
    net = nets[0]
    path = _step("pnml", net)
    nodes: dict[str, list] = {"place": [], "transition": [], "arc": []}

    def walk(e, p):
        for c in e:
            tag = _tag(c)
            cp = _step(p, c)
            if tag == "page":
                walk(c, cp)
            elif tag in nodes:
                nodes[tag].append((c, cp))
            elif tag in ("referencePlace", "referenceTransition"):
                raise PnmlError(cp, f"unsupported construct <{tag}>")

    walk(net, path)
    coloured = "symmetricnet" in (net.get("type") or "") or any(
        _child(p, "type", pp, required=False) is not None for p, pp in nodes["place"]
    )
    if coloured:
        return _coloured(net, path, nodes)
    return _pt(nodes)


def _int_text(e: ET.Element | None, path: str, default: int) -> int:
    txt = _text(e)
    if txt is None:
        return default
    try:
        return int(txt)
    except ValueError:
        raise PnmlError(path, f"expected an integer, got {txt!r}") from None


def _pt(nodes) -> PTNet:
    places, transitions, initial = [], [], {}
    for e, p in nodes["place"]:
        places.append(e.get("id"))
        n = _int_text(_child(e, "initialMarking", p, required=False), f"{p}/initialMarking", 0)
        if n:
            initial[e.get("id")] = n
    transitions = [e.get("id") for e, _ in nodes["transition"]]
    pset, tset = set(places), set(transitions)
    w_in: dict = {}
    w_out: dict = {}
    for e, p in nodes["arc"]:
        src, tgt = e.get("source"), e.get("target")
        w = _int_text(_child(e, "inscription", p, required=False), f"{p}/inscription", 1)
        if src in pset and tgt in tset:
            w_in[(src, tgt)] = w_in.get((src, tgt), 0) + w
        elif src in tset and tgt in pset:
            w_out[(tgt, src)] = w_out.get((tgt, src), 0) + w
        else:
            raise PnmlError(p, f"arc {src} -> {tgt} must join a place and a transition")
    try:
        return PTNet(tuple(places), tuple(transitions), w_in, w_out, initial)
    except NetError as e:
        raise PnmlError("pnml/net", str(e)) from None


def _coloured(net: ET.Element, path: str, nodes) -> ColouredNet:
    r = _Reader(net)
    r.declarations(net, path)
    places, domains, initial = [], {}, {}
    for e, p in nodes["place"]:
        name = e.get("id")
        ty = _structure(_child(e, "type", p, required=False), f"{p}/type")
        dom = Domain.dot() if ty is None else r.sort(*ty, name)
        places.append(name)
        domains[name] = dom
        m = _structure(_child(e, "hlinitialMarking", p, required=False), f"{p}/hlinitialMarking")
        if m is not None:
            vec = [0] * dom.size
            for a in r.multiset(*m, dom):
                for c, n in _ground(a, dom, f"{p}/hlinitialMarking").items():
                    vec[c] += n
            if min(vec) < 0:
                raise PnmlError(f"{p}/hlinitialMarking", "negative token count")
            initial[name] = tuple(vec)
    transitions, guards, variables = [], {}, {}
    for e, p in nodes["transition"]:
        t = e.get("id")
        transitions.append(t)
        g = _structure(_child(e, "condition", p, required=False), f"{p}/condition")
        guards[t] = TRUE if g is None else r.guard(*g)
        variables[t] = {}
    pset, tset = set(places), set(transitions)
    arcs_in: dict = {}
    arcs_out: dict = {}
    for e, p in nodes["arc"]:
        src, tgt = e.get("source"), e.get("target")
        if src in pset and tgt in tset:
            place, t, arcs = src, tgt, arcs_in
        elif src in tset and tgt in pset:
            place, t, arcs = tgt, src, arcs_out
        else:
            raise PnmlError(p, f"arc {src} -> {tgt} must join a place and a transition")
        ins = _structure(_child(e, "hlinscription", p, required=False), f"{p}/hlinscription")
        dom = domains[place]
        terms = [ArcTerm(1, (Const(0, dom),))] if ins is None and dom == Domain.dot() else None
        if terms is None:
            if ins is None:
                raise PnmlError(p, "coloured arc without <hlinscription>")
            terms = r.multiset(*ins, dom)
        arcs[(place, t)] = tuple(arcs.get((place, t), ())) + tuple(terms)
        for a in terms:
            for c, cd in zip(a.components, dom.basic()):
                v = None if c is ALL else term_variable(c)
                if v is not None:
                    if r.variables[v] != cd:
                        raise PnmlError(p, f"variable {v} has sort {r.variables[v].name}, arc needs {cd.name}")
                    variables[t].setdefault(v, cd)
    for t in transitions:
        for v in sorted(guard_variables(guards[t])):
            variables[t].setdefault(v, r.variables[v])
    try:
        return ColouredNet(tuple(places), tuple(transitions), domains, arcs_in, arcs_out, guards, variables, initial)
    except NetError as e:
        raise PnmlError(path, str(e)) from None


def _ground(a: ArcTerm, dom: Domain, path: str) -> dict[int, int]:
    """Colour counts of a variable-free arc term."""
    choices = []
    for c, cd in zip(a.components, dom.basic()):
        if c is ALL:
            choices.append(range(cd.size))
        elif term_variable(c) is None:
            choices.append([cd.index_of_value(term_value(c, {}, {}))])
        else:
            raise PnmlError(path, "initial markings must not contain variables")
    out: dict[int, int] = {}
    for parts in itertools.product(*choices):
        idx = dom.compose(parts)
        out[idx] = out.get(idx, 0) + a.coef
    return out
