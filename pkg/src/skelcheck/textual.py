"""A plain line-oriented net format and its printer.

Grammar (``#`` starts a comment, blank lines are ignored)::

    net pt | net coloured                  optional; coloured if any domain is used
    domain NAME = {a, b, c}                enumeration
    domain NAME = LO..HI                   integer range
    domain NAME = <D1, D2>                 product of declared domains
    place NAME [= N]                       P/T place with initial tokens
    place NAME : DOMAIN [= MARKING]        coloured place; MARKING is 2'r + 1'g,
                                           1'<1,r> for products, or 0 (empty)
    transition NAME
      in PLACE : INSCRIPTION               P/T: an integer weight
      out PLACE : INSCRIPTION              coloured: comma separated tokens
      var NAME : DOMAIN                    guard-only variable
      guard EXPR                           comparisons with && || ! and parentheses
      guard modes (x=0, y=2) | (x=1, y=0)  explicit firing modes (colour indices)
      nonfull                              treat the transition's class as not full

A token is ``[K*]BODY`` or ``-BODY`` where BODY is a term, ``all`` or
``<c1, c2>``.  Terms are variables, colour labels or integers followed by
any number of ``++`` / ``--``.  On arcs an identifier that is a colour of
the component domain is a constant; in guards an identifier is a variable
when the transition has one of that name.  Names that are not plain
identifiers are written in double quotes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .nets import ALL, AllColours, ArcTerm, ColouredNet, NetError, PTNet
from .terms import (
    TRUE,
    And,
    BoolConst,
    Cmp,
    Const,
    Domain,
    FiringMode,
    Modes,
    MultisetMatch,
    Or,
    Pred,
    Succ,
    Var,
    conjoin,
    disjoin,
    negate,
    term_variable,
)


class TextualSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#.*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][\w.]*)
  | (?P<op>\+\+|--|==|!=|<=|>=|&&|\|\||\.\.|[<>(){},:=*+'!|\-])
    """,
    re.VERBOSE,
)

_IDENT = re.compile(r"[A-Za-z_][\w.]*\Z")
_KEYWORDS = {"net", "domain", "place", "transition", "in", "out", "var", "guard",
             "nonfull", "all", "modes", "true", "false", "pt", "coloured"}


@dataclass
class _Tok:
    kind: str
    text: str
    col: int

    @property
    def value(self):
        return json.loads(self.text) if self.kind == "str" else self.text


def _lex(line: str, lineno: int) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise TextualSyntaxError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            out.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return out


class _Line:
    """Cursor over the tokens of one line."""

    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        col = tok.col if tok else self.width + 1
        raise TextualSyntaxError(msg, self.lineno, col)

    def peek(self, k: int = 0) -> _Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.kind in ("op", "ident") and t.text == text

    def take(self) -> _Tok:
        t = self.peek()
        if t is None:
            self.error("unexpected end of line")
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.take()

    def name(self, what: str = "name") -> str:
        t = self.peek()
        if t is None or t.kind not in ("ident", "str", "num"):
            self.error(f"expected {what}")
        self.i += 1
        return t.value

    def integer(self) -> int:
        sign = -1 if self.at("-") else 1
        if sign < 0:
            self.take()
        t = self.peek()
        if t is None or t.kind != "num":
            self.error("expected an integer")
        self.i += 1
        return sign * int(t.text)

    def end(self):
        if self.peek() is not None:
            self.error(f"unexpected {self.peek().text!r}")


@dataclass
class _Transition:
    name: str
    lineno: int
    arcs: list  # (direction, place, _Line)
    guards: list  # _Line
    vars: list  # (name, domain name, _Line, token)
    nonfull: bool = False


def parse_textual(text: str) -> PTNet | ColouredNet:
    """Parse the textual format into a P/T or coloured net."""
    kind = None
    domains: dict[str, Domain] = {}
    places: list[str] = []
    place_dom: dict[str, Domain | None] = {}
    initial: dict = {}
    transitions: list[_Transition] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        ln = _Line(_lex(raw, lineno), lineno, len(raw))
        head = ln.peek()
        if head is None:
            continue
        word = head.text if head.kind == "ident" else None
        if word == "net":
            ln.take()
            t = ln.take()
            if t.text not in ("pt", "coloured"):
                ln.error("expected 'pt' or 'coloured'", t)
            kind = t.text
            ln.end()
        elif word == "domain":
            ln.take()
            tok = ln.peek()
            name = ln.name("domain name")
            if name in domains:
                ln.error(f"domain {name} declared twice", tok)
            ln.expect("=")
            domains[name] = _parse_domain(ln, name, domains)
            ln.end()
        elif word == "place":
            ln.take()
            tok = ln.peek()
            p = ln.name("place name")
            if p in place_dom:
                ln.error(f"place {p} declared twice", tok)
            dom = None
            if ln.at(":"):
                ln.take()
                dtok = ln.peek()
                dname = ln.name("domain name")
                if dname not in domains:
                    ln.error(f"unknown domain {dname}", dtok)
                dom = domains[dname]
            places.append(p)
            place_dom[p] = dom
            if ln.at("="):
                ln.take()
                initial[p] = ln.integer() if dom is None else _parse_marking(ln, dom)
            ln.end()
        elif word == "transition":
            ln.take()
            tr = _Transition(ln.name("transition name"), lineno, [], [], [])
            ln.end()
            transitions.append(tr)
        elif word in ("in", "out", "guard", "var", "nonfull"):
            if not transitions:
                ln.error(f"{word!r} outside a transition")
            tr = transitions[-1]
            ln.take()
            if word in ("in", "out"):
                ptok = ln.peek()
                p = ln.name("place name")
                if p not in place_dom:
                    ln.error(f"unknown place {p}", ptok)
                ln.expect(":")
                tr.arcs.append((word, p, ln, ptok))
            elif word == "guard":
                tr.guards.append(ln)
            elif word == "var":
                vtok = ln.peek()
                v = ln.name("variable name")
                ln.expect(":")
                dtok = ln.peek()
                d = ln.name("domain name")
                if d not in domains:
                    ln.error(f"unknown domain {d}", dtok)
                ln.end()
                tr.vars.append((v, domains[d], ln, vtok))
            else:
                ln.end()
                tr.nonfull = True
        else:
            ln.error("expected a declaration")
    coloured = kind == "coloured" or (kind is None and any(d is not None for d in place_dom.values()))
    names = set(places)
    for tr in transitions:
        if tr.name in names:
            raise TextualSyntaxError(f"name {tr.name} used twice", tr.lineno, 1)
        names.add(tr.name)
    if not coloured:
        return _build_pt(places, place_dom, initial, transitions)
    return _build_coloured(places, place_dom, initial, transitions)


def _parse_domain(ln: _Line, name: str, domains: dict) -> Domain:
    if ln.at("{"):
        ln.take()
        labels = []
        while not ln.at("}"):
            labels.append(ln.name("colour"))
            if not ln.at("}"):
                ln.expect(",")
        ln.take()
        if not labels or len(set(labels)) != len(labels):
            ln.error("an enumeration needs distinct colours")
        return Domain.enum(name, labels)
    if ln.at("<"):
        ln.take()
        comps = []
        while True:
            tok = ln.peek()
            d = ln.name("domain name")
            if d not in domains:
                ln.error(f"unknown domain {d}", tok)
            if domains[d].is_product:
                ln.error("products of products are not supported", tok)
            comps.append(domains[d])
            if ln.at(">"):
                ln.take()
                break
            ln.expect(",")
        return Domain.product(name, comps)
    tok = ln.peek()
    lo = ln.integer()
    ln.expect("..")
    hi = ln.integer()
    if hi < lo:
        ln.error("empty range", tok)
    return Domain.range(name, lo, hi)


def _colour_label(ln: _Line, dom: Domain) -> int:
    tok = ln.peek()
    if dom.is_product:
        ln.expect("<")
        parts = []
        for i, comp in enumerate(dom.components):
            if i:
                ln.expect(",")
            parts.append(_colour_label(ln, comp))
        ln.expect(">")
        return dom.compose(parts)
    if ln.at("-"):
        label = str(ln.integer())
    else:
        label = ln.name("colour")
    if label not in dom.labels:
        ln.error(f"colour {label} not in domain {dom.name}", tok)
    return dom.labels.index(label)


def _parse_marking(ln: _Line, dom: Domain) -> tuple[int, ...]:
    vec = [0] * dom.size
    if ln.peek() is not None and ln.peek().text == "0" and ln.peek(1) is None:
        ln.take()
        return tuple(vec)
    while True:
        n = ln.integer()
        ln.expect("'")
        vec[_colour_label(ln, dom)] += n
        if not ln.at("+"):
            break
        ln.take()
    return tuple(vec)


def _build_pt(places, place_dom, initial, transitions) -> PTNet:
    w_in: dict = {}
    w_out: dict = {}
    for tr in transitions:
        if tr.guards or tr.vars or tr.nonfull:
            ln = (tr.guards + [v[2] for v in tr.vars])[0] if (tr.guards or tr.vars) else None
            raise TextualSyntaxError("guards and variables need a coloured net", ln.lineno if ln else tr.lineno, 1)
        for direction, p, ln, _ in tr.arcs:
            w = ln.integer()
            ln.end()
            arcs = w_in if direction == "in" else w_out
            if (p, tr.name) in arcs:
                ln.error(f"second {direction} arc between {p} and {tr.name}", ln.toks[0])
            arcs[(p, tr.name)] = w
    try:
        return PTNet(tuple(places), tuple(t.name for t in transitions), w_in, w_out, dict(initial))
    except NetError as e:
        raise TextualSyntaxError(str(e), 1, 1) from None


def _build_coloured(places, place_dom, initial, transitions) -> ColouredNet:
    for p in places:
        if place_dom[p] is None:
            raise TextualSyntaxError(f"place {p} needs a domain in a coloured net", 1, 1)
    arcs_in: dict = {}
    arcs_out: dict = {}
    guards: dict = {}
    variables: dict = {}
    nonfull = set()
    for tr in transitions:
        vdoms: dict[str, Domain] = {}
        for v, d, ln, tok in tr.vars:
            if v in vdoms:
                ln.error(f"variable {v} declared twice", tok)
            vdoms[v] = d
        for direction, p, ln, ptok in tr.arcs:
            ins = _parse_inscription(ln, place_dom[p])
            arcs = arcs_in if direction == "in" else arcs_out
            if (p, tr.name) in arcs:
                ln.error(f"second {direction} arc between {p} and {tr.name}", ptok)
            arcs[(p, tr.name)] = ins
            for a in ins:
                for c, cd in zip(a.components, place_dom[p].basic()):
                    v = None if isinstance(c, AllColours) else term_variable(c)
                    if v is not None:
                        vdoms.setdefault(v, cd)
        parts = []
        for ln in tr.guards:
            parts.append(_GuardParser(ln, vdoms).parse())
        guards[tr.name] = conjoin(*parts) if parts else TRUE
        variables[tr.name] = vdoms
        if tr.nonfull:
            nonfull.add(tr.name)
    try:
        return ColouredNet(
            tuple(places), tuple(t.name for t in transitions), dict(place_dom),
            arcs_in, arcs_out, guards, variables, dict(initial), frozenset(nonfull),
        )
    except NetError as e:
        raise TextualSyntaxError(str(e), 1, 1) from None


def _parse_inscription(ln: _Line, dom: Domain) -> tuple[ArcTerm, ...]:
    out = []
    while True:
        coef = 1
        if ln.at("-"):
            ln.take()
            coef = -1
        elif ln.peek() is not None and ln.peek().kind == "num" and ln.peek(1) is not None and ln.peek(1).text == "*":
            coef = int(ln.take().text)
            ln.take()
        comps = dom.basic()
        if dom.is_product:
            ln.expect("<")
            body = []
            for i, cd in enumerate(comps):
                if i:
                    ln.expect(",")
                body.append(_arc_component(ln, cd))
            ln.expect(">")
        else:
            body = [_arc_component(ln, dom)]
        out.append(ArcTerm(coef, tuple(body)))
        if ln.peek() is None:
            return tuple(out)
        ln.expect(",")


def _arc_component(ln: _Line, dom: Domain):
    if ln.at("all"):
        ln.take()
        return ALL
    tok = ln.peek()
    if tok is None:
        ln.error("expected a term")
    if tok.kind == "num" or (tok.text == "-" and ln.peek(1) is not None and ln.peek(1).kind == "num"):
        base = Const(ln.integer(), dom)
    else:
        name = ln.name("term")
        base = Const(dom.value(dom.labels.index(name)), dom) if name in dom.labels else Var(name)
    return _postfix(ln, base)


def _postfix(ln: _Line, base):
    while ln.at("++") or ln.at("--"):
        base = Succ(base) if ln.take().text == "++" else Pred(base)
    return base


class _GuardParser:
    def __init__(self, ln: _Line, vdoms: dict[str, Domain]):
        self.ln = ln
        self.vdoms = vdoms

    def parse(self):
        ln = self.ln
        if ln.at("modes"):
            ln.take()
            g = self.modes()
        else:
            g = self.disj()
        ln.end()
        return g

    def modes(self):
        ln = self.ln
        modes = []
        while ln.at("("):
            ln.take()
            asg = []
            while not ln.at(")"):
                tok = ln.peek()
                v = ln.name("variable")
                if v not in self.vdoms:
                    ln.error(f"unknown variable {v}", tok)
                ln.expect("=")
                ctok = ln.peek()
                c = ln.integer()
                if not 0 <= c < self.vdoms[v].size:
                    ln.error(f"colour index {c} outside domain {self.vdoms[v].name}", ctok)
                asg.append((v, c))
                if not ln.at(")"):
                    ln.expect(",")
            ln.take()
            modes.append(FiringMode(tuple(asg)))
            if not ln.at("|"):
                break
            ln.take()
        return Modes(tuple(modes))

    def disj(self):
        parts = [self.conj()]
        while self.ln.at("||"):
            self.ln.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self):
        parts = [self.unary()]
        while self.ln.at("&&"):
            self.ln.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        ln = self.ln
        if ln.at("!"):
            tok = ln.take()
            g = self.unary()
            try:
                return negate(g)
            except TypeError:
                ln.error("cannot negate this guard", tok)
        if ln.at("("):
            ln.take()
            g = self.disj()
            ln.expect(")")
            return g
        if ln.at("true") or ln.at("false"):
            return BoolConst(ln.take().text == "true")
        left = self.term()
        tok = ln.peek()
        if tok is None or tok.text not in ("==", "!=", "<", "<=", ">", ">="):
            ln.error("expected a comparison operator")
        ln.take()
        right = self.term()
        return Cmp(tok.text, self._resolve(left, right), self._resolve(right, left))

    def term(self):
        ln = self.ln
        tok = ln.peek()
        if tok is None:
            ln.error("expected a term")
        if tok.kind == "num" or tok.text == "-":
            base = ("int", ln.integer(), tok)
        else:
            name = ln.name("term")
            base = Var(name) if name in self.vdoms else ("label", name, tok)
        return _postfix(ln, base) if isinstance(base, Var) else (base, self._suffixes())

    def _suffixes(self):
        out = []
        while self.ln.at("++") or self.ln.at("--"):
            out.append(self.ln.take().text)
        return out

    def _resolve(self, t, other):
        """Turn a pending constant into a Const of the other side's domain."""
        if not isinstance(t, tuple):
            return t
        (kind, val, tok), sufs = t
        dom = None
        if not isinstance(other, tuple):
            v = term_variable(other)
            dom = self.vdoms[v] if v is not None else None
        if kind == "label":
            if dom is None or val not in dom.labels:
                self.ln.error(f"unknown variable or colour {val}", tok)
            val = dom.value(dom.labels.index(val))
        out = Const(val, dom)
        for s in sufs:
            out = Succ(out) if s == "++" else Pred(out)
        return out


# --- printer --------------------------------------------------------------------------


def _q(name: str) -> str:
    return name if _IDENT.match(name) and name not in _KEYWORDS else json.dumps(name)


def _label(dom: Domain, c: int) -> str:
    if dom.is_product:
        return "<" + ", ".join(_label(d, i) for d, i in zip(dom.components, dom.decompose(c))) + ">"
    lab = dom.labels[c]
    return lab if re.fullmatch(r"-?\d+", lab) else _q(lab)


def _term(t) -> str:
    if isinstance(t, AllColours):
        return "all"
    if isinstance(t, Var):
        return _q(t.name)
    if isinstance(t, Const):
        d = t.domain
        if d is not None and not d.is_product and 0 <= d.index_of_value(t.value) < d.size:
            lab = d.labels[d.index_of_value(t.value)]
            return lab if lab.isdigit() else _q(lab)
        return str(t.value) if t.value >= 0 else json.dumps(str(t.value))
    if isinstance(t, Succ):
        return _term(t.term) + "++"
    if isinstance(t, Pred):
        return _term(t.term) + "--"
    raise NetError(f"cannot print term {t!r}")


def _arc(a: ArcTerm, dom: Domain) -> str:
    body = _term(a.components[0]) if not dom.is_product else "<" + ", ".join(map(_term, a.components)) + ">"
    if a.coef == 1:
        return body
    if a.coef == -1:
        return "-" + body
    return f"{a.coef}*{body}"


def _guard(g, top: bool = True) -> str:
    if isinstance(g, BoolConst):
        return "true" if g.value else "false"
    if isinstance(g, Cmp):
        return f"{_term(g.left)} {g.op} {_term(g.right)}"
    if isinstance(g, (And, Or)):
        if not g.parts:
            return "true" if isinstance(g, And) else "false"
        sep = " && " if isinstance(g, And) else " || "
        s = sep.join(_guard(p, False) for p in g.parts)
        return s if top or len(g.parts) == 1 else f"({s})"
    if isinstance(g, Modes):
        return "modes " + " | ".join(
            "(" + ", ".join(f"{_q(v)}={c}" for v, c in m.assignment) + ")" for m in g.modes
        )
    if isinstance(g, MultisetMatch):
        raise NetError("multiset-match guards have no textual form")
    raise NetError(f"cannot print guard {g!r}")


def _check_constants(net: ColouredNet, t: str) -> None:
    for arcs in (net.arcs_in, net.arcs_out):
        for (p, u), ins in arcs.items():
            if u != t:
                continue
            for a in ins:
                for c, cd in zip(a.components, net.domains[p].basic()):
                    v = None if isinstance(c, AllColours) else term_variable(c)
                    if v is not None and v in cd.labels:
                        raise NetError(f"variable {v} of {t} clashes with a colour of {cd.name}")
                    if isinstance(c, Const) and c.domain != cd:
                        raise NetError(f"constant on arc ({p}, {t}) has a foreign domain")


def print_textual(net: PTNet | ColouredNet) -> str:
    """Render ``net`` so that parse_textual gives back an equal net."""
    if isinstance(net, PTNet):
        lines = ["net pt"]
        for p in net.places:
            n = net.initial.get(p, 0)
            lines.append(f"place {_q(p)}" + (f" = {n}" if n else ""))
        for t in net.transitions:
            lines.append(f"transition {_q(t)}")
            for p in net.places:
                if (p, t) in net.weight_in:
                    lines.append(f"  in {_q(p)} : {net.weight_in[(p, t)]}")
            for p in net.places:
                if (p, t) in net.weight_out:
                    lines.append(f"  out {_q(p)} : {net.weight_out[(p, t)]}")
        return "\n".join(lines) + "\n"
    lines = ["net coloured"]
    seen: dict[str, Domain] = {}

    def declare(d: Domain):
        if d.name in seen:
            if seen[d.name] != d:
                raise NetError(f"two different domains are named {d.name}")
            return
        for c in d.components:
            declare(c)
        seen[d.name] = d
        if d.is_product:
            body = "<" + ", ".join(_q(c.name) for c in d.components) + ">"
        elif d.labels == tuple(str(v) for v in range(d.lo, d.lo + d.size)):
            body = f"{d.lo}..{d.hi}"
        else:
            body = "{" + ", ".join(_q(x) for x in d.labels) + "}"
        lines.append(f"domain {_q(d.name)} = {body}")

    for p in net.places:
        declare(net.domains[p])
    for t in net.transitions:
        for d in net.variables[t].values():
            declare(d)
    for p in net.places:
        d = net.domains[p]
        line = f"place {_q(p)} : {_q(d.name)}"
        if p in net.initial:
            vec = net.initial[p]
            parts = [f"{n}'{_label(d, c)}" for c, n in enumerate(vec) if n]
            line += " = " + (" + ".join(parts) if parts else "0")
        lines.append(line)
    for t in net.transitions:
        _check_constants(net, t)
        lines.append(f"transition {_q(t)}")
        inferred: dict[str, Domain] = {}
        for key, arcs in (("in", net.arcs_in), ("out", net.arcs_out)):
            for p in net.places:
                ins = arcs.get((p, t))
                if not ins:
                    continue
                d = net.domains[p]
                lines.append(f"  {key} {_q(p)} : " + ", ".join(_arc(a, d) for a in ins))
                for a in ins:
                    for c, cd in zip(a.components, d.basic()):
                        v = None if isinstance(c, AllColours) else term_variable(c)
                        if v is not None:
                            inferred.setdefault(v, cd)
        for v, d in net.variables[t].items():
            if inferred.get(v) != d:
                lines.append(f"  var {_q(v)} : {_q(d.name)}")
        g = net.guards.get(t, TRUE)
        if g != TRUE:
            lines.append(f"  guard {_guard(g)}")
        if t in net.assumed_nonfull:
            lines.append("  nonfull")
    return "\n".join(lines) + "\n"
