"""CTL* formulas over linear atomic propositions on markings.

Text grammar (whitespace insensitive)::

    formula := disj
    disj    := conj ("||" conj)*
    conj    := binary ("&&" binary)*
    binary  := unary (("U" | "W" | "R") binary)?
    unary   := ("!" | "X" | "F" | "G" | "E" | "A") unary | primary
    primary := "(" formula ")" | "true" | "false" | atom
    atom    := linear ("<=" | "<" | ">=" | ">" | "=" | "!=") linear
    linear  := ["-"] item (("+" | "-") item)*
    item    := INT "*" NAME | NAME | INT

Names are ``[A-Za-z_][A-Za-z0-9_.]*`` or double-quoted strings.  Every
atom is normalised to ``sum k_i * p_i <= k``; the other comparisons are
sugar for conjunctions or disjunctions of such atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence, Union

# --- atoms -----------------------------------------------------------------------


@dataclass(frozen=True)
class AtomicProposition:
    """``sum(k * p for k, p in terms) <= bound``."""

    terms: tuple[tuple[int, str], ...]
    bound: int

    @classmethod
    def of(cls, coeffs, bound: int) -> "AtomicProposition":
        acc: dict[str, int] = {}
        for k, p in coeffs:
            acc[p] = acc.get(p, 0) + k
        return cls(tuple((k, p) for p, k in acc.items() if k), bound)

    def negate(self) -> "AtomicProposition":
        return AtomicProposition(tuple((-k, p) for k, p in self.terms), -self.bound - 1)

    @property
    def places(self) -> tuple[str, ...]:
        return tuple(p for _, p in self.terms)

    def __str__(self) -> str:
        return _linear_str(self.terms) + f" <= {self.bound}"


def _quote(name: str) -> str:
    if _NAME.fullmatch(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _linear_str(terms) -> str:
    out = []
    for i, (k, p) in enumerate(terms):
        mag = abs(k)
        body = _quote(p) if mag == 1 else f"{mag}*{_quote(p)}"
        if i == 0:
            out.append(("-" if k < 0 else "") + body)
        else:
            out.append((" - " if k < 0 else " + ") + body)
    return "".join(out) if out else "0"


def eval_ap(m: Mapping, a: AtomicProposition) -> bool:
    """Evaluate on a P/T marking or a coloured marking (count vectors)."""
    total = 0
    for k, p in a.terms:
        if p not in m:
            raise KeyError(f"unknown place {p}")
        v = m[p]
        total += k * (v if isinstance(v, int) else sum(v))
    return total <= a.bound


# --- formulas --------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    ap: AtomicProposition


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class X:
    arg: "Formula"


@dataclass(frozen=True)
class F:
    arg: "Formula"


@dataclass(frozen=True)
class G:
    arg: "Formula"


@dataclass(frozen=True)
class U:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class W:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class R:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class E:
    arg: "Formula"


@dataclass(frozen=True)
class A:
    arg: "Formula"


Formula = Union[Atom, Const, Not, And, Or, X, F, G, U, W, R, E, A]
TRUE = Const(True)
FALSE = Const(False)
UNARY = {"!": Not, "X": X, "F": F, "G": G, "E": E, "A": A}
BINARY = {"U": U, "W": W, "R": R}
TEMPORAL = (X, F, G, U, W, R)
KEYWORDS = {"X", "F", "G", "U", "W", "R", "E", "A", "true", "false"}


def children(f: Formula) -> tuple:
    if isinstance(f, (Atom, Const)):
        return ()
    if isinstance(f, (Not, X, F, G, E, A)):
        return (f.arg,)
    return (f.left, f.right)


def rebuild(f: Formula, kids: Sequence) -> Formula:
    if not kids:
        return f
    return type(f)(*kids)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def atoms(f: Formula) -> list[AtomicProposition]:
    out: list = []
    for g in subformulas(f):
        if isinstance(g, Atom) and g.ap not in out:
            out.append(g.ap)
    return out


def map_atoms(f: Formula, fn: Callable[[AtomicProposition], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f.ap)
    return rebuild(f, [map_atoms(c, fn) for c in children(f)])


def is_trivial(f: Formula) -> bool:
    """No temporal operator at all."""
    return not any(isinstance(g, TEMPORAL) for g in subformulas(f))


def conj(*fs: Formula) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


def disj(*fs: Formula) -> Formula:
    out = None
    for f in fs:
        out = f if out is None else Or(out, f)
    return FALSE if out is None else out


# --- printing ----------------------------------------------------------------------

_INFIX = {And: "&&", Or: "||", U: "U", W: "W", R: "R"}
_PREFIX = {Not: "!", X: "X", F: "F", G: "G", E: "E", A: "A"}


def to_text(f: Formula) -> str:
    """Print ``f`` so that ``parse_formula(to_text(f)) == f``."""
    if isinstance(f, Atom):
        return str(f.ap)
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if type(f) in _PREFIX:
        inner = to_text(f.arg)
        if not (type(f.arg) in _PREFIX or isinstance(f.arg, Const)):
            inner = f"({inner})"
        return f"{_PREFIX[type(f)]} {inner}"
    return f"({to_text(f.left)} {_INFIX[type(f)]} {to_text(f.right)})"


# --- parsing -------------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")
_TOKEN = re.compile(
    r'\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_.]*)|(?P<str>"(?:[^"\\]|\\.)*")'
    r"|(?P<op><=|>=|!=|==|&&|\|\||[-+*()<>=!]))"
)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise FormulaSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
            start = m.start(m.lastgroup)
            kind = m.lastgroup
            val = m.group(kind)
            if kind == "str":
                kind, val = "place", re.sub(r"\\(.)", r"\1", val[1:-1])
            elif kind == "name":
                kind = "kw" if val in KEYWORDS else "place"
            self.toks.append((kind, val, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self, val: str | None = None):
        tok = self.peek()
        if val is not None and tok[1] != val:
            raise FormulaSyntaxError(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok[2])
        if tok[0] == "eof":
            raise FormulaSyntaxError("unexpected end of input", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "||":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.binary()
        while self.peek()[1] == "&&":
            self.take()
            f = And(f, self.binary())
        return f

    def binary(self) -> Formula:
        f = self.unary()
        kind, val, _ = self.peek()
        if kind == "kw" and val in BINARY:
            self.take()
            return BINARY[val](f, self.binary())
        return f

    def unary(self) -> Formula:
        kind, val, _ = self.peek()
        if (kind == "kw" and val in UNARY) or (kind == "op" and val == "!"):
            self.take()
            return UNARY[val](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if kind == "kw" and val in ("true", "false"):
            self.take()
            return Const(val == "true")
        if kind in ("place", "num") or val == "-":
            return self.atom()
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos)

    def linear(self):
        terms: list[tuple[int, str]] = []
        const = 0
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        while True:
            kind, val, pos = self.take()
            if kind == "num":
                if self.peek()[1] == "*":
                    self.take()
                    k2, name, p2 = self.take()
                    if k2 != "place":
                        raise FormulaSyntaxError("expected a place name", p2)
                    terms.append((sign * int(val), name))
                else:
                    const += sign * int(val)
            elif kind == "place":
                terms.append((sign, val))
            else:
                raise FormulaSyntaxError(f"unexpected {val!r} in linear expression", pos)
            nxt = self.peek()[1]
            if nxt == "+":
                sign = 1
            elif nxt == "-":
                sign = -1
            else:
                return terms, const
            self.take()

    def atom(self) -> Formula:
        lt, lc = self.linear()
        kind, op, pos = self.take()
        if op not in ("<=", "<", ">=", ">", "=", "==", "!="):
            raise FormulaSyntaxError(f"expected a comparison, found {op!r}", pos)
        rt, rc = self.linear()
        terms = lt + [(-k, p) for k, p in rt]
        bound = rc - lc  # sum(terms) OP bound
        return comparison(terms, op, bound)


def comparison(terms, op: str, bound: int) -> Formula:
    """Desugar ``sum(terms) op bound`` into <=-atoms."""
    le = lambda ts, b: _atom_or_const(AtomicProposition.of(ts, b))  # noqa: E731
    neg = [(-k, p) for k, p in terms]
    if op == "<=":
        return le(terms, bound)
    if op == "<":
        return le(terms, bound - 1)
    if op == ">=":
        return le(neg, -bound)
    if op == ">":
        return le(neg, -bound - 1)
    if op in ("=", "=="):
        return And(le(terms, bound), le(neg, -bound))
    if op == "!=":
        return Or(le(terms, bound - 1), le(neg, -bound - 1))
    raise ValueError(op)


def _atom_or_const(ap: AtomicProposition) -> Formula:
    if not ap.terms:
        return Const(0 <= ap.bound)
    return Atom(ap)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    if not p.toks:
        raise FormulaSyntaxError("empty formula", 0)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {val!r}", pos)
    return f


# --- normal forms and fragments ------------------------------------------------------


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations into the atoms."""
    if isinstance(f, Atom):
        return _atom_or_const(f.ap.negate()) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    if isinstance(f, And):
        op = Or if negate else And
        return op(to_nnf(f.left, negate), to_nnf(f.right, negate))
    if isinstance(f, Or):
        op = And if negate else Or
        return op(to_nnf(f.left, negate), to_nnf(f.right, negate))
    if isinstance(f, X):
        return X(to_nnf(f.arg, negate))
    if isinstance(f, F):
        return (G if negate else F)(to_nnf(f.arg, negate))
    if isinstance(f, G):
        return (F if negate else G)(to_nnf(f.arg, negate))
    if isinstance(f, E):
        return (A if negate else E)(to_nnf(f.arg, negate))
    if isinstance(f, A):
        return (E if negate else A)(to_nnf(f.arg, negate))
    a, b = f.left, f.right
    if not negate:
        return type(f)(to_nnf(a), to_nnf(b))
    if isinstance(f, U):  # !(a U b) == !a R !b
        return R(to_nnf(a, True), to_nnf(b, True))
    if isinstance(f, R):  # !(a R b) == !a U !b
        return U(to_nnf(a, True), to_nnf(b, True))
    # !(a W b) == !b U (!a && !b)
    nb = to_nnf(b, True)
    return U(nb, And(to_nnf(a, True), nb))


def negation(f: Formula) -> Formula:
    return to_nnf(f, True)


@dataclass(frozen=True)
class FragmentReport:
    isLTL: bool
    isACTLstar: bool
    isCTL: bool
    isACTL: bool
    isXFree: bool
    isSafety: bool

    @property
    def isACTLstarX(self) -> bool:
        return self.isACTLstar and self.isXFree


def _is_state_ctl(f: Formula) -> bool:
    if isinstance(f, (Atom, Const)):
        return True
    if isinstance(f, (Not, And, Or)):
        return all(_is_state_ctl(c) for c in children(f))
    if isinstance(f, (E, A)):
        p = f.arg
        return isinstance(p, TEMPORAL) and all(_is_state_ctl(c) for c in children(p))
    return False


def classify(f: Formula) -> FragmentReport:
    """Syntactic fragment flags, computed on the negation normal form.

    Safety means: universal, and the only temporal operators are G, W and R
    (both expressible through W).  X is excluded because the silent loops
    added at deadlocks make next-state claims unsound to transfer.
    """
    f = to_nnf(f)
    subs = list(subformulas(f))
    has = lambda *types: any(isinstance(g, types) for g in subs)  # noqa: E731
    no_e = not has(E)
    body = f.arg if isinstance(f, A) else f
    is_ltl = not any(isinstance(g, (E, A)) for g in subformulas(body))
    is_ctl = _is_state_ctl(f)
    xfree = not has(X)
    safety = no_e and not has(X, F, U)
    return FragmentReport(is_ltl, no_e, is_ctl, no_e and is_ctl, xfree, safety)


# --- unfolding of propositions -----------------------------------------------------


def unfold_props(f: Formula, net) -> Formula:
    """Replace every place p by the sum of its unfolded places."""
    from .nets import place_name

    def expand(ap: AtomicProposition) -> Formula:
        terms = []
        for k, p in ap.terms:
            if p not in net.domains:
                raise KeyError(f"unknown place {p}")
            dom = net.domains[p]
            terms.extend((k, place_name(p, dom, c)) for c in range(dom.size))
        return _atom_or_const(AtomicProposition.of(terms, ap.bound))

    return map_atoms(f, expand)


def unfold_ap(ap: AtomicProposition, net) -> AtomicProposition:
    g = unfold_props(Atom(ap), net)
    return g.ap if isinstance(g, Atom) else AtomicProposition((), 0 if g.value else -1)


def formula_places(f: Formula) -> set[str]:
    return {p for ap in atoms(f) for p in ap.places}
