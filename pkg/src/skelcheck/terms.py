"""Colour domains, terms and guard expressions of symmetric nets.

Colours are stored as indices ``0..n-1`` into their domain.  Terms and
comparisons work on colour *values*: ``lo + index`` for integer ranges and
the plain index for enumerations, so ``x++`` on the range ``1..4`` wraps
from 4 to 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

# --- domains ---------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    """A finite, ordered colour domain.

    Product domains carry their ``components``; their colours are tuples
    of component indices flattened in mixed radix (last component fastest).
    """

    name: str
    labels: tuple[str, ...]
    lo: int = 0
    components: tuple["Domain", ...] = ()

    @classmethod
    def enum(cls, name: str, labels: Sequence[str]) -> "Domain":
        return cls(name, tuple(labels))

    @classmethod
    def range(cls, name: str, lo: int, hi: int) -> "Domain":
        if hi < lo:
            raise ValueError(f"empty range domain {name}: {lo}..{hi}")
        return cls(name, tuple(str(v) for v in range(lo, hi + 1)), lo)

    @classmethod
    def product(cls, name: str, components: Sequence["Domain"]) -> "Domain":
        comps = tuple(components)
        labels = tuple(
            "<" + ",".join(parts) + ">"
            for parts in itertools.product(*(c.labels for c in comps))
        )
        return cls(name, labels, 0, comps)

    @classmethod
    def dot(cls) -> "Domain":
        return cls("dot", ("dot",))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def hi(self) -> int:
        return self.lo + self.size - 1

    @property
    def is_product(self) -> bool:
        return bool(self.components)

    @property
    def arity(self) -> int:
        return len(self.components) if self.components else 1

    def basic(self) -> tuple["Domain", ...]:
        """Component domains, or ``(self,)`` for a basic domain."""
        return self.components if self.components else (self,)

    def value(self, index: int) -> int:
        return self.lo + index

    def index_of_value(self, value: int) -> int:
        return value - self.lo

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"colour {label!r} not in domain {self.name}") from None

    def wrap(self, value: int) -> int:
        return self.lo + (value - self.lo) % self.size

    def compose(self, parts: Sequence[int]) -> int:
        """Component indices -> colour index of a product domain."""
        idx = 0
        for comp, part in zip(self.basic(), parts):
            idx = idx * comp.size + part
        return idx

    def decompose(self, index: int) -> tuple[int, ...]:
        parts = []
        for comp in reversed(self.basic()):
            index, r = divmod(index, comp.size)
            parts.append(r)
        return tuple(reversed(parts))


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    """A colour constant, given by its value; ``domain`` is used for wrapping."""

    value: int
    domain: Domain | None = None

    def __str__(self) -> str:
        if self.domain is not None and not self.domain.lo and self.domain.name != "int":
            if 0 <= self.value < self.domain.size:
                return self.domain.labels[self.value]
        return str(self.value)


@dataclass(frozen=True)
class Succ:
    term: "Term"

    def __str__(self) -> str:
        return f"{self.term}++"


@dataclass(frozen=True)
class Pred:
    term: "Term"

    def __str__(self) -> str:
        return f"{self.term}--"


Term = Union[Var, Const, Succ, Pred]


def term_variable(term: Term) -> str | None:
    """The single variable a term depends on, if any."""
    while isinstance(term, (Succ, Pred)):
        term = term.term
    return term.name if isinstance(term, Var) else None


def term_domain(term: Term, var_domains: Mapping[str, Domain]) -> Domain | None:
    while isinstance(term, (Succ, Pred)):
        term = term.term
    if isinstance(term, Var):
        return var_domains[term.name]
    return term.domain


def term_value(term: Term, values: Mapping[str, int], var_domains: Mapping[str, Domain]) -> int:
    """Evaluate ``term`` under an assignment of variables to colour values."""
    if isinstance(term, Var):
        return values[term.name]
    if isinstance(term, Const):
        return term.value
    inner = term_value(term.term, values, var_domains)
    step = 1 if isinstance(term, Succ) else -1
    dom = term_domain(term.term, var_domains)
    return inner + step if dom is None else dom.wrap(inner + step)


# --- guards ----------------------------------------------------------------

COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")
NEGATED = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def compare(op: str, a: int, b: int) -> bool:
    return _CMP[op](a, b)


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class And:
    parts: tuple["Guard", ...]

    def __str__(self) -> str:
        return " && ".join(_wrap(p) for p in self.parts) if self.parts else "true"


@dataclass(frozen=True)
class Or:
    parts: tuple["Guard", ...]

    def __str__(self) -> str:
        return " || ".join(_wrap(p) for p in self.parts) if self.parts else "false"


@dataclass(frozen=True)
class BoolConst:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class FiringMode:
    """Assignment of colour indices to the variables of one transition."""

    assignment: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, int]) -> "FiringMode":
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[str, int]:
        return dict(self.assignment)

    def __getitem__(self, var: str) -> int:
        for name, colour in self.assignment:
            if name == var:
                return colour
        raise KeyError(var)


@dataclass(frozen=True)
class Modes:
    """Extensional guard: the explicit list of admissible firing modes."""

    modes: tuple[FiringMode, ...]

    def __str__(self) -> str:
        return "modes " + " | ".join(
            "(" + ", ".join(f"{v}={c}" for v, c in m.assignment) + ")" for m in self.modes
        )


@dataclass(frozen=True)
class MultisetMatch:
    """``fresh + negative == positive`` as multisets of token values.

    Emitted by inscription simplification when spelling out every bijection
    would be too large; it is exact for evaluation but opaque to automata.
    """

    fresh: tuple[tuple[Term, ...], ...]
    positive: tuple[tuple[Term, ...], ...]
    negative: tuple[tuple[Term, ...], ...] = field(default=())

    def __str__(self) -> str:
        def show(ts):
            return " + ".join("<" + ",".join(map(str, t)) + ">" for t in ts) or "0"

        return f"match({show(self.fresh)} ; {show(self.positive)} ; {show(self.negative)})"


Guard = Union[Cmp, And, Or, BoolConst, Modes, MultisetMatch]


def _wrap(g: Guard) -> str:
    return f"({g})" if isinstance(g, (And, Or)) and len(g.parts) > 1 else str(g)


def conjoin(*guards: Guard) -> Guard:
    parts: list[Guard] = []
    for g in guards:
        if isinstance(g, BoolConst):
            if not g.value:
                return FALSE
            continue
        parts.extend(g.parts if isinstance(g, And) else (g,))
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disjoin(*guards: Guard) -> Guard:
    parts: list[Guard] = []
    for g in guards:
        if isinstance(g, BoolConst):
            if g.value:
                return TRUE
            continue
        for p in g.parts if isinstance(g, Or) else (g,):
            if p not in parts:
                parts.append(p)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def negate(g: Guard) -> Guard:
    """Push a negation through ``g``; comparisons are closed under negation."""
    if isinstance(g, Cmp):
        return Cmp(NEGATED[g.op], g.left, g.right)
    if isinstance(g, BoolConst):
        return BoolConst(not g.value)
    if isinstance(g, And):
        return disjoin(*(negate(p) for p in g.parts))
    if isinstance(g, Or):
        return conjoin(*(negate(p) for p in g.parts))
    raise TypeError(f"cannot negate {type(g).__name__} guard")


def guard_variables(g: Guard) -> set[str]:
    out: set[str] = set()
    if isinstance(g, Cmp):
        for t in (g.left, g.right):
            v = term_variable(t)
            if v is not None:
                out.add(v)
    elif isinstance(g, (And, Or)):
        for p in g.parts:
            out |= guard_variables(p)
    elif isinstance(g, Modes):
        for m in g.modes:
            out.update(v for v, _ in m.assignment)
    elif isinstance(g, MultisetMatch):
        for group in (g.fresh, g.positive, g.negative):
            for tup in group:
                for t in tup:
                    v = term_variable(t)
                    if v is not None:
                        out.add(v)
    return out


def evaluate(g: Guard, values: Mapping[str, int], var_domains: Mapping[str, Domain]):
    """Three-valued guard evaluation over a partial assignment of values.

    Returns ``True``/``False`` once decided and ``None`` while a needed
    variable is still unassigned.
    """
    if isinstance(g, BoolConst):
        return g.value
    if isinstance(g, Cmp):
        for t in (g.left, g.right):
            v = term_variable(t)
            if v is not None and v not in values:
                return None
        a = term_value(g.left, values, var_domains)
        b = term_value(g.right, values, var_domains)
        return compare(g.op, a, b)
    if isinstance(g, And):
        unknown = False
        for p in g.parts:
            r = evaluate(p, values, var_domains)
            if r is False:
                return False
            if r is None:
                unknown = True
        return None if unknown else True
    if isinstance(g, Or):
        unknown = False
        for p in g.parts:
            r = evaluate(p, values, var_domains)
            if r is True:
                return True
            if r is None:
                unknown = True
        return None if unknown else False
    if isinstance(g, Modes):
        complete = True
        for var in guard_variables(g):
            if var not in values:
                complete = False
        for m in g.modes:
            for var, colour in m.assignment:
                if var in values and var_domains[var].index_of_value(values[var]) != colour:
                    break
            else:
                return True if complete else None
        return False
    if isinstance(g, MultisetMatch):
        needed = guard_variables(g)
        if not needed <= values.keys():
            return None

        def bag(group):
            return sorted(tuple(term_value(t, values, var_domains) for t in tup) for tup in group)

        return bag(g.fresh + g.negative) == bag(g.positive)
    raise TypeError(f"unknown guard node {g!r}")


def rename_term(term: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(term, Var):
        return Var(mapping.get(term.name, term.name))
    if isinstance(term, (Succ, Pred)):
        return type(term)(rename_term(term.term, mapping))
    return term


def rename_guard(g: Guard, mapping: Mapping[str, str]) -> Guard:
    """Rename variables throughout a guard."""
    if isinstance(g, Cmp):
        return Cmp(g.op, rename_term(g.left, mapping), rename_term(g.right, mapping))
    if isinstance(g, (And, Or)):
        return type(g)(tuple(rename_guard(p, mapping) for p in g.parts))
    if isinstance(g, Modes):
        return Modes(tuple(
            FiringMode(tuple((mapping.get(v, v), c) for v, c in m.assignment)) for m in g.modes
        ))
    if isinstance(g, MultisetMatch):
        def group(ts):
            return tuple(tuple(rename_term(t, mapping) for t in tup) for tup in ts)

        return MultisetMatch(group(g.fresh), group(g.positive), group(g.negative))
    return g
