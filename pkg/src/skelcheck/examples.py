"""Small reference nets used by tests, scripts and the documentation."""

from __future__ import annotations

from .logic import parse_formula
from .nets import ColouredNet, PTNet, make_coloured, make_pt
from .terms import Cmp, Const, Domain, Var, conjoin, disjoin


def blocked_net() -> ColouredNet:
    """Three equally coloured tokens on p are turned into one token on q.

    The initial marking {r, g, g} is dead, while its skeleton is not.
    """
    rg = Domain.enum("RG", ["r", "g"])
    guard = disjoin(*(
        conjoin(*(Cmp("==", Var(v), Const(c, rg)) for v in ("x1", "x2", "x3", "y")))
        for c in range(rg.size)
    ))
    return make_coloured(
        {"p": (rg, {"r": 1, "g": 2}), "q": (rg, None)},
        {"t": {"in": {"p": ["x1", "x2", "x3"]}, "out": {"q": ["y"]}, "guard": guard}},
    )


BLOCKED_FORMULA = "A F (p <= 1)"


def colour_copy_net() -> ColouredNet:
    """One token of each colour moves from p to q keeping its colour."""
    rgb = Domain.enum("RGB", ["r", "g", "b"])
    guard = disjoin(*(
        conjoin(Cmp("==", Var("x1"), Const(c, rgb)), Cmp("==", Var("x2"), Const(c, rgb)))
        for c in range(rgb.size)
    ))
    return make_coloured(
        {"p": (rgb, {"r": 1, "g": 1, "b": 1}), "q": (rgb, None)},
        {"t": {"in": {"p": ["x1"]}, "out": {"q": ["x2"]}, "guard": guard}},
    )


def full_class_net(marking: bool = False) -> ColouredNet:
    """Two transitions with equal input vectors that together cover all inputs."""
    d4 = Domain.range("D4", 1, 4)
    d3 = Domain.range("D3", 1, 3)
    return make_coloured(
        {
            "p1": (d4, [1, 1, 0, 0] if marking else None),
            "p2": (d3, [0, 1, 1] if marking else None),
        },
        {
            "t1": {"in": {"p1": ["x"], "p2": ["y"]}, "guard": Cmp("==", Var("y"), Const(1, d3))},
            "t2": {"in": {"p1": ["x"], "p2": ["y"]}, "guard": Cmp("!=", Var("y"), Const(1, d3))},
        },
    )


def philosophers(n: int = 5) -> PTNet:
    """Dining philosophers as a P/T net (places th, hl, hr, ea, fo)."""
    kinds = ("th", "hl", "hr", "ea", "fo")
    places = [f"{k}{i}" for k in kinds for i in range(n)]
    transitions = [f"{k}{i}" for k in ("tl", "tr", "rl", "rr") for i in range(n)]
    arcs_in, arcs_out = [], []
    for i in range(n):
        j = (i + 1) % n
        arcs_in += [(f"th{i}", f"tl{i}", 1), (f"fo{i}", f"tl{i}", 1)]
        arcs_out += [(f"tl{i}", f"hl{i}", 1)]
        arcs_in += [(f"hl{i}", f"tr{i}", 1), (f"fo{j}", f"tr{i}", 1)]
        arcs_out += [(f"tr{i}", f"ea{i}", 1)]
        arcs_in += [(f"ea{i}", f"rl{i}", 1)]
        arcs_out += [(f"rl{i}", f"hr{i}", 1), (f"rl{i}", f"fo{i}", 1)]
        arcs_in += [(f"hr{i}", f"rr{i}", 1)]
        arcs_out += [(f"rr{i}", f"fo{j}", 1), (f"rr{i}", f"th{i}", 1)]
    initial = {f"th{i}": 1 for i in range(n)} | {f"fo{i}": 1 for i in range(n)}
    return make_pt(places, transitions, arcs_in, arcs_out, initial)


def philosophers_formula(n: int = 5):
    hr = "+".join(f"hr{i}" for i in range(n))
    hl = "+".join(f"hl{i}" for i in range(n))
    return parse_formula(f"A G (!({hr} = {n - 1}) && ({hl} = 1))")
