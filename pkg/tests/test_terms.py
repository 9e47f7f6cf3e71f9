import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skelcheck.terms import (
    FALSE,
    TRUE,
    And,
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
    evaluate,
    guard_variables,
    negate,
    rename_guard,
    term_value,
)

D3 = Domain.range("D3", 1, 3)
RG = Domain.enum("RG", ["r", "g"])


def test_range_domain_values():
    assert D3.labels == ("1", "2", "3")
    assert (D3.lo, D3.hi, D3.size) == (1, 3, 3)
    assert D3.value(0) == 1 and D3.index_of_value(3) == 2
    assert D3.wrap(4) == 1 and D3.wrap(0) == 3


def test_successor_wraps_on_range():
    doms = {"x": D3}
    assert term_value(Succ(Var("x")), {"x": 3}, doms) == 1
    assert term_value(Pred(Var("x")), {"x": 1}, doms) == 3
    assert term_value(Succ(Succ(Var("x"))), {"x": 2}, doms) == 1


def test_product_labels_and_radix():
    p = Domain.product("P", [D3, RG])
    assert p.size == 6 and p.arity == 2
    assert p.labels[1] == "<1,g>"
    assert p.decompose(p.compose((2, 1))) == (2, 1)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.data())
def test_compose_decompose_inverse(sizes, data):
    comps = [Domain.range(f"C{i}", 0, n - 1) for i, n in enumerate(sizes)]
    p = Domain.product("P", comps)
    idx = data.draw(st.integers(0, p.size - 1))
    assert p.compose(p.decompose(idx)) == idx


def test_index_unknown_label():
    with pytest.raises(KeyError):
        RG.index("b")


def test_three_valued_comparison():
    g = Cmp("<", Var("x"), Var("y"))
    doms = {"x": D3, "y": D3}
    assert evaluate(g, {"x": 1}, doms) is None
    assert evaluate(g, {"x": 1, "y": 2}, doms) is True
    assert evaluate(And((g, FALSE)), {"x": 1}, doms) is False
    assert evaluate(Or((g, TRUE)), {}, doms) is True


def test_modes_partial_evaluation():
    m = Modes((FiringMode((("x", 0), ("y", 1))), FiringMode((("x", 2), ("y", 2)))))
    doms = {"x": D3, "y": D3}
    assert evaluate(m, {"x": 1}, doms) is None  # value 1 is index 0
    assert evaluate(m, {"x": 2}, doms) is False
    assert evaluate(m, {"x": 1, "y": 2}, doms) is True
    assert evaluate(m, {"x": 1, "y": 3}, doms) is False


def test_multiset_match():
    g = MultisetMatch(((Var("a"),), (Var("b"),)), ((Var("x"),), (Var("y"),)))
    doms = {v: D3 for v in "abxy"}
    assert evaluate(g, {"a": 1, "b": 2, "x": 2, "y": 1}, doms) is True
    assert evaluate(g, {"a": 1, "b": 1, "x": 2, "y": 1}, doms) is False
    assert evaluate(g, {"a": 1}, doms) is None


def test_conjoin_disjoin_simplify():
    c = Cmp("==", Var("x"), Const(1, D3))
    assert conjoin(TRUE, c) == c
    assert conjoin(c, FALSE) == FALSE
    assert disjoin(c, c) == c
    assert disjoin(FALSE) == FALSE
    assert guard_variables(And((c, Cmp("<", Var("y"), Var("z"))))) == {"x", "y", "z"}


def test_rename_guard():
    g = Cmp("<", Succ(Var("x")), Var("y"))
    assert rename_guard(g, {"x": "a"}) == Cmp("<", Succ(Var("a")), Var("y"))


ops = st.sampled_from(["==", "!=", "<", "<=", ">", ">="])
leaf = st.builds(Cmp, ops, st.sampled_from([Var("x"), Succ(Var("x")), Var("y")]),
                 st.sampled_from([Var("y"), Const(2, D3), Pred(Var("y"))]))
guards = st.recursive(
    leaf,
    lambda g: st.one_of(st.lists(g, min_size=1, max_size=3).map(lambda p: And(tuple(p))),
                        st.lists(g, min_size=1, max_size=3).map(lambda p: Or(tuple(p)))),
    max_leaves=6,
)


@given(guards)
def test_negate_is_complement(g):
    doms = {"x": D3, "y": D3}
    for x, y in itertools.product(range(1, 4), repeat=2):
        vals = {"x": x, "y": y}
        assert evaluate(negate(g), vals, doms) is (not evaluate(g, vals, doms))


@given(guards, st.dictionaries(st.sampled_from(["x", "y"]), st.integers(1, 3)))
def test_partial_evaluation_is_conservative(g, partial):
    """A decided partial result agrees with every completion."""
    doms = {"x": D3, "y": D3}
    r = evaluate(g, partial, doms)
    if r is None:
        return
    for x, y in itertools.product(range(1, 4), repeat=2):
        full = {"x": x, "y": y}
        if all(full[k] == v for k, v in partial.items()):
            assert evaluate(g, full, doms) is r
