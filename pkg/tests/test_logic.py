import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skelcheck.examples import blocked_net
from skelcheck.fullness import _simplified
from skelcheck.generators import random_actl, random_coloured_marking, random_coloured_net, random_safety, random_state_formula
from skelcheck.logic import (
    A,
    And,
    Atom,
    AtomicProposition,
    Const,
    E,
    F,
    FormulaSyntaxError,
    G,
    Not,
    Or,
    R,
    U,
    W,
    X,
    classify,
    eval_ap,
    negation,
    parse_formula,
    subformulas,
    to_nnf,
    to_text,
    unfold_ap,
)
from skelcheck.nets import unfold
from skelcheck.statespace import build_kripke
from skelcheck.ctl import check_ctl

from oracles import ctl_oracle_sat, random_kripke


def ap(terms, bound):
    return AtomicProposition(tuple(terms), bound)


def test_atom_normalisation():
    assert parse_formula("p <= 1") == Atom(ap([(1, "p")], 1))
    assert parse_formula("p < 2") == Atom(ap([(1, "p")], 1))
    assert parse_formula("p >= 1") == Atom(ap([(-1, "p")], -1))
    assert parse_formula("2*p - q > 0") == Atom(ap([(-2, "p"), (1, "q")], -1))
    assert parse_formula("p = 1") == And(Atom(ap([(1, "p")], 1)), Atom(ap([(-1, "p")], -1)))


def test_constant_atoms_fold():
    assert parse_formula("0 <= 1") == Const(True)
    assert parse_formula("p - p <= -1") == Const(False)


def test_negated_atom():
    a = ap([(1, "p"), (2, "q")], 3)
    assert a.negate() == ap([(-1, "p"), (-2, "q")], -4)
    for m in ({"p": 0, "q": 0}, {"p": 1, "q": 1}, {"p": 5, "q": 0}):
        assert eval_ap(m, a.negate()) is (not eval_ap(m, a))


def test_eval_ap_on_colour_vectors():
    a = ap([(1, "p")], 2)
    assert eval_ap({"p": (1, 1)}, a)
    assert not eval_ap({"p": (2, 1)}, a)
    with pytest.raises(KeyError):
        eval_ap({}, a)


def test_precedence():
    f = parse_formula("A G p <= 1 && F q <= 0 U r <= 2")
    assert isinstance(f, And) and isinstance(f.left, A) and isinstance(f.left.arg, G)
    assert isinstance(f.right, U) and isinstance(f.right.left, F)
    g = parse_formula("p <= 0 U q <= 0 U r <= 0")
    assert isinstance(g, U) and isinstance(g.right, U)


def test_syntax_errors():
    for bad in ("", "p <=", "A (p <= 1", "p <= 1 q", "G"):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(bad)


def test_quoted_names_round_trip():
    f = parse_formula('A G ("p.r" + "U" <= 1)')
    assert parse_formula(to_text(f)) == f


def test_nnf_duals():
    a, b = Atom(ap([(1, "p")], 0)), Atom(ap([(1, "q")], 0))
    na, nb = Atom(ap([(-1, "p")], -1)), Atom(ap([(-1, "q")], -1))
    assert negation(U(a, b)) == R(na, nb)
    assert negation(R(a, b)) == U(na, nb)
    assert negation(W(a, b)) == U(nb, And(na, nb))
    assert negation(A(G(a))) == E(F(na))
    assert to_nnf(Not(Not(a))) == a


def test_fragments():
    c = classify(parse_formula("A G (p <= 1)"))
    assert c.isSafety and c.isACTLstar and c.isCTL and c.isACTL and c.isLTL
    c = classify(parse_formula("A F (p <= 1)"))
    assert c.isACTLstar and not c.isSafety
    c = classify(parse_formula("A X (p <= 1)"))
    assert c.isACTLstar and not c.isXFree and not c.isSafety and not c.isACTLstarX
    c = classify(parse_formula("A (p <= 0 W q <= 0)"))
    assert c.isSafety
    c = classify(parse_formula("!E F (p <= 1)"))
    assert c.isSafety and c.isACTLstar
    c = classify(parse_formula("E F (p <= 1)"))
    assert not c.isACTLstar
    c = classify(parse_formula("A G F (p <= 1)"))
    assert c.isACTLstar and not c.isCTL and not c.isSafety


def test_next_is_unsound_on_completed_deadlocks():
    """AX(p <= 1) holds on the skeleton of the blocked net but not on the net.

    This is why the safety fragment excludes X.
    """
    f = parse_formula("A X (p <= 1)")
    from skelcheck.nets import skeleton

    assert check_ctl(build_kripke(skeleton(blocked_net()), []), f)
    assert not check_ctl(build_kripke(_simplified(blocked_net()), []), f)


formulas = st.integers(0, 10**6).map(lambda s: random_state_formula(random.Random(s), ("a", "b"), 3))


@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f)) == f


@given(formulas)
def test_nnf_has_no_negation_and_keeps_meaning(f):
    g = to_nnf(f)
    assert not any(isinstance(h, Not) for h in subformulas(g))
    k = random_kripke(random.Random(hash(to_text(f)) & 0xFFFF), 4)
    assert ctl_oracle_sat(k, f) == ctl_oracle_sat(k, g)


@given(st.integers(0, 10**6))
def test_generated_fragments(seed):
    rng = random.Random(seed)
    assert classify(random_safety(rng, ("a", "b"))).isSafety
    f = random_actl(rng, ("a", "b"), allow_x=False)
    assert classify(f).isACTLstar and classify(f).isXFree


@given(st.integers(0, 10**6))
def test_safety_is_a_sub_fragment_of_actl_star(seed):
    f = random_state_formula(random.Random(seed), ("a", "b"), 3)
    c = classify(f)
    if c.isSafety:
        assert c.isACTLstar and c.isXFree
    if c.isACTL:
        assert c.isACTLstar and c.isCTL


@given(st.integers(0, 10**6))
def test_unfolded_proposition_equisatisfiable(seed):
    rng = random.Random(seed)
    net = random_coloured_net(rng)
    u = unfold(net)
    for _ in range(5):
        m = random_coloured_marking(rng, net)
        a = AtomicProposition.of([(rng.choice((-1, 1, 2)), p) for p in rng.sample(net.places, 1)], rng.randint(-1, 3))
        cm = dict(zip(net.places, m))
        um = dict(zip(u.net.places, u.marking_of(net, m)))
        assert eval_ap(cm, a) == eval_ap(um, unfold_ap(a, net))
