"""Print the verdicts and structures of the bundled reference nets."""

from skelcheck.checker import verify
from skelcheck.examples import (
    BLOCKED_FORMULA,
    blocked_net,
    colour_copy_net,
    full_class_net,
    philosophers,
    philosophers_formula,
)
from skelcheck.folding import fold
from skelcheck.fullness import binomial_certificate, class_automaton, minimal_class_fullness
from skelcheck.logic import to_text
from skelcheck.nets import unfold


def show(title, net, formula):
    v = verify(net, formula)
    print(f"== {title}: {formula if isinstance(formula, str) else to_text(formula)}")
    print("   " + v.explain().replace("\n", "\n   "))


def main():
    show("blocked net", blocked_net(), BLOCKED_FORMULA)
    show("full class net", full_class_net(marking=True), "A F (p1 <= 0)")
    show("philosophers", philosophers(), philosophers_formula())

    a = class_automaton(full_class_net(), ("t1", "t2"))
    print(f"\nclass {{t1,t2}}: {a.n_states} states, labels {a.edge_labels()}, universal {a.is_universal()}")
    print(f"blocked net classes: {minimal_class_fullness(blocked_net())}")

    res = fold(philosophers(), philosophers_formula())
    print(f"\nfolded philosophers: places {res.net.places}, transitions {res.net.transitions}")
    print(f"  tl certificate: {binomial_certificate(res.net, ('tl',))}")
    u = unfold(colour_copy_net())
    print(f"colour copy unfolding: {len(u.net.places)} places, {len(u.net.transitions)} transitions")


if __name__ == "__main__":
    main()
