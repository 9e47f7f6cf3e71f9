"""Compare verify() against direct checking on random coloured nets.

    python3 scripts/soundness_sweep.py --nets 500 --seed 1
"""

import argparse
import random
from collections import Counter

from skelcheck.checker import Budgets, verify
from skelcheck.ctl import check_ctl
from skelcheck.fullness import _simplified
from skelcheck.generators import NetShape, random_actl, random_coloured_net, random_safety, random_state_formula
from skelcheck.logic import atoms, negation, to_text
from skelcheck.statespace import StateCapExceeded, build_kripke


def pick_formula(rng, places):
    r = rng.random()
    if r < 0.3:
        return random_actl(rng, places, allow_x=rng.random() < 0.5)
    if r < 0.5:
        return random_safety(rng, places)
    if r < 0.7:
        return negation(random_actl(rng, places))
    return random_state_formula(rng, places)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nets", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--state-cap", type=int, default=5_000)
    args = ap.parse_args(argv)
    tally = Counter()
    wrong = 0
    for i in range(args.nets):
        rng = random.Random(args.seed * 1_000_003 + i)
        net = random_coloured_net(rng, NetShape(conservative=True))
        f = pick_formula(rng, net.places)
        v = verify(net, f, Budgets(state_cap=args.state_cap))
        tally[(v.value, v.basis.value)] += 1
        if v.value == "UNKNOWN":
            continue
        try:
            truth = check_ctl(build_kripke(_simplified(net), atoms(f), args.state_cap), f)
        except StateCapExceeded:
            continue
        if (v.value == "TRUE") != truth:
            wrong += 1
            print(f"UNSOUND net {i}: {to_text(f)} -> {v.value} via {v.basis.value}")
    for (value, basis), n in sorted(tally.items()):
        print(f"{value:8} {basis:20} {n}")
    print(f"{wrong} unsound verdicts in {args.nets} nets")
    return 1 if wrong else 0


if __name__ == "__main__":
    raise SystemExit(main())
