"""Regenerate the textual fixtures from the example constructors."""

from pathlib import Path

from skelcheck.examples import blocked_net, colour_copy_net, full_class_net, philosophers
from skelcheck.textual import print_textual

OUT = Path(__file__).resolve().parent.parent / "fixtures"

FIXTURES = {
    "blocked.net": ("Three equally coloured tokens on p become one token on q.", blocked_net()),
    "colour_copy.net": ("Every colour moves from p to q unchanged.", colour_copy_net()),
    "full_class.net": ("t1 and t2 together cover every input distribution.", full_class_net(marking=True)),
    "philosophers5.net": ("Five dining philosophers as a P/T net.", philosophers()),
}


def main():
    for name, (header, net) in FIXTURES.items():
        (OUT / name).write_text(f"# {header}\n{print_textual(net)}")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
