"""Modified skeleton: complement places and recipient transitions.

For every pre-place p of a non-full minimal class a complement place and a
recipient transition moving tokens from p to the complement are added.
Concrete deadlocks caused by colour distributions then show up in the
abstraction after finitely many recipient steps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fullness import _simplified, minimal_class_fullness
from .logic import AtomicProposition, Formula, _atom_or_const, map_atoms
from .nets import ColouredNet, PTNet, skeleton


class InjectionImpossible(ValueError):
    pass


@dataclass
class ModifiedSkeleton:
    net: PTNet
    complements: dict[str, str]  # place -> complement place
    recipients: dict[str, str]  # place -> recipient transition
    source_classes: list[tuple[str, ...]]
    base: PTNet  # the unmodified skeleton

    @property
    def silent(self) -> frozenset:
        return frozenset(self.recipients.values())

    def collapse(self, m: tuple) -> tuple:
        """S' marking -> S marking, adding complement counts to their places."""
        md = dict(zip(self.net.places, m))
        return tuple(md[p] + (md[self.complements[p]] if p in self.complements else 0) for p in self.base.places)

    def lift_formula(self, f: Formula) -> Formula:
        """Propositions on S' count p and its complement together."""

        def lift(ap: AtomicProposition):
            terms = []
            for k, p in ap.terms:
                terms.append((k, p))
                if p in self.complements:
                    terms.append((k, self.complements[p]))
            return _atom_or_const(AtomicProposition.of(terms, ap.bound))

        return map_atoms(f, lift)


def _fresh(name: str, taken: set[str]) -> str:
    out, k = name, 1
    while out in taken:
        out = f"{name}{k}"
        k += 1
    taken.add(out)
    return out


def inject_deadlocks(net: ColouredNet, fullness: dict | None = None) -> ModifiedSkeleton:
    """Skeleton plus one complement/recipient pair per affected pre-place.

    ``fullness`` maps minimal classes to their fullness; it is computed
    when not given.
    """
    net = _simplified(net)
    if fullness is None:
        fullness = minimal_class_fullness(net)
    base = skeleton(net)
    sources = [cls for cls, full in fullness.items() if not full]
    targets: list[str] = []
    for cls in sources:
        pre = {p for t in cls for p in net.preset(t)}
        if not pre:
            raise InjectionImpossible(f"class {{{','.join(cls)}}} has no pre-places")
        for p in net.places:
            if p in pre and p not in targets:
                targets.append(p)
    targets.sort(key=net.places.index)
    taken = set(base.places) | set(base.transitions)
    complements, recipients = {}, {}
    w_in = dict(base.weight_in)
    w_out = dict(base.weight_out)
    for p in targets:
        bar = _fresh(f"{p}_bar", taken)
        tr = _fresh(f"{p}_recv", taken)
        complements[p] = bar
        recipients[p] = tr
        w_in[(p, tr)] = 1
        w_out[(bar, tr)] = 1
    places = base.places + tuple(complements[p] for p in targets)
    transitions = base.transitions + tuple(recipients[p] for p in targets)
    modified = PTNet(places, transitions, w_in, w_out, dict(base.initial))
    return ModifiedSkeleton(modified, complements, recipients, sources, base)


def relate_markings(s: PTNet, sm: ModifiedSkeleton):
    """Predicate relating an S marking to an S' marking."""
    if tuple(s.places) != tuple(sm.base.places):
        raise ValueError("skeleton does not match the modified skeleton")

    def related(m_s: tuple, m_sm: tuple) -> bool:
        return tuple(m_s) == sm.collapse(m_sm)

    return related
