"""Verdict transfer from skeletons to the nets they abstract."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Union

from .ctl import DEFAULT_PRODUCT_BOUND, UnsupportedFormula, check_ctl
from .folding import fold, folding_worthwhile
from .fullness import _simplified, minimal_class_fullness
from .injection import InjectionImpossible, inject_deadlocks
from .logic import Formula, FragmentReport, atoms, classify, is_trivial, negation, parse_formula, to_nnf
from .nets import DEFAULT_UNFOLD_CAP, ColouredNet, PTNet, skeleton
from .statespace import DEFAULT_STATE_CAP, Cancelled, StateCapExceeded, build_kripke


class Basis(str, enum.Enum):
    DEADLOCK_FREE = "deadlock-free"
    DEADLOCK_PRESERVING = "deadlock-preserving"
    STUTTERING = "stuttering"
    SAFETY = "safety-abstraction"
    DIRECT = "direct"
    NONE = "none"


class Soundness(str, enum.Enum):
    DEADLOCK_FREE = "deadlock-free"
    DEADLOCK_PRESERVING = "deadlock-preserving"
    INJECTABLE = "injectable"
    NONE = "none"


@dataclass
class Verdict:
    value: str  # TRUE, FALSE or UNKNOWN
    basis: Basis = Basis.NONE
    abstract_result: bool | None = None
    diagnostics: list[str] = field(default_factory=list)
    states: int = 0
    seconds: float = 0.0

    def record(self, fid, timing: bool = True) -> str:
        t = f"{self.seconds:.3f}" if timing else "-"
        return f"{fid}\t{self.value}\t{self.basis.value}\t{self.states}\t{t}"

    def explain(self) -> str:
        head = f"{self.value} ({self.basis.value})"
        return "\n".join([head] + [f"  {d}" for d in self.diagnostics])


@dataclass
class Budgets:
    state_cap: int = DEFAULT_STATE_CAP
    unfold_cap: int = DEFAULT_UNFOLD_CAP
    skeleton_cap: int = 100_000  # folded skeletons may be unbounded
    probe_cap: int = 10_000  # states for the deadlock-freedom probe
    product_bound: int = DEFAULT_PRODUCT_BOUND
    time_limit: float | None = None


def _qualifies(frag: FragmentReport, basis: Basis) -> bool:
    if basis in (Basis.DEADLOCK_FREE, Basis.DEADLOCK_PRESERVING):
        return frag.isACTLstar
    if basis == Basis.STUTTERING:
        return frag.isACTLstar and frag.isXFree
    if basis == Basis.SAFETY:
        return frag.isSafety
    return basis == Basis.DIRECT


def transfer(result: bool, fragment: FragmentReport, basis: Basis,
             negated: FragmentReport | None = None) -> Verdict:
    """Turn an abstract result into a verdict for the concrete net.

    TRUE carries over when the formula qualifies for the basis.  FALSE
    carries over only when the negated formula qualifies, since the
    abstraction then satisfies the negation.
    """
    basis = Basis(basis)
    if result and _qualifies(fragment, basis):
        return Verdict("TRUE", basis, result)
    if not result and negated is not None and _qualifies(negated, basis):
        return Verdict("FALSE", basis, result)
    why = "formula" if result else "negated formula"
    return Verdict("UNKNOWN", Basis.NONE, result, [f"{why} does not qualify for the {basis.value} basis"])


def _deadline(budgets: Budgets, start: float):
    if budgets.time_limit is None:
        return None
    end = start + budgets.time_limit
    return lambda: time.monotonic() > end


def soundness_class(net: ColouredNet, budget: int = 10_000) -> Soundness:
    """Which preservation argument applies to the skeleton of ``net``."""
    net = _simplified(net)
    try:
        k = build_kripke(net, (), budget)
        if not k.tau_loops:
            return Soundness.DEADLOCK_FREE
    except StateCapExceeded:
        pass
    fullness = minimal_class_fullness(net)
    if all(fullness.values()):
        return Soundness.DEADLOCK_PRESERVING
    try:
        inject_deadlocks(net, fullness)
    except InjectionImpossible:
        return Soundness.NONE
    return Soundness.INJECTABLE


def verify(net: Union[PTNet, ColouredNet], formula: Union[str, Formula], budgets: Budgets | None = None) -> Verdict:
    """Decide ``formula`` on ``net``, through the skeleton when sound."""
    budgets = budgets or Budgets()
    start = time.monotonic()
    cancel = _deadline(budgets, start)
    if isinstance(formula, str):
        formula = parse_formula(formula)
    f = to_nnf(formula)
    diag: list[str] = []
    states = 0

    def done(v: Verdict) -> Verdict:
        v.diagnostics = diag + v.diagnostics
        v.states = states
        v.seconds = time.monotonic() - start
        return v

    def kripke(n, props, cap, silent=()):
        nonlocal states
        k = build_kripke(n, props, cap, silent=silent, cancel=cancel)
        states += len(k)
        return k

    target = net
    tf = f
    if isinstance(net, PTNet):
        if is_trivial(f):
            diag.append("trivial formula: no folding")
            target = None
        else:
            res = fold(net, f)
            if folding_worthwhile(net, res.net):
                diag.append(f"folded {net.size} nodes into {res.net.size}")
                target, tf = res.net, to_nnf(res.formula)
            else:
                diag.append(f"folding not worthwhile ({net.size} -> {res.net.size} nodes)")
                target = None

    try:
        if target is not None:
            v = _via_skeleton(_simplified(target), tf, budgets, diag, kripke)
            if v is not None:
                return done(v)
        concrete = net if isinstance(net, PTNet) else _simplified(net)
        k = kripke(concrete, atoms(f), budgets.state_cap)
        res = check_ctl(k, f, budgets.product_bound)
        diag.append(f"direct check on {len(k)} states")
        return done(Verdict("TRUE" if res else "FALSE", Basis.DIRECT, None))
    except StateCapExceeded as e:
        return done(Verdict("UNKNOWN", Basis.NONE, None, [f"budget exhausted: {e}"]))
    except Cancelled:
        return done(Verdict("UNKNOWN", Basis.NONE, None, ["time limit reached"]))
    except UnsupportedFormula as e:
        return done(Verdict("UNKNOWN", Basis.NONE, None, [str(e)]))


def _via_skeleton(cnet: ColouredNet, f: Formula, budgets: Budgets, diag: list, kripke) -> Verdict | None:
    frag = classify(f)
    negfrag = classify(negation(f))
    skel = skeleton(cnet)
    props = atoms(f)
    cache: dict = {}

    def on_skeleton() -> bool:
        if "S" not in cache:
            k = kripke(skel, props, min(budgets.skeleton_cap, budgets.state_cap))
            cache["S"] = check_ctl(k, f, budgets.product_bound)
            diag.append(f"skeleton: {len(k)} states, formula {'holds' if cache['S'] else 'fails'}")
        return cache["S"]

    def attempt(basis: Basis, result: bool) -> Verdict | None:
        v = transfer(result, frag, basis, negfrag)
        if v.value != "UNKNOWN":
            return v
        diag.extend(v.diagnostics)
        return None

    def guarded(fn):
        try:
            return fn()
        except (StateCapExceeded, UnsupportedFormula) as e:
            diag.append(f"skipped: {e}")
            return None

    # safety properties need no fullness analysis
    if frag.isSafety or negfrag.isSafety:
        r = guarded(on_skeleton)
        if r is not None and (v := attempt(Basis.SAFETY, r)):
            return v
    wants_actl = frag.isACTLstar or negfrag.isACTLstar
    if not wants_actl:
        diag.append("neither the formula nor its negation is universal")
        return None
    fullness = minimal_class_fullness(cnet)
    if all(fullness.values()):
        diag.append("all minimal transition classes are full")
        r = guarded(on_skeleton)
        if r is not None and (v := attempt(Basis.DEADLOCK_PRESERVING, r)):
            return v
    else:
        try:
            probe = kripke(cnet, (), budgets.probe_cap)
            if not probe.tau_loops:
                diag.append("coloured net is deadlock free")
                r = guarded(on_skeleton)
                if r is not None and (v := attempt(Basis.DEADLOCK_FREE, r)):
                    return v
            else:
                diag.append(f"coloured net has {len(probe.tau_loops)} deadlocks")
        except StateCapExceeded:
            diag.append("deadlock probe exceeded its budget")
        try:
            sm = inject_deadlocks(cnet, fullness)
        except InjectionImpossible as e:
            diag.append(str(e))
            return None
        lifted = sm.lift_formula(f)

        def on_modified():
            k = kripke(sm.net, atoms(lifted), min(budgets.skeleton_cap, budgets.state_cap), sm.silent)
            r = check_ctl(k, lifted, budgets.product_bound)
            diag.append(f"modified skeleton: {len(k)} states, formula {'holds' if r else 'fails'}")
            return r

        r = guarded(on_modified)
        if r is not None and (v := attempt(Basis.STUTTERING, r)):
            return v
    return None
