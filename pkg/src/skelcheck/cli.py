"""Command line entry point: ``skelcheck <mode> <net> [<formulas>]``."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .checker import Budgets, Verdict, verify
from .folding import fold
from .fullness import (
    _simplified,
    has_deadlock_preserving_skeleton,
    minimal_class_fullness,
)
from .injection import InjectionImpossible, inject_deadlocks
from .logic import FormulaSyntaxError, parse_formula, to_text
from .nets import ColouredNet, NetError, PTNet, UnfoldingTooLarge, skeleton, unfold
from .pnml import PnmlError, parse_pnml
from .textual import TextualSyntaxError, parse_textual, print_textual

MODES = ("verify", "skeleton", "fold", "unfold", "fullness", "inject")
MAX_FORMULAS = 16

# environment variable -> Budgets field
ENV_BUDGETS = {
    "SKELCHECK_STATE_CAP": ("state_cap", int),
    "SKELCHECK_UNFOLD_CAP": ("unfold_cap", int),
    "SKELCHECK_SKELETON_CAP": ("skeleton_cap", int),
    "SKELCHECK_PROBE_CAP": ("probe_cap", int),
    "SKELCHECK_TIME_LIMIT": ("time_limit", float),
}


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str
    net: Path
    formulas: Path | None = None
    budgets: Budgets = field(default_factory=Budgets)
    machine: bool = False
    dot: Path | None = None
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        b = self.budgets
        for name in ("state_cap", "unfold_cap", "skeleton_cap", "probe_cap"):
            if getattr(b, name) < 1:
                raise InputError(f"{name.replace('_', '-')} must be positive")
        if b.time_limit is not None and b.time_limit <= 0:
            raise InputError("time-limit must be positive")
        if self.workers < 1:
            raise InputError("workers must be positive")


def load_net(path: Path) -> PTNet | ColouredNet:
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        if path.suffix.lower() in (".pnml", ".xml"):
            return parse_pnml(data)
        return parse_textual(data.decode("utf-8"))
    except (TextualSyntaxError, PnmlError, NetError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None


def load_formulas(path: Path) -> list[tuple[int, object]]:
    """(line number, formula) for every non-comment line."""
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from None
    out = []
    for no, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            out.append((no, parse_formula(text)))
        except FormulaSyntaxError as e:
            raise InputError(f"{path}:{no}: {e}") from None
    if len(out) > MAX_FORMULAS:
        raise InputError(f"{path}: {len(out)} formulas, at most {MAX_FORMULAS} per file")
    return out


def net_to_dot(net: PTNet | ColouredNet, name: str = "net") -> str:
    lines = [f'digraph "{name}" {{']
    for p in net.places:
        lines.append(f'  "{p}" [shape=circle];')
    for t in net.transitions:
        lines.append(f'  "{t}" [shape=box];')
    if isinstance(net, PTNet):
        arcs = [(p, t, w) for (p, t), w in net.weight_in.items()]
        back = [(t, p, w) for (p, t), w in net.weight_out.items()]
    else:
        arcs = [(p, t, ", ".join(map(str, ins))) for (p, t), ins in net.arcs_in.items()]
        back = [(t, p, ", ".join(map(str, ins))) for (p, t), ins in net.arcs_out.items()]
    for a, b, label in arcs + back:
        lines.append(f'  "{a}" -> "{b}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dump(cfg: RunConfig, name: str, net) -> None:
    if cfg.dot is None:
        return
    cfg.dot.mkdir(parents=True, exist_ok=True)
    (cfg.dot / f"{name}.dot").write_text(net_to_dot(net, name))


def _verify_one(args) -> Verdict:
    net, formula, budgets = args
    return verify(net, formula, budgets)


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    net = load_net(cfg.net)
    _dump(cfg, "input", net)
    if cfg.mode == "verify":
        if cfg.formulas is None:
            raise InputError("verify needs a formula file")
        formulas = load_formulas(cfg.formulas)
        jobs = [(net, f, cfg.budgets) for _, f in formulas]
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                verdicts = list(pool.map(_verify_one, jobs))
        else:
            verdicts = [_verify_one(j) for j in jobs]
        for (fid, f), v in zip(formulas, verdicts):
            if cfg.machine:
                print(v.record(fid, cfg.timing), file=out)
            else:
                print(f"{fid}: {to_text(f)}", file=out)
                print("  " + v.explain().replace("\n", "\n  "), file=out)
        return 0
    if cfg.mode == "skeleton":
        if not isinstance(net, ColouredNet):
            raise InputError("skeleton needs a coloured net")
        s = skeleton(_simplified(net))
        _dump(cfg, "skeleton", s)
        out.write(print_textual(s))
        return 0
    if cfg.mode == "unfold":
        if not isinstance(net, ColouredNet):
            raise InputError("unfold needs a coloured net")
        try:
            u = unfold(net, cfg.budgets.unfold_cap)
        except UnfoldingTooLarge as e:
            raise InputError(str(e)) from None
        _dump(cfg, "unfolding", u.net)
        out.write(print_textual(u.net))
        return 0
    if cfg.mode == "fold":
        if not isinstance(net, PTNet):
            raise InputError("fold needs a P/T net")
        formulas = load_formulas(cfg.formulas) if cfg.formulas else []
        f = formulas[0][1] if formulas else None
        res = fold(net, f)
        _dump(cfg, "folded", res.net)
        out.write(print_textual(res.net))
        if res.formula is not None:
            print(f"# formula: {to_text(res.formula)}", file=out)
        return 0
    if cfg.mode == "fullness":
        if not isinstance(net, ColouredNet):
            raise InputError("fullness needs a coloured net")
        for cls, full in minimal_class_fullness(net).items():
            print(f"class {{{','.join(cls)}}}: {'FULL' if full else 'NOT FULL'}", file=out)
        print(f"deadlock-preserving skeleton: {has_deadlock_preserving_skeleton(net).value}", file=out)
        return 0
    if cfg.mode == "inject":
        if not isinstance(net, ColouredNet):
            raise InputError("inject needs a coloured net")
        try:
            sm = inject_deadlocks(net)
        except InjectionImpossible as e:
            raise InputError(str(e)) from None
        _dump(cfg, "modified", sm.net)
        out.write(print_textual(sm.net))
        if sm.recipients:
            print(f"# silent: {', '.join(sm.recipients.values())}", file=out)
        return 0
    raise InputError(f"unknown mode {cfg.mode!r}")


def _env_budgets(env) -> Budgets:
    b = Budgets()
    for var, (name, conv) in ENV_BUDGETS.items():
        if var in env:
            try:
                setattr(b, name, conv(env[var]))
            except ValueError:
                raise InputError(f"{var} must be a number") from None
    return b


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skelcheck", description="Skeleton-based checking of coloured Petri nets.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("net", type=Path, help="net file (.pnml or textual)")
    ap.add_argument("formulas", type=Path, nargs="?", help="formula file, one per line")
    ap.add_argument("--state-cap", type=int)
    ap.add_argument("--unfold-cap", type=int)
    ap.add_argument("--time-limit", type=float, help="seconds per formula")
    ap.add_argument("--machine", action="store_true", help="tab-separated records")
    ap.add_argument("--dot", type=Path, help="write DOT files into this directory")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-timing", action="store_true", help="print '-' instead of wall time")
    return ap


def main(argv=None, env=None) -> int:
    env = os.environ if env is None else env
    args = build_parser().parse_args(argv)
    try:
        budgets = _env_budgets(env)
        if args.state_cap is not None:
            budgets.state_cap = args.state_cap
        if args.unfold_cap is not None:
            budgets.unfold_cap = args.unfold_cap
        if args.time_limit is not None:
            budgets.time_limit = args.time_limit
        cfg = RunConfig(
            args.mode, args.net, args.formulas, budgets, args.machine, args.dot, args.workers,
            timing=not (args.no_timing or env.get("SKELCHECK_NO_TIMING")),
        )
        return run(cfg)
    except InputError as e:
        print(f"skelcheck: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
