"""Command-line interface.

Subcommands:
  eval          cost tails and expected cost of a fixed test order
  opt-na        best non-adaptive policy (brute force, or the approximation
                scheme in enumerate/guided mode)
  opt-adaptive  optimal adaptive expected cost (ratio rule or reference DP)
  gap           adaptivity-gap benchmark sweep (CSV, optional figure)
  certify       window certification of a rebuilt policy against a reference
  dominate      two-sided dominance check between index sets

Single results are JSON on stdout, sweeps are CSV; both carry a schema
version, and every report embeds the fully resolved configuration so runs can
be reproduced.  Exit codes: 0 success, 2 validation error, 3 enumeration
budget exceeded.  Instance files use the JSON format
``{"k": int, "p": [...], "c": [...]}`` (``c`` optional, default all-1);
variables are renumbered internally by ascending probability, but all
policies read and printed by the CLI use the file's original 1-based indices.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass

from . import adaptive, bruteforce, gapbench, ptas as ptas_mod
from .core import (
    BudgetExceededError,
    Instance,
    PartialPolicy,
    SbfeError,
    ValidationError,
    load_instance,
)
from .dominance import dominates, unit_fraction
from .evaluation import cost_tail, simulate, fixed_order

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one invocation, embedded in every report."""

    command: str
    instance_path: str | None = None
    policy: tuple[int, ...] | None = None
    method: str | None = None
    eps_target: float | None = None
    eps_int_override: str | None = None
    eps_int: str | None = None
    seed: int = 0
    trials: int = 0
    budget: int | None = None
    output_format: str = "json"
    case_override: bool = False
    reference: str | None = None
    a: int | None = None
    a_prime: int | None = None
    t_list: tuple[int, ...] | None = None
    m: int | None = None
    eps: float | None = None
    ones_known: int = 0
    zeros_known: int = 0
    cap: int | None = None
    v: tuple[int, ...] | None = None
    vstar: tuple[int, ...] | None = None
    n: int | None = None
    output: str | None = None
    plot: str | None = None


class _Indexing:
    """Translation between file-order indices and internal sorted indices."""

    def __init__(self, index_map: tuple[int, ...]):
        self.to_original = index_map  # sorted position (1-based) -> original
        self.to_internal = {orig: j for j, orig in enumerate(index_map, 1)}

    def internal_policy(self, original: tuple[int, ...]) -> PartialPolicy:
        try:
            return PartialPolicy(tuple(self.to_internal[i] for i in original))
        except KeyError as exc:
            raise ValidationError(
                f"policy index {exc.args[0]} does not name an instance variable"
            ) from exc

    def original_policy(self, pi: PartialPolicy) -> list[int]:
        return [self.to_original[i - 1] for i in pi.order]


def _parse_index_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise ValidationError(f"cannot parse index list {text!r}") from exc


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    output = getattr(args, "output", None)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _report(config: RunConfig, result: dict) -> dict:
    cfg = {k: v for k, v in asdict(config).items()}
    for key, value in cfg.items():
        if isinstance(value, tuple):
            cfg[key] = list(value)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config": cfg,
        "result": result,
    }


def _load(args) -> tuple[Instance, _Indexing]:
    inst, index_map = load_instance(args.instance)
    return inst, _Indexing(index_map)


def _resolve_reference(args, inst: Instance, idx: _Indexing) -> PartialPolicy:
    if args.reference is None:
        raise ValidationError("this method requires --reference")
    if args.reference == "extreme":
        return ptas_mod.extreme_first_policy(inst)
    ref = idx.internal_policy(_parse_index_list(args.reference))
    return ref


def _cmd_eval(args) -> int:
    inst, idx = _load(args)
    pi = idx.internal_policy(_parse_index_list(args.policy))
    config = RunConfig(
        command="eval",
        instance_path=args.instance,
        policy=_parse_index_list(args.policy),
        ones_known=args.ones_known,
        zeros_known=args.zeros_known,
        seed=args.seed,
        trials=args.trials,
        output=args.output,
    )
    td = cost_tail(
        inst, pi, ones_known=args.ones_known, zeros_known=args.zeros_known
    )
    result = {
        "expected": td.expected,
        "tail": list(td.tail),
        "undetermined_probability": td.undetermined,
    }
    if args.trials:
        mean, half = simulate(inst, fixed_order(pi), args.trials, args.seed)
        result["simulated_mean"] = mean
        result["simulated_half_width_95"] = half
    _emit(_report(config, result), args)
    return 0


def _cmd_opt_na(args) -> int:
    inst, idx = _load(args)
    config = RunConfig(
        command="opt-na",
        instance_path=args.instance,
        method=args.method,
        eps_target=args.eps,
        eps_int_override=args.eps_int,
        budget=args.budget,
        cap=args.cap,
        case_override=args.force_case2,
        reference=args.reference,
        output=args.output,
    )
    if args.method == "brute":
        found = bruteforce.best_nonadaptive(inst, cap=args.cap)
        result = {
            "policy": idx.original_policy(found.policy),
            "expected": found.cost,
        }
        _emit(_report(config, result), args)
        return 0
    mode = "enumerate" if args.method == "ptas" else "guided"
    reference = _resolve_reference(args, inst, idx) if mode == "guided" else None
    if args.eps is None and args.eps_int is None:
        raise ValidationError(f"--method {args.method} requires --eps or --eps-int")
    out = ptas_mod.ptas(
        inst,
        args.eps,
        mode=mode,
        reference=reference,
        eps_int=args.eps_int,
        budget=args.budget,
        force_case2=args.force_case2,
    )
    config = RunConfig(
        **{**asdict(config), "eps_int": str(out.eps_int)}
    )
    result = {
        "policy": idx.original_policy(out.policy),
        "expected": out.expected,
        "shift": out.shift,
        "thresholds": list(out.thresholds),
        "all_certified": out.all_certified,
    }
    if mode == "guided":
        result["reference_policy"] = idx.original_policy(reference)
        result["certified_windows"] = [
            {"a": r.a, "a_prime": r.a_prime, "passed": r.passed}
            for r in out.reports
        ]
    _emit(_report(config, result), args)
    return 0


def _cmd_opt_adaptive(args) -> int:
    inst, _ = _load(args)
    config = RunConfig(
        command="opt-adaptive",
        instance_path=args.instance,
        method=args.method,
        cap=args.cap,
        output=args.output,
    )
    if args.method == "ratio":
        cap = args.cap if args.cap is not None else 20
        value = adaptive.optimal_expected_cost(inst, cap=cap)
    else:
        cap = args.cap if args.cap is not None else 15
        value = bruteforce.best_adaptive_cost(inst, cap=cap)
    _emit(_report(config, {"expected": value}), args)
    return 0


def _cmd_gap(args) -> int:
    config = RunConfig(
        command="gap",
        t_list=tuple(args.t_list),
        m=args.m,
        eps=args.eps,
        output_format="csv",
        output=args.output,
        plot=args.plot,
    )
    records = gapbench.gap_table(args.t_list, args.m, args.eps)
    cfg = {k: v for k, v in asdict(config).items()}
    cfg["t_list"] = list(cfg["t_list"])
    comments = [
        f"schema_version={SCHEMA_VERSION}",
        "config=" + json.dumps(cfg, sort_keys=True),
    ]
    buf = io.StringIO()
    gapbench.write_gap_csv(records, buf, comments=comments)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.plot:
        from .plots import gap_convergence_figure

        gap_convergence_figure(records, args.plot)
    return 0


def _cmd_certify(args) -> int:
    inst, idx = _load(args)
    reference = _resolve_reference(args, inst, idx)
    eps = unit_fraction(args.eps_int)
    config = RunConfig(
        command="certify",
        instance_path=args.instance,
        a=args.a,
        a_prime=args.a_prime,
        eps_int_override=args.eps_int,
        eps_int=str(eps),
        case_override=args.force_case2,
        reference=args.reference,
        output=args.output,
        plot=args.plot,
    )
    window = ptas_mod.CostWindow(args.a, args.a_prime, eps)
    policy, report = ptas_mod.certify_bounded(
        inst, reference, window, force_case2=args.force_case2
    )
    result = {
        "policy": idx.original_policy(policy),
        "reference_policy": idx.original_policy(reference),
        "case": report.case_tag,
        "bucket_sizes": list(report.sizes),
        "pairs": [
            {"l": ell, "policy_tail": lhs, "reference_tail_dilated": rhs}
            for ell, lhs, rhs in report.pairs
        ],
        "passed": report.passed,
    }
    _emit(_report(config, result), args)
    if args.plot:
        from .plots import certify_tails_figure

        certify_tails_figure(report, args.plot)
    return 0


def _cmd_dominate(args) -> int:
    v = _parse_index_list(args.v)
    vstar = _parse_index_list(args.vstar)
    config = RunConfig(command="dominate", v=v, vstar=vstar, n=args.n, output=args.output)
    result = {"dominates": dominates(v, vstar, args.n)}
    _emit(_report(config, result), args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbfe",
        description="Sequential testing of k-of-n functions: evaluate, optimize, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="cost tails of a fixed test order")
    p_eval.add_argument("--instance", required=True)
    p_eval.add_argument("--policy", required=True, help="comma-separated 1-based indices")
    p_eval.add_argument("--ones-known", type=int, default=0)
    p_eval.add_argument("--zeros-known", type=int, default=0)
    p_eval.add_argument("--trials", type=int, default=0, help="add a Monte Carlo check")
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--output")
    p_eval.set_defaults(func=_cmd_eval)

    p_na = sub.add_parser("opt-na", help="best non-adaptive policy")
    p_na.add_argument("--instance", required=True)
    p_na.add_argument("--method", choices=("brute", "ptas", "ptas-guided"), required=True)
    p_na.add_argument("--eps", type=float, help="target approximation slack")
    p_na.add_argument("--eps-int", help='working accuracy override, e.g. "1/3"')
    p_na.add_argument("--budget", type=int, help="candidate-evaluation budget")
    p_na.add_argument("--cap", type=int, default=8, help="size cap for --method brute")
    p_na.add_argument("--reference", help='policy list or "extreme" (guided mode)')
    p_na.add_argument("--force-case2", action="store_true", help="test-only case override")
    p_na.add_argument("--output")
    p_na.set_defaults(func=_cmd_opt_na)

    p_ad = sub.add_parser("opt-adaptive", help="optimal adaptive expected cost")
    p_ad.add_argument("--instance", required=True)
    p_ad.add_argument("--method", choices=("ratio", "dp"), required=True)
    p_ad.add_argument("--cap", type=int)
    p_ad.add_argument("--output")
    p_ad.set_defaults(func=_cmd_opt_adaptive)

    p_gap = sub.add_parser("gap", help="adaptivity-gap benchmark sweep")
    p_gap.add_argument("--t-list", type=int, nargs="+", required=True)
    p_gap.add_argument("--m", type=int, required=True)
    p_gap.add_argument("--eps", type=float, required=True)
    p_gap.add_argument("--output", help="CSV path (default stdout)")
    p_gap.add_argument("--plot", help="PNG path for the convergence figure")
    p_gap.set_defaults(func=_cmd_gap)

    p_cert = sub.add_parser("certify", help="certify a rebuilt window policy")
    p_cert.add_argument("--instance", required=True)
    p_cert.add_argument("--a", type=int, required=True)
    p_cert.add_argument("--a-prime", type=int, required=True)
    p_cert.add_argument("--eps-int", required=True, help='e.g. "1/2"')
    p_cert.add_argument("--reference", required=True, help='policy list or "extreme"')
    p_cert.add_argument("--force-case2", action="store_true")
    p_cert.add_argument("--plot", help="PNG path for the tail comparison figure")
    p_cert.add_argument("--output")
    p_cert.set_defaults(func=_cmd_certify)

    p_dom = sub.add_parser("dominate", help="two-sided dominance check")
    p_dom.add_argument("--v", required=True, help="comma-separated indices")
    p_dom.add_argument("--vstar", required=True)
    p_dom.add_argument("--n", type=int, required=True, help="ground-set size")
    p_dom.add_argument("--output")
    p_dom.set_defaults(func=_cmd_dominate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SbfeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
