"""Command-line front end.

Subcommands: ``simulate`` (seeded Monte Carlo), ``exact`` (enumeration
oracle), ``sweep`` (exact vs Monte Carlo over a p grid), ``noncommute``
(order-dependence transcript) and ``serve`` (interactive session service).

Output formats: ``text`` for humans, ``record`` for a single JSON document
with stable snake_case keys, ``table`` for a tab-delimited table with a
fixed header row. A command run twice with identical flags (including
--seed) emits byte-identical record/table output.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys

from .exact import exact_expectations, exact_handedness
from .experiment import (
    ExperimentSpec,
    Fatigue,
    FixedP,
    Mode,
    NonlocalOptimal,
    PolicyError,
    ScriptExhaustedError,
    SidedP,
    UniformBob,
    run_experiment,
)
from .measure import WalkState, sequential_measure
from .stats import (
    BellReport,
    HandednessReport,
    PairCounts,
    bell_report,
    handedness_from_log,
)
from .strip import Letter, Orientation, local_view, ServingConfig

PAIR_DISPLAY = ("AB", "A'B", "AB'", "A'B'")
DEFAULT_TRIALS = 100_000


# --- output helpers -----------------------------------------------------------


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_table(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def parse_table(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    header = next(reader)
    return [dict(zip(header, (_parse_cell(cell) for cell in row))) for row in reader if row]


def _report_table(scoped_reports: list[tuple[str, BellReport]]) -> str:
    docs = [(scope, report.to_dict()) for scope, report in scoped_reports]
    header = ["scope", *docs[0][1].keys()]
    rows = [[scope, *doc.values()] for scope, doc in docs]
    return format_table(header, rows)


def _print_record(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2, allow_nan=False))


def _bell_text(report: BellReport, heading: str) -> list[str]:
    marker = " (exact)" if report.exact else ""
    lines = [heading]
    for name, est in zip(PAIR_DISPLAY, report.correlators):
        if not est.defined and not report.exact:
            lines.append(f"  <{name}>  undefined (no trials in this pair)")
        elif report.exact:
            lines.append(f"  <{name}> = {est.value:+.6g}{marker}")
        else:
            lines.append(f"  <{name}> = {est.value:+.6f} +/- {est.stderr:.6f}  (n={est.n})")
    if report.defined:
        if report.exact:
            lines.append(f"  S = {report.s_value:.6g}{marker}   p-hat = {report.p_hat:.6g}")
        else:
            lines.append(f"  S = {report.s_value:.6f} +/- {report.s_stderr:.6f}   p-hat = {report.p_hat:.6f}")
        z = report.violation_z
        z_text = f"{z:+.2f}" if z is not None else "n/a (zero spread)"
        if not report.exact:
            lines.append(f"  classical bound {report.classical_bound:g}; violation z = {z_text}")
    else:
        lines.append("  S undefined (some pair was never measured)")
    return lines


def _handedness_text(report: HandednessReport) -> list[str]:
    lines = ["Handedness (per plate side):"]
    for label, side in (("left", report.left), ("right", report.right)):
        if side.defined:
            marker = " (exact)" if side.exact else f" +/- {side.s_stderr:.6f}"
            lines.append(f"  S_{label} = {side.s_value:.6g}{marker}   p-hat = {side.p_hat:.6g}")
        else:
            lines.append(f"  S_{label} undefined")
    if report.verdict.value == "inconclusive":
        lines.append(f"  verdict: inconclusive (|difference| <= {report.sigma_threshold:g} sigma)")
    else:
        lines.append(
            f"  verdict: {report.verdict.value} (difference {report.difference:+.6g}"
            f" +/- {report.difference_stderr:.6g})"
        )
    return lines


# --- policy flags -------------------------------------------------------------


def _add_policy_flags(sub: argparse.ArgumentParser, with_fatigue: bool = True) -> None:
    sub.add_argument("--p", type=float, default=None, help="constant acceptance probability")
    sub.add_argument("--p-left", type=float, default=None, help="acceptance probability for left servings")
    sub.add_argument("--p-right", type=float, default=None, help="acceptance probability for right servings")
    if with_fatigue:
        sub.add_argument("--fatigue-p0", type=float, default=None, help="baseline acceptance before any fatigue")
        sub.add_argument("--fatigue-tau", type=float, default=None, help="rejections scale of the fatigue ramp")


def _check_prob(parser: argparse.ArgumentParser, name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        parser.error(f"{name} must be in [0, 1], got {value}")


def _alice_policy(args, parser: argparse.ArgumentParser, mode: Mode, allow_fatigue: bool):
    p_given = args.p is not None
    sided_given = args.p_left is not None or args.p_right is not None
    fatigue_given = allow_fatigue and (args.fatigue_p0 is not None or args.fatigue_tau is not None)
    groups = sum((p_given, sided_given, fatigue_given))
    if groups == 0:
        parser.error("a policy is required: --p, --p-left/--p-right, or --fatigue-p0/--fatigue-tau")
    if groups > 1:
        parser.error("--p, --p-left/--p-right and --fatigue-p0/--fatigue-tau are mutually exclusive")

    if p_given:
        _check_prob(parser, "--p", args.p)
        return NonlocalOptimal(args.p) if mode is Mode.NONLOCAL else FixedP(args.p)
    if sided_given:
        if args.p_left is None or args.p_right is None:
            parser.error("--p-left and --p-right must be given together")
        if mode is Mode.NONLOCAL:
            parser.error("nonlocal mode takes a single --p")
        _check_prob(parser, "--p-left", args.p_left)
        _check_prob(parser, "--p-right", args.p_right)
        return SidedP(args.p_left, args.p_right)
    if args.fatigue_p0 is None or args.fatigue_tau is None:
        parser.error("--fatigue-p0 and --fatigue-tau must be given together")
    if mode is Mode.NONLOCAL:
        parser.error("nonlocal mode takes a single --p")
    _check_prob(parser, "--fatigue-p0", args.fatigue_p0)
    if not args.fatigue_tau > 0:
        parser.error(f"--fatigue-tau must be positive, got {args.fatigue_tau}")
    return Fatigue(args.fatigue_p0, args.fatigue_tau)


def _policy_doc(policy) -> dict:
    if isinstance(policy, FixedP):
        return {"kind": "fixed", "p": policy.p}
    if isinstance(policy, NonlocalOptimal):
        return {"kind": "nonlocal_optimal", "p": policy.p}
    if isinstance(policy, SidedP):
        return {"kind": "sided", "p_left": policy.p_left, "p_right": policy.p_right}
    return {"kind": "fatigue", "p0": policy.p0, "tau": policy.tau}


def _resolve_seed(args) -> int:
    # No environment override on purpose: seeds are explicit, or fresh entropy.
    return args.seed if args.seed is not None else secrets.randbits(64)


# --- subcommands ---------------------------------------------------------------


def _cmd_simulate(args, parser: argparse.ArgumentParser) -> int:
    mode = Mode(args.mode)
    policy = _alice_policy(args, parser, mode, allow_fatigue=True)
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    seed = _resolve_seed(args)
    spec = ExperimentSpec(args.trials, seed, policy, UniformBob(), mode)
    log = run_experiment(spec)
    report = bell_report(PairCounts.from_log(log))
    sided = isinstance(policy, (SidedP, Fatigue))
    hand = handedness_from_log(log) if sided else None

    if args.log is not None:
        with open(args.log, "w", encoding="utf-8") as fp:
            log.write_jsonl(fp)

    params = {
        "trials": args.trials,
        "seed": seed,
        "mode": mode.value,
        "policy": _policy_doc(policy),
    }
    if args.format == "record":
        doc = {
            "command": "simulate",
            "params": params,
            "bell": report.to_dict(),
            "handedness": hand.to_dict() if hand is not None else None,
        }
        _print_record(doc)
    elif args.format == "table":
        scoped = [("overall", report)]
        if hand is not None:
            scoped += [("left", hand.left), ("right", hand.right)]
        print(_report_table(scoped), end="")
    else:
        lines = [f"Monte Carlo Bell run: {args.trials} trials, seed {seed}, {mode.value} mode"]
        lines += _bell_text(report, "Correlators:")
        if hand is not None:
            lines += _handedness_text(hand)
        print("\n".join(lines))
    return 0


def _cmd_exact(args, parser: argparse.ArgumentParser) -> int:
    mode = Mode(args.mode)
    policy = _alice_policy(args, parser, mode, allow_fatigue=False)
    if isinstance(policy, Fatigue):
        parser.error("fatigue is history-dependent and cannot be enumerated exactly")
    expectations = exact_expectations(policy, mode)
    report = expectations.bell_report()
    sided = isinstance(policy, SidedP)
    hand = exact_handedness(policy, mode) if sided else None

    params = {"mode": mode.value, "policy": _policy_doc(policy)}
    if args.format == "record":
        doc = {
            "command": "exact",
            "params": params,
            "bell": report.to_dict(),
            "handedness": hand.to_dict() if hand is not None else None,
        }
        _print_record(doc)
    elif args.format == "table":
        scoped = [("overall", report)]
        if hand is not None:
            scoped += [("left", hand.left), ("right", hand.right)]
        print(_report_table(scoped), end="")
    else:
        lines = [f"Exact expectations ({mode.value} mode)"]
        lines += _bell_text(report, "Correlators:")
        if hand is not None:
            lines += _handedness_text(hand)
        print("\n".join(lines))
    return 0


def _cmd_sweep(args, parser: argparse.ArgumentParser) -> int:
    if not 0.0 <= args.p_from <= args.p_to <= 1.0:
        parser.error(f"need 0 <= --p-from <= --p-to <= 1, got {args.p_from}..{args.p_to}")
    if args.steps < 2:
        parser.error(f"--steps must be >= 2, got {args.steps}")
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    seed = _resolve_seed(args)

    rows = []
    for i in range(args.steps):
        p = args.p_from + i * (args.p_to - args.p_from) / (args.steps - 1)
        s_exact = float(exact_expectations(FixedP(p)).s)
        # Same seed on every row: common random numbers across the grid.
        spec = ExperimentSpec(args.trials, seed, FixedP(p), UniformBob(), Mode.STANDARD)
        mc = bell_report(PairCounts.from_log(run_experiment(spec)))
        rows.append({"p": p, "s_exact": s_exact, "s_mc": mc.s_value, "s_stderr": mc.s_stderr, "n": args.trials})

    if args.format == "record":
        _print_record({
            "command": "sweep",
            "params": {"p_from": args.p_from, "p_to": args.p_to, "steps": args.steps,
                       "trials": args.trials, "seed": seed},
            "rows": rows,
        })
    elif args.format == "table":
        header = ["p", "s_exact", "s_mc", "s_stderr", "n"]
        print(format_table(header, [[row[k] for k in header] for row in rows]), end="")
    else:
        print(f"Linear law sweep: {args.trials} trials per point, seed {seed}")
        print(f"  {'p':>8s} {'S exact':>10s} {'S mc':>10s} {'stderr':>10s}")
        for row in rows:
            print(f"  {row['p']:8.4f} {row['s_exact']:10.4f} {row['s_mc']:10.4f} {row['s_stderr']:10.4f}")
    return 0


def _cmd_noncommute(args, parser: argparse.ArgumentParser) -> int:
    start = WalkState(2, Orientation.NORMAL)
    view = local_view(ServingConfig(2, Orientation.NORMAL))
    print(f"Reference serving: front {view.front} (cell 2), {view.left} at left, {view.right} at right.")
    print("Measuring moves the observer, so the order of A and A' matters:\n")
    for order in ((Letter.A_PRIME, Letter.A), (Letter.A, Letter.A_PRIME)):
        names = " then ".join(letter.value for letter in order)
        print(f"Order {names}:")
        state = start
        for letter in order:
            result, next_state = sequential_measure(state, letter)
            if next_state.position == state.position:
                print(f"  read cell {state.position}: {result.letter.value} = {result.value:+d}")
            else:
                print(
                    f"  walk 2 segments clockwise to cell {next_state.position}: "
                    f"{result.letter.value} = {result.value:+d}"
                )
            state = next_state
        print(f"  end position: cell {state.position}\n")
    print("Same strip, same serving; the values depend on the order, so A and A' do not commute.")
    return 0


def _cmd_serve(args, parser: argparse.ArgumentParser) -> int:
    import uvicorn

    from .service import create_app

    try:
        uvicorn.run(create_app(), host=args.bind, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"error: could not bind {args.bind}:{args.port}: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # uvicorn reports startup failures this way
        if exc.code:
            print(f"error: server failed to start on {args.bind}:{args.port}", file=sys.stderr)
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moebius-bell",
        description="Bell-test simulator on a four-segment one-sided strip",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="seeded Monte Carlo run")
    simulate.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    simulate.add_argument("--seed", type=int, default=None, help="omit for fresh entropy")
    simulate.add_argument("--mode", choices=[m.value for m in Mode], default="standard")
    simulate.add_argument("--format", choices=["text", "record", "table"], default="text")
    simulate.add_argument("--log", default=None, metavar="PATH", help="write the trial log as JSON lines")
    _add_policy_flags(simulate)
    simulate.set_defaults(func=_cmd_simulate, subparser=simulate)

    exact = sub.add_parser("exact", help="exact expectations by enumeration")
    exact.add_argument("--mode", choices=[m.value for m in Mode], default="standard")
    exact.add_argument("--format", choices=["text", "record", "table"], default="text")
    _add_policy_flags(exact, with_fatigue=False)
    exact.set_defaults(func=_cmd_exact, subparser=exact)

    sweep = sub.add_parser("sweep", help="exact vs Monte Carlo over a p grid")
    sweep.add_argument("--p-from", type=float, default=0.0)
    sweep.add_argument("--p-to", type=float, default=1.0)
    sweep.add_argument("--steps", type=int, default=11)
    sweep.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--format", choices=["text", "record", "table"], default="text")
    sweep.set_defaults(func=_cmd_sweep, subparser=sweep)

    noncommute = sub.add_parser("noncommute", help="order-dependence transcript")
    noncommute.set_defaults(func=_cmd_noncommute, subparser=noncommute)

    serve = sub.add_parser("serve", help="run the interactive session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--bind", default="127.0.0.1")
    serve.set_defaults(func=_cmd_serve, subparser=serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, args.subparser)
    except ScriptExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PolicyError as exc:
        parser.error(str(exc))
        return 2  # unreachable; parser.error raises SystemExit(2)


if __name__ == "__main__":
    sys.exit(main())
