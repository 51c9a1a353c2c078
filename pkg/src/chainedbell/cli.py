"""Command-line front end.

Exit codes: 0 ok, 2 usage or parse error, 3 solver failure, 4 a model
predicate failed. Verdicts such as ADVANTAGE-EXCLUDED are data and never
change the exit code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import chained as cb
from . import decomposition as dec
from .boxes import ATOL
from .experiment import UndersampledError, estimate_chained, sample_rounds
from .lp import SolverError, lp_max_advantage
from .modelio import ModelFormatError, dumps_model, load_model
from .quantum import EntangledPairState

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_PREDICATE = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def emit_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json-lines":
        return "".join(json.dumps(r) + "\n" for r in rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for r in rows:
        writer.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def _alpha(text: str) -> float:
    v = float(text)
    if not (0.0 <= v <= 1.0):
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1], got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _int_at_least(lo):
    def parse(text: str) -> int:
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"expected an integer >= {lo}, got {text}")
        return v

    return parse


def _confidence(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"confidence must lie in (0, 1), got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "json-lines"], default="csv")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--tolerance", type=_positive_float, default=None)

    p = _Parser(prog="chainedbell", description="Chained Bell measures and predictive-advantage bounds")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("chained", parents=[common], help="I_N for a state and equally spaced settings")
    c.add_argument("--alpha", type=_alpha, default=1 / math.sqrt(2))
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=_int_at_least(2))
    g.add_argument("--epsilon", type=_positive_float)
    c.add_argument("--value-source", choices=["trace", "closed-form", "closed-form-printed"], default="trace")

    f = sub.add_parser("feasibility", parents=[common], help="LP bound on predictive advantage")
    f.add_argument("--alpha", type=_alpha, default=1 / math.sqrt(2))
    f.add_argument("--epsilon", type=_positive_float, required=True)
    f.add_argument("--z", "--z-count", dest="z", type=_int_at_least(1), default=2)
    f.add_argument("--a-star", type=_int_at_least(0), default=None)
    f.add_argument("--no-reduce", action="store_true", help="solve the full z-atom program")

    s = sub.add_parser("certify", parents=[common], help="sample rounds and certify I_N")
    s.add_argument("--alpha", type=_alpha, default=1 / math.sqrt(2))
    s.add_argument("--n", type=_int_at_least(2), required=True)
    s.add_argument("--rounds", type=_int_at_least(1), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--confidence", type=_confidence, default=0.99)
    s.add_argument("--schedule", choices=["chain-only", "uniform"], default="chain-only")
    s.add_argument("--method", choices=["hoeffding", "clopper-pearson"], default="hoeffding")
    s.add_argument("--trials", help="also write the trial log (CSV) here")

    m = sub.add_parser("checkmodel", parents=[common], help="run decomposition predicates on a model file")
    m.add_argument("path")

    k = sub.add_parser("make-model", parents=[common], help="write an example model file")
    k.add_argument("--kind", choices=["identity", "product", "lp"], required=True)
    k.add_argument("--alpha", type=_alpha, default=1 / math.sqrt(2))
    k.add_argument("--n", type=_int_at_least(2), default=2)
    k.add_argument("--z", type=_int_at_least(1), default=2)
    return p


def cmd_chained(args) -> tuple[int, str]:
    state = EntangledPairState(args.alpha)
    if args.n is not None:
        n, settings = args.n, cb.equally_spaced_settings(args.n)
    else:
        n, settings = cb.settings_for_epsilon(args.epsilon)
    report = cb.chained_value_trace(state, settings)
    corrected = cb.chained_value_closed_form(state, settings, "corrected")
    printed = cb.chained_value_closed_form(state, settings, "printed")
    value = {"trace": report.value, "closed-form": corrected, "closed-form-printed": printed}[args.value_source]
    row = {
        "n": n,
        "alpha": state.alpha,
        "epsilon": args.epsilon,
        "value_source": args.value_source,
        "value": value,
        "trace_value": report.value,
        "closed_form_value": corrected,
        "closed_form_printed_value": printed,
        "quantum_upper_bound": report.quantum_upper_bound,
        "small_angle_bound": cb.small_angle_bound(n),
        "local_lower_bound": report.local_lower_bound,
    }
    if args.format == "json-lines":
        row["terms"] = list(report.terms)
    else:
        row["terms"] = ";".join(_fmt(t) for t in report.terms)
    return EXIT_OK, emit_rows([row], args.format)


def cmd_feasibility(args) -> tuple[int, str]:
    state = EntangledPairState(args.alpha)
    n, settings = cb.settings_for_epsilon(args.epsilon)
    if args.a_star is not None and args.a_star >= n:
        raise UsageError(f"--a-star must be below n={n}")
    res = lp_max_advantage(
        state, settings, args.z, a_star=args.a_star, reduce=not args.no_reduce,
        tol=args.tolerance or 1e-7,
    )
    row = {
        "alpha": state.alpha,
        "epsilon": args.epsilon,
        "n": n,
        "z_count": args.z,
        "t_star": res.t_star,
        "a_star": res.a_star,
        "quantum_bound": res.quantum_bound,
        "verdict": res.verdict(args.epsilon),
    }
    return EXIT_OK, emit_rows([row], args.format)


def cmd_certify(args) -> tuple[int, str]:
    state = EntangledPairState(args.alpha)
    settings = cb.equally_spaced_settings(args.n)
    log = sample_rounds(state, settings, args.rounds, args.seed, args.schedule)
    if args.trials:
        with open(args.trials, "w", newline="") as fh:
            fh.write(log.to_csv())
    cert = estimate_chained(log, settings, args.confidence, args.method)
    true_value = cb.chained_value_trace(state, settings).value
    return EXIT_OK, cert.to_text() + f"i_n_born={true_value:.17g}\n"


def cmd_checkmodel(args) -> tuple[int, str]:
    tol = args.tolerance or ATOL
    model = load_model(args.path, atol=max(tol, ATOL))
    lines = []
    ok = True

    def line(name, check, extra=""):
        nonlocal ok
        ok = ok and bool(check)
        status = "PASS" if check else "FAIL"
        lines.append(f"{name} {status} {check.deviation:.3e}{(' ' + extra) if extra else ''}")

    norm = [dec.check_normalization(b, tol) for b in model.boxes]
    line("normalization", max(norm, key=lambda c: c.deviation))
    ns = [dec.check_no_signalling(b, tol) for b in model.boxes]
    ns_worst = max(ns, key=lambda c: c.deviation)
    line("no-signalling", ns_worst)
    line("no-conspiracy", dec.check_no_conspiracy(model))
    line("averaging", dec.averages_to_quantum(model, tol))
    adv = dec.advantage(model)
    z, a, x = adv.witness
    lines.append(f"advantage PASS {adv.epsilon_achieved:.17g} witness z={z} a={a} x={x}")
    if ns_worst:
        bkp = dec.bkp_bound_check(model, tol)
        line("bkp", dec.Check(bkp.passed, max(0.0, -min(bkp.slack))), f"min_slack={min(bkp.slack):.17g}")
    else:
        ok = False
        lines.append("bkp FAIL nan BKP bound presupposes no-signalling")
    return (EXIT_OK if ok else EXIT_PREDICATE), "\n".join(lines) + "\n"


def cmd_make_model(args) -> tuple[int, str]:
    settings = cb.equally_spaced_settings(args.n)
    if args.kind == "identity":
        model = dec.identity_model(EntangledPairState(args.alpha), settings)
    elif args.kind == "product":
        if args.alpha not in (0.0, 1.0):
            raise UsageError("--kind product needs --alpha 0 or 1")
        model = dec.construct_product_state_model(args.alpha, settings)
    else:
        model = lp_max_advantage(EntangledPairState(args.alpha), settings, args.z).model
    return EXIT_OK, dumps_model(model)


COMMANDS = {
    "chained": cmd_chained,
    "feasibility": cmd_feasibility,
    "certify": cmd_certify,
    "checkmodel": cmd_checkmodel,
    "make-model": cmd_make_model,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"chainedbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelFormatError as exc:
        print(f"chainedbell: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UndersampledError as exc:
        print(f"chainedbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"chainedbell: solver error: {exc} residuals={exc.residuals}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"chainedbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
