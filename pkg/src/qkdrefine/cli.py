"""Command-line front end.

Subcommands: ``rate``, ``threshold``, ``sweep``, ``curve``, ``mc``.
Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
2 invalid arguments, 3 no threshold found.

Every subcommand accepts ``--config FILE`` holding ``key = value`` lines
that mirror the long flags (``eta-a = 0.9``); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .analysis import find_es_threshold, find_eta_threshold, sweep, tradeoff_curve
from .information import DomainError
from .montecarlo import compare, simulate
from .rates import EcParams, coarse_error_for, key_rate
from .scenarios import Bb84Params, DdiParams, DiParams, di_bell_parameter

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_THRESHOLD = 3

SWEEP_COLUMNS = ("eta", "rate_coarse", "rate_refined", "e_c", "h_a", "i_pa")
CURVE_COLUMNS = ("e_s", "eta_threshold_coarse", "eta_threshold_refined")
MC_COLUMNS = ("quantity", "analytic", "empirical", "std_error", "z", "flagged")


class UsageError(Exception):
    pass


def fmt(x: Any) -> str:
    """Locale-independent 9-significant-digit rendering; empty for None."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return format(float(x), ".9g")


def _num(x: Any) -> Any:
    """Round floats to 9 significant digits for JSON output."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return fmt(x)
        return float(format(x, ".9g"))
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _dump_json(obj: Any) -> str:
    return json.dumps(_num(obj), indent=2) + "\n"


def _dump_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


# --- argument handling ---------------------------------------------------

def _add_common(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--config", type=Path, help="key = value file mirroring the flags")
    p.add_argument("--scheme", choices=("bb84", "ddi", "di"), required=False)
    p.add_argument("--f", type=float, default=1.0, help="error-correction inefficiency (>= 1)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)


def _add_point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ps", type=float, help="single-click fraction P_s (bb84)")
    p.add_argument("--eta", type=float, help="transmittance (ddi), or both links (di)")
    p.add_argument("--eta-a", type=float, help="source-to-Alice transmittance (di)")
    p.add_argument("--eta-b", type=float, help="source-to-Bob transmittance (di)")
    p.add_argument("--es", type=float, help="error rate among single clicks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdrefine",
        description="QKD key rates under coarse-grained and refined post-processing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="evaluate key rates at one operating point")
    _add_common(p, "json")
    _add_point(p)
    p.add_argument("--mode", choices=("coarse", "refined", "both"), default="both")

    p = sub.add_parser("threshold", help="find the eta or e_s threshold of positive key")
    _add_common(p, "json")
    _add_point(p)
    p.add_argument("--mode", choices=("coarse", "refined", "both"), default="both")
    p.add_argument("--vary", choices=("eta", "es"), default="eta")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("sweep", help="rate of both modes over an eta grid")
    _add_common(p, "csv")
    p.add_argument("--es", type=float, default=0.0)
    p.add_argument("--eta-min", type=float, default=0.5)
    p.add_argument("--eta-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)

    p = sub.add_parser("curve", help="tolerable (e_s, eta) boundary for both modes")
    _add_common(p, "csv")
    p.add_argument("--es-min", type=float, default=0.0)
    p.add_argument("--es-max", type=float, default=0.11)
    p.add_argument("--steps", type=int, default=23)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("mc", help="Monte Carlo validation against the closed forms")
    _add_common(p, "json")
    _add_point(p)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _read_config(path: Path) -> dict[str, str]:
    out = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    """Parse twice: once to locate ``--config``, then with its values as defaults."""
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    cfg = _read_config(args.config)
    sub = _subparser(parser, args.command)
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        if key in ("config", "help") or key not in actions:
            raise UsageError(f"unknown config key {key!r} for '{args.command}'")
        action = actions[key]
        try:
            value = action.type(raw) if action.type else raw
        except ValueError:
            raise UsageError(f"config key {key!r}: invalid value {raw!r}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config key {key!r}: {raw!r} not in {sorted(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)
    # a config-supplied value satisfies what would otherwise be missing
    return parser.parse_args(argv)


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise UsageError(f"scheme {args.scheme} requires {flags}")


def _check_flags(args) -> None:
    given = {n for n in ("ps", "eta", "eta_a", "eta_b") if getattr(args, n) is not None}
    allowed = {"bb84": {"ps"}, "ddi": {"eta"}, "di": {"eta", "eta_a", "eta_b"}}[args.scheme]
    extra = given - allowed
    if extra:
        wanted = " or ".join("--" + a.replace("_", "-") for a in sorted(allowed))
        flags = ", ".join("--" + e.replace("_", "-") for e in sorted(extra))
        raise UsageError(f"scheme {args.scheme} takes {wanted}, not {flags}")


def _params(args, skip: Optional[str] = None):
    """Build scheme parameters from flags; ``skip`` names the varied quantity."""
    scheme = args.scheme
    if scheme is None:
        raise UsageError("--scheme is required")
    _check_flags(args)
    es = 0.0 if skip == "es" else args.es
    if es is None:
        raise UsageError("--es is required")
    if scheme == "bb84":
        if skip != "eta":
            _need(args, "ps")
        return Bb84Params(args.ps if skip != "eta" else 1.0, es)
    if scheme == "ddi":
        if skip != "eta":
            _need(args, "eta")
        return DdiParams(args.eta if skip != "eta" else 1.0, es)
    if skip == "eta":
        return DiParams(1.0, 1.0, es)
    if args.eta is not None:
        if args.eta_a is not None or args.eta_b is not None:
            raise UsageError("give either --eta or --eta-a/--eta-b for di")
        return DiParams.symmetric(args.eta, es)
    _need(args, "eta_a", "eta_b")
    return DiParams(args.eta_a, args.eta_b, es)


def _params_dict(params) -> dict[str, float]:
    return dict(vars(params))


def _modes(mode: str) -> tuple[str, ...]:
    return ("coarse", "refined") if mode == "both" else (mode,)


# --- commands --------------------------------------------------------------

def cmd_rate(args) -> tuple[int, str]:
    params = _params(args)
    ec = EcParams(args.f)
    records = []
    for mode in _modes(args.mode):
        rb = key_rate(args.scheme, mode, params, ec)
        rec = {"scheme": args.scheme, "mode": mode, "params": _params_dict(params)}
        rec.update(rb.as_dict())
        rec["e_c"] = coarse_error_for(args.scheme, params)
        if args.scheme == "di":
            rec["s"] = di_bell_parameter(params)
        records.append(rec)
    if args.format == "json":
        return EXIT_OK, _dump_json(records)
    cols = ["scheme", "mode", *_params_dict(params), "h_a", "h_a_given_b", "i_pa", "f", "rate", "e_c"]
    if args.scheme == "di":
        cols.append("s")
    rows = [[r[c] if c in r else r["params"][c] for c in cols] for r in records]
    return EXIT_OK, _dump_csv(cols, rows)


def cmd_threshold(args) -> tuple[int, str]:
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    ec = EcParams(args.f)
    params = _params(args, skip=args.vary)
    records = []
    for mode in _modes(args.mode):
        if args.vary == "eta":
            res = find_eta_threshold(args.scheme, mode, params.e_single, args.tol, ec)
            fixed = {"e_s": params.e_single}
        else:
            x = {"bb84": "p_single", "ddi": "eta", "di": "eta_a"}[args.scheme]
            if args.scheme == "di" and params.eta_a != params.eta_b:
                raise UsageError("es thresholds for di use the symmetric line; pass --eta")
            res = find_es_threshold(args.scheme, mode, getattr(params, x), args.tol, ec)
            fixed = {"eta": getattr(params, x)}
        rec = {"scheme": args.scheme, "mode": mode, "vary": args.vary, **fixed, "found": res is not None}
        if res is not None:
            rec.update(root=res.root, bracket_lo=res.bracket_lo, bracket_hi=res.bracket_hi,
                       iterations=res.iterations, achieved_tolerance=res.achieved_tolerance)
            for w in res.warnings:
                print(f"warning: {mode}: {w}", file=sys.stderr)
        else:
            print(f"no threshold: {args.scheme}/{mode} rate is never positive", file=sys.stderr)
        records.append(rec)
    code = EXIT_OK if all(r["found"] for r in records) else EXIT_NO_THRESHOLD
    if args.format == "json":
        return code, _dump_json(records)
    cols = ["scheme", "mode", "vary", *fixed, "found", "root", "bracket_lo", "bracket_hi",
            "iterations", "achieved_tolerance"]
    return code, _dump_csv(cols, [[r.get(c) for c in cols] for r in records])


def cmd_sweep(args) -> tuple[int, str]:
    if args.scheme is None:
        raise UsageError("--scheme is required")
    rows = sweep(args.scheme, args.es, args.eta_min, args.eta_max, args.steps, EcParams(args.f))
    cols = list(SWEEP_COLUMNS) + (["s"] if args.scheme == "di" else [])
    table = [[r.eta, r.rate_coarse, r.rate_refined, r.e_c, r.h_a, r.i_pa_coarse]
             + ([r.s] if args.scheme == "di" else []) for r in rows]
    if args.format == "json":
        return EXIT_OK, _dump_json([dict(zip(cols, t)) for t in table])
    return EXIT_OK, _dump_csv(cols, table)


def cmd_curve(args) -> tuple[int, str]:
    if args.scheme is None:
        raise UsageError("--scheme is required")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    pts = tradeoff_curve(args.scheme, args.es_min, args.es_max, args.steps, args.tol, EcParams(args.f))
    table = [[p.e_s, p.eta_threshold_coarse, p.eta_threshold_refined] for p in pts]
    if args.format == "json":
        return EXIT_OK, _dump_json([dict(zip(CURVE_COLUMNS, t)) for t in table])
    return EXIT_OK, _dump_csv(CURVE_COLUMNS, table)


def cmd_mc(args) -> tuple[int, str]:
    params = _params(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    est = simulate(args.scheme, params, args.n, args.seed)
    report = compare(est, params, args.scheme)
    rows = [[r.quantity, r.analytic, r.empirical, r.std_error, r.z, r.flagged] for r in report.rows]
    if args.format == "csv":
        return EXIT_OK, _dump_csv(MC_COLUMNS, rows)
    out = {
        "scheme": est.scheme,
        "params": _params_dict(params),
        "n": est.n,
        "seed": est.seed,
        "generator": est.generator,
        "class_counts": est.class_counts,
        "e_c_hat": est.e_c_hat,
        "s_hat": est.s_hat,
        "joint_coarse_hat": est.joint_coarse_hat.probs.tolist(),
        "joint_refined_hat": est.joint_refined_hat.probs.tolist(),
        "alphabet_b_refined": [str(b) if isinstance(b, str) else f"{b[0]}{b[1]}"
                               for b in est.joint_refined_hat.alphabet_b],
        "std_errors": est.std_errors,
        "comparison": {
            "ok": report.ok,
            "z_limit": report.z_limit,
            "entropy_bias_allowance": report.entropy_bias_allowance,
            "rows": [dict(zip(MC_COLUMNS, r)) for r in rows],
        },
    }
    return EXIT_OK, _dump_json(out)


COMMANDS = {
    "rate": cmd_rate,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "curve": cmd_curve,
    "mc": cmd_mc,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        code, text = COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse reports usage errors with exit 2
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
