"""Command-line interface: ``pairpaths <command> [options]``.

Exit codes: 0 success, 2 bad user input, 3 environment/I-O failure.
JSON output always carries ``schema_version``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import dsl
from .circuit import SchemeError, builtin_scheme, with_phase, with_splitter
from .evolution import (
    BellKind,
    EvolutionError,
    bell_overlap,
    evolve,
    outcome_distribution,
    postselect_survivors,
)
from .lhv import (
    Behavior,
    LHVError,
    behavior_from_quantum,
    contradiction_fraction,
    lhv_feasible,
)
from .sampling import DEFAULT_SEED, frequencies, sample
from .state import DEFAULT_TOLERANCE, JointState, Pair, Path

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_ENV = 0, 2, 3

BELL_FIELDS = {
    BellKind.PSI_PLUS: "psiPlusOverlap",
    BellKind.PSI_MINUS: "psiMinusOverlap",
    BellKind.PHI_PLUS: "phiPlusOverlap",
    BellKind.PHI_MINUS: "phiMinusOverlap",
}

SWEEP_PARAMS = ("bs1", "bs2", "bs3", "phase_ab", "phase_cd")


class UsageError(Exception):
    pass


class EnvError(Exception):
    pass


def _sig(x: float) -> float:
    return float(f"{x:.12g}") + 0.0


# --- input helpers ----------------------------------------------------------

def load_scheme(ref: str):
    if ref in ("a", "b"):
        return builtin_scheme(ref)
    try:
        with open(ref, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise UsageError(f"{ref}: file not found") from None
    except OSError as exc:
        raise UsageError(f"{ref}: {exc.strerror or exc}") from None
    scheme, diags = dsl.parse_with_diagnostics(data)
    if scheme is None:
        raise UsageError("\n".join(f"{ref}:{d}" for d in diags))
    return scheme


def load_behavior(path: str) -> Behavior:
    try:
        with open(path, encoding="utf-8") as fh:
            return Behavior.from_json(fh.read())
    except FileNotFoundError:
        raise UsageError(f"{path}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    except LHVError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _atom(text: str) -> float:
    text = text.strip()
    sign = -1.0 if text.startswith("-") else 1.0
    body = text.lstrip("+-")
    if body == "sqrt2":
        return sign * math.sqrt(2)
    if body.endswith("pi"):
        coef = body[:-2]
        return sign * (float(coef) if coef else 1.0) * math.pi
    return sign * float(body)


def parse_value(text: str) -> float:
    """Number for the command line: decimals, ``pi``, ``3pi/4``, ``1/sqrt2``."""
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            if den.strip() == "sqrt2":
                return _atom(num) * math.sqrt(0.5)
            return _atom(num) / _atom(den)
        return _atom(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def parse_grid(spec: str) -> tuple[str, str | None, list[float]]:
    """``[wing.]name=start:stop:step`` or ``[wing.]name=v1,v2,...``."""
    if "=" not in spec:
        raise UsageError(f"parameter spec {spec!r} needs the form name=start:stop:step")
    name, values = spec.split("=", 1)
    wing = None
    if "." in name:
        wing, name = name.split(".", 1)
        if wing not in ("minus", "plus"):
            raise UsageError(f"unknown wing {wing!r}")
    if name not in SWEEP_PARAMS:
        raise UsageError(f"unknown parameter {name!r}; expected one of {', '.join(SWEEP_PARAMS)}")
    if ":" in values:
        parts = values.split(":")
        if len(parts) != 3:
            raise UsageError("grid must be start:stop:step")
        start, stop, step = (parse_value(p) for p in parts)
        if step <= 0 or not math.isfinite(step):
            raise UsageError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count > 1_000_000:
            raise UsageError("grid too large")
        grid = [start + k * step for k in range(max(count, 0))]
    else:
        grid = [parse_value(v) for v in values.split(",")]
    return name, wing, grid


# --- output helpers ---------------------------------------------------------

def _emit_json(obj, out):
    json.dump({"schema_version": SCHEMA_VERSION, **obj}, out, indent=2, sort_keys=False)
    out.write("\n")


def _emit_csv(rows, header, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _state_rows(state: JointState):
    rows = []
    for ket in sorted(state.terms, key=lambda k: k.sort_key()):
        amp = state.terms[ket]
        rows.append({"ket": str(ket), "re": _sig(amp.real), "im": _sig(amp.imag)})
    return rows


def _distribution_dict(d):
    return {
        "pEE": _sig(d.pEE), "pEF": _sig(d.pEF), "pFE": _sig(d.pFE), "pFF": _sig(d.pFF),
        "pGamma": {k: _sig(v) for k, v in sorted(d.pGamma.items())},
        "gammaTotal": _sig(d.gamma_total),
    }


def _num(v):
    return str(v) if isinstance(v, (int, Fraction)) else repr(_sig(float(v)))


# --- commands ---------------------------------------------------------------

def cmd_simulate(args, out):
    scheme = load_scheme(args.scheme)
    start = JointState({Pair(Path.IN, Path.IN): 1.0}, args.tolerance)
    state = evolve(scheme, initial=start)
    dist = outcome_distribution(state)
    try:
        survivors = postselect_survivors(state)
        bell = {BELL_FIELDS[k]: _sig(bell_overlap(survivors, k)) for k in BellKind}
    except EvolutionError:
        survivors, bell = None, {v: None for v in BELL_FIELDS.values()}
    if args.format == "json":
        _emit_json({
            "command": "simulate",
            "scheme": scheme.name,
            "state": _state_rows(state),
            "distribution": _distribution_dict(dist),
            "survivors": _state_rows(survivors) if survivors is not None else [],
            "bell": bell,
        }, out)
    elif args.format == "csv":
        rows = [("amplitude", r["ket"], r["re"], r["im"]) for r in _state_rows(state)]
        rows += [("probability", k, _sig(v), "") for k, v in dist.cells().items()]
        rows += [("bell", k, v if v is not None else "", "") for k, v in bell.items()]
        _emit_csv(rows, ("section", "key", "value", "imag"), out)
    else:
        out.write(f"scheme {scheme.name}\n\nfinal state\n")
        for r in _state_rows(state):
            out.write(f"  {r['re']:+.12g}{r['im']:+.12g}i  {r['ket']}\n")
        out.write("\noutcome probabilities\n")
        for k, v in dist.cells().items():
            out.write(f"  {k:<10} {_sig(v):.12g}\n")
        out.write(f"  {'gamma':<10} {_sig(dist.gamma_total):.12g}\n")
        out.write("\nsurvivor overlaps\n")
        for k, v in bell.items():
            out.write(f"  {k:<16} {'n/a' if v is None else format(v, '.12g')}\n")
    return EXIT_OK


def cmd_sample(args, out):
    if args.n < 0:
        raise UsageError("-n must be >= 0")
    scheme = load_scheme(args.scheme)
    tally = sample(scheme, args.n, args.seed)
    freqs = frequencies(tally) if tally.n else {}
    if args.format == "json":
        _emit_json({
            "command": "sample",
            "scheme": scheme.name,
            "n": tally.n,
            "seed": tally.seed,
            "cells": tally.counts,
            "frequencies": {k: {"estimate": _sig(p), "standardError": _sig(se)}
                            for k, (p, se) in freqs.items()},
        }, out)
    elif args.format == "csv":
        rows = [(k, c, *(map(_sig, freqs[k]) if k in freqs else ("", "")))
                for k, c in tally.counts.items()]
        _emit_csv(rows, ("cell", "count", "estimate", "standardError"), out)
    else:
        out.write(f"scheme {scheme.name}  n={tally.n}  seed={tally.seed}\n")
        for k, c in tally.counts.items():
            est = "" if k not in freqs else f"  {freqs[k][0]:.6f} +- {freqs[k][1]:.6f}"
            out.write(f"  {k:<10} {c:>10}{est}\n")
    return EXIT_OK


def cmd_lhv(args, out):
    if args.from_qm:
        a = behavior_from_quantum(outcome_distribution(evolve(builtin_scheme("a"))))
        b = behavior_from_quantum(outcome_distribution(evolve(builtin_scheme("b"))))
    else:
        if not (args.a and args.b):
            raise UsageError("lhv needs --a and --b behavior files, or --from-qm")
        a, b = load_behavior(args.a), load_behavior(args.b)
    result = lhv_feasible(a, b, product_form=args.product_form, tol=args.tolerance_lp)
    frac = contradiction_fraction(a, b)
    frac_sym = contradiction_fraction(a, b, symmetric=True)
    report = {
        "command": "lhv",
        "verdict": "Feasible" if result.feasible else "Infeasible",
        "productForm": bool(args.product_form),
        "contradictionFraction": _sig(float(frac)),
        "contradictionFractionSymmetric": _sig(float(frac_sym)),
    }
    if result.feasible:
        report["weights"] = {str(s): _num(w) for s, w in result.weights.items()}
    else:
        report["reason"] = result.reason
        report["certificate"] = (None if result.certificate is None else
                                 {":".join(k): _num(v) for k, v in result.certificate.items() if v})
    if args.format == "json":
        _emit_json(report, out)
    elif args.format == "csv":
        rows = [(k, v) for k, v in report.items() if not isinstance(v, dict)]
        for section in ("weights", "certificate"):
            for k, v in (report.get(section) or {}).items():
                rows.append((f"{section}.{k}", v))
        _emit_csv(rows, ("key", "value"), out)
    else:
        out.write(f"verdict: {report['verdict']}\n")
        if result.feasible:
            for k, v in report["weights"].items():
                out.write(f"  weight {k}: {v}\n")
        else:
            out.write(f"  {result.reason}\n")
            for k, v in (report["certificate"] or {}).items():
                out.write(f"  y[{k}] = {v}\n")
        out.write(f"contradiction fraction: {report['contradictionFraction']:.12g}"
                  f" (roles swapped: {report['contradictionFractionSymmetric']:.12g})\n")
    return EXIT_OK


def sweep_rows(scheme, name: str, wing, grid):
    rows = []
    for value in grid:
        if name.startswith("bs"):
            if not 0.0 <= value <= 1.0:
                raise UsageError(f"ratio {value!r} outside [0, 1]")
            point = with_splitter(scheme, int(name[2]), value, wing)
        else:
            point = with_phase(scheme, name[len("phase_"):], value, wing)
        d = outcome_distribution(evolve(point))
        rows.append((value, d.pEE, d.pEF, d.pFE, d.pFF, d.gamma_total))
    return rows


def cmd_sweep(args, out):
    scheme = load_scheme(args.scheme)
    name, wing, grid = parse_grid(args.param)
    rows = sweep_rows(scheme, name, wing, grid)
    header = ("value", "pEE", "pEF", "pFE", "pFF", "gammaTotal")
    label = name if wing is None else f"{wing}.{name}"
    if args.format == "json":
        _emit_json({
            "command": "sweep", "scheme": scheme.name, "parameter": label,
            "rows": [dict(zip(header, map(_sig, r))) for r in rows],
        }, out)
    elif args.format == "csv":
        _emit_csv([tuple(map(_sig, r)) for r in rows], header, out)
    else:
        out.write(f"scheme {scheme.name}, sweeping {label}\n")
        out.write("".join(f"{h:>14}" for h in header) + "\n")
        for r in rows:
            out.write("".join(f"{_sig(v):>14.6g}" for v in r) + "\n")
    return EXIT_OK


def cmd_parse_check(args, out):
    try:
        with open(args.path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise EnvError(f"{args.path}: {exc.strerror or exc}") from None
    scheme, diags = dsl.parse_with_diagnostics(data)
    for d in diags:
        sys.stderr.write(f"{args.path}:{d}\n")
    if scheme is None:
        return EXIT_USAGE
    if args.format == "json":
        _emit_json({"command": "parse-check", "path": args.path, "ok": True,
                    "warnings": [str(d) for d in diags]}, out)
    else:
        out.write(f"{args.path}: ok\n")
    return EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help=f"amplitude prune / LP tolerance (default {DEFAULT_TOLERANCE:g})")

    p = argparse.ArgumentParser(prog="pairpaths", parents=[common],
                                description="Two-interferometer annihilation simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="final state, probabilities, Bell overlaps")
    s.add_argument("--scheme", required=True, help="'a', 'b' or a .scm.txt file")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sample", parents=[common], help="seeded Monte Carlo runs")
    s.add_argument("--scheme", required=True)
    s.add_argument("-n", type=int, default=100000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"RNG seed (default {DEFAULT_SEED}, fixed for reproducibility)")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("lhv", parents=[common], help="local hidden variable feasibility")
    s.add_argument("--a", help="behavior JSON for context (a)")
    s.add_argument("--b", help="behavior JSON for context (b)")
    s.add_argument("--from-qm", action="store_true", help="use the built-in schemes' statistics")
    s.add_argument("--product-form", action="store_true",
                   help="also require independent (product) hidden-variable weights")
    s.set_defaults(func=cmd_lhv)

    s = sub.add_parser("sweep", parents=[common], help="distributions over a parameter grid")
    s.add_argument("--scheme", required=True)
    s.add_argument("--param", required=True,
                   help="[minus.|plus.]{bs1,bs2,bs3,phase_ab,phase_cd}=start:stop:step or =v1,v2,...")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("parse-check", parents=[common], help="validate a scheme file")
    s.add_argument("path")
    s.set_defaults(func=cmd_parse_check)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.format = getattr(args, "format", "table")
    tol = getattr(args, "tolerance", None)
    args.tolerance = DEFAULT_TOLERANCE if tol is None else tol
    args.tolerance_lp = 1e-9 if tol is None else tol
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (SchemeError, dsl.DSLError, LHVError, EvolutionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except EnvError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ENV
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
