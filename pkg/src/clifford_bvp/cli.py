"""Command line front end: ``clifford-bvp solve|check PROBLEM``.

Exit codes: 0 solved and verified, 1 input error, 2 solved with warnings,
3 solvability conditions violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from .algebra import Multivector, Signature, blade_name
from .boundary import BoundaryFunction, classify_hat_H, limit_at_infinity, load_table_csv
from .errors import (
    CliffordError,
    ConditionViolated,
    DatumLimitNonzero,
    DomainError,
    ExprSyntaxError,
    NonDecayingDatum,
    ParaRealViolation,
    SingularElement,
)
from .expr import parse_multivector
from .quadrature import QuadratureScheme
from .solvers import (
    DEFAULT_EPS,
    HilbertProblem,
    ProbeSet,
    Solution,
    analyse_case,
    case_tag,
    solve_hilbert,
    verify_solution,
)

EXIT_OK, EXIT_INPUT, EXIT_WARN, EXIT_VIOLATED = 0, 1, 2, 3

TOP_KEYS = {"n", "m", "lambda", "c", "decay", "quadrature", "queries", "free_constants", "verify"}
QUAD_KEYS = {"R", "base_grid", "tol"}
GRID_KEYS = {"ranges", "counts", "offsets"}


class InputError(Exception):
    pass


@dataclass(frozen=True)
class ProblemFile:
    path: Path
    problem: HilbertProblem
    queries: np.ndarray
    free_constants: dict
    verify: bool


def _fmt(x: float) -> str:
    return repr(float(x))


def _require_int(doc: dict, key: str) -> int:
    if key not in doc:
        raise InputError(f"missing required key {key!r}")
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise InputError(f"{key!r} must be an integer")
    return val


def _parse_alpha(key: Any, n: int) -> tuple:
    if isinstance(key, int) and not isinstance(key, bool):
        parts = [key]
    elif isinstance(key, str):
        parts = [p.strip() for p in key.split(",") if p.strip()]
    elif isinstance(key, (list, tuple)):
        parts = list(key)
    else:
        raise InputError(f"bad multi-index {key!r}")
    try:
        alpha = tuple(int(p) for p in parts)
    except ValueError:
        raise InputError(f"bad multi-index {key!r}") from None
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise InputError(f"multi-index {key!r} needs {n} non-negative entries")
    return alpha


def _queries(spec: Any, n: int) -> np.ndarray:
    if spec is None:
        out = np.zeros((1, n + 1))
        out[0, -1] = 1.0
        return out
    if isinstance(spec, dict):
        if "grid" in spec and len(spec) == 1:
            spec = spec["grid"]
        unknown = set(spec) - GRID_KEYS
        if unknown:
            raise InputError(f"unknown grid keys: {sorted(unknown)}")
        ranges, counts, offsets = spec.get("ranges"), spec.get("counts"), spec.get("offsets")
        if ranges is None or counts is None or offsets is None:
            raise InputError("a query grid needs ranges, counts and offsets")
        if len(ranges) != n or len(counts) != n:
            raise InputError(f"a query grid needs {n} ranges and counts")
        axes = [np.linspace(float(a), float(b), int(k)) for (a, b), k in zip(ranges, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([m.ravel() for m in mesh], axis=1)
        rows = [np.concatenate([flat, np.full((flat.shape[0], 1), float(off))], axis=1) for off in offsets]
        pts = np.concatenate(rows, axis=0)
    else:
        try:
            pts = np.array(spec, dtype=float)
        except (TypeError, ValueError):
            raise InputError("queries must be a list of points or a grid spec") from None
        pts = np.atleast_2d(pts)
    if pts.shape[1] != n + 1:
        raise InputError(f"query points need {n + 1} coordinates")
    if np.any(pts[:, -1] <= 0):
        raise InputError("query points must lie in the open upper half space (w_n > 0)")
    return pts


def load_problem(path: str | Path, overrides: dict | None = None) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InputError(f"{path}: not valid YAML/JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: the problem file must be a mapping")
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise InputError(f"unknown keys: {sorted(unknown)}")
    n = _require_int(doc, "n")
    m = _require_int(doc, "m")
    if not 1 <= n <= 12:
        raise InputError("n must be between 1 and 12")
    sig = Signature(n)

    decay = doc.get("decay")
    if decay is not None:
        if isinstance(decay, str) and decay.strip().lower() in ("inf", "gauss"):
            decay = math.inf
        elif isinstance(decay, bool) or not isinstance(decay, (int, float)):
            raise InputError("decay must be a number or 'inf'")
        decay = float(decay)
    if "c" not in doc:
        raise InputError("missing required key 'c'")
    c_spec = doc["c"]
    if isinstance(c_spec, dict):
        if set(c_spec) != {"csv"}:
            raise InputError("a table datum is given as {csv: path}")
        c = load_table_csv(path.parent / str(c_spec["csv"]), sig, decay=decay)
    elif isinstance(c_spec, (int, float)) and not isinstance(c_spec, bool):
        c = BoundaryFunction.parse(repr(float(c_spec)), sig, decay=decay)
    elif isinstance(c_spec, str):
        c = BoundaryFunction.parse(c_spec, sig, decay=decay)
    else:
        raise InputError("c must be an expression string or {csv: path}")
    if c.is_zero and c.decay is None:
        c = replace(c, decay=math.inf)

    lam = parse_multivector(str(doc.get("lambda", "1")), sig)

    quad = dict(doc.get("quadrature") or {})
    unknown = set(quad) - QUAD_KEYS
    if unknown:
        raise InputError(f"unknown quadrature keys: {sorted(unknown)}")
    quad.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        scheme = QuadratureScheme(
            R=float(quad.get("R", 1e4)), base_grid=int(quad.get("base_grid", 64)), tol=float(quad.get("tol", 1e-6))
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad quadrature settings: {exc}") from None

    free = {}
    for key, val in (doc.get("free_constants") or {}).items():
        free[_parse_alpha(key, n)] = parse_multivector(str(val), sig)
    if free and m < 0:
        raise InputError("free_constants only apply when m >= 0")

    verify = doc.get("verify", True)
    if not isinstance(verify, bool):
        raise InputError("verify must be true or false")
    try:
        problem = HilbertProblem(sig, m, lam, c, scheme)
    except SingularElement as exc:
        raise InputError(str(exc)) from None
    return ProblemFile(path, problem, _queries(doc.get("queries"), n), free, verify)


# ---------------------------------------------------------------- writers


def _blade_header(sig: Signature) -> list[str]:
    return [blade_name(k, sig.n) for k in range(sig.dim)]


def write_solution_csv(path: Path, sol: Solution, queries: np.ndarray) -> None:
    sig = sol.sig
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([f"w{k}" for k in range(sig.n + 1)] + _blade_header(sig))
        for w in queries:
            val = sol.evaluate(w)
            wr.writerow([_fmt(x) for x in w] + [_fmt(x) for x in val.coeffs])


def write_solvability_csv(path: Path, sig: Signature, entries) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["alpha", "measure"] + _blade_header(sig) + ["error_estimate", "tail_bound", "satisfied"])
        for e in entries:
            alpha = ",".join(str(a) for a in e.alpha)
            if e.moment is None:
                for label in ("dsigma", "dS"):
                    wr.writerow([alpha, label] + ["nan"] * sig.dim + ["inf", "inf", "false"])
                continue
            for label, res in (("dsigma", e.moment.sigma), ("dS", e.moment.lebesgue)):
                wr.writerow(
                    [alpha, label]
                    + [_fmt(x) for x in res.value.coeffs]
                    + [f"{res.error_estimate:.6e}", f"{res.truncation_tail_bound:.6e}", str(e.satisfied).lower()]
                )


def _machine_section(items: dict) -> list[str]:
    out = ["", "[machine]"]
    for k, v in items.items():
        out.append(f"{k} = {json.dumps(v, sort_keys=True)}")
    return out


# ---------------------------------------------------------------- commands


def _out_paths(pf: ProblemFile, out_dir: str | None) -> tuple[Path, str]:
    base = Path(out_dir) if out_dir else pf.path.parent
    base.mkdir(parents=True, exist_ok=True)
    return base, pf.path.stem


def _probe_eps(text: str | None) -> tuple[float, ...]:
    if not text:
        return DEFAULT_EPS
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InputError(f"--probe-eps expects a comma list of numbers, got {text!r}") from None
    if len(vals) < 2 or any(v <= 0 for v in vals) or list(vals) != sorted(vals, reverse=True):
        raise InputError("--probe-eps needs at least two positive, decreasing values")
    return vals


def run_solve(path: str, args: argparse.Namespace) -> int:
    pf = load_problem(path, _overrides(args))
    eps = _probe_eps(args.probe_eps)
    out_dir, stem = _out_paths(pf, args.out_dir)
    problem = pf.problem
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            sol = solve_hilbert(problem)
        except ConditionViolated as exc:
            entries = exc.report if isinstance(exc.report, tuple) else ()
            write_solvability_csv(out_dir / f"{stem}.solvability.csv", problem.sig, entries)
            clause = "boundary datum must vanish at infinity" if isinstance(exc, DatumLimitNonzero) else "vanishing moment conditions"
            msg = f"solvability condition violated ({clause}): {exc}"
            (out_dir / f"{stem}.verify.txt").write_text(msg + "\n" + "\n".join(_machine_section({"status": "violated", "case": case_tag(problem.sig.n, problem.m)})) + "\n")
            print(msg, file=sys.stderr)
            return EXIT_VIOLATED
    if pf.free_constants:
        try:
            sol = sol.with_constants(pf.free_constants)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    write_solution_csv(out_dir / f"{stem}.solution.csv", sol, pf.queries)
    write_solvability_csv(out_dir / f"{stem}.solvability.csv", sol.sig, sol.solvability)

    lines = [f"case: {sol.case_tag} (n={sol.n}, m={sol.m})", f"lambda: {sol.lambda_} (paravector: {str(sol.lambda_is_paravector).lower()})"]
    if sol.class_report is not None:
        lines.append("class check: " + sol.class_report.summary())
    for note in sol.warnings:
        lines.append("warning: " + note)
    verified = None
    if pf.verify and not args.no_verify:
        probes = ProbeSet.default(sol.n, seed=args.seed, eps=eps)
        report = verify_solution(sol, probes)
        lines.append(report.to_text())
        verified = report.passed
    else:
        lines.append("verification skipped")
    code = EXIT_OK
    if sol.warnings or verified is False:
        code = EXIT_WARN
    machine = {
        "case": sol.case_tag,
        "exit_code": code,
        "verified": verified,
        "warnings": len(sol.warnings),
    }
    (out_dir / f"{stem}.verify.txt").write_text("\n".join(lines + _machine_section(machine)) + "\n")
    print(f"{stem}: case {sol.case_tag}, exit {code}")
    return code


def run_check(path: str, args: argparse.Namespace) -> int:
    pf = load_problem(path, _overrides(args))
    out_dir, stem = _out_paths(pf, args.out_dir)
    problem = pf.problem
    n, m, c = problem.sig.n, problem.m, problem.c
    r = 0 if m >= 0 else -(m + 1)
    lines = [f"case: {case_tag(n, m)} (n={n}, m={m})"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        case = analyse_case(n, m, c, problem.scheme, strict=False)
    if case.class_report is not None:
        lines.append(f"class check (index {r}): " + case.class_report.summary())
    else:
        lines.append(f"class check (index {r}): zero datum, in every class")
    if case.case_tag == "C2":
        lines.append(f"c(inf): {case.datum_limit if case.datum_limit is not None else 'no limit'}")
    for e in case.solvability:
        lines.append(f"moment {e.describe()} {'ok' if e.satisfied else 'VIOLATED'}")
    for note in case.warnings:
        lines.append("warning: " + note)
    write_solvability_csv(out_dir / f"{stem}.solvability.csv", problem.sig, case.solvability)
    code = EXIT_VIOLATED if case.violated else (EXIT_WARN if case.warnings else EXIT_OK)
    text = "\n".join(lines + _machine_section({"case": case.case_tag, "exit_code": code}))
    (out_dir / f"{stem}.check.txt").write_text(text + "\n")
    print(text)
    return code


def _overrides(args: argparse.Namespace) -> dict:
    return {"R": args.quad_R, "base_grid": args.quad_grid, "tol": args.quad_tol}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clifford-bvp", description="Hilbert/Schwarz boundary value problems on the upper half space.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (("solve", "solve and verify a problem file"), ("check", "class and solvability checks only")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("problem", help="problem file (YAML or JSON)")
        sp.add_argument("--out-dir", default=None)
        sp.add_argument("--quad-R", type=float, default=None)
        sp.add_argument("--quad-grid", type=int, default=None)
        sp.add_argument("--quad-tol", type=float, default=None)
        sp.add_argument("--probe-eps", default=None, help="comma list, e.g. 0.1,0.05,0.025")
        sp.add_argument("--no-verify", action="store_true")
        sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return run_solve(args.problem, args)
        return run_check(args.problem, args)
    except ExprSyntaxError as exc:
        print(f"input error: expression syntax: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ParaRealViolation, NonDecayingDatum, DomainError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CliffordError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
