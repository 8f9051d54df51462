"""Command-line front end.

Subcommands: ``measures``, ``sample``, ``empirical``, ``test`` and ``tables``.
Matrices are written row-major as ``"r11,r12;r21,r22"``.  Exit codes: 0 ok,
1 numeric failure, 2 validation or usage error, 3 I/O or input-format error.
The default seed comes from ``$SKEWELLIPTIC_SEED`` (else 0).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings

import numpy as np

from . import tables as tbl
from .distribution import CONVENTIONS, ValidationError, delta_from_lambda, sample, validate
from .generators import GeneratorFamily
from .inference import (
    Calibration,
    DegenerateSampleError,
    Sample,
    TestConfig,
    b2_star_sq,
    calibrate_critical_values,
    empirical_measures,
    sample_mardia,
    standardize,
)
from .measures import report_all
from .numerics import DomainError, NumericError

SEED_ENV = "SKEWELLIPTIC_SEED"

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputFormatError(Exception):
    """Malformed input file; the message names the offending line."""


# ---------------------------------------------------------------------------
# parsing helpers


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t != ""])
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None


def parse_matrix(text: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    M = [parse_vector(r) for r in rows]
    if not M or len({len(r) for r in M}) != 1:
        raise UsageError(f"matrix {text!r} is ragged or empty")
    return np.array(M)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"${SEED_ENV} must be an integer, got {raw!r}") from None


def read_csv(path: str) -> np.ndarray:
    """Read a header-first numeric CSV; ``-`` is stdin."""
    try:
        fh = sys.stdin if path == "-" else open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot open {path}: {exc.strerror}") from exc
    with fh if fh is not sys.stdin else _nullcontext(fh):
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputFormatError(f"{path}: empty file (a header row is required)") from None
        k = len(header)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != k:
                raise InputFormatError(f"{path}: line {line}: expected {k} fields, found {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise InputFormatError(f"{path}: line {line}: non-numeric field in {row!r}") from None
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    return np.array(rows)


class _nullcontext:
    def __init__(self, obj):
        self.obj = obj

    def __enter__(self):
        return self.obj

    def __exit__(self, *exc):
        return False


def write_csv(data: np.ndarray) -> str:
    buf = io.StringIO()
    k = data.shape[1]
    buf.write(",".join(f"y{i + 1}" for i in range(k)) + "\n")
    for row in data:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


# ---------------------------------------------------------------------------
# commands


def _distribution(args):
    Om = parse_matrix(args.omega)
    k = Om.shape[0]
    mu = np.zeros(k) if args.mu is None else parse_vector(args.mu)
    if args.delta is not None and args.lam is not None:
        raise UsageError("give either --delta or --lambda, not both")
    if args.lam is not None:
        delta = delta_from_lambda(parse_vector(args.lam), Om)
    elif args.delta is not None:
        delta = parse_vector(args.delta)
    else:
        delta = np.zeros(k)
    fam = GeneratorFamily.parse(args.family, k)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        D = validate(mu, Om, delta, fam)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return D


def cmd_measures(args) -> int:
    D = _distribution(args)
    rep = report_all(D, args.convention)
    for name, why in rep.status.items():
        print(f"warning: {name} unavailable: {why}", file=sys.stderr)
    emit(_json(rep.to_dict()), args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    D = _distribution(args)
    seed = default_seed() if args.seed is None else args.seed
    emit(write_csv(sample(D, args.n, seed, args.block_size)), args.output)
    return EXIT_OK


def cmd_empirical(args) -> int:
    data = read_csv(args.input)
    S = Sample(data)
    rep = empirical_measures(S)
    emit(_json(rep.to_dict()), args.output)
    return EXIT_OK


def cmd_test(args) -> int:
    data = read_csv(args.input)
    S = Sample(data)
    seed = default_seed() if args.seed is None else args.seed
    fam = GeneratorFamily.parse(args.family, S.k)
    base = TestConfig(resolution=args.resolution, seed=seed)
    cal: Calibration | None = None
    K_b1, K_b2, K = args.k_b1, args.k_b2, args.K
    if K_b1 is None or K_b2 is None or K is None:
        cal = calibrate_critical_values(fam, S.k, S.n, args.reps, args.alpha, base, seed)
        K_b1 = cal.K_b1 if K_b1 is None else K_b1
        K_b2 = cal.K_b2 if K_b2 is None else K_b2
        K = cal.K if K is None else K
    cfg = TestConfig(resolution=args.resolution, seed=seed, K=K)
    X, _ = standardize(S)
    res = b2_star_sq(X, cfg)
    if not all(res.converged):
        print("warning: an optimization did not converge; lattice value reported", file=sys.stderr)
    out = dict(
        n=S.n,
        k=S.k,
        null_family=fam.label,
        alpha=args.alpha,
        seed=seed,
        calibrated=cal is not None,
        calibration_reps=None if cal is None else cal.n_reps,
        K=K,
        K_b1=K_b1,
        K_b2=K_b2,
        reject_skewness=bool(res.b1_star > K_b1),
        reject_kurtosis=bool(res.b2_star_sq > K_b2),
        result=res.to_dict(),
        mardia=dict(zip(("b1k", "b2k"), sample_mardia(S))),
    )
    emit(_json(out), args.output)
    return EXIT_OK


def cmd_tables(args) -> int:
    ids = list(tbl.TABLE_IDS) if args.table in (None, "all") else tbl.resolve_ids(args.table)
    rows = []
    for t in ids:
        rows += tbl.compare_table(t, args.convention, args.rtol)
    render = {"markdown": tbl.render_markdown, "csv": tbl.render_csv, "json": tbl.render_json}[args.format]
    emit(render(rows), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="normal", help="normal | t:<m> | logistic | laplace | pearson2:<t> | pearson7:<t>")
    p.add_argument("--mu", help="location vector, e.g. '0,0' (default zeros)")
    p.add_argument("--omega", required=True, help="scale matrix, row-major, e.g. '2,1;1,3'")
    p.add_argument("--delta", help="shape vector, e.g. '0.2,1' (default zeros)")
    p.add_argument("--lambda", dest="lam", help="alternative shape parametrization lambda")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skewelliptic", description="Skew-elliptical skewness and kurtosis measures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="closed-form population measures (JSON)")
    _add_params(p)
    p.add_argument("--convention", choices=CONVENTIONS, default="exact",
                   help="canonical shape used by the scalar measures (default exact)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("sample", help="draw a sample (CSV with header y1..yk)")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--block-size", type=int, default=65536)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("empirical", help="plug-in sample measures of a CSV sample (JSON)")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_empirical)

    p = sub.add_parser("test", help="directional skewness/kurtosis tests with calibration (JSON)")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--family", default="normal", help="null family used for calibration")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=500, help="calibration replicates")
    p.add_argument("--seed", type=int)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--k-b1", type=float, help="skewness threshold (skips its calibration)")
    p.add_argument("--k-b2", type=float, help="kurtosis threshold (skips its calibration)")
    p.add_argument("--K", type=float, help="kurtosis centring constant")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("tables", help="published tables side by side with computed values")
    p.add_argument("--table", default="all", help=f"one of {', '.join(tbl.TABLE_IDS)}, 1, 2, 17 or all")
    p.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown")
    p.add_argument("--convention", choices=CONVENTIONS, default="squared",
                   help="canonical shape for scalar measures (default: the one the tables were computed with)")
    p.add_argument("--rtol", type=float, default=1e-3)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_tables)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except tbl.UnknownTableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValidationError, DegenerateSampleError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
