"""Command-line front end.

Subcommands: ``sample``, ``soft-edge``, ``hard-edge``, ``sae``, ``sbo``,
``compare`` and ``selfcheck``. Bulk output is CSV (17 significant digits),
summaries are JSON with keys ``params``, ``trials``, ``quantiles``, ``ks``
and ``pass``.

Exit codes: 0 ok, 1 parameter error, 2 numerical failure, 3 comparison fail.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from functools import partial

import numpy as np

from . import experiments as ex
from .eigencore import dense_sym_eigen, singular_values, sturm_count, tridiagonal_eigenvalues
from .exceptions import BetaJacobiError, DegenerateScalingError, NumericalFailure, ParameterError
from .jacobi import (
    JacobiParams,
    build_Hn,
    build_M,
    build_W,
    build_Z,
    hard_edge_scale,
    sample_angles,
    scaling_constants,
)
from .limitops import GridSpec, discrete_inverse_kernel, kernel_eigenvalues, sae_eigenvalues
from .matcore import SymTridiagonal, det_identities, double, gram, invert_lower_bidiagonal
from .randkit import RngStream
from .stats import EmpiricalDistribution, ks_two_sample, quantiles

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_COMPARE = 0, 1, 2, 3
QUANTILE_PROBS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


class InputFileError(BetaJacobiError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(stream, header, rows, metadata=None):
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}={value}\n")
    stream.write(",".join(header) + "\n")
    for t, row in enumerate(rows):
        stream.write(",".join([str(t)] + [_fmt(v) for v in row]) + "\n")


def read_column(path: str, column: str | None) -> np.ndarray:
    """Read one numeric column from a CSV written by this tool (``#`` lines skipped)."""
    try:
        fh = open(path, encoding="utf-8")
    except OSError as err:
        raise InputFileError(f"{path}: {err.strerror}") from None
    header, idx, values = None, None, []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if header is None:
                header = fields
                name = column if column is not None else (header[1] if len(header) > 1 else header[0])
                if name not in header:
                    raise InputFileError(f"{path}:{lineno}: no column {name!r} in header")
                idx = header.index(name)
                continue
            if len(fields) != len(header):
                raise InputFileError(f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}")
            try:
                values.append(float(fields[idx]))
            except ValueError:
                raise InputFileError(f"{path}:{lineno}: cannot parse {fields[idx]!r} as a number") from None
    if header is None:
        raise InputFileError(f"{path}: no header row")
    if not values:
        raise InputFileError(f"{path}: no data rows")
    return np.array(values)


def _summary(params: dict, samples: np.ndarray, reference=None, threshold=None) -> dict:
    d = EmpiricalDistribution(samples)
    out = {
        "params": params,
        "trials": int(d.count),
        "quantiles": {str(p): float(q) for p, q in zip(QUANTILE_PROBS, quantiles(d, QUANTILE_PROBS))},
        "ks": None,
        "pass": None,
    }
    if reference is not None:
        ks = ks_two_sample(d, reference)
        out["ks"] = ks
        out["pass"] = bool(threshold is None or ks < threshold)
    return out


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit(args, header, rows, metadata=None, summary_params=None, summary_column=0):
    """CSV rows or a JSON summary of one column. Returns the exit code."""
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            write_csv(out, header, rows, metadata)
            return EXIT_OK
        reference = read_column(args.reference, args.column) if getattr(args, "reference", None) else None
        summary = _summary(summary_params or {}, rows[:, summary_column], reference, args.threshold)
        json.dump(summary, out, indent=2, sort_keys=True)
        out.write("\n")
        return EXIT_COMPARE if summary["pass"] is False else EXIT_OK
    finally:
        if close:
            out.close()


def _params(args, need_n1=True) -> JacobiParams:
    n1 = args.n1
    if n1 is None:
        if getattr(args, "a", None) is None:
            raise ParameterError("give --n1 (or --a for n1 = n + a)")
        n1 = args.n + args.a
    return JacobiParams(args.n, n1, args.n2, args.beta)


def _param_dict(p: JacobiParams) -> dict:
    return {"n": p.n, "n1": p.n1, "n2": p.n2, "beta": p.beta}


def cmd_sample(args) -> int:
    p = _params(args)
    if args.what == "angles":
        n = p.n
        header = (["trial"] + [f"C_{i}" for i in range(1, n + 1)] + [f"S_{i}" for i in range(1, n + 1)]
                  + [f"Ct_{i}" for i in range(1, n)] + [f"St_{i}" for i in range(1, n)])
        rows = ex.run_trials(partial(ex.angle_trial, p), args.trials, args.seed, args.threads)
    else:
        header = ["trial"] + [f"lambda_{i}" for i in range(1, p.n + 1)]
        rows = ex.run_trials(partial(ex.eigenvalue_trial, p), args.trials, args.seed, args.threads)
    return _emit(args, header, rows, summary_params=_param_dict(p))


def _edge(args, trial, extra) -> int:
    p = _params(args)
    info = extra(p)
    if args.k > p.n:
        raise ParameterError(f"k must lie in [1, n={p.n}]")
    rows = ex.run_trials(partial(trial, p, args.k), args.trials, args.seed, args.threads)
    header = ["trial"] + [f"ev_{i}" for i in range(1, args.k + 1)]
    return _emit(args, header, rows, summary_params={**_param_dict(p), **info, "k": args.k})


def cmd_soft_edge(args) -> int:
    def extra(p):
        sc = scaling_constants(p)
        return {"m_n": sc.m_n, "alpha_n": sc.alpha_n, "lambda_plus": sc.lambda_plus}

    return _edge(args, ex.soft_edge_trial, extra)


def cmd_hard_edge(args) -> int:
    return _edge(args, ex.hard_edge_trial, lambda p: {"m_n": hard_edge_scale(p)})


def _limit(args, trial, extra: dict) -> int:
    grid = GridSpec(args.grid_length, args.grid_step)
    if args.k > grid.points - 2:
        raise ParameterError(f"k must lie in [1, {grid.points - 2}] for this grid")
    rows = ex.run_trials(partial(trial, grid=grid, k=args.k), args.trials, args.seed, args.threads)
    meta = {"beta": _fmt(args.beta), **extra, "grid_length": _fmt(grid.length), "grid_step": _fmt(grid.step),
            "grid_points": grid.points, "seed": args.seed, "trials": args.trials}
    header = ["trial"] + [f"ev_{i}" for i in range(1, args.k + 1)]
    sp = {**{k: v for k, v in meta.items() if k not in ("seed", "trials")}, "k": args.k}
    return _emit(args, header, rows, metadata=meta, summary_params=sp)


def cmd_sae(args) -> int:
    return _limit(args, partial(_sae, args.beta), {})


def cmd_sbo(args) -> int:
    a = 0.0 if args.a is None else args.a
    return _limit(args, partial(_sbo, args.beta, a), {"a": _fmt(a)})


def _sae(beta, stream, grid, k):
    return ex.sae_trial(beta, grid, k, stream)


def _sbo(beta, a, stream, grid, k):
    return ex.sbo_trial(beta, a, grid, k, stream)


def cmd_compare(args) -> int:
    a = read_column(args.file_a, args.column)
    b = read_column(args.file_b, args.column)
    da, db = EmpiricalDistribution(a), EmpiricalDistribution(b)
    ks = ks_two_sample(da, db)
    passed = ks < args.threshold
    report = {
        "params": {"file_a": args.file_a, "file_b": args.file_b, "column": args.column, "threshold": args.threshold},
        "trials": [da.count, db.count],
        "quantiles": {
            str(p): [float(x), float(y)]
            for p, x, y in zip(QUANTILE_PROBS, quantiles(da, QUANTILE_PROBS), quantiles(db, QUANTILE_PROBS))
        },
        "ks": ks,
        "pass": bool(passed),
    }
    out, close = _open_out(args.out)
    try:
        json.dump(report, out, indent=2, sort_keys=True)
        out.write("\n")
    finally:
        if close:
            out.close()
    return EXIT_OK if passed else EXIT_COMPARE


# -- selfcheck ----------------------------------------------------------------------

def _rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _random_params(stream: RngStream, nmax=40) -> JacobiParams:
    n = int(2 + stream.generator.integers(0, nmax - 1))
    n1 = n - 1 + 0.5 + 3 * n * stream.uniform()
    n2 = n + 0.5 + 3 * n * stream.uniform()
    beta = float(stream.generator.choice([0.5, 1.0, 2.0, 4.0, 7.3]))
    return JacobiParams(n, n1, n2, beta)


def _check_determinants(stream, trials):
    worst = 0.0
    for _ in range(trials):
        p = _random_params(stream)
        ang = sample_angles(p, stream)
        lam = np.sort(singular_values(build_M(ang))) ** 2
        ld, l1 = det_identities(ang, log=True)
        worst = max(worst, abs(np.sum(np.log(lam)) - ld) / abs(ld), abs(np.sum(np.log1p(-lam)) - l1) / abs(l1))
    return worst


def _check_doubling(stream, trials):
    worst = 0.0
    for _ in range(trials):
        p = _random_params(stream)
        m = build_M(sample_angles(p, stream))
        ev = tridiagonal_eigenvalues(double(m))
        worst = max(worst, float(np.max(np.abs(ev + ev[::-1]))))
        sv = np.sort(singular_values(m))
        worst = max(worst, float(np.max(np.abs(ev[p.n:] - sv))))
    return worst


def _check_hn(stream, trials):
    worst = 0.0
    for _ in range(trials):
        p = _random_params(stream)
        if p.n2 <= p.n:
            continue
        try:
            sc = scaling_constants(p)
        except DegenerateScalingError:
            continue
        ang = sample_angles(p, stream)
        h = tridiagonal_eigenvalues(build_Hn(p, ang))
        z = tridiagonal_eigenvalues(gram(build_Z(ang)))
        pred = np.sort(sc.alpha_n * (sc.lambda_plus - z))
        worst = max(worst, float(np.max(np.abs(h - pred)) / max(1.0, float(np.max(np.abs(pred))))))
    return worst


def _check_hard_inverse(stream, trials):
    worst = 0.0
    for _ in range(trials):
        p = _random_params(stream, nmax=30)
        w = build_W(sample_angles(p, stream))
        mn = hard_edge_scale(p)
        exact = mn * np.sort(singular_values(w)) ** 2
        via_kernel = kernel_eigenvalues(discrete_inverse_kernel(w, mn), p.n)
        worst = max(worst, float(np.max(np.abs(np.log(via_kernel) - np.log(exact)))))
        k = invert_lower_bidiagonal(w.scaled(math.sqrt(mn)))
        top = np.linalg.eigvalsh(k @ k.T)[::-1][:3]
        worst = max(worst, _rel(1 / top, exact[:3]))
    return worst


def _check_eigensolver(stream, trials):
    worst = 0.0
    for _ in range(trials):
        n = int(1 + stream.generator.integers(0, 8))
        t = SymTridiagonal(stream.normal(n), stream.normal(n - 1))
        worst = max(worst, float(np.max(np.abs(tridiagonal_eigenvalues(t) - dense_sym_eigen(t.to_dense())))))
    t = SymTridiagonal([2.0, 2.0], [1.0])
    if sturm_count(t, 2.0) != 1:
        worst = math.inf
    return worst


def _check_airy(_stream, _trials):
    ev = sae_eigenvalues(math.inf, GridSpec(16.0, 2e-3), None, 3)
    return float(np.max(np.abs(ev - np.array([2.33811, 4.08795, 5.52056]))))


SELFCHECKS = [
    ("log-determinant identities (relative)", _check_determinants, 200, 1e-8),
    ("doubled-matrix symmetry", _check_doubling, 100, 1e-9),
    ("affine H_n identity (relative)", _check_hn, 100, 1e-8),
    ("hard-edge inverse identity (log)", _check_hard_inverse, 100, 1e-8),
    ("bisection vs Jacobi rotations", _check_eigensolver, 200, 1e-10),
    ("noiseless Airy spectrum", _check_airy, 1, 1e-3),
]


def cmd_selfcheck(args) -> int:
    stream = RngStream(args.seed, 0)
    out, close = _open_out(args.out)
    failures = 0
    start = time.perf_counter()
    try:
        out.write(f"{'check':<40} {'error':>12} {'tolerance':>10}  result\n")
        for name, check, trials, tol in SELFCHECKS:
            if args.inject_fault:
                tol = tol * 1e-12
            err = check(stream, trials)
            ok = bool(np.isfinite(err) and err <= tol)
            failures += not ok
            out.write(f"{name:<40} {err:>12.3e} {tol:>10.1e}  {'PASS' if ok else 'FAIL'}\n")
        out.write(f"{len(SELFCHECKS) - failures}/{len(SELFCHECKS)} passed in {time.perf_counter() - start:.1f} s\n")
    finally:
        if close:
            out.close()
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


# -- parser ---------------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betajacobi", description="Beta-Jacobi edge simulations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_required=True):
        p.add_argument("--seed", type=_seed, required=seed_required, default=0 if not seed_required else None)
        p.add_argument("--out", default="-", help="output file (default: stdout)")

    def runner(p):
        common(p)
        p.add_argument("--trials", type=_positive_int, default=1)
        p.add_argument("--threads", type=_positive_int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--reference", help="CSV sample to compare against (json format)")
        p.add_argument("--column", help="column of the reference file (default: first data column)")
        p.add_argument("--threshold", type=float, default=None, help="KS pass threshold")

    def ensemble(p, k=True):
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--n1", type=float)
        p.add_argument("--n2", type=float, required=True)
        p.add_argument("--a", type=float, help="hard-edge offset; sets n1 = n + a when --n1 is absent")
        p.add_argument("--beta", type=float, default=2.0)
        if k:
            p.add_argument("--k", type=_positive_int, default=1)

    def grid(p, length):
        p.add_argument("--beta", type=float, default=2.0)
        p.add_argument("--k", type=_positive_int, default=1)
        p.add_argument("--grid-length", type=float, default=length)
        p.add_argument("--grid-step", type=float, default=1e-2)

    p = sub.add_parser("sample", help="eigenvalues or angles of M M^T")
    runner(p)
    ensemble(p, k=False)
    p.add_argument("--what", choices=("eigenvalues", "angles"), default="eigenvalues")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("soft-edge", help="alpha_n (Lambda_+ - lambda) for the top k eigenvalues")
    runner(p)
    ensemble(p)
    p.set_defaults(func=cmd_soft_edge)

    p = sub.add_parser("hard-edge", help="n n2 lambda for the bottom k eigenvalues")
    runner(p)
    ensemble(p)
    p.set_defaults(func=cmd_hard_edge)

    p = sub.add_parser("sae", help="bottom k eigenvalues of the stochastic Airy operator")
    runner(p)
    grid(p, 20.0)
    p.set_defaults(func=cmd_sae)

    p = sub.add_parser("sbo", help="bottom k eigenvalues of the stochastic Bessel operator")
    runner(p)
    grid(p, 10.0)
    p.add_argument("--a", type=float, default=0.0)
    p.set_defaults(func=cmd_sbo)

    p = sub.add_parser("compare", help="two-sample KS distance between CSV columns")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--column", default=None)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("selfcheck", help="run the exact-identity and eigensolver invariant suite")
    common(p, seed_required=False)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAM
    try:
        return args.func(args)
    except DegenerateScalingError as err:
        print(f"error: {err} (denominator = {err.denominator!r})", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParameterError, InputFileError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARAM
    except (NumericalFailure, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
