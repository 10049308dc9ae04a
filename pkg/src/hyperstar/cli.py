"""``hyperstar`` command line: sample, census, expect, limits, matrix, check, experiment.

Exit codes: 0 success, 1 domain error, 2 usage error. Data goes to stdout,
diagnostics to stderr. ``HYPERSTAR_SEED`` supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .collisions import (build_partition, census, expected_isolated, expected_triples_exact,
                         expected_Xr_asymptotic, expected_Xr_exact, limit_parameters)
from .errors import HyperstarError
from .hypergraph import read_hg, serialize_hg
from .montecarlo import PMF_STATS, ExperimentPlan, run_experiment
from .sampler import (FixedP, SampleConfig, edge_probability, expected_degree, parse_regime,
                      sample)
from .spectral import esd_kolmogorov, spectral_split_check
from .star_matrix import KERNELS, build_matrix, matrix_to_csv, quotient, quotient_to_csv


class CliError(Exception):
    """Domain failure reported with exit code 1."""


def _emit(obj: dict) -> None:
    print(json.dumps({"version": __version__, **obj}, sort_keys=True))


def _default_seed() -> int:
    raw = os.environ.get("HYPERSTAR_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"HYPERSTAR_SEED={raw!r} is not an integer") from None


def _regime_arg(text: str):
    try:
        return parse_regime(text)
    except HyperstarError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_sample(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    p = edge_probability(args.regime, args.n, args.k)
    H = sample(SampleConfig(args.n, args.k, seed), args.regime)
    info = {"command": "sample", "n": args.n, "k": args.k, "m": H.m, "p": p,
            "lambda": expected_degree(args.regime, args.n, args.k),
            "regime": str(args.regime), "seed": seed}
    if args.out:
        Path(args.out).write_text(serialize_hg(H))
        _emit(info)
    else:
        sys.stdout.write(serialize_hg(H))
        print(json.dumps({"version": __version__, **info}, sort_keys=True), file=sys.stderr)
    return 0


def cmd_census(args) -> int:
    c = census(read_hg(args.file))
    if args.csv:
        print("field,value")
        for key, value in c.to_json().items():
            if isinstance(value, dict):
                for sub, count in value.items():
                    print(f"{key}_{sub},{count}")
            else:
                print(f"{key},{value}")
    else:
        _emit({"command": "census", "file": str(args.file), **c.to_json()})
    return 0


def cmd_expect(args) -> int:
    if args.p is not None:
        regime = FixedP(args.p)
    elif args.regime is not None:
        regime = args.regime
    else:
        raise CliError("expect needs --p or --regime")
    p = edge_probability(regime, args.n, args.k)
    lam = expected_degree(regime, args.n, args.k)
    _emit({
        "command": "expect", "n": args.n, "k": args.k, "p": p, "lambda": lam,
        "regime": str(regime), "r": args.r,
        "exact": expected_Xr_exact(args.n, args.k, p, args.r),
        "asymptotic": expected_Xr_asymptotic(args.n, args.k, lam, args.r),
        "triples_exact": expected_triples_exact(args.n, args.k, p),
        "isolated_exact": expected_isolated(args.n, args.k, p),
    })
    return 0


def cmd_limits(args) -> int:
    law = limit_parameters(args.regime, args.k)
    _emit({"command": "limits", "k": args.k, **law.to_json()})
    return 0


def cmd_matrix(args) -> int:
    H = read_hg(args.file)
    M = build_matrix(H, args.kernel)
    text = matrix_to_csv(M)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.quotient_out:
        Q = quotient(M, build_partition(H))
        Path(args.quotient_out).write_text(quotient_to_csv(Q))
    return 0


def cmd_check(args) -> int:
    H = read_hg(args.file)
    if not KERNELS[args.kernel].symmetric:
        raise CliError("spectral check requires symmetric kernel")
    P = build_partition(H)
    c = census(H)
    report = spectral_split_check(H, args.kernel, tol=args.tol, partition=P)
    identities = {
        "X0_eq_binom_I": c.X0 == c.I_n * (c.I_n - 1) // 2,
        "dim_loc_plus_units_eq_n": c.dim_loc + len(P.parts()) == H.n,
        "dim_loc_eq_sum_unit_sizes": c.dim_loc == sum(u.size - 1 for u in P.nontrivial()),
    }
    esd = esd_kolmogorov(report.spec_M, report.spec_quotient)
    ok = report.matched and report.equitable and all(identities.values())
    print(f"kernel {args.kernel}: n={H.n} m={H.m} units={len(P.parts())} "
          f"dim_loc={c.dim_loc}", file=sys.stderr)
    print(f"equitable={report.equitable} (deviation {report.equitable_deviation:g}), "
          f"matched={report.matched} (max error {report.max_match_error:.3g}), "
          f"esd distance {esd:.4g} <= {c.dim_loc / H.n:.4g}", file=sys.stderr)
    print("PASS" if ok else "FAIL", file=sys.stderr)
    _emit({"command": "check", "file": str(args.file), "tol": args.tol, **report.to_json(),
           "identities": identities, "esd_kolmogorov": esd, "dim_loc": c.dim_loc, "ok": ok})
    return 0 if ok else 1


def _plan_from_args(args) -> ExperimentPlan:
    if args.plan:
        try:
            data = json.loads(Path(args.plan).read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"plan file is not valid JSON: {exc}") from None
        return ExperimentPlan.from_json(data)
    missing = [f for f in ("n", "k", "regime", "trials") if getattr(args, f) is None]
    if missing:
        raise CliError("experiment needs --plan or " + ", ".join(f"--{f}" for f in missing))
    seed = args.seed if args.seed is not None else _default_seed()
    return ExperimentPlan(tuple(args.n), args.k, args.regime, args.trials, seed,
                          collect_spectral=args.spectral, r_max=args.r_max)


def cmd_experiment(args) -> int:
    plan = _plan_from_args(args)
    summary = run_experiment(plan, workers=args.workers)
    text = summary.dumps(include_timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.hist_dir:
        out = Path(args.hist_dir)
        out.mkdir(parents=True, exist_ok=True)
        for n in plan.n_list:
            for stat in PMF_STATS:
                (out / f"n{n}_{stat}.csv").write_text(summary.histogram_csv(n, stat))
    if summary.fatal:
        print("oracle mismatch beyond 5 SE: " + ", ".join(summary.fatal), file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperstar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hyperstar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample H(n, k, p) to a .hg file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--regime", type=_regime_arg, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("census", help="collision census of a .hg file")
    p.add_argument("file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("expect", help="exact and asymptotic E[X_r], E[T_n]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--regime", type=_regime_arg)
    p.add_argument("--r", type=int, default=1)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("limits", help="limit law for a degree regime")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--regime", type=_regime_arg, required=True)
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("matrix", help="export a star-dependent matrix as CSV")
    p.add_argument("file")
    p.add_argument("--kernel", choices=sorted(KERNELS), required=True)
    p.add_argument("--out")
    p.add_argument("--quotient-out")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("check", help="verify the global/local spectral split")
    p.add_argument("file")
    p.add_argument("--kernel", choices=sorted(KERNELS), default="codegree")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("experiment", help="seeded Monte Carlo experiment")
    p.add_argument("--plan")
    p.add_argument("--n", type=int, action="append")
    p.add_argument("--k", type=int)
    p.add_argument("--regime", type=_regime_arg)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--spectral", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--hist-dir")
    p.add_argument("--timing", action="store_true", help="include wall time in the JSON")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HyperstarError, CliError, OSError) as exc:
        print(f"hyperstar {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
