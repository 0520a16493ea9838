"""Command-line front end: solve, rate, gen, oracle, newton-check, bench.

Exit codes: 0 success, 2 input/usage error, 3 solver failure (including a
max-iteration stop), 4 infeasible generator dimensions.  All emitted files
are byte-identical for identical arguments and seed: floats are written with
round-trip repr, JSON keys are sorted, and nothing timestamps its output.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import model
from .analysis import (
    INCONCLUSIVE,
    classify_against_theory,
    measure_rate,
    support_count,
)
from .datagen import gen_appendix_a, gen_appendix_b, gen_random
from .datagen import brute_force_oracle
from .errors import FocussError, InfeasibleDimensionsError
from .model import GEN_APPENDIX_A, GEN_APPENDIX_B, GEN_RANDOM, GeneratedDataset
from .newton import (
    VARIANT_EXACT,
    VARIANT_QUASI,
    assemble_block,
    block_inverse,
    quasi_newton_step,
)
from .solver import (
    STOP_STEP_TOL,
    SolverConfig,
    default_init,
    focuss_step,
    solve,
)

_KINDS = (GEN_RANDOM, GEN_APPENDIX_A, GEN_APPENDIX_B)


def _ptag(p: float) -> str:
    return format(float(p), "g")


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_trace_csv(path: Path, trace) -> None:
    lines = ["t,cost,residual,step_norm,support"]
    for t in range(len(trace.costs)):
        step = "" if t == 0 else repr(trace.step_norms[t - 1])
        lines.append(
            f"{t},{trace.costs[t]!r},{trace.residuals[t]!r},{step},{trace.support_sizes[t]}"
        )
    path.write_text("\n".join(lines) + "\n")


def _write_rate_csv(path: Path, report) -> None:
    lines = ["t,R_t,valid"]
    for t, (r, v) in enumerate(zip(report.r_series, report.valid)):
        lines.append(f"{t},{float(r)!r},{1 if v else 0}")
    path.write_text("\n".join(lines) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _generate(kind: str, args, p=None) -> GeneratedDataset:
    ps = args.p or []
    if p is None:
        p = ps[0] if ps else None
    if kind == GEN_RANDOM:
        if args.m is None or args.n is None:
            raise ValueError("random generator needs --m and --n")
        return gen_random(args.m, args.n, args.seed, p=0.8 if p is None else p)
    if p is None:
        raise ValueError(f"{kind} generator needs --p in (1, 2)")
    if kind == GEN_APPENDIX_A:
        if args.m is None or args.n is None:
            raise ValueError("appendix-a generator needs --m and --n")
        return gen_appendix_a(args.m, args.n, p, args.seed)
    if kind == GEN_APPENDIX_B:
        if args.m is None or args.n is None or args.k is None:
            raise ValueError("appendix-b generator needs --m, --k and --n")
        return gen_appendix_b(args.m, args.k, args.n, p, args.seed)
    raise ValueError(f"unknown kind {kind!r}")


def _obtain_dataset(args, p=None) -> GeneratedDataset:
    if args.input:
        return model.loads_dataset(Path(args.input).read_text())
    if args.kind:
        return _generate(args.kind, args, p=p)
    raise ValueError("need either --input or --kind with dimensions")


def cmd_solve(args) -> int:
    dataset = _obtain_dataset(args)
    instance = dataset.instance
    ps = args.p or [dataset.p]
    out = _out_dir(args)
    ok = True
    for p in ps:
        config = SolverConfig(
            measure=p,
            max_iter=args.max_iter,
            step_tol=args.step_tol,
            zero_threshold=args.zero_threshold,
        )
        s0 = default_init(instance, args.seed)
        sol, trace = solve(instance, s0, config)
        tag = _ptag(p)
        _dump_json(
            out / f"solution_p{tag}.json",
            {
                "p": float(p),
                "solution": sol.tolist(),
                "support": support_count(sol, args.zero_threshold),
                "cost": trace.costs[-1],
                "residual": trace.residuals[-1],
                "iterations": len(trace.step_norms),
                "stop_reason": trace.stop_reason,
            },
        )
        _write_trace_csv(out / f"trace_p{tag}.csv", trace)
        if trace.stop_reason != STOP_STEP_TOL:
            print(f"p={tag}: stopped on {trace.stop_reason}", file=sys.stderr)
            ok = False
    return 0 if ok else 3


def cmd_rate(args) -> int:
    dataset = _obtain_dataset(args)
    instance = dataset.instance
    ps = args.p or [dataset.p]
    out = _out_dir(args)
    ok = True
    for p in ps:
        s0 = default_init(instance, args.seed)
        sol, trace, report = measure_rate(
            instance,
            p,
            s0,
            step_tol=args.step_tol,
            max_iter=args.max_iter,
            zero_threshold=args.zero_threshold,
        )
        support = support_count(sol, args.zero_threshold)
        if report.classification == INCONCLUSIVE:
            consistent = False
        else:
            consistent = classify_against_theory(
                p, support, instance.m, instance.n, report
            ).consistent
        tag = _ptag(p)
        _write_rate_csv(out / f"rate_p{tag}.csv", report)
        limiting = report.limiting_rate
        _dump_json(
            out / f"summary_p{tag}.json",
            {
                "p": float(p),
                "limiting_rate": limiting if np.isfinite(limiting) else None,
                "classification": report.classification,
                "support": support,
                "theory_consistent": bool(consistent),
            },
        )
        if trace.stop_reason != STOP_STEP_TOL:
            print(f"p={tag}: stopped on {trace.stop_reason}", file=sys.stderr)
            ok = False
    return 0 if ok else 3


def cmd_gen(args) -> int:
    if not args.kind:
        raise ValueError("gen needs --kind")
    out = _out_dir(args)
    ps = args.p or [None]
    if args.kind == GEN_RANDOM:
        ps = ps[:1]  # the random generator records p as metadata only
    for p in ps:
        dataset = _generate(args.kind, args, p=p)
        parts = [args.kind, f"m{args.m}"]
        if args.kind == GEN_APPENDIX_B:
            parts.append(f"k{args.k}")
        parts.append(f"n{args.n}")
        parts.append(f"p{_ptag(dataset.p)}")
        parts.append(f"seed{args.seed}")
        path = out / ("_".join(parts) + ".json")
        path.write_text(model.dumps_dataset(dataset))
        print(path)
    return 0


def cmd_oracle(args) -> int:
    dataset = _obtain_dataset(args)
    p = args.p[0] if args.p else 0.5
    result = brute_force_oracle(dataset.instance, p, max_n=args.max_n)
    out = _out_dir(args)
    _dump_json(
        out / f"oracle_p{_ptag(p)}.json",
        {
            "best_solution": result.best_solution.tolist(),
            "best_cost": result.best_cost,
            "supports_examined": result.supports_examined,
        },
    )
    print(f"best cost {result.best_cost!r} over {result.supports_examined} supports")
    return 0


def cmd_newton_check(args) -> int:
    m = args.m if args.m is not None else 5
    n = args.n if args.n is not None else 8
    rng = np.random.default_rng(args.seed)
    max_step_err = 0.0
    max_inv_err = 0.0
    for _ in range(args.inits):
        instance = model.ProblemInstance(
            rng.standard_normal((m, n)), rng.standard_normal(m)
        )
        s = rng.standard_normal(n)
        s[s == 0.0] = 1.0
        p = float(rng.uniform(0.25, 1.95))
        while abs(p - 1.0) < 0.05:
            p = float(rng.uniform(0.25, 1.95))
        _, s_newton = quasi_newton_step(instance, s, p)
        s_fixed = focuss_step(instance, s, SolverConfig(measure=p))
        err = float(
            np.linalg.norm(s_newton - s_fixed) / (1.0 + np.linalg.norm(s_fixed))
        )
        max_step_err = max(max_step_err, err)
        eye = np.eye(m + n)
        for variant in (VARIANT_QUASI, VARIANT_EXACT):
            H = assemble_block(instance, s, p, variant).H
            H_inv = block_inverse(instance, s, p, variant)
            max_inv_err = max(max_inv_err, float(np.max(np.abs(H @ H_inv - eye))))
    print(f"max step-equivalence error: {max_step_err:.3e}")
    print(f"max block-inverse identity error: {max_inv_err:.3e}")
    return 0 if max_step_err <= 1e-10 else 3


def cmd_bench(args) -> int:
    dataset = _obtain_dataset(args) if (args.input or args.kind) else None
    if dataset is None:
        m = args.m if args.m is not None else 20
        n = args.n if args.n is not None else 40
        dataset = gen_random(m, n, args.seed)
    instance = dataset.instance
    ps = args.p or [dataset.p]
    for p in ps:
        config = SolverConfig(
            measure=p,
            max_iter=args.max_iter,
            step_tol=args.step_tol,
            zero_threshold=args.zero_threshold,
        )
        s0 = default_init(instance, args.seed)
        t0 = time.perf_counter()
        _, trace = solve(instance, s0, config)
        wall = time.perf_counter() - t0
        iters = len(trace.step_norms)
        per = wall / max(iters, 1)
        print(
            f"p={_ptag(p)} m={instance.m} n={instance.n} iters={iters} "
            f"stop={trace.stop_reason} wall_s={wall:.4f} ms_per_iter={per * 1e3:.3f}"
        )
    return 0


def _add_common(sp, rate_defaults=False):
    sp.add_argument("--input", help="dataset JSON path")
    sp.add_argument("--out-dir", default=".", help="output directory")
    sp.add_argument(
        "--p",
        action="append",
        type=float,
        help="exponent; repeat for a grid (e.g. --p 0.8 --p 1.5)",
    )
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--kind", choices=_KINDS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument(
        "--max-iter", type=int, default=2000 if rate_defaults else 500
    )
    sp.add_argument(
        "--step-tol", type=float, default=1e-12 if rate_defaults else 1e-10
    )
    sp.add_argument("--zero-threshold", type=float, default=1e-8)
    sp.add_argument("--inits", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focuss",
        description="Sparse recovery via reweighted fixed-point iteration: "
        "solvers, convergence-rate measurement, dataset generators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="run the solver, write solution + trace")
    _add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("rate", help="measure per-iteration convergence ratios")
    _add_common(sp, rate_defaults=True)
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("gen", help="generate a dataset JSON")
    _add_common(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("oracle", help="exhaustive minimum over small supports")
    _add_common(sp)
    sp.add_argument("--max-n", type=int, default=20)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser(
        "newton-check", help="verify quasi-Newton/fixed-point step equivalence"
    )
    _add_common(sp)
    sp.set_defaults(func=cmd_newton_check)

    sp = sub.add_parser("bench", help="time the solver on a generated instance")
    _add_common(sp)
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleDimensionsError as exc:
        print(f"infeasible dimensions: {exc}", file=sys.stderr)
        return 4
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FocussError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
