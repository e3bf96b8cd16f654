"""Command-line front end: generate problems, solve them, sweep benchmarks,
and run the verification suites.

Exit codes: 0 success, 1 failure, 2 vacuous / not applicable, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, bench
from .errors import PermSyncError
from .models import MODELS, ModelConfig, SeededRng, generate_instance
from .problem_io import read_problem, write_problem, write_solution
from .solvers import Schedule, cemp_init

EX_OK = 0
EX_FAIL = 1
EX_VACUOUS = 2
EX_USAGE = 64

SOLVE_ALGOS = tuple(bench.ALGOS) + ("cemp-init",)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse default exits with 2
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=float, default=1.0, help="graph density (default 1.0)")
    p.add_argument("--q", type=float, help="uniform: corruption probability")
    p.add_argument("--eps", type=float, help="superspreader: survival probability")
    p.add_argument("--node", type=int, default=0, help="superspreader node (default 0)")
    p.add_argument("--dx", choices=("haar", "lac", "mixture"), default="haar",
                   help="superspreader corrupted-block sampler")
    p.add_argument("--mix-prob", type=float, help="mixture sampler probability")
    p.add_argument("--nc", type=int, help="lbc/lac: corrupted node count")
    p.add_argument("--mc", type=int, help="lbc/lac: corrupted incident edges per node")


def _model_config(args: argparse.Namespace) -> ModelConfig:
    return ModelConfig(model=args.model, n=args.n, m=args.m, p=args.p, q=args.q,
                       eps=args.eps, node=args.node, dx=args.dx,
                       mix_prob=args.mix_prob, n_c=args.nc, m_c=args.mc)


def _schedule(args: argparse.Namespace) -> Schedule:
    kwargs = {}
    if getattr(args, "t0", None) is not None:
        kwargs["t0"] = args.t0
    if getattr(args, "tmax", None) is not None:
        kwargs["t_max"] = args.tmax
    return Schedule(**kwargs)


def build_parser() -> _Parser:
    parser = _Parser(prog="permsync", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic problem file")
    _add_model_flags(gen)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="solve a problem file")
    solve.add_argument("--in", dest="infile", required=True)
    solve.add_argument("--algo", required=True, choices=SOLVE_ALGOS)
    solve.add_argument("--out", required=True)
    solve.add_argument("--t0", type=int)
    solve.add_argument("--tmax", type=int)

    benchp = sub.add_parser("benchmark", help="sweep a parameter over seeded trials")
    _add_model_flags(benchp)
    benchp.add_argument("--algos", required=True,
                        help="comma-separated tags from: " + ",".join(bench.ALGOS))
    benchp.add_argument("--sweep", required=True, choices=tuple(bench.SWEEP_PARAMS))
    benchp.add_argument("--values", required=True, help="comma-separated sweep values")
    benchp.add_argument("--trials", type=int, default=20)
    benchp.add_argument("--seed", type=int, required=True)
    benchp.add_argument("--out", required=True, help="raw per-trial CSV path")
    benchp.add_argument("--aggregate-out", required=True, help="mean/std CSV path")
    benchp.add_argument("--error-metric", choices=("auto", "bad-edges", "all-pairs"),
                        default="auto")
    benchp.add_argument("--timing", action="store_true",
                        help="fill runtime_ms with measured wall time "
                             "(breaks byte-level reproducibility)")
    benchp.add_argument("--t0", type=int)
    benchp.add_argument("--tmax", type=int)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", required=True,
                     choices=("hungarian", "prop31", "prop42", "thm52",
                              "ppm-failure", "invariants"))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int)
    ver.add_argument("--beta0", type=float, default=40.0)
    ver.add_argument("--n", type=int)
    ver.add_argument("--m", type=int)
    ver.add_argument("--eps", type=float)
    ver.add_argument("--p", type=float)
    ver.add_argument("--mix-prob", type=float)
    return parser


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _model_config(args)
    inst = generate_instance(cfg, SeededRng(args.seed))
    write_problem(args.out, inst)
    print(f"n={inst.n} m={inst.m} edges={inst.meas.num_edges} "
          f"bad_edges={len(inst.bad_edges)} out={args.out}")
    return EX_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = read_problem(args.infile)
    sched = _schedule(args)
    if args.algo == "cemp-init":
        aff = cemp_init(inst.meas, sched)
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.write("i,j,affinity\n")
            for (i, j), v in zip(map(tuple, aff.edges), aff.values):
                fh.write(f"{i},{j},{v!r}\n")
        print(f"algo=cemp-init edges={len(aff.edges)} out={args.out}")
        return EX_OK
    report = bench.ALGOS[args.algo](inst, sched)
    write_solution(args.out, report.estimate)
    print(f"algo={args.algo} iterations={report.iterations} "
          f"converged={'true' if report.converged else 'false'} out={args.out}")
    if inst.truth is not None:
        edges = (np.array(sorted(inst.bad_edges), dtype=np.int64)
                 if inst.bad_edges else "all_pairs")
        err = analysis.relative_error(report.estimate, inst.truth, edges).error
        print(f"error {err:.6f}")
    return EX_OK


def cmd_benchmark(args: argparse.Namespace) -> int:
    run = bench.RunConfig(
        base=_model_config(args),
        algos=tuple(tag.strip() for tag in args.algos.split(",") if tag.strip()),
        sweep_param=args.sweep,
        sweep_values=tuple(tok.strip() for tok in args.values.split(",") if tok.strip()),
        trials=args.trials,
        seed=args.seed,
        error_metric=args.error_metric,
        schedule=_schedule(args),
        timing=args.timing,
    )
    rows, agg = bench.run_benchmark(run)
    bench.write_raw_csv(args.out, rows)
    bench.write_aggregate_csv(args.aggregate_out, agg)
    print(f"rows={len(rows)} out={args.out} aggregate={args.aggregate_out}")
    return EX_OK


def cmd_verify(args: argparse.Namespace) -> int:
    suite = args.suite
    if suite == "hungarian":
        res = analysis.verify_assignment_solver(seed=args.seed)
        print(f"matrices={res.matrices} value_mismatches={res.value_mismatches} "
              f"lex_mismatches={res.lex_mismatches}")
        print("PASS" if res.passed else "FAIL")
        return EX_OK if res.passed else EX_FAIL
    if suite == "prop31":
        res31 = analysis.run_prop31_suite(seed=args.seed)
        print(f"applicable={res31.applicable} failures={res31.failures} "
              f"max_deviation={res31.max_deviation!r}")
        if res31.vacuous:
            print("VACUOUS")
            return EX_VACUOUS
        print("PASS" if res31.passed else "FAIL")
        return EX_OK if res31.passed else EX_FAIL
    if suite == "prop42":
        res42 = analysis.run_prop42_suite(seed=args.seed)
        print(f"instances={res42.instances} comparisons={res42.comparisons} "
              f"max_deviation={res42.max_deviation!r} tol={res42.tol!r}")
        print("PASS" if res42.passed else "FAIL")
        return EX_OK if res42.passed else EX_FAIL
    if suite == "thm52":
        cfg = ModelConfig(model="superspreader", n=args.n or 200, m=args.m or 10,
                          p=args.p or 1.0, eps=args.eps if args.eps is not None else 0.3,
                          node=0, dx="lac")
        res52 = analysis.verify_theorem52(cfg, beta0=args.beta0,
                                          trials=args.trials or 20, seed=args.seed)
        print(f"condition: lhs={res52.condition_lhs:.4f} rhs={res52.condition_rhs:.4f} "
              f"ok={res52.condition_ok}")
        for k, chk in enumerate(res52.checks):
            print(f"trial {k}: achieved={chk.achieved:.4f} bound={chk.bound:.4f} "
                  f"{'ok' if chk.passed else 'exceeded'}")
        if res52.vacuous:
            print("VACUOUS (cycle-inconsistency condition not satisfied)")
            return EX_VACUOUS
        print(f"passed {res52.passed_trials}/{len(res52.checks)} "
              f"(required {res52.required_trials})")
        print("PASS" if res52.passed else "FAIL")
        return EX_OK if res52.passed else EX_FAIL
    if suite == "ppm-failure":
        respf = analysis.verify_ppm_failure(
            n=args.n or 500, m=args.m or 10,
            eps=args.eps if args.eps is not None else 0.05,
            mix_prob=args.mix_prob if args.mix_prob is not None else 0.95,
            trials=args.trials or 20, seed=args.seed)
        print(f"param_value={respf.param_value:.4f} param_ok={respf.param_ok}")
        print(f"qualifying={respf.qualifying} locked_on_target={respf.successes}")
        if not respf.param_ok or respf.qualifying == 0:
            print("VACUOUS")
            return EX_VACUOUS
        print("PASS" if respf.passed else "FAIL")
        return EX_OK if respf.passed else EX_FAIL
    resinv = analysis.run_invariants_suite(seed=args.seed)
    for name, ok in resinv.checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    print("PASS" if resinv.passed else "FAIL")
    return EX_OK if resinv.passed else EX_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "benchmark":
            return cmd_benchmark(args)
        return cmd_verify(args)
    except (PermSyncError, ValueError, OSError) as exc:
        print(f"permsync: {exc}", file=sys.stderr)
        if isinstance(exc, ValueError):
            return EX_USAGE
        return EX_FAIL


if __name__ == "__main__":
    sys.exit(main())
