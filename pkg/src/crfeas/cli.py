"""Command-line interface: ``crfeas {solve,bench,verify,cascade}``.

Exit codes: 0 success, 1 usage or I/O error, 2 non-convergence or divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .hilbert import DivergenceError
from .verify import run_all
from .wavelets.constraints import WaveletProblem
from .wavelets.filters import CascadeDivergenceError, cascade_samples, extract_filters, read_filters, \
    write_cascade_csv, write_filters

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _echo(config: dict) -> None:
    print("config: " + json.dumps(config, sort_keys=True))


def _problem(args) -> WaveletProblem:
    try:
        return WaveletProblem(args.M, args.D, args.problem)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _positive(kind):
    def parse(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {s}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crfeas", description="Projection algorithms for feasibility problems and wavelet design.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_flags(q):
        q.add_argument("--problem", choices=["symmetric", "real"], default="symmetric")
        q.add_argument("--M", type=int, default=6)
        q.add_argument("--D", type=int, default=2)

    s = sub.add_parser("solve", help="run one algorithm from one seeded start")
    problem_flags(s)
    s.add_argument("--algorithm", choices=list(bench.ALGORITHMS), default="cr-dr")
    s.add_argument("--eps", type=_positive(float), default=1e-6)
    s.add_argument("--max-iters", type=_positive(int), default=50_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, default=Path("filters.json"))

    b = sub.add_parser("bench", help="paired random-restart experiment")
    problem_flags(b)
    b.add_argument("--algorithms", nargs="+", choices=list(bench.ALGORITHMS), default=list(bench.ALGORITHMS))
    b.add_argument("--eps", type=_positive(float), nargs="+", default=[1e-6, 1e-9])
    b.add_argument("--trials", type=_positive(int), default=50)
    b.add_argument("--cutoff", type=_positive(int), default=50_000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timing-repeats", type=_positive(int), default=1)
    b.add_argument("--workers", type=_positive(int), default=1)
    b.add_argument("--out-dir", type=Path, default=Path("bench-out"))

    sub.add_parser("verify", help="run the fixture suites")

    c = sub.add_parser("cascade", help="sample the scaling function and wavelet of a filter file")
    c.add_argument("--filters", type=Path, required=True)
    c.add_argument("--levels", type=_positive(int), default=10)
    c.add_argument("--out", type=Path, default=Path("cascade.csv"))
    return p


def cmd_solve(args) -> int:
    problem = _problem(args)
    config = dict(problem.describe(), command="solve", algorithm=args.algorithm, eps=args.eps,
                  max_iters=args.max_iters, seed=args.seed, out=str(args.out))
    _echo(config)
    x0 = problem.random_start(bench.trial_seed(args.seed, 0))
    try:
        trace, shadow = bench.solve(problem, args.algorithm, x0, args.eps, args.max_iters)
    except DivergenceError as exc:
        print(f"diverged at iteration {exc.iteration}", file=sys.stderr)
        return EXIT_FAILED
    res = problem.residuals(shadow)
    print(f"iterations: {trace.iteration_count}")
    print(f"terminated: {trace.terminated}")
    print("residuals: " + " ".join(f"{k}={v:.3e}" for k, v in res.items()))
    if not trace.converged:
        return EXIT_FAILED
    write_filters(args.out, extract_filters(shadow), problem.M, problem.D, problem.variant, res)
    print(f"filters written to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    problem = _problem(args)
    cfg = bench.ExperimentConfig(problem, tuple(args.algorithms), tuple(args.eps), args.trials, args.cutoff,
                                 args.seed, args.timing_repeats)
    header = cfg.describe()
    _echo(dict(header, command="bench", workers=args.workers, out_dir=str(args.out_dir)))
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        stem = f"{problem.variant}_M{problem.M}_D{problem.D}"
        trials_path = args.out_dir / f"{stem}_trials.csv"
        stats_path = args.out_dir / f"{stem}_stats.csv"
        trials_path.touch()
        stats_path.touch()
    except OSError as exc:
        print(f"cannot write to {args.out_dir}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    records = bench.run_experiment(cfg, workers=args.workers)
    rows = bench.stats_table(records, cfg.algorithms, cfg.epsilons)
    try:
        bench.write_trials_csv(trials_path, records, header)
        bench.write_stats_csv(stats_path, rows, problem.parameters_label(), header)
    except OSError as exc:
        print(f"cannot write results: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for r in rows:
        med = "NA" if r.median is None else f"{r.median:g}"
        print(f"eps={r.epsilon:g} {r.algorithm:7s} solved={r.cases_solved}/{cfg.trials} wins={r.wins} median={med}")
    print(f"wrote {trials_path} and {stats_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    _echo({"command": "verify"})
    results = run_all()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_cascade(args) -> int:
    _echo({"command": "cascade", "filters": str(args.filters), "levels": args.levels, "out": str(args.out)})
    try:
        f, doc = read_filters(args.filters)
    except (OSError, ValueError) as exc:
        print(f"cannot read filters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = cascade_samples(f, args.levels)
    except CascadeDivergenceError as exc:
        print(f"cascade diverged: {exc}", file=sys.stderr)
        return EXIT_FAILED
    header = {"filters": str(args.filters), "levels": args.levels,
              **{k: doc[k] for k in ("M", "D", "variant") if k in doc}}
    try:
        write_cascade_csv(args.out, res, header)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {len(res.t)} samples to {args.out}")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "verify": cmd_verify, "cascade": cmd_cascade}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
