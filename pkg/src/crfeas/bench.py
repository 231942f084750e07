"""Seeded random-restart experiments comparing product and constraint-reduced solvers.

Every trial draws one starting point from ``SeedSequence([seed, trial])`` and
runs each algorithm from the diagonal lift of that same point, so results are
paired across algorithms. Statistics follow the usual table layout: cases
solved, solved alone, solved by both, wins, and mean/median iterations and
mean running time over the trials solved by both members of a pair.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .hilbert import DivergenceError, StoppingCriterion, iterate
from .reformulation import make_cr_dr, make_cr_map, make_product_dr, make_product_map

__all__ = [
    "ALGORITHMS",
    "PAIRS",
    "ExperimentConfig",
    "RunStats",
    "TrialRecord",
    "aggregate",
    "run_experiment",
    "solve",
    "stats_table",
    "trial_seed",
    "write_stats_csv",
    "write_trials_csv",
]

# name -> (reformulation kind, operator builder, stopping kind)
ALGORITHMS = {
    "p-dr": ("pierra", make_product_dr, "dr-shadow-gap"),
    "cr-dr": ("constraint-reduced", make_cr_dr, "dr-shadow-gap"),
    "p-map": ("pierra", make_product_map, "map-residual"),
    "cr-map": ("constraint-reduced", make_cr_map, "map-residual"),
}

# (product algorithm, constraint-reduced counterpart)
PAIRS = (("p-dr", "cr-dr"), ("p-map", "cr-map"))


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Per-trial seed: the trial index is mixed into the master seed by ``SeedSequence``'s hash."""
    return np.random.SeedSequence([int(seed), int(trial)])


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment.

    ``problem`` must provide ``feasibility_problem()``, ``random_start(seed)``,
    ``residuals(x)``, ``parameters_label()`` and ``describe()``;
    :class:`~crfeas.wavelets.constraints.WaveletProblem` does.
    """

    problem: object
    algorithms: tuple = ("p-dr", "cr-dr", "p-map", "cr-map")
    epsilons: tuple = (1e-6, 1e-9)
    trials: int = 50
    cutoff: int = 50_000
    seed: int = 0
    timing_repeats: int = 1

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.timing_repeats < 1:
            raise ValueError("timing_repeats must be >= 1")
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")

    def describe(self) -> dict:
        d = dict(self.problem.describe())
        d.update(
            algorithms=list(self.algorithms),
            epsilons=list(self.epsilons),
            trials=self.trials,
            cutoff=self.cutoff,
            seed=self.seed,
            timing_repeats=self.timing_repeats,
        )
        return d


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    algorithm: str
    epsilon: float
    converged: bool
    iterations: int
    wall_time_s: float
    final_residuals: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RunStats:
    """Table row for one algorithm of a pair; ``None`` marks an unavailable statistic."""

    algorithm: str
    epsilon: float
    cases_solved: int
    solved_alone: Optional[int]
    solved_by_both: Optional[int]
    wins: Optional[int]
    mean: Optional[float]
    median: Optional[float]
    running_time: Optional[float]


def solve(problem, algorithm: str, x0, epsilon: float, cutoff: int):
    """Run one algorithm from the diagonal lift of ``x0``.

    Returns ``(trace, shadow)`` where ``shadow`` is the block average of the
    final iterate. A diverging run is reported as a cutoff trace.
    """
    kind, build, stop_kind = ALGORITHMS[algorithm]
    fp = problem.feasibility_problem()
    ref = fp.pierra() if kind == "pierra" else fp.constraint_reduced()
    op = build(ref)
    stop = StoppingCriterion(stop_kind, epsilon, cutoff)
    trace = iterate(op, ref.lift(x0), stop)
    return trace, op.shadow(op.project_w(trace.final))


def _run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    x0 = cfg.problem.random_start(trial_seed(cfg.seed, trial))
    out = []
    for alg in cfg.algorithms:
        for eps in cfg.epsilons:
            times = []
            try:
                for _ in range(cfg.timing_repeats):
                    trace, shadow = solve(cfg.problem, alg, x0, eps, cfg.cutoff)
                    times.append(trace.wall_time)
                converged, its = trace.converged, trace.iteration_count
                res = cfg.problem.residuals(shadow)
            except DivergenceError as exc:
                converged, its, res = False, exc.iteration, {}
                times = times or [0.0]
            out.append(TrialRecord(trial, alg, eps, converged, its, float(np.mean(times)), res))
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[TrialRecord]:
    """All trials x algorithms x epsilons, ordered by trial, then algorithm, then epsilon.

    With ``workers > 1`` trials run in separate processes; the records are
    identical to a serial run apart from wall times.
    """
    if workers <= 1:
        chunks = [_run_trial(cfg, t) for t in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    return [r for chunk in chunks for r in chunk]


def _by_trial(records, algorithm, epsilon) -> dict[int, TrialRecord]:
    return {r.trial: r for r in records if r.algorithm == algorithm and r.epsilon == epsilon}


def aggregate(records: Sequence[TrialRecord], pair: tuple[str, str], epsilon: float) -> tuple[RunStats, RunStats]:
    """Statistics for both members of ``pair`` at tolerance ``epsilon``.

    Wins are strict: equal iteration counts count for neither algorithm.
    Mean, median and running time are taken over the trials solved by both;
    they are ``None`` when that set is empty.
    """
    a, b = pair
    ra, rb = _by_trial(records, a, epsilon), _by_trial(records, b, epsilon)
    if not ra or not rb:
        raise ValueError(f"records lack {a if not ra else b} at epsilon={epsilon}")
    if set(ra) != set(rb):
        raise ValueError("the two algorithms were not run on the same trials")
    solved_a = {t for t, r in ra.items() if r.converged}
    solved_b = {t for t, r in rb.items() if r.converged}
    both = sorted(solved_a & solved_b)
    wins_a = sum(ra[t].iterations < rb[t].iterations for t in both)
    wins_b = sum(rb[t].iterations < ra[t].iterations for t in both)

    def row(name, recs, solved, other, wins):
        its = [recs[t].iterations for t in both]
        return RunStats(
            algorithm=name,
            epsilon=epsilon,
            cases_solved=len(solved),
            solved_alone=len(solved - other),
            solved_by_both=len(both),
            wins=wins,
            mean=float(np.mean(its)) if both else None,
            median=float(statistics.median(its)) if both else None,
            running_time=float(np.mean([recs[t].wall_time_s for t in both])) if both else None,
        )

    return row(a, ra, solved_a, solved_b, wins_a), row(b, rb, solved_b, solved_a, wins_b)


def _single(records, algorithm, epsilon) -> RunStats:
    recs = _by_trial(records, algorithm, epsilon)
    solved = [r for r in recs.values() if r.converged]
    its = [r.iterations for r in solved]
    return RunStats(
        algorithm=algorithm,
        epsilon=epsilon,
        cases_solved=len(solved),
        solved_alone=None,
        solved_by_both=None,
        wins=None,
        mean=float(np.mean(its)) if its else None,
        median=float(statistics.median(its)) if its else None,
        running_time=float(np.mean([r.wall_time_s for r in solved])) if solved else None,
    )


def stats_table(records: Sequence[TrialRecord], algorithms: Sequence[str], epsilons: Sequence[float]) -> list[RunStats]:
    """Rows for every epsilon and algorithm; an algorithm without its pair partner gets solo statistics."""
    rows = []
    for eps in epsilons:
        done = set()
        for a, b in PAIRS:
            if a in algorithms and b in algorithms:
                rows.extend(aggregate(records, (a, b), eps))
                done.update((a, b))
        rows.extend(_single(records, alg, eps) for alg in algorithms if alg not in done)
    order = {alg: n for n, alg in enumerate(algorithms)}
    return sorted(rows, key=lambda r: (epsilons.index(r.epsilon), order[r.algorithm]))


def _header(config: dict) -> str:
    return "# " + json.dumps(config, sort_keys=True) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trials_csv(path, records: Sequence[TrialRecord], config: dict) -> None:
    buf = io.StringIO()
    buf.write(_header(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "algorithm", "epsilon", "converged", "iterations", "wall_time_s"])
    for r in records:
        w.writerow([r.trial, r.algorithm, _fmt(r.epsilon), str(r.converged).lower(), r.iterations,
                    _fmt(r.wall_time_s)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_stats_csv(path, rows: Sequence[RunStats], label: str, config: dict) -> None:
    buf = io.StringIO()
    buf.write(_header(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["problem_parameters", "epsilon", "algorithm", "cases_solved", "solved_alone",
                "solved_by_both", "wins", "mean", "median", "running_time"])
    for s in rows:
        w.writerow([label, _fmt(s.epsilon), s.algorithm, s.cases_solved, _fmt(s.solved_alone),
                    _fmt(s.solved_by_both), _fmt(s.wins), _fmt(s.mean), _fmt(s.median),
                    _fmt(s.running_time)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
