"""Repeated-trial experiments: iteration sweeps, element-count sweeps with
quantiles and hardening ratios, runtime reports, and CSV/JSON export."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .channel import db_to_lin, draw_realization, lin_to_db
from .config import InvalidParameterError, Scenario
from .objective import build_objective, with_measurement_noise
from .optimizers import OptimizerResult, run_algorithm


@dataclass
class TrialPlan:
    scenario: Scenario
    algos: tuple[str, ...] = ("ce",)
    n_values: tuple[int, ...] = (304,)
    trials: int = 500
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 0:
            raise InvalidParameterError(f"trials must be >= 0, got {self.trials}")
        if not self.n_values or any(n < 0 for n in self.n_values) or list(self.n_values) != sorted(set(self.n_values)):
            raise InvalidParameterError(f"N values must be non-negative and ascending, got {self.n_values}")

    @classmethod
    def from_scenario(cls, sc: Scenario, **kw) -> "TrialPlan":
        base = dict(algos=sc.harness.algos, n_values=(sc.ris.N,), trials=sc.harness.trials, seed=sc.harness.seed)
        base.update(kw)
        return cls(scenario=sc, **base)


@dataclass
class TrialRecord:
    trial: int
    algo: str
    n: int
    snr_db: float
    best_snr_db: float
    evaluations: int
    best_curve: np.ndarray = field(repr=False)
    seconds: float = 0.0
    reason: str = ""


def trial_streams(master: int, trial: int) -> tuple[np.random.Generator, ...]:
    """(channel, optimizer, measurement-noise) streams for one trial.

    Depends only on (master seed, trial index), so every algorithm sees the same
    channel and the same first random configuration in trial r.
    """
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence([master, trial]).spawn(3))


def _run_one(args) -> list[TrialRecord]:
    sc, algos, n, master, r = args
    out = []
    for algo in algos:
        ch_rng, opt_rng, noise_rng = trial_streams(master, r)
        real = draw_realization(sc, ch_rng, n)
        if algo == "none":
            real = real.without_ris()
        obj = build_objective(sc.objective.kind, real, rng=noise_rng)
        t0 = time.perf_counter()
        try:
            res = run_algorithm(algo, obj, sc.optimizer, opt_rng)
        except Exception as exc:
            raise RuntimeError(f"trial {r} ({algo}, N={n}) failed: {exc}") from exc
        dt = time.perf_counter() - t0
        out.append(TrialRecord(r, algo, n, res.snr_db, res.best_snr_db, res.evaluations,
                               res.trace.best_db, dt, res.reason))
    return out


def run_trials(plan: TrialPlan, n: int | None = None) -> list[TrialRecord]:
    """All (trial, algorithm) runs for one element count, ordered by trial then algorithm."""
    n = plan.n_values[0] if n is None else n
    jobs = [(plan.scenario, tuple(plan.algos), n, plan.seed, r) for r in range(plan.trials)]
    if plan.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(plan.workers) as ex:
            chunks = list(ex.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * plan.workers))))
    else:
        chunks = [_run_one(j) for j in jobs]
    return [rec for chunk in chunks for rec in chunk]


@dataclass
class TrialStatistics:
    mean_db: float
    q10_db: float
    q90_db: float
    ratio: float
    count: int


def nearest_rank(sorted_values, q: float) -> float:
    n = len(sorted_values)
    k = max(1, math.ceil(round(q * n, 9)))
    return float(sorted_values[min(k, n) - 1])


def statistics(snr_db_samples) -> TrialStatistics:
    """Mean (linear domain, reported in dB), nearest-rank dB quantiles, variance/mean^2."""
    x = np.asarray(snr_db_samples, dtype=float)
    if x.size == 0:
        raise InvalidParameterError("statistics of an empty sample")
    lin = db_to_lin(x)
    mean = float(lin.mean())
    # identical readings have exactly zero spread; avoid round-off in the mean
    var = float(lin.var(ddof=1)) if x.size > 1 and np.ptp(x) > 0 else 0.0
    s = np.sort(x)
    return TrialStatistics(
        mean_db=float(lin_to_db(mean)),
        q10_db=nearest_rank(s, 0.1),
        q90_db=nearest_rank(s, 0.9),
        ratio=var / mean**2 if mean > 0 else 0.0,
        count=int(x.size),
    )


@dataclass(frozen=True)
class ReferenceCurve:
    kind: str  # "n_squared" (dB) or "scaled_inverse_n" (ratio)
    n0: int
    value0: float

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        if self.kind == "n_squared":
            return self.value0 + 20.0 * np.log10(n / self.n0)
        if self.kind == "scaled_inverse_n":
            return self.value0 * self.n0 / n
        raise ValueError(self.kind)


@dataclass
class ElementSweep:
    rows: list[dict]
    curves: list[ReferenceCurve]
    records: list[TrialRecord] = field(repr=False, default_factory=list)


def sweep_elements(plan: TrialPlan, anchor_algo: str = "ce") -> ElementSweep:
    rows, records = [], []
    for n in plan.n_values:
        recs = run_trials(plan, n)
        records.extend(recs)
        for algo in plan.algos:
            vals = [r.snr_db for r in recs if r.algo == algo]
            if not vals:
                continue
            st = statistics(vals)
            rows.append(dict(N=n, algo=algo, mean_db=st.mean_db, q10_db=st.q10_db, q90_db=st.q90_db,
                             ratio=st.ratio, n_trials=st.count))
    curves = []
    anchor = [r for r in rows if r["algo"] == anchor_algo and r["N"] == plan.n_values[-1]]
    if anchor:
        a = anchor[0]
        curves = [ReferenceCurve("n_squared", a["N"], a["mean_db"]),
                  ReferenceCurve("scaled_inverse_n", a["N"], a["ratio"])]
    return ElementSweep(rows, curves, records)


def best_at(curve: np.ndarray, evals: int) -> float:
    """Best-so-far after ``evals`` evaluations (checkpoint 0 reads the first evaluation)."""
    k = min(max(evals, 1), len(curve))
    return float(curve[k - 1])


@dataclass
class IterationSweep:
    rows: list[dict]
    records: list[TrialRecord] = field(repr=False, default_factory=list)


def default_checkpoints(sc: Scenario) -> tuple[int, ...]:
    K = sc.optimizer.K
    return tuple(t * K for t in range(sc.optimizer.T + 1))


def sweep_iterations(plan: TrialPlan, checkpoints=None) -> IterationSweep:
    """Mean best-so-far SNR (linear mean, in dB) per algorithm at each evaluation checkpoint."""
    checkpoints = tuple(checkpoints) if checkpoints is not None else default_checkpoints(plan.scenario)
    budget = plan.scenario.optimizer.budget
    if any(c < 0 or c > budget for c in checkpoints):
        raise InvalidParameterError(f"checkpoints must lie in [0, {budget}]")
    recs = run_trials(plan)
    rows = []
    for algo in plan.algos:
        mine = [r for r in recs if r.algo == algo]
        if not mine:
            continue
        for c in checkpoints:
            vals = db_to_lin([best_at(r.best_curve, c) for r in mine])
            rows.append(dict(evals=c, algo=algo, mean_best_db=float(lin_to_db(vals.mean())), n_trials=len(mine)))
    return IterationSweep(rows, recs)


@dataclass
class TimingRow:
    algo: str
    mean_seconds: float
    n_runs: int
    complexity: str = "O(T*K*N)"


def wallclock_report(plan: TrialPlan) -> list[TimingRow]:
    """Mean wall-clock seconds per complete optimizer run (sequential, excludes channel draws)."""
    if plan.trials == 0:
        return []
    seq = TrialPlan(plan.scenario, plan.algos, plan.n_values, plan.trials, plan.seed, workers=1)
    recs = run_trials(seq, plan.n_values[-1])
    return [TimingRow(a, float(np.mean([r.seconds for r in recs if r.algo == a])),
                      sum(r.algo == a for r in recs)) for a in plan.algos]


def remeasure(result: OptimizerResult, inner, std_dB: float, R: int, rng: np.random.Generator) -> TrialStatistics:
    """Read one optimized configuration R times through a noisy wrapper."""
    noisy = with_measurement_noise(inner, std_dB, rng)
    return statistics([noisy.evaluate(result.config) for _ in range(R)])


# ---- export -----------------------------------------------------------------

ELEMENT_COLUMNS = ("N", "algo", "mean_db", "q10_db", "q90_db", "ratio", "n_trials")
ITERATION_COLUMNS = ("evals", "algo", "mean_best_db", "n_trials")
TIMING_COLUMNS = ("algo", "mean_seconds", "n_runs", "complexity")
TRACE_COLUMNS = ("eval_idx", "snr_db", "best_db", "config_bits")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def metadata(sc: Scenario, seed: int, **extra) -> dict:
    return dict(scenario_hash=sc.hash(), master_seed=seed, version=__version__, **extra)


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def export(rows: list[dict], columns, path: str | os.PathLike, fmt: str = "csv", meta: dict | None = None,
           extra: dict | None = None) -> None:
    """Write result rows as CSV (``columns`` order) or JSON with a metadata header."""
    if fmt == "csv":
        text = rows_to_csv(rows, columns)
    elif fmt == "json":
        doc = {"metadata": meta or {}, "columns": list(columns), "rows": [{c: r[c] for c in columns} for r in rows]}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    else:
        raise InvalidParameterError(f"format must be csv or json, got {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _parse_cell(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def read_rows(path: str | os.PathLike) -> list[dict]:
    """Load rows written by :func:`export` (format chosen by content)."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if text.lstrip().startswith("{"):
        return json.loads(text)["rows"]
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _parse_cell(v) for k, v in row.items()} for row in reader]


def read_metadata(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)["metadata"]


def curves_json(curves: list[ReferenceCurve], n_values) -> dict:
    return {"reference_curves": [dict(asdict(c), values=[float(c(n)) for n in n_values]) for c in curves]}


def trace_rows(result: OptimizerResult) -> list[dict]:
    from .optimizers import pack_hex

    best = result.trace.best_db
    return [dict(eval_idx=i, snr_db=v, best_db=float(best[i]), config_bits=pack_hex(x))
            for i, (x, v) in enumerate(zip(result.trace.configs, result.trace.snr_db))]
