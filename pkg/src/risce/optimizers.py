"""Binary-configuration optimizers working against the :class:`Objective` contract.

Cross-entropy with independent Bernoulli sampling is the method under study;
simulated annealing, constant-temperature Metropolis-Hastings, uniform random
search and exhaustive enumeration are the baselines and the ground-truth oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import InvalidParameterError
from .objective import Objective

ALGORITHMS = ("ce", "sa", "mh", "random", "none")
EXHAUSTIVE_MAX_N = 24


@dataclass
class Trace:
    """Per-evaluation log; rows are in evaluation order."""

    configs: list[np.ndarray] = field(default_factory=list)
    snr_db: list[float] = field(default_factory=list)
    policies: list[np.ndarray] = field(default_factory=list)
    # SNR of the walk's current state after each step (SA/MH only)
    current_db: list[float] = field(default_factory=list)

    def add(self, x: np.ndarray, v: float) -> None:
        self.configs.append(np.array(x, dtype=np.uint8))
        self.snr_db.append(float(v))

    def __len__(self) -> int:
        return len(self.snr_db)

    @property
    def best_db(self) -> np.ndarray:
        return np.maximum.accumulate(np.asarray(self.snr_db, dtype=float)) if self.snr_db else np.zeros(0)


@dataclass
class OptimizerResult:
    """Outcome of one optimizer run.

    ``config``/``snr_db`` is what the algorithm returns (for CE: the binarized
    policy). ``best_config``/``best_snr_db`` is the best configuration ever
    evaluated during the run.
    """

    algo: str
    config: np.ndarray
    snr_db: float
    best_config: np.ndarray
    best_snr_db: float
    trace: Trace
    reason: str
    evaluations: int


@dataclass(frozen=True)
class CeParams:
    T: int = 15
    K: int = 100
    beta: float = 0.1

    def __post_init__(self):
        if self.T < 1 or self.K < 1:
            raise InvalidParameterError(f"T and K must be >= 1, got T={self.T}, K={self.K}")
        if not 0 < self.beta <= 1:
            raise InvalidParameterError(f"beta must lie in (0, 1], got {self.beta}")

    @property
    def elite_size(self) -> int:
        return elite_size(self.K, self.beta)


def elite_size(K: int, beta: float) -> int:
    # rounding guard: 0.1*100 must give 10, not 11
    return max(1, math.ceil(round(beta * K, 9)))


def ce_sample(policy: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    """K configurations, bit i ~ Bernoulli(policy[i]) independently."""
    p = np.asarray(policy, dtype=float)
    return (rng.random((K, p.size)) < p).astype(np.uint8)


def select_elite(samples: np.ndarray, scores, beta: float) -> np.ndarray:
    """The ceil(beta*K) highest-scoring samples; ties go to the earlier sample."""
    scores = np.asarray(scores, dtype=float)
    if len(samples) != len(scores):
        raise InvalidParameterError("samples and scores differ in length")
    J = elite_size(len(scores), beta)
    order = np.argsort(-scores, kind="stable")
    return np.asarray(samples)[order[:J]]


def ce_update(elite: np.ndarray) -> np.ndarray:
    """Column means of the elite set."""
    elite = np.asarray(elite)
    if elite.ndim != 2 or len(elite) == 0:
        raise InvalidParameterError("elite set must be a non-empty 2-D array")
    return elite.mean(axis=0)


def is_binary(policy: np.ndarray) -> bool:
    return bool(np.all((policy == 0.0) | (policy == 1.0)))


def binarize(policy) -> np.ndarray:
    return (np.asarray(policy, dtype=float) > 0.5).astype(np.uint8)


def _result(algo, obj, trace, config, value, reason, start_count) -> OptimizerResult:
    i = int(np.argmax(trace.snr_db))
    return OptimizerResult(
        algo=algo,
        config=np.asarray(config, dtype=np.uint8),
        snr_db=float(value),
        best_config=trace.configs[i],
        best_snr_db=trace.snr_db[i],
        trace=trace,
        reason=reason,
        evaluations=obj.evaluation_count() - start_count,
    )


def ce_optimize(obj: Objective, params: CeParams, rng: np.random.Generator) -> OptimizerResult:
    n = obj.dimension()
    start = obj.evaluation_count()
    trace = Trace()
    seen: dict[bytes, float] = {}
    P = np.full(n, 0.5)
    trace.policies.append(P.copy())
    reason = "post-processed"
    for _ in range(params.T):
        X = ce_sample(P, params.K, rng)
        scores = np.empty(params.K)
        # configurations are committed one at a time, as on hardware
        for j, x in enumerate(X):
            scores[j] = obj.evaluate(x)
            trace.add(x, scores[j])
            seen.setdefault(x.tobytes(), scores[j])
        P = ce_update(select_elite(X, scores, params.beta))
        trace.policies.append(P.copy())
        if is_binary(P):
            reason = "converged"
            break
    x_out = binarize(P)
    value = seen.get(x_out.tobytes())
    if value is None:
        value = obj.evaluate(x_out)
        trace.add(x_out, value)
    used = obj.evaluation_count() - start
    assert used <= params.T * params.K + 1, f"CE used {used} evaluations"
    return _result("ce", obj, trace, x_out, value, reason, start)


def acceptance_probability(delta_db: float, temperature: float) -> float:
    """Metropolis rule on SNR differences in dB (maximization)."""
    if delta_db >= 0:
        return 1.0
    return math.exp(delta_db / temperature)


def _flip_walk(algo, obj: Objective, iters: int, temperature, rng: np.random.Generator) -> OptimizerResult:
    """Single-bit-flip Metropolis walk; ``temperature(k)`` gives the temperature of proposal k."""
    if iters < 1:
        raise InvalidParameterError(f"iters must be >= 1, got {iters}")
    n = obj.dimension()
    start = obj.evaluation_count()
    trace = Trace()
    x = (rng.random(n) < 0.5).astype(np.uint8)
    cur = obj.evaluate(x)
    trace.add(x, cur)
    trace.current_db.append(cur)
    for k in range(iters - 1):
        y = x.copy()
        if n:
            y[rng.integers(n)] ^= 1
        v = obj.evaluate(y)
        trace.add(y, v)
        d = v - cur
        if d >= 0 or rng.random() < acceptance_probability(d, temperature(k)):
            x, cur = y, v
        trace.current_db.append(cur)
    res = _result(algo, obj, trace, x, cur, "budget-exhausted", start)
    res.config, res.snr_db = res.best_config, res.best_snr_db
    return res


def sa_optimize(obj: Objective, iters: int, T0: float = 1.0, gamma: float = 0.995,
                rng: np.random.Generator | None = None) -> OptimizerResult:
    """Simulated annealing with geometric cooling T0*gamma**k (temperatures in dB)."""
    if not T0 > 0 or not 0 < gamma < 1:
        raise InvalidParameterError(f"need T0 > 0 and 0 < gamma < 1, got T0={T0}, gamma={gamma}")
    rng = np.random.default_rng() if rng is None else rng
    return _flip_walk("sa", obj, iters, lambda k: T0 * gamma**k, rng)


def mh_optimize(obj: Objective, iters: int, temp_fixed: float = 1.0,
                rng: np.random.Generator | None = None) -> OptimizerResult:
    """Constant-temperature Metropolis-Hastings walk, reporting the best state visited."""
    if not temp_fixed > 0:
        raise InvalidParameterError(f"temp_fixed must be > 0, got {temp_fixed}")
    rng = np.random.default_rng() if rng is None else rng
    return _flip_walk("mh", obj, iters, lambda k: temp_fixed, rng)


def random_search(obj: Objective, iters: int, rng: np.random.Generator) -> OptimizerResult:
    if iters < 1:
        raise InvalidParameterError(f"iters must be >= 1, got {iters}")
    n = obj.dimension()
    start = obj.evaluation_count()
    trace = Trace()
    for x in ce_sample(np.full(n, 0.5), iters, rng):
        trace.add(x, obj.evaluate(x))
    res = _result("random", obj, trace, trace.configs[0], trace.snr_db[0], "budget-exhausted", start)
    res.config, res.snr_db = res.best_config, res.best_snr_db
    return res


def int_to_bits(values: np.ndarray, n: int) -> np.ndarray:
    """Integer -> bits with element 0 as the least significant bit."""
    values = np.asarray(values, dtype=np.int64)
    return ((values[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def exhaustive(obj: Objective, n: int | None = None, chunk: int = 1 << 16) -> OptimizerResult:
    """Evaluate all 2**N configurations; ties resolve to the smallest bit-string value."""
    n = obj.dimension() if n is None else n
    if n != obj.dimension():
        raise InvalidParameterError(f"N={n} does not match objective dimension {obj.dimension()}")
    if n > EXHAUSTIVE_MAX_N:
        raise InvalidParameterError(f"exhaustive search refused for N={n} > {EXHAUSTIVE_MAX_N}")
    start = obj.evaluation_count()
    total = 1 << n
    best_v, best_i = -math.inf, 0
    trace = Trace()
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk))
        vals = obj.evaluate_many(int_to_bits(idx, n))
        j = int(np.argmax(vals))
        if vals[j] > best_v:
            best_v, best_i = float(vals[j]), int(idx[j])
    # the full 2**N log is not kept; the trace holds the optimum only
    x = int_to_bits(np.array([best_i]), n)[0]
    trace.add(x, best_v)
    return OptimizerResult("exhaustive", x, best_v, x, best_v, trace, "budget-exhausted",
                           obj.evaluation_count() - start)


def no_ris(obj: Objective) -> OptimizerResult:
    """Without-RIS baseline: a single reading of the direct-link-only objective."""
    if obj.dimension() != 0:
        raise InvalidParameterError("the 'none' baseline expects an objective with N=0")
    start = obj.evaluation_count()
    x = np.zeros(0, np.uint8)
    trace = Trace()
    v = obj.evaluate(x)
    trace.add(x, v)
    return _result("none", obj, trace, x, v, "budget-exhausted", start)


def run_algorithm(algo: str, obj: Objective, opt, rng: np.random.Generator) -> OptimizerResult:
    """Dispatch by name with an :class:`~risce.config.OptimizerSpec`; walks use its budget."""
    if algo == "ce":
        return ce_optimize(obj, CeParams(opt.T, opt.K, opt.beta), rng)
    if algo == "sa":
        return sa_optimize(obj, opt.budget, opt.T0, opt.gamma, rng)
    if algo == "mh":
        return mh_optimize(obj, opt.budget, opt.temp, rng)
    if algo == "random":
        return random_search(obj, opt.budget, rng)
    if algo == "none":
        return no_ris(obj)
    raise InvalidParameterError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


def pack_hex(x) -> str:
    """Hex-pack bits, element 0 as the least significant bit; fixed width ceil(N/4)."""
    x = np.asarray(x, dtype=np.uint8)
    value = int("".join(str(int(b)) for b in x[::-1]), 2) if x.size else 0
    return format(value, "0{}x".format(max(1, -(-x.size // 4))))


def unpack_hex(s: str, n: int) -> np.ndarray:
    value = int(s, 16)
    return np.array([(value >> i) & 1 for i in range(n)], dtype=np.uint8)
