"""Black-box objectives: commit a binary configuration, get back an SNR in dB.

Optimizers only ever see this interface, so the same code runs against the
simulated channel, a replayed measurement log, or either with additive jitter.
"""

from __future__ import annotations

import abc
import csv
import os
import threading
from pathlib import Path

import numpy as np

from .channel import ChannelRealization, check_config, lin_to_db, phases
from .config import InvalidParameterError, parse_objective_kind


class MissingRecordError(KeyError):
    """A recorded table has no entry for the requested configuration."""


def to_bitstring(x) -> str:
    """Character i is the bit of element i."""
    return "".join("1" if b else "0" for b in np.asarray(x).ravel())


def from_bitstring(s: str) -> np.ndarray:
    if any(c not in "01" for c in s):
        raise InvalidParameterError(f"not a bit-string: {s!r}")
    return np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")


class Objective(abc.ABC):
    """Base evaluator with an exact, thread-safe evaluation counter."""

    def __init__(self, n: int):
        self._n = int(n)
        self._count = 0
        self._lock = threading.Lock()

    def dimension(self) -> int:
        return self._n

    def evaluation_count(self) -> int:
        return self._count

    def _charge(self, k: int = 1) -> None:
        with self._lock:
            self._count += k

    def evaluate(self, x) -> float:
        x = check_config(x, self._n)
        self._charge()
        return self._value(x)

    def evaluate_many(self, X) -> np.ndarray:
        """Evaluate a (k, N) stack; charged as k evaluations."""
        X = check_config(np.atleast_2d(np.asarray(X)), self._n)
        self._charge(len(X))
        return self._values(X)

    @abc.abstractmethod
    def _value(self, x: np.ndarray) -> float: ...

    def _values(self, X: np.ndarray) -> np.ndarray:
        return np.array([self._value(x) for x in X], dtype=float)

    def __call__(self, x) -> float:
        return self.evaluate(x)


class SimulatedObjective(Objective):
    """Deterministic SNR of a fixed channel realization."""

    def __init__(self, real: ChannelRealization):
        super().__init__(real.N)
        self.realization = real
        self._h_bu = real.h_bu
        self._G = real.cascaded
        self._scale = real.snr_scale

    def _value(self, x: np.ndarray) -> float:
        h = self._h_bu + self._G @ phases(x)
        return float(lin_to_db(self._scale * np.vdot(h, h).real))

    def _values(self, X: np.ndarray) -> np.ndarray:
        H = self._h_bu[None, :] + phases(X) @ self._G.T
        return lin_to_db(self._scale * np.sum(np.abs(H) ** 2, axis=1))


class NoisyObjective(Objective):
    """Adds N(0, std_dB^2) jitter to every reading of ``inner``.

    The wrapper owns ``rng``; concurrent use needs one wrapper per worker.
    """

    def __init__(self, inner: Objective, std_dB: float, rng: np.random.Generator):
        if not std_dB >= 0:
            raise InvalidParameterError(f"std_dB must be >= 0, got {std_dB}")
        super().__init__(inner.dimension())
        self.inner = inner
        self.std_dB = float(std_dB)
        self.rng = rng

    def _value(self, x: np.ndarray) -> float:
        v = self.inner.evaluate(x)
        return v + self.std_dB * self.rng.standard_normal() if self.std_dB else v

    def _values(self, X: np.ndarray) -> np.ndarray:
        v = self.inner.evaluate_many(X)
        return v + self.std_dB * self.rng.standard_normal(len(v)) if self.std_dB else v


class RecordedObjective(Objective):
    """Replays a table of previously measured SNRs keyed by bit-string."""

    def __init__(self, table: dict[str, float]):
        if not table:
            raise InvalidParameterError("recorded table is empty")
        lengths = {len(k) for k in table}
        if len(lengths) != 1:
            raise InvalidParameterError(f"recorded keys have mixed lengths {sorted(lengths)}")
        for k in table:
            from_bitstring(k)
        super().__init__(lengths.pop())
        self.table = {k: float(v) for k, v in table.items()}

    def _value(self, x: np.ndarray) -> float:
        key = to_bitstring(x)
        try:
            return self.table[key]
        except KeyError:
            raise MissingRecordError(f"no recorded SNR for configuration {key}") from None


class FunctionObjective(Objective):
    """Wraps a plain ``f(bits) -> float`` as an evaluator (synthetic test problems)."""

    def __init__(self, fn, n: int):
        super().__init__(n)
        self.fn = fn

    def _value(self, x: np.ndarray) -> float:
        return float(self.fn(x))


def make_simulated(real: ChannelRealization) -> SimulatedObjective:
    return SimulatedObjective(real)


def with_measurement_noise(inner: Objective, std_dB: float, rng: np.random.Generator) -> Objective:
    return NoisyObjective(inner, std_dB, rng)


def make_recorded(table: dict[str, float]) -> RecordedObjective:
    return RecordedObjective(table)


def write_table(path: str | os.PathLike, table: dict[str, float]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["config", "snr_db"])
        for k, v in table.items():
            w.writerow([k, repr(float(v))])


def read_table(path: str | os.PathLike) -> dict[str, float]:
    with open(path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["config", "snr_db"]:
        raise InvalidParameterError(f"{path}: expected header 'config,snr_db'")
    table = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise InvalidParameterError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        table[row[0]] = float(row[1])
    return table


def record(obj: Objective, configs) -> dict[str, float]:
    """Evaluate ``configs`` and collect a replayable table."""
    return {to_bitstring(x): obj.evaluate(x) for x in configs}


def build_objective(kind: str, real: ChannelRealization | None, rng: np.random.Generator | None = None,
                    base_dir: str | os.PathLike | None = None) -> Objective:
    """Instantiate an evaluator from a descriptor string (see ``config.parse_objective_kind``)."""
    std, path = parse_objective_kind(kind)
    if path is None:
        if real is None:
            raise InvalidParameterError("simulated objective needs a channel realization")
        obj: Objective = SimulatedObjective(real)
    else:
        p = Path(path)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        obj = RecordedObjective(read_table(p))
    if std > 0:
        if rng is None:
            raise InvalidParameterError("noisy objective needs an RNG stream")
        obj = NoisyObjective(obj, std, rng)
    return obj
