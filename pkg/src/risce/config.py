"""Scenario and run configuration.

A scenario is an INI-style text file with sections ``[bs]``, ``[ris]``, ``[ue]``,
``[links.bu]``, ``[links.ru]``, ``[links.br]``, ``[radio]``, ``[objective]``,
``[optimizer]`` and ``[harness]``. Missing keys fall back to the defaults below,
which reproduce the single-user simulation setup (M=1, N=304).
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

SCENARIO_DIR_ENV = "RISCE_SCENARIO_DIR"


class InvalidParameterError(ValueError):
    """A configuration value violates its documented range."""


@dataclass
class PathLossSpec:
    """Distance-based path gain of one link.

    ``mode="exponent"``: gain_dB = C_dB - 10*alpha*log10(d_m).
    ``mode="direct_db"``: gain_dB = C_dB + alpha, with alpha read as a dB term.
    """

    mode: str = "direct_db"
    C_dB: float = -30.0
    d_m: float = 1.0
    alpha: float = 0.0

    def validate(self) -> None:
        if self.mode not in ("exponent", "direct_db"):
            raise InvalidParameterError(f"path-loss mode must be 'exponent' or 'direct_db', got {self.mode!r}")
        if not self.d_m > 0:
            raise InvalidParameterError(f"distance d_m must be > 0, got {self.d_m}")
        if self.mode == "exponent" and self.alpha < 0:
            raise InvalidParameterError(f"path-loss exponent must be >= 0, got {self.alpha}")


@dataclass
class FadingLinkSpec(PathLossSpec):
    """A Ricean link (BS-UE or RIS-UE) with its own arrival direction."""

    kappa: float = 1.0
    theta_deg: float = 90.0
    omega_deg: float = 0.0

    def validate(self) -> None:
        super().validate()
        if not self.kappa >= 0:
            raise InvalidParameterError(f"Ricean factor kappa must be >= 0, got {self.kappa}")


@dataclass
class BsSpec:
    M: int = 1
    lambda_: float = 0.5
    theta_deg: float = 109.9
    omega_deg: float = -29.9

    def validate(self) -> None:
        if self.M < 1:
            raise InvalidParameterError(f"BS antenna count M must be >= 1, got {self.M}")
        if not self.lambda_ > 0:
            raise InvalidParameterError(f"BS spacing lambda must be > 0, got {self.lambda_}")


@dataclass
class RisSpec:
    N: int = 304
    lambda_: float = 0.5
    theta_deg: float = 77.1
    omega_deg: float = 19.95

    def validate(self) -> None:
        if self.N < 0:
            raise InvalidParameterError(f"RIS element count N must be >= 0, got {self.N}")
        if not self.lambda_ > 0:
            raise InvalidParameterError(f"RIS spacing lambda must be > 0, got {self.lambda_}")


@dataclass
class UeSpec:
    antennas: int = 1

    def validate(self) -> None:
        if self.antennas != 1:
            raise InvalidParameterError("only single-antenna UEs are modelled")


@dataclass
class RadioSpec:
    p_dBm: float = 10.0
    sigma2_dBm: float = -65.0

    def validate(self) -> None:
        for name in ("p_dBm", "sigma2_dBm"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")


@dataclass
class ObjectiveSpec:
    # simulated | recorded:PATH | noisy:STD | noisy:STD over recorded:PATH
    kind: str = "simulated"

    def validate(self) -> None:
        parse_objective_kind(self.kind)


@dataclass
class OptimizerSpec:
    T: int = 15
    K: int = 100
    beta: float = 0.1
    # 0 means "T*K", the equalized budget
    iters: int = 0
    T0: float = 1.0
    gamma: float = 0.995
    temp: float = 1.0

    @property
    def budget(self) -> int:
        return self.iters if self.iters > 0 else self.T * self.K

    def validate(self) -> None:
        if self.T < 1:
            raise InvalidParameterError(f"T must be >= 1, got {self.T}")
        if self.K < 1:
            raise InvalidParameterError(f"K must be >= 1, got {self.K}")
        if not 0 < self.beta <= 1:
            raise InvalidParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if self.iters < 0:
            raise InvalidParameterError(f"iters must be >= 1 (or 0 for T*K), got {self.iters}")
        if not self.T0 > 0:
            raise InvalidParameterError(f"T0 must be > 0, got {self.T0}")
        if not 0 < self.gamma < 1:
            raise InvalidParameterError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.temp > 0:
            raise InvalidParameterError(f"temp must be > 0, got {self.temp}")


@dataclass
class HarnessSpec:
    trials: int = 500
    seed: int = 0
    n_values: tuple[int, ...] = (10, 38, 76, 152, 304)
    algos: tuple[str, ...] = ("ce", "sa", "mh", "none")

    def validate(self) -> None:
        if self.trials < 0:
            raise InvalidParameterError(f"trials must be >= 0, got {self.trials}")
        if self.seed < 0:
            raise InvalidParameterError(f"seed must be >= 0, got {self.seed}")
        if not self.n_values or any(n <= 0 for n in self.n_values):
            raise InvalidParameterError("n_values must be a non-empty list of positive integers")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise InvalidParameterError("n_values must be strictly ascending")
        from .optimizers import ALGORITHMS

        for a in self.algos:
            if a not in ALGORITHMS:
                raise InvalidParameterError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")


def _default_bu() -> FadingLinkSpec:
    return FadingLinkSpec(C_dB=-30.0, d_m=30.167, alpha=-81.7077, kappa=1.0, theta_deg=80.94, omega_deg=-64.35)


def _default_ru() -> FadingLinkSpec:
    return FadingLinkSpec(C_dB=-30.0, d_m=21.0238, alpha=-67.036, kappa=1.0, theta_deg=71.95, omega_deg=25.1)


def _default_br() -> PathLossSpec:
    return PathLossSpec(C_dB=-30.0, d_m=51.0, alpha=0.0)


@dataclass
class Scenario:
    bs: BsSpec = field(default_factory=BsSpec)
    ris: RisSpec = field(default_factory=RisSpec)
    ue: UeSpec = field(default_factory=UeSpec)
    bu: FadingLinkSpec = field(default_factory=_default_bu)
    ru: FadingLinkSpec = field(default_factory=_default_ru)
    br: PathLossSpec = field(default_factory=_default_br)
    radio: RadioSpec = field(default_factory=RadioSpec)
    objective: ObjectiveSpec = field(default_factory=ObjectiveSpec)
    optimizer: OptimizerSpec = field(default_factory=OptimizerSpec)
    harness: HarnessSpec = field(default_factory=HarnessSpec)

    def validate(self) -> "Scenario":
        for _, attr in _SECTIONS:
            getattr(self, attr).validate()
        return self

    def replace(self, **overrides) -> "Scenario":
        """Return a copy with dotted overrides applied, e.g. ``{"ris.N": 64}``."""
        new = copy_scenario(self)
        for dotted, value in overrides.items():
            attr, key = dotted.split(".")
            setattr(getattr(new, attr), _field_name(key), value)
        return new.validate()

    def to_text(self) -> str:
        return dumps(self)

    def hash(self) -> str:
        """Provenance hash over the channel/radio part of the scenario."""
        text = dumps(self, sections=[s for s in _SECTIONS if s[1] not in ("harness",)])
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_SECTIONS = [
    ("bs", "bs"),
    ("ris", "ris"),
    ("ue", "ue"),
    ("links.bu", "bu"),
    ("links.ru", "ru"),
    ("links.br", "br"),
    ("radio", "radio"),
    ("objective", "objective"),
    ("optimizer", "optimizer"),
    ("harness", "harness"),
]


def _field_name(key: str) -> str:
    return "lambda_" if key == "lambda" else key


def _key_name(field_name: str) -> str:
    return "lambda" if field_name == "lambda_" else field_name


def copy_scenario(sc: Scenario) -> Scenario:
    return Scenario(**{attr: dataclasses.replace(getattr(sc, attr)) for _, attr in _SECTIONS})


def _format(value) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(obj, name: str, raw: str):
    current = getattr(obj, name)
    try:
        if isinstance(current, bool):
            return raw.strip().lower() in ("1", "true", "yes")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, tuple):
            items = [s.strip() for s in raw.split(",") if s.strip()]
            if current and isinstance(current[0], int):
                return tuple(int(s) for s in items)
            return tuple(items)
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse {_key_name(name)}={raw!r}: {exc}") from None
    return raw.strip()


def dumps(sc: Scenario, sections=None) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for section, attr in sections or _SECTIONS:
        obj = getattr(sc, attr)
        cp[section] = {_key_name(f.name): _format(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue().rstrip("\n") + "\n"


def loads(text: str, base: Scenario | None = None) -> Scenario:
    """Parse scenario text on top of ``base`` (defaults when omitted)."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidParameterError(f"malformed scenario: {exc}") from None
    sc = copy_scenario(base) if base is not None else Scenario()
    known = dict(_SECTIONS)
    for section in cp.sections():
        if section not in known:
            raise InvalidParameterError(f"unknown scenario section [{section}]")
        obj = getattr(sc, known[section])
        names = {f.name for f in dataclasses.fields(obj)}
        for key, raw in cp[section].items():
            name = _field_name(key)
            if name not in names:
                raise InvalidParameterError(f"unknown key {key!r} in [{section}]")
            setattr(obj, name, _coerce(obj, name, raw))
    return sc.validate()


def resolve_path(path: str | os.PathLike) -> Path:
    """Relative scenario paths are looked up in ``$RISCE_SCENARIO_DIR`` if not found locally."""
    p = Path(path)
    if not p.is_absolute() and not p.exists() and os.environ.get(SCENARIO_DIR_ENV):
        alt = Path(os.environ[SCENARIO_DIR_ENV]) / p
        if alt.exists():
            return alt
    return p


def load(path: str | os.PathLike) -> Scenario:
    return loads(resolve_path(path).read_text(encoding="utf-8"))


def parse_objective_kind(kind: str) -> tuple[float, str | None]:
    """Split an objective descriptor into ``(noise_std_dB, recorded_path_or_None)``."""
    text = kind.strip()
    std = 0.0
    if text.startswith("noisy:"):
        head, _, rest = text.partition(" over ")
        try:
            std = float(head[len("noisy:"):])
        except ValueError:
            raise InvalidParameterError(f"bad noise level in objective kind {kind!r}") from None
        if std < 0:
            raise InvalidParameterError(f"noise std_dB must be >= 0, got {std}")
        text = rest.strip() or "simulated"
    if text == "simulated":
        return std, None
    if text.startswith("recorded:") and len(text) > len("recorded:"):
        return std, text[len("recorded:"):]
    raise InvalidParameterError(
        f"objective kind must be simulated | recorded:PATH | noisy:STD [over ...], got {kind!r}"
    )


def ris_grid(n: int) -> tuple[int, int]:
    """Factor N into (K_y, K_z) with K_y the largest divisor of N not above sqrt(N)."""
    if n <= 0:
        return (0, 0)
    ky = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return ky, n // ky
