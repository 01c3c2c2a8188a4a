"""RIS-aided single-user channel: correlated Ricean direct and RIS-UE links,
rank-1 LOS BS-RIS link, binary reflection, received SNR."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .config import InvalidParameterError, PathLossSpec, Scenario, ris_grid

# dB value returned for an all-zero effective channel
NEG_INF_DB = -1e9


def db_to_lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin_to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return np.where(x > 0, out, NEG_INF_DB)


def path_gain_db(spec: PathLossSpec) -> float:
    spec.validate()
    if spec.mode == "exponent":
        return spec.C_dB - 10.0 * spec.alpha * np.log10(spec.d_m)
    return spec.C_dB + spec.alpha


def path_gain(spec: PathLossSpec) -> float:
    """Linear power gain of a link."""
    return float(db_to_lin(path_gain_db(spec)))


@dataclass(frozen=True)
class SteeringSpec:
    K_y: int
    K_z: int
    lambda_: float
    theta_deg: float
    omega_deg: float


def steering_vector(spec: SteeringSpec) -> np.ndarray:
    """Vertical URA response a_y kron a_z, length K_y*K_z, unit-modulus entries."""
    if spec.K_y < 1 or spec.K_z < 1:
        raise InvalidParameterError(f"array dimensions must be >= 1, got {spec.K_y}x{spec.K_z}")
    if not spec.lambda_ > 0:
        raise InvalidParameterError(f"element spacing must be > 0, got {spec.lambda_}")
    th = np.deg2rad(spec.theta_deg)
    om = np.deg2rad(spec.omega_deg)
    # phases wrapped before exp so entries stay exactly unit-modulus in floating point
    phase_y = np.mod(spec.lambda_ * np.arange(spec.K_y) * np.sin(th) * np.sin(om), 1.0)
    phase_z = np.mod(spec.lambda_ * np.arange(spec.K_z) * np.cos(th), 1.0)
    a_y = np.exp(2j * np.pi * phase_y)
    a_z = np.exp(2j * np.pi * phase_z)
    return np.kron(a_y, a_z)


@dataclass(frozen=True)
class CorrelationSpec:
    K_y: int
    K_z: int
    lambda_: float

    @property
    def nearest_neighbour(self) -> float:
        return float(np.sinc(2.0 * self.lambda_))


def _grid_distances(K_y: int, K_z: int) -> np.ndarray:
    y, z = np.meshgrid(np.arange(K_y), np.arange(K_z), indexing="ij")
    pos = np.stack([y.ravel(), z.ravel()], axis=1).astype(float)
    return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)


def correlation_matrix(spec: CorrelationSpec, n: int | None = None) -> np.ndarray:
    """Isotropic-scattering correlation R_ij = sinc(2*lambda*dist_ij), floored to PSD.

    Element order matches :func:`steering_vector` (z index fastest).
    """
    if n is not None and n != spec.K_y * spec.K_z:
        raise InvalidParameterError(f"grid {spec.K_y}x{spec.K_z} does not hold {n} elements")
    return _correlation_cached(spec.K_y, spec.K_z, float(spec.lambda_))[0].copy()


@functools.lru_cache(maxsize=64)
def _correlation_cached(K_y: int, K_z: int, lambda_: float):
    R = np.sinc(2.0 * lambda_ * _grid_distances(K_y, K_z))
    w, V = np.linalg.eigh(R)
    if w.size and w.min() < -1e-9 * max(1.0, w.max()):
        raise ArithmeticError(f"sinc correlation has eigenvalue {w.min():.3e}; not PSD")
    w = np.clip(w, 0.0, None)
    R_psd = (V * w) @ V.T
    # keep the unit diagonal exact after flooring
    np.fill_diagonal(R_psd, 1.0)
    sqrt_R = (V * np.sqrt(w)) @ V.T
    R_psd.setflags(write=False)
    sqrt_R.setflags(write=False)
    return R_psd, sqrt_R


def correlation_sqrt(spec: CorrelationSpec) -> np.ndarray:
    """Symmetric square root R^{1/2} from the eigendecomposition."""
    return _correlation_cached(spec.K_y, spec.K_z, float(spec.lambda_))[1]


@dataclass(frozen=True)
class RiceanLinkSpec:
    beta: float
    kappa: float
    steering: SteeringSpec
    correlation: CorrelationSpec


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """CN(0, 1) draws: variance 1/2 per real component."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def draw_ricean(spec: RiceanLinkSpec, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """h = sqrt(beta) * (sqrt(k/(1+k)) a + sqrt(1/(1+k)) R^{1/2} u).

    With ``size`` given, returns ``size`` independent draws stacked along axis 0.
    """
    if not spec.beta > 0:
        raise InvalidParameterError(f"path gain must be > 0, got {spec.beta}")
    if not spec.kappa >= 0:
        raise InvalidParameterError(f"kappa must be >= 0, got {spec.kappa}")
    a = steering_vector(spec.steering)
    S = correlation_sqrt(spec.correlation)
    if S.shape[0] != a.size:
        raise InvalidParameterError("steering and correlation dimensions differ")
    shape = (a.size,) if size is None else (size, a.size)
    u = complex_normal(rng, shape)
    k = spec.kappa
    los = np.sqrt(k / (1.0 + k)) * a
    nlos = np.sqrt(1.0 / (1.0 + k)) * (u @ S.T)
    return np.sqrt(spec.beta) * (los + nlos)


def draw_bs_ris(beta_br: float, a_b: np.ndarray, a_r: np.ndarray) -> np.ndarray:
    """Rank-1 LOS BS-RIS matrix sqrt(beta) a_b a_r^H (M x N)."""
    return np.sqrt(beta_br) * np.outer(a_b, np.conj(a_r))


@dataclass(frozen=True)
class ChannelRealization:
    h_bu: np.ndarray  # (M,)
    H_br: np.ndarray  # (M, N)
    h_ru: np.ndarray  # (N,)
    p_dBm: float = 10.0
    sigma2_dBm: float = -65.0

    def __post_init__(self):
        M, N = self.H_br.shape
        if self.h_bu.shape != (M,) or self.h_ru.shape != (N,):
            raise InvalidParameterError(
                f"inconsistent shapes h_bu{self.h_bu.shape} H_br{self.H_br.shape} h_ru{self.h_ru.shape}"
            )

    @property
    def M(self) -> int:
        return self.H_br.shape[0]

    @property
    def N(self) -> int:
        return self.H_br.shape[1]

    @property
    def cascaded(self) -> np.ndarray:
        """Per-element reflected columns H_br[:, n] * h_ru[n] (M x N)."""
        return self.H_br * self.h_ru[None, :]

    @property
    def snr_scale(self) -> float:
        """p / sigma^2 in linear units."""
        return float(db_to_lin(self.p_dBm - self.sigma2_dBm))

    def without_ris(self) -> "ChannelRealization":
        M = self.M
        return ChannelRealization(
            self.h_bu, np.zeros((M, 0), complex), np.zeros(0, complex), self.p_dBm, self.sigma2_dBm
        )


def phases(x) -> np.ndarray:
    """Reflection coefficients for bits: 0 -> +1, 1 -> -1."""
    x = np.asarray(x)
    return 1.0 - 2.0 * x


def check_config(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1:] != (n,):
        raise InvalidParameterError(f"configuration length {x.shape[-1] if x.ndim else 0} != N={n}")
    if not np.all((x == 0) | (x == 1)):
        raise InvalidParameterError("configuration entries must be 0 or 1")
    return x.astype(np.uint8, copy=False)


def effective_channel(real: ChannelRealization, x) -> np.ndarray:
    x = check_config(x, real.N)
    return real.h_bu + real.cascaded @ phases(x)


def snr_db(real: ChannelRealization, x) -> float:
    """Received SNR p*||h||^2/sigma^2 in dB; all-zero channel gives NEG_INF_DB."""
    h = effective_channel(real, x)
    gain = float(np.vdot(h, h).real)
    return float(lin_to_db(real.snr_scale * gain))


def link_specs(sc: Scenario, n: int | None = None) -> dict[str, RiceanLinkSpec | SteeringSpec | float]:
    """Translate a scenario into per-link channel parameters for ``n`` RIS elements."""
    n = sc.ris.N if n is None else n
    bky, bkz = ris_grid(sc.bs.M)
    rky, rkz = ris_grid(n) if n > 0 else (1, 0)
    out = {
        "bu": RiceanLinkSpec(
            beta=path_gain(sc.bu),
            kappa=sc.bu.kappa,
            steering=SteeringSpec(bky, bkz, sc.bs.lambda_, sc.bu.theta_deg, sc.bu.omega_deg),
            correlation=CorrelationSpec(bky, bkz, sc.bs.lambda_),
        ),
        "beta_br": path_gain(sc.br),
        "a_b": SteeringSpec(bky, bkz, sc.bs.lambda_, sc.bs.theta_deg, sc.bs.omega_deg),
    }
    if n > 0:
        out["ru"] = RiceanLinkSpec(
            beta=path_gain(sc.ru),
            kappa=sc.ru.kappa,
            steering=SteeringSpec(rky, rkz, sc.ris.lambda_, sc.ru.theta_deg, sc.ru.omega_deg),
            correlation=CorrelationSpec(rky, rkz, sc.ris.lambda_),
        )
        out["a_r"] = SteeringSpec(rky, rkz, sc.ris.lambda_, sc.ris.theta_deg, sc.ris.omega_deg)
    return out


def draw_realization(sc: Scenario, rng: np.random.Generator, n: int | None = None) -> ChannelRealization:
    """One channel draw. The direct link is drawn first so it is shared across N for a given stream."""
    n = sc.ris.N if n is None else n
    specs = link_specs(sc, n)
    h_bu = draw_ricean(specs["bu"], rng)
    M = h_bu.size
    if n == 0:
        H_br = np.zeros((M, 0), complex)
        h_ru = np.zeros(0, complex)
    else:
        h_ru = draw_ricean(specs["ru"], rng)
        H_br = draw_bs_ris(specs["beta_br"], steering_vector(specs["a_b"]), steering_vector(specs["a_r"]))
    return ChannelRealization(h_bu, H_br, h_ru, sc.radio.p_dBm, sc.radio.sigma2_dBm)
