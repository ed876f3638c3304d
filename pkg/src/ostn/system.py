"""Scenario description, exact SINR model and the chunked Monte Carlo engine."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .channels import (InterferenceConfig, RayleighParams, SRParams, db_to_linear,
                       rayleigh_power_sample, sr_coeffs, sr_sample)
from .errors import ConfigurationError

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class FixedSplit:
    mu: float

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ConfigurationError(f"power split mu must lie in (0,1), got {self.mu}")


@dataclass(frozen=True)
class AdaptiveSplit:
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"QoS level epsilon must lie in (0,1), got {self.epsilon}")


@dataclass(frozen=True)
class FixedInterference:
    eta_s_db: float = 20.0
    eta_t_db: float = 20.0


@dataclass(frozen=True)
class ProportionalInterference:
    nu_db: float = -15.0


PowerSplit = Union[FixedSplit, AdaptiveSplit]
InterferencePolicy = Union[FixedInterference, ProportionalInterference]


@dataclass(frozen=True)
class NetworkConfig:
    """One scenario.  SNRs are in dB; linear values are derived on demand.

    The satellite and IoT transmit SNRs are equal (eta_a = eta_c = eta).
    """

    K: int = 1
    M1: int = 2
    M2: int = 2
    sr_main: SRParams = field(default_factory=lambda: sr_coeffs(5, 0.251, 0.279))
    sr_interf: SRParams = field(default_factory=lambda: sr_coeffs(2, 0.063, 0.0005))
    omega_t: float = 0.2
    omega_cb: float = 1.0
    omega_cd: float = 1.0
    eta_db: float = 30.0
    power_split: PowerSplit = field(default_factory=lambda: FixedSplit(0.75))
    r_p: float = 0.5
    r_s: float = 0.5
    interference_policy: InterferencePolicy = field(default_factory=FixedInterference)

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigurationError("K must be a positive integer")
        if self.M1 < 0 or self.M2 < 0:
            raise ConfigurationError("interferer counts must be nonnegative")
        for name in ("omega_t", "omega_cb", "omega_cd"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.r_p < 0 or self.r_s < 0:
            raise ConfigurationError("rates must be nonnegative")
        if not math.isfinite(self.eta_db):
            raise ConfigurationError("eta_db must be finite")

    @property
    def eta(self) -> float:
        return db_to_linear(self.eta_db)

    @property
    def gamma_p(self) -> float:
        return threshold_from_rate(self.r_p)

    @property
    def gamma_s(self) -> float:
        return threshold_from_rate(self.r_s)

    @property
    def mu(self) -> float:
        if not isinstance(self.power_split, FixedSplit):
            raise ConfigurationError("adaptive power split must be resolved to a fixed mu first")
        return self.power_split.mu

    def interferer_powers(self) -> tuple[float, float]:
        pol = self.interference_policy
        if isinstance(pol, ProportionalInterference):
            eta_i = db_to_linear(pol.nu_db) * self.eta
            return eta_i, eta_i
        return db_to_linear(pol.eta_s_db), db_to_linear(pol.eta_t_db)

    @property
    def interference(self) -> InterferenceConfig:
        eta_s, eta_t = self.interferer_powers()
        return InterferenceConfig(self.M1, self.M2, self.sr_interf, self.omega_t, eta_s, eta_t)

    def with_snr(self, eta_db: float) -> NetworkConfig:
        return replace(self, eta_db=eta_db)

    def with_mu(self, mu: float) -> NetworkConfig:
        return replace(self, power_split=FixedSplit(mu))


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    std_err: float
    n_trials: int

    @classmethod
    def from_count(cls, count: int, n_trials: int) -> OutageEstimate:
        p = count / n_trials
        return cls(p, math.sqrt(p * (1.0 - p) / n_trials), n_trials)


@dataclass
class TrialDraw:
    lambda_ac: np.ndarray
    lambda_cb: np.ndarray
    lambda_cd: np.ndarray
    w_c: float


def threshold_from_rate(r: float) -> float:
    if r < 0:
        raise ConfigurationError("rate must be nonnegative")
    return 2.0 ** (2.0 * r) - 1.0


def sinr_primary(lam_ac, lam_cb, w_c, mu):
    """End-to-end SINR at the satellite receiver over the selected relay."""
    x = np.asarray(lam_ac, dtype=float) / (np.asarray(w_c, dtype=float) + 1.0)
    y = np.asarray(lam_cb, dtype=float)
    return mu * x * y / ((1.0 - mu) * x * y + x + y + 1.0)


def sinr_iot(lam_ac, lam_cd, w_c, mu):
    w1 = np.asarray(w_c, dtype=float) + 1.0
    x = np.asarray(lam_ac, dtype=float) / w1
    z = np.asarray(lam_cd, dtype=float) / w1
    return (1.0 - mu) * z * (x + 1.0) / (mu * z + x + 1.0)


def select_best_pair(draw: TrialDraw, mu: float) -> int:
    """Index of the pair maximizing the primary SINR; ties go to the lowest index."""
    return int(np.argmax(sinr_primary(draw.lambda_ac, draw.lambda_cb, draw.w_c, mu)))


def _bound_sinrs(lam_ac, lam_cb, lam_cd, w, mu):
    # high-interference approximation with the min-bound on the relay SINR
    x = lam_ac / w[:, None]
    z = lam_cd / w[:, None]
    t = np.minimum(x, lam_cb)
    sat = mu * t / ((1.0 - mu) * t + 1.0)
    iot = (1.0 - mu) * np.minimum(mu * z, x + 1.0) / mu
    return sat, iot


def draw_chunk(rng: np.random.Generator, cfg: NetworkConfig, n: int):
    """Channel gains for n trials: per-link SNRs (n, K) and the shared W_c (n,)."""
    K, eta = cfg.K, cfg.eta
    lam_ac = eta * sr_sample(rng, cfg.sr_main, size=(n, K))
    lam_cb = eta * rayleigh_power_sample(rng, RayleighParams(cfg.omega_cb), size=(n, K))
    lam_cd = eta * rayleigh_power_sample(rng, RayleighParams(cfg.omega_cd), size=(n, K))
    eta_s, eta_t = cfg.interferer_powers()
    w = np.zeros(n)
    if cfg.M1:
        w += eta_s * sr_sample(rng, cfg.sr_interf, size=(n, cfg.M1)).sum(axis=1)
    if cfg.M2:
        w += eta_t * rayleigh_power_sample(rng, RayleighParams(cfg.omega_t),
                                           size=(n, cfg.M2)).sum(axis=1)
    return lam_ac, lam_cb, lam_cd, w


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _count_chunk(cfg: NetworkConfig, seed: int, index: int, n: int, model: str):
    rng = chunk_rng(seed, index)
    lam_ac, lam_cb, lam_cd, w = draw_chunk(rng, cfg, n)
    mu = cfg.mu
    if model == "exact":
        sat = sinr_primary(lam_ac, lam_cb, w[:, None], mu)
        iot = sinr_iot(lam_ac, lam_cd, w[:, None], mu)
    else:
        sat, iot = _bound_sinrs(lam_ac, lam_cb, lam_cd, w, mu)
    k = np.argmax(sat, axis=1)
    rows = np.arange(n)
    sat_out = int(np.count_nonzero(sat[rows, k] < cfg.gamma_p))
    iot_out = int(np.count_nonzero(iot[rows, k] < cfg.gamma_s))
    return sat_out, iot_out


def run_mc(cfg: NetworkConfig, n_trials: int, seed: int, threads: int = 1,
           chunk: int = DEFAULT_CHUNK, model: str = "exact") -> dict[str, OutageEstimate]:
    """Outage estimates for both networks.

    ``model="exact"`` uses the (W_c + 1) SINRs; ``model="bound"`` uses the
    approximated min-bound SINRs that the closed forms describe.  Results
    depend only on (cfg, n_trials, seed, chunk), never on ``threads``.
    """
    if n_trials < 1:
        raise ConfigurationError("n_trials must be positive")
    if model not in ("exact", "bound"):
        raise ConfigurationError(f"unknown SINR model {model!r}")
    cfg.mu  # fail early on an unresolved adaptive split
    sizes = [min(chunk, n_trials - i) for i in range(0, n_trials, chunk)]
    jobs = [(cfg, seed, i, n, model) for i, n in enumerate(sizes)]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda a: _count_chunk(*a), jobs))
    else:
        counts = [_count_chunk(*a) for a in jobs]
    sat = sum(c[0] for c in counts)
    iot = sum(c[1] for c in counts)
    return {"sat": OutageEstimate.from_count(sat, n_trials),
            "iot": OutageEstimate.from_count(iot, n_trials)}
