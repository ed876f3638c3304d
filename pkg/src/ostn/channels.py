"""Fading and interference models: densities, distribution functions, samplers.

Satellite links and extra-terrestrial interferers are shadowed-Rician with
integer severity; terrestrial links and interferers are Rayleigh.  ``W_c`` is
the aggregate interference power seen by every IoT node of the cluster.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DomainError
from .specfun import beta_fn, gamma_fn, hyp1f1_array, lower_inc_gamma, pochhammer


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SRParams:
    """Shadowed-Rician parameters (m, b, omega) and the derived pdf coefficients."""

    m: int
    b: float
    omega: float
    alpha: float = field(init=False)
    beta: float = field(init=False)
    delta: float = field(init=False)
    zeta: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("SRParams: m must be a positive integer")
        if not self.b > 0:
            raise DomainError("SRParams: b must be positive")
        if self.omega < 0:
            raise DomainError("SRParams: omega must be nonnegative")
        m, b, om = int(self.m), float(self.b), float(self.omega)
        object.__setattr__(self, "m", m)
        two_bm = 2.0 * b * m
        object.__setattr__(self, "alpha", (two_bm / (two_bm + om)) ** m / (2.0 * b))
        object.__setattr__(self, "beta", 1.0 / (2.0 * b))
        delta = om / (2.0 * b * (two_bm + om))
        object.__setattr__(self, "delta", delta)
        zeta = tuple(
            (-1) ** k * pochhammer(1 - m, k) * delta ** k / math.factorial(k) ** 2
            for k in range(m))
        object.__setattr__(self, "zeta", zeta)

    @property
    def rate(self) -> float:
        """Exponential rate beta - delta of every pdf term."""
        return self.beta - self.delta

    @property
    def mean(self) -> float:
        return 2.0 * self.b + self.omega


def sr_coeffs(m: int, b: float, omega: float) -> SRParams:
    return SRParams(m, b, omega)


def sr_pdf(x, p: SRParams):
    x = np.asarray(x, dtype=float)
    poly = np.zeros_like(x)
    for k in range(p.m - 1, -1, -1):
        poly = poly * x + p.zeta[k]
    return p.alpha * poly * np.exp(-p.rate * x)


def sr_cdf(x, p: SRParams):
    """CDF of |h|^2, term by term through the lower incomplete gamma."""
    c = p.rate

    def one(v: float) -> float:
        if v <= 0:
            return 0.0
        acc = math.fsum(p.zeta[k] * lower_inc_gamma(k + 1, c * v) / c ** (k + 1)
                        for k in range(p.m))
        return min(max(p.alpha * acc, 0.0), 1.0)

    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return one(float(x))
    return np.array([one(v) for v in x.ravel()]).reshape(x.shape)


def sr_sf(x, p: SRParams):
    """Survival function of |h|^2 in closed form (no cancellation)."""
    x = np.asarray(x, dtype=float)
    c = p.rate
    cx = c * x
    out = np.zeros_like(x)
    for k in range(p.m):
        # int_x^inf t^k e^{-ct} dt = k!/c^{k+1} e^{-cx} sum_{j<=k} (cx)^j/j!
        tail = np.zeros_like(x)
        term = np.ones_like(x)
        for j in range(k + 1):
            if j:
                term = term * cx / j
            tail = tail + term
        out = out + p.zeta[k] * math.factorial(k) / c ** (k + 1) * tail
    return p.alpha * out * np.exp(-cx)


def sr_sample(rng: np.random.Generator, p: SRParams, size=None):
    """Squared envelope |A e^{j phi} + Z|^2 with Nakagami-m LOS and complex Gaussian scatter."""
    los_power = rng.gamma(p.m, p.omega / p.m, size=size)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=size)
    sd = math.sqrt(p.b)
    amp = np.sqrt(los_power)
    re = amp * np.cos(phase) + sd * rng.standard_normal(size=size)
    im = amp * np.sin(phase) + sd * rng.standard_normal(size=size)
    return re * re + im * im


@dataclass(frozen=True)
class RayleighParams:
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("RayleighParams: omega must be positive")


def rayleigh_power_pdf(x, p: RayleighParams):
    x = np.asarray(x, dtype=float)
    return np.exp(-x / p.omega) / p.omega


def rayleigh_power_cdf(x, p: RayleighParams):
    x = np.asarray(x, dtype=float)
    return -np.expm1(-np.maximum(x, 0.0) / p.omega)


def rayleigh_power_sample(rng: np.random.Generator, p: RayleighParams, size=None):
    u = rng.random(size=size)
    return -p.omega * np.log1p(-u)


@dataclass(frozen=True)
class InterferenceConfig:
    """Interferer population at the IoT cluster with linear powers eta_s, eta_t."""

    M1: int
    M2: int
    sr: SRParams
    omega_t: float
    eta_s: float
    eta_t: float

    def __post_init__(self):
        if self.M1 < 0 or self.M2 < 0:
            raise ConfigurationError("interferer counts must be nonnegative")
        if not (self.omega_t > 0 and self.eta_s > 0 and self.eta_t > 0):
            raise ConfigurationError("omega_t, eta_s and eta_t must be positive")

    def require_analytic(self):
        if self.M1 < 1 or self.M2 < 1:
            raise ConfigurationError(
                "analytical interference model needs M1 >= 1 and M2 >= 1")

    @property
    def theta_s_tilde(self) -> float:
        return self.sr.rate / self.eta_s

    @property
    def inv_t(self) -> float:
        """1 / (Omega_t eta_t)."""
        return 1.0 / (self.omega_t * self.eta_t)

    @property
    def theta_ss(self) -> float:
        return self.theta_s_tilde - self.inv_t

    @property
    def mean(self) -> float:
        return self.M1 * self.eta_s * self.sr.mean + self.M2 * self.eta_t * self.omega_t

    @cached_property
    def xi_by_lambda(self) -> dict[int, float]:
        """Multi-index sum of Xi(M1) / eta_s^Lambda grouped by Lambda.

        The grouping is exact: every density and closed form depends on the
        multi-index only through Lambda = sum(i) + M1.
        """
        self.require_analytic()
        sr, M1 = self.sr, self.M1
        out: dict[int, float] = {}
        for idx in itertools.product(range(sr.m), repeat=M1):
            xi = sr.alpha ** M1
            for i in idx:
                xi *= sr.zeta[i]
            run = 0
            for j in range(M1 - 1):
                run += idx[j]
                xi *= beta_fn(run + j + 1, idx[j + 1] + 1)
            lam = sum(idx) + M1
            out[lam] = out.get(lam, 0.0) + xi
        return {lam: v / self.eta_s ** lam for lam, v in sorted(out.items())}


def ws_pdf(x, cfg: InterferenceConfig):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for lam, coef in cfg.xi_by_lambda.items():
        out = out + coef * x ** (lam - 1)
    return out * np.exp(-cfg.theta_s_tilde * x)


def ws_cdf(x, cfg: InterferenceConfig):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    th = cfg.theta_s_tilde
    out = np.zeros_like(x)
    for lam, coef in cfg.xi_by_lambda.items():
        out = out + coef / th ** lam * np.array([lower_inc_gamma(lam, th * v) for v in x])
    return out


def wt_pdf(x, cfg: InterferenceConfig):
    if cfg.M2 < 1:
        raise ConfigurationError("wt_pdf needs M2 >= 1")
    x = np.asarray(x, dtype=float)
    r = cfg.inv_t
    return r ** cfg.M2 * x ** (cfg.M2 - 1) * np.exp(-r * x) / gamma_fn(cfg.M2)


def wt_cdf(x, cfg: InterferenceConfig):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = cfg.inv_t
    return np.array([lower_inc_gamma(cfg.M2, r * v) for v in x]) / gamma_fn(cfg.M2)


def wc_pdf(w, cfg: InterferenceConfig):
    """Density of W_c = W_s + W_t through the 1F1 form of the convolution."""
    cfg.require_analytic()
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    M2, r = cfg.M2, cfg.inv_t
    out = np.zeros_like(w)
    pos = w > 0
    wp = w[pos]
    for lam, coef in cfg.xi_by_lambda.items():
        pref = coef * r ** M2 * beta_fn(M2, lam) / gamma_fn(M2)
        k = hyp1f1_array(lam, M2 + lam, -cfg.theta_ss * wp)
        out[pos] += pref * np.exp((lam + M2 - 1) * np.log(wp) - r * wp) * k
    return float(out[0]) if scalar else out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def wc_cdf(w, cfg: InterferenceConfig):
    """CDF of W_c: Gauss-Legendre panels of the density, accumulated over sorted points.

    Panels are at most a tenth of the mean wide, so a lone far point is as
    accurate as a dense grid.
    """
    w = np.asarray(w, dtype=float)
    flat = np.atleast_1d(w).ravel()
    top = float(flat.max()) if flat.size else 0.0
    if top <= 0:
        out = np.zeros_like(flat)
        return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)
    width = cfg.mean / 10.0
    base = np.linspace(0.0, top, int(math.ceil(top / width)) + 1)
    edges = np.unique(np.concatenate([base, flat[flat > 0]]))
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (lo + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    panel = half * (wc_pdf(nodes.ravel(), cfg).reshape(nodes.shape) @ _GL_WEIGHTS)
    cum = np.concatenate([[0.0], np.cumsum(panel)])
    out = np.minimum(cum[np.searchsorted(edges, np.maximum(flat, 0.0))], 1.0)
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


def ws_sample(rng: np.random.Generator, cfg: InterferenceConfig, size: int):
    if cfg.M1 == 0:
        return np.zeros(size)
    return cfg.eta_s * sr_sample(rng, cfg.sr, size=(size, cfg.M1)).sum(axis=1)


def wt_sample(rng: np.random.Generator, cfg: InterferenceConfig, size: int):
    if cfg.M2 == 0:
        return np.zeros(size)
    draws = rayleigh_power_sample(rng, RayleighParams(cfg.omega_t), size=(size, cfg.M2))
    return cfg.eta_t * draws.sum(axis=1)


def wc_sample(rng: np.random.Generator, cfg: InterferenceConfig, size: int | None = None):
    n = 1 if size is None else size
    out = ws_sample(rng, cfg, n) + wt_sample(rng, cfg, n)
    return float(out[0]) if size is None else out
