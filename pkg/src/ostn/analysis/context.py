"""Derived symbols shared by the closed-form evaluators."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from ..channels import InterferenceConfig
from ..errors import ConfigurationError
from ..specfun import log_gamma
from ..system import NetworkConfig


def enumerate_multinomial(n: int, m_ac: int) -> list[tuple[int, ...]]:
    """All tuples (s_0, ..., s_{m_ac-1}) of nonnegative integers summing to n."""
    if n < 0 or m_ac < 1:
        raise ConfigurationError("enumerate_multinomial needs n >= 0 and m_ac >= 1")
    out = []
    # stars and bars: choose m_ac - 1 bar positions among n + m_ac - 1 slots
    for bars in itertools.combinations(range(n + m_ac - 1), m_ac - 1):
        edges = (-1,) + bars + (n + m_ac - 1,)
        out.append(tuple(edges[i + 1] - edges[i] - 1 for i in range(m_ac)))
    return out


class LogSum:
    """Accumulates sign * exp(logmag) terms and sums them with math.fsum."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: list[float] = []

    def add(self, sign: float, logmag: float):
        if sign != 0 and logmag != -math.inf:
            self.terms.append(math.copysign(math.exp(logmag), sign))

    def add_value(self, value: float):
        self.terms.append(value)

    def value(self) -> float:
        return math.fsum(self.terms)


def signed_log(x: float) -> tuple[float, float]:
    if x == 0:
        return 0.0, -math.inf
    return math.copysign(1.0, x), math.log(abs(x))


@dataclass(frozen=True)
class ClosedFormContext:
    """Every derived quantity the closed forms need, at one SNR and one fixed mu.

    ``mult[n]`` maps Delta to the aggregated multinomial coefficient
    sum_{s : sum m s_m = Delta} n!/prod(s_m!) prod A_m^{s_m}; all evaluators
    depend on the tuple s only through Delta.
    """

    K: int
    m_ac: int
    eta: float
    mu: float
    mu_prime: float
    gamma_p: float
    gamma_s: float
    gamma_p_tilde: float
    gamma_s_tilde: float
    alpha_c: float
    zeta_c: tuple[float, ...]
    theta_ca: float
    lam_b: float
    c_d: float
    interference: InterferenceConfig
    M2: int
    inv_t: float
    theta_ss: float
    chi_ct: float
    chi_cs: float
    xi: dict
    A: tuple[float, ...]
    mult: tuple[dict, ...]

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> ClosedFormContext:
        mu = cfg.mu
        eta = cfg.eta
        interf = cfg.interference
        interf.require_analytic()
        sr = cfg.sr_main
        mu_prime = mu / (1.0 - mu)
        gamma_p, gamma_s = cfg.gamma_p, cfg.gamma_s
        if gamma_p < mu_prime:
            gamma_p_tilde = gamma_p / (mu - (1.0 - mu) * gamma_p)
        else:
            gamma_p_tilde = math.inf
        theta_ca = sr.rate / eta
        lam_b = 1.0 / (cfg.omega_cb * eta)
        c_d = gamma_s / (cfg.omega_cd * eta * (1.0 - mu))
        inv_t = interf.inv_t
        theta_ss = interf.theta_ss
        chi_ct = inv_t + c_d
        A = []
        for m in range(sr.m):
            acc = 0.0
            for l in range(m, sr.m):
                acc += (sr.zeta[l] / eta ** (l + 1) * math.exp(log_gamma(l + 1) - log_gamma(m + 1))
                        * theta_ca ** (-(l + 1 - m)))
            A.append(acc)
        mult = tuple(_aggregate_multinomial(n, A) for n in range(cfg.K + 1))
        return cls(K=cfg.K, m_ac=sr.m, eta=eta, mu=mu, mu_prime=mu_prime,
                   gamma_p=gamma_p, gamma_s=gamma_s, gamma_p_tilde=gamma_p_tilde,
                   gamma_s_tilde=mu_prime * gamma_s - 1.0, alpha_c=sr.alpha,
                   zeta_c=sr.zeta, theta_ca=theta_ca, lam_b=lam_b, c_d=c_d,
                   interference=interf, M2=interf.M2, inv_t=inv_t, theta_ss=theta_ss,
                   chi_ct=chi_ct, chi_cs=chi_ct + theta_ss, xi=interf.xi_by_lambda,
                   A=tuple(A), mult=mult)

    @property
    def sat_feasible(self) -> bool:
        return math.isfinite(self.gamma_p_tilde)

    @property
    def iot_branch(self) -> int:
        """1 when gamma_s < 1/mu', else 2."""
        return 1 if self.gamma_s * self.mu_prime < 1.0 else 2

    def require_meijer(self):
        if not self.theta_ss > 0:
            raise ConfigurationError(
                "closed forms need (beta_s - delta_s)/eta_s > 1/(Omega_t eta_t); "
                "use the semi-analytic evaluators for this configuration")

    def chi_ct_tilde(self, n: int) -> float:
        return self.chi_ct + (n + 1) * self.theta_ca * self.gamma_s_tilde

    def chi_cs_tilde(self, n: int) -> float:
        return self.chi_cs + (n + 1) * self.theta_ca * self.gamma_s_tilde

    def vartheta(self, n: int, w):
        return n * self.theta_ca * w + (n + 1) * self.lam_b

    def omega(self, n: int, w):
        return (n + 1) * (self.theta_ca * w + self.lam_b)

    def wc_prefactor_log(self, lam: int) -> float:
        """log of Xi/eta_s^Lambda (1/(Omega_t eta_t))^M2 Beta(M2, Lambda)/Gamma(M2)."""
        M2 = self.M2
        return (math.log(self.xi[lam]) + M2 * math.log(self.inv_t)
                + log_gamma(lam) - log_gamma(M2 + lam))


def _aggregate_multinomial(n: int, A: list[float]) -> dict[int, float]:
    out: dict[int, LogSum] = {}
    lf_n = log_gamma(n + 1)
    for s in enumerate_multinomial(n, len(A)):
        sign, logmag = 1.0, lf_n
        for m, sm in enumerate(s):
            if sm == 0:
                continue
            sg, la = signed_log(A[m])
            sign *= sg ** sm
            logmag += sm * la - log_gamma(sm + 1)
        delta = sum(m * sm for m, sm in enumerate(s))
        out.setdefault(delta, LogSum()).add(sign, logmag)
    return {d: acc.value() for d, acc in sorted(out.items())}
