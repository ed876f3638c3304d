"""Satellite-network outage: closed-form lower bound, asymptote, quadrature check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..channels import sr_cdf, sr_sf, wc_pdf
from ..errors import NumericError
from ..specfun import MeijerG1222Spec, log_gamma, meijer_g_1222
from ..system import NetworkConfig
from .context import ClosedFormContext, LogSum, signed_log

log = logging.getLogger(__name__)

CLAMP_SLACK = 1e-6
G_TOL = 1e-13


@dataclass(frozen=True)
class Asymptote:
    """High-SNR approximation; ``valid`` is False where it is not a probability."""

    value: float
    valid: bool

    def __float__(self) -> float:
        return self.value


def clamp_probability(raw: float, name: str) -> float:
    if raw < -CLAMP_SLACK or raw > 1.0 + CLAMP_SLACK:
        log.warning("%s: raw value %.6e left [0, 1] by more than %.0e; clamped",
                    name, raw, CLAMP_SLACK)
    return min(max(raw, 0.0), 1.0)


def _log_gamma_ratio(M2: int, lam: int) -> float:
    # Gamma(M2 + Lambda) / Gamma(Lambda), the Meijer-G normalization of 1F1
    return log_gamma(M2 + lam) - log_gamma(lam)


def _log_g1222(a1, a2, b1, b2, z) -> tuple[float, float]:
    return signed_log(meijer_g_1222(MeijerG1222Spec(a1, a2, b1, b2, z), tol=G_TOL))


def wc_laplace_moment(ctx: ClosedFormContext, power: int, rate: float) -> LogSum:
    """Terms of E[W_c^power e^{-(rate - 1/(Omega_t eta_t)) W_c}], one per Lambda."""
    acc = LogSum()
    M2 = ctx.M2
    for lam in ctx.xi:
        nu = power + lam + M2
        sg, lg = _log_g1222(1 - nu, 1 - lam, 0.0, 1 - lam - M2, ctx.theta_ss / rate)
        acc.add(sg, ctx.wc_prefactor_log(lam) + _log_gamma_ratio(M2, lam)
                - nu * math.log(rate) + lg)
    return acc


def op_sat_lb_raw(cfg: NetworkConfig, ctx: ClosedFormContext | None = None) -> float:
    ctx = ctx or ClosedFormContext.from_config(cfg)
    if not ctx.sat_feasible:
        return 1.0
    ctx.require_meijer()
    g = ctx.gamma_p_tilde
    total = LogSum()
    for n in range(ctx.K + 1):
        rate = n * g * ctx.theta_ca + ctx.inv_t
        base = (log_gamma(ctx.K + 1) - log_gamma(n + 1) - log_gamma(ctx.K - n + 1)
                + n * math.log(ctx.alpha_c) - n * g * ctx.lam_b)
        for delta, coef in ctx.mult[n].items():
            sc, lc = signed_log(coef)
            inner = wc_laplace_moment(ctx, delta, rate)
            for t in inner.terms:
                st, lt = signed_log(t)
                total.add((-1) ** n * sc * st, base + lc + delta * math.log(g) + lt)
    return total.value()


def op_sat_lb(cfg: NetworkConfig, ctx: ClosedFormContext | None = None) -> float:
    """Closed-form lower bound on the satellite outage probability."""
    return clamp_probability(op_sat_lb_raw(cfg, ctx), "op_sat_lb")


def psi_moment(ctx: ClosedFormContext, n: int, reading: str = "combined") -> float:
    """psi(n) of the asymptotic expansions.

    ``reading="combined"`` uses (1/(Omega_t eta_t))^{-(n+Lambda)}, which equals
    E[W_c^n]; ``reading="prefactor"`` keeps the exponent M2 of the
    non-asymptotic expression.  Only the first matches the moment identity.
    """
    ctx.require_meijer()
    M2 = ctx.M2
    acc = LogSum()
    for lam in ctx.xi:
        sg, lg = _log_g1222(1 - lam - M2 - n, 1 - lam, 0.0, 1 - lam - M2,
                            ctx.theta_ss / ctx.inv_t)
        pref = ctx.wc_prefactor_log(lam) - M2 * math.log(ctx.inv_t)
        if reading == "combined":
            pref += -(n + lam) * math.log(ctx.inv_t)
        elif reading == "prefactor":
            pref += M2 * math.log(ctx.inv_t)
        else:
            raise ValueError(f"unknown psi reading {reading!r}")
        acc.add(sg, pref + _log_gamma_ratio(M2, lam) + lg)
    return acc.value()


def op_sat_asymp(cfg: NetworkConfig, ctx: ClosedFormContext | None = None,
                 reading: str = "combined") -> Asymptote:
    ctx = ctx or ClosedFormContext.from_config(cfg)
    if not ctx.sat_feasible:
        return Asymptote(1.0, True)
    K, g = ctx.K, ctx.gamma_p_tilde
    terms = [math.comb(K, n) * ctx.alpha_c ** n / cfg.omega_cb ** (K - n)
             * (g / ctx.eta) ** K * psi_moment(ctx, n, reading) for n in range(K + 1)]
    value = math.fsum(terms)
    return Asymptote(value, value <= 1.0)


def cond_cdf_ac(x, w, cfg: NetworkConfig):
    """CDF of Lambda_ac / w for one unselected satellite link, given W_c = w.

    Evaluated as one minus the closed-form survival; where the survival is
    close to one the incomplete-gamma form is used instead.
    """
    arg = np.asarray(x, dtype=float) * np.asarray(w, dtype=float) / cfg.eta
    return _sr_cdf_accurate(arg, cfg)


def _sr_cdf_accurate(arg, cfg: NetworkConfig):
    sf = np.asarray(sr_sf(arg, cfg.sr_main))
    out = 1.0 - sf
    small = sf > 0.5
    if np.any(small):
        out = np.where(small, sr_cdf(np.where(small, arg, 0.0), cfg.sr_main), out)
    return float(out) if np.ndim(out) == 0 else out


def _quad_over_wc(func, ctx_scale: float, name: str) -> float:
    """int_0^inf func(w) dw split at a few interference means."""
    edges = [0.0, ctx_scale, 4.0 * ctx_scale, 16.0 * ctx_scale]
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(func, lo, hi, epsabs=1e-15, epsrel=1e-11, limit=200)
        total += v
        err += e
    v, e = integrate.quad(func, edges[-1], np.inf, epsabs=1e-15, epsrel=1e-10, limit=200)
    total += v
    err += e
    if not err <= max(1e-10, 1e-8 * abs(total)):
        raise NumericError(f"{name}: quadrature did not converge", estimate=total, error=err)
    return total


def semianalytic_op_sat(cfg: NetworkConfig) -> float:
    """E_W[(1 - Fbar_ac(g|W) Fbar_cb(g))^K] by adaptive quadrature over W_c."""
    mu = cfg.mu
    g_p = cfg.gamma_p
    if g_p >= mu / (1.0 - mu):
        return 1.0
    interf = cfg.interference
    interf.require_analytic()
    g = g_p / (mu - (1.0 - mu) * g_p)
    f_cb = -math.expm1(-g / (cfg.omega_cb * cfg.eta))
    K = cfg.K

    def integrand(w):
        f_ac = float(cond_cdf_ac(g, w, cfg))
        cond = f_ac + f_cb - f_ac * f_cb
        return cond ** K * wc_pdf(w, interf)

    return clamp_probability(_quad_over_wc(integrand, interf.mean, "semianalytic_op_sat"),
                             "semianalytic_op_sat")
