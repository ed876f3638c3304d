"""IoT-network outage: selected-link CDF, closed form, asymptote, quadrature check."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..specfun import (TYPE_11, TYPE_12, BivariateGSpec, binomial, bivariate_meijer_g,
                       log_gamma, lower_inc_gamma)
from ..channels import wc_pdf
from ..errors import NumericError
from ..system import NetworkConfig
from .context import ClosedFormContext, LogSum, signed_log
from .satellite import (Asymptote, _log_g1222, _log_gamma_ratio, _quad_over_wc,
                        clamp_probability, psi_moment)

BIVARIATE_TOL = 1e-11


def cond_cdf_ac_selected(x: float, w: float, cfg: NetworkConfig,
                         ctx: ClosedFormContext | None = None) -> float:
    """CDF of Lambda_ac / w on the pair picked by the primary-driven selection.

    Order-statistics form: a first group with the 1/vartheta_n^{Delta+1}
    weights and a second group of Upsilon(l + Delta + 1, omega_n x) terms.
    """
    if x <= 0:
        return 0.0
    ctx = ctx or ClosedFormContext.from_config(cfg)
    K, th, lb = ctx.K, ctx.theta_ca, ctx.lam_b
    acc = LogSum()
    for n in range(K):
        outer = math.comb(K - 1, n) * (-1) ** n * ctx.alpha_c ** (n + 1) * K
        vt = ctx.vartheta(n, w)
        om = ctx.omega(n, w)
        for delta, coef in ctx.mult[n].items():
            for l in range(ctx.m_ac):
                z = ctx.zeta_c[l]
                if z == 0.0:
                    continue
                base = outer * coef * z / ctx.eta ** (l + 1) * w ** (delta + l + 1)
                first = lower_inc_gamma(l + 1, th * w * x) / (th * w) ** (l + 1)
                sub = math.fsum(vt ** q / (math.factorial(q) * om ** (l + q + 1))
                                * lower_inc_gamma(l + q + 1, om * x) for q in range(delta + 1))
                acc.add_value(lb * base * math.gamma(delta + 1) / vt ** (delta + 1)
                              * (first - sub))
                acc.add_value(base * lower_inc_gamma(l + delta + 1, om * x)
                              / om ** (l + delta + 1))
    return min(max(acc.value(), 0.0), 1.0)


@dataclass(frozen=True)
class IotTerms:
    """Psi_1..Psi_5 of the IoT lower bound.

    psi4 and psi5 are reported already weighted by the Psi_3 prefactor and
    summed over all indices, so psi3 = psi4 - psi5.
    """

    psi1: float
    psi2: float
    psi3: float
    psi4: float
    psi5: float
    branch: int

    @property
    def total(self) -> float:
        if self.branch == 1:
            return self.psi1
        return self.psi1 + self.psi2 + self.psi3


def _g12(A, b_param, lam, M2, x, y, tol) -> tuple[float, float]:
    spec = BivariateGSpec((float(A),), (float(b_param),), (0.0,), (1.0 - lam,),
                          (0.0, 1.0 - lam - M2), x, y, TYPE_12)
    return signed_log(_bivariate(spec, "Psi_2/Psi_4", tol))


def _g11(A, p1, p2, x, y, tol) -> tuple[float, float]:
    spec = BivariateGSpec((float(A),), (float(p1),), (0.0,), (float(p2),), (0.0,), x, y, TYPE_11)
    return signed_log(_bivariate(spec, "Psi_5", tol))


def _bivariate(spec: BivariateGSpec, term: str, tol: float) -> float:
    try:
        return bivariate_meijer_g(spec, tol=tol)
    except NumericError as exc:
        raise NumericError(f"{term}: {exc}", estimate=exc.estimate, error=exc.error,
                           term=term) from exc


def _psi1(ctx: ClosedFormContext) -> float:
    M2 = ctx.M2
    acc = LogSum()
    for lam in ctx.xi:
        sg, lg = _log_g1222(1 - lam - M2, 1 - lam, 0.0, 1 - lam - M2, ctx.theta_ss / ctx.chi_ct)
        acc.add(sg, ctx.wc_prefactor_log(lam) + _log_gamma_ratio(M2, lam)
                - (lam + M2) * math.log(ctx.chi_ct) + lg)
    return 1.0 - acc.value()


def _psi2_bracket(ctx, n, delta, l, lam, tol) -> LogSum:
    """Bracket of Psi_2 times ((n+1)/(Omega_cb eta_c))^{-(l~+1)}."""
    M2, th, gs = ctx.M2, ctx.theta_ca, ctx.gamma_s_tilde
    lt = l + delta
    dt = delta + lam + M2 + l + 1
    rn = (n + 1) * ctx.lam_b
    out = LogSum()
    head = -(lt + 1) * math.log(rn)
    chi = ctx.chi_ct
    sg, lg = _g12(dt, -lt, lam, M2, th / (ctx.lam_b * chi), ctx.theta_ss / chi, tol)
    out.add(sg, head - dt * math.log(chi) + lg)
    chit = ctx.chi_ct_tilde(n)
    for q in range(lt + 1):
        sg, lg = _g12(dt, -lt + q, lam, M2, th / (ctx.lam_b * chit), ctx.theta_ss / chit, tol)
        lq = (q * math.log(gs) - log_gamma(q + 1) - rn * gs + q * math.log(rn)
              + log_gamma(lt + 1) - log_gamma(lt + 1 - q))
        out.add(-sg, head + lq - dt * math.log(chit) + lg)
    return out


def _psi4(ctx, n, delta, l, lam, tol) -> LogSum:
    M2, th, gs = ctx.M2, ctx.theta_ca, ctx.gamma_s_tilde
    rn = (n + 1) * ctx.lam_b
    x1 = n * th / rn
    Lt = delta + lam + M2
    head = (-(l + 1) * math.log(th) + log_gamma(M2 + lam) + log_gamma(l + 1)
            - log_gamma(lam) - log_gamma(delta + 1) - (delta + 1) * math.log(rn))
    out = LogSum()
    chi = ctx.chi_ct
    sg, lg = _g12(Lt, -delta, lam, M2, x1 / chi, ctx.theta_ss / chi, tol)
    out.add(sg, head - Lt * math.log(chi) + lg)
    chiu = chi + th * gs
    for u in range(l + 1):
        sg, lg = _g12(Lt + u, -delta, lam, M2, x1 / chiu, ctx.theta_ss / chiu, tol)
        out.add(-sg, head + u * math.log(th * gs) - log_gamma(u + 1)
                - (Lt + u) * math.log(chiu) + lg)
    return out


def _psi5(ctx, n, delta, l, lam, j_start: int, tol) -> LogSum:
    M2, th, gs = ctx.M2, ctx.theta_ca, ctx.gamma_s_tilde
    rn = (n + 1) * ctx.lam_b
    x1 = n * th / rn
    x2 = th / ctx.lam_b
    lt = l + delta
    dt = delta + lam + M2 + l + 1
    tail = -(lt + 2) * math.log(rn)
    lb_lam_m2 = log_gamma(lam) + log_gamma(M2) - log_gamma(lam + M2)
    out = LogSum()

    def h_terms(sign, logw, P, Pt, A, q):
        # P^{-A} G11(...; -l-q) - sum_j ... Pt^{-A} G11(...; -l-q+j)
        sg, lg = _g11(A, q - delta, -l - q, x1 / P, x2 / P, tol)
        out.add(sign * sg, logw - A * math.log(P) + lg)
        for j in range(j_start, l + q + 1):
            sg, lg = _g11(A, q - delta, -l - q + j, x1 / Pt, x2 / Pt, tol)
            lj = (j * math.log(gs) - log_gamma(j + 1) - rn * gs + j * math.log(rn)
                  + log_gamma(l + q + 1) - log_gamma(l + q - j + 1))
            out.add(-sign * sg, logw + lj - A * math.log(Pt) + lg)

    for q in range(delta + 1):
        for g in range(M2 + 1):
            cb = binomial(M2 - 1, g)
            if cb == 0:
                continue
            sign = (-1) ** g
            logw = (tail + math.log(cb) - (lam + g) * math.log(ctx.theta_ss)
                    + log_gamma(lam + g) - lb_lam_m2 - log_gamma(q + 1)
                    - log_gamma(delta - q + 1))
            gt = dt - lam - g
            h_terms(sign, logw, ctx.chi_ct, ctx.chi_ct_tilde(n), gt, q)
            for v in range(lam + g):
                h_terms(-sign, logw + v * math.log(ctx.theta_ss) - log_gamma(v + 1),
                        ctx.chi_cs, ctx.chi_cs_tilde(n), gt + v, q)
    return out


def eval_iot_terms(cfg: NetworkConfig, ctx: ClosedFormContext | None = None,
                   psi5_j_start: int = 0, tol: float = BIVARIATE_TOL) -> IotTerms:
    """Evaluate every Psi term of the IoT lower bound.

    ``psi5_j_start`` selects the first index of the inner j-sums of Psi_5.
    Starting at 0 keeps the e^{-omega x} x^0 term of the incomplete-gamma
    expansion; starting at 1 drops it.
    """
    ctx = ctx or ClosedFormContext.from_config(cfg)
    ctx.require_meijer()
    psi1 = _psi1(ctx)
    if ctx.iot_branch == 1:
        return IotTerms(psi1, 0.0, 0.0, 0.0, 0.0, 1)
    K, M2 = ctx.K, ctx.M2
    psi2, psi4, psi5 = LogSum(), LogSum(), LogSum()
    for l in range(ctx.m_ac):
        sz, lz = signed_log(ctx.zeta_c[l])
        if sz == 0:
            continue
        for n in range(K):
            lbin = log_gamma(K) - log_gamma(n + 1) - log_gamma(K - n)
            common = (math.log(K) + lz - (l + 1) * math.log(ctx.eta) + lbin
                      + (n + 1) * math.log(ctx.alpha_c))
            for delta, coef in ctx.mult[n].items():
                sc, lc = signed_log(coef)
                sign = sz * sc * (-1) ** n
                for lam in ctx.xi:
                    pre = common + lc + ctx.wc_prefactor_log(lam)
                    for t in _psi2_bracket(ctx, n, delta, l, lam, tol).terms:
                        st, lt_ = signed_log(t)
                        psi2.add(sign * st, pre + _log_gamma_ratio(M2, lam) + lt_)
                    pre3 = pre + math.log(ctx.lam_b) + log_gamma(delta + 1)
                    for t in _psi4(ctx, n, delta, l, lam, tol).terms:
                        st, lt_ = signed_log(t)
                        psi4.add(sign * st, pre3 + lt_)
                    for t in _psi5(ctx, n, delta, l, lam, psi5_j_start, tol).terms:
                        st, lt_ = signed_log(t)
                        psi5.add(sign * st, pre3 + lt_)
    p4, p5 = psi4.value(), psi5.value()
    return IotTerms(psi1, psi2.value(), p4 - p5, p4, p5, 2)


def op_iot_lb(cfg: NetworkConfig, ctx: ClosedFormContext | None = None,
              psi5_j_start: int = 0, tol: float = BIVARIATE_TOL) -> float:
    """Closed-form lower bound on the IoT outage probability."""
    return clamp_probability(eval_iot_terms(cfg, ctx, psi5_j_start, tol).total, "op_iot_lb")


def op_iot_asymp(cfg: NetworkConfig, ctx: ClosedFormContext | None = None,
                 reading: str = "combined") -> Asymptote:
    ctx = ctx or ClosedFormContext.from_config(cfg)
    value = ctx.gamma_s / (cfg.omega_cd * ctx.eta * (1.0 - ctx.mu)) * psi_moment(ctx, 1, reading)
    if ctx.iot_branch == 2:
        K, gs = ctx.K, ctx.gamma_s_tilde
        value += math.fsum(
            math.comb(K - 1, n) * ctx.alpha_c ** (n + 1) / cfg.omega_cb ** (K - 1 - n)
            * (gs / ctx.eta) ** K * psi_moment(ctx, n + 1, reading) for n in range(K))
    return Asymptote(value, value <= 1.0)


def semianalytic_op_iot(cfg: NetworkConfig) -> float:
    """E_W of the conditional min-bound IoT outage by adaptive quadrature."""
    ctx = ClosedFormContext.from_config(cfg)
    interf = ctx.interference
    c_d = ctx.c_d
    branch2 = ctx.iot_branch == 2
    gs = ctx.gamma_s_tilde

    def integrand(w):
        surv = math.exp(-c_d * w)
        if branch2:
            cond = 1.0 - surv * (1.0 - cond_cdf_ac_selected(gs, w, cfg, ctx))
        else:
            cond = -math.expm1(-c_d * w)
        return cond * wc_pdf(w, interf)

    return clamp_probability(_quad_over_wc(integrand, interf.mean, "semianalytic_op_iot"),
                             "semianalytic_op_iot")
