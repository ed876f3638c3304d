"""SNR sweeps and the figure presets."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, TextIO

from .adaptive import solve_mu
from .analysis import (SweepRow, csv_header, op_iot_asymp, op_iot_lb, op_sat_asymp, op_sat_lb,
                       semianalytic_op_iot, semianalytic_op_sat)
from .analysis.iot import BIVARIATE_TOL
from .errors import ConfigurationError, NumericError
from .system import (AdaptiveSplit, FixedInterference, FixedSplit, NetworkConfig,
                     ProportionalInterference, run_mc)

METHODS = ("mc", "lb", "asymp", "sa")
NETWORKS = ("sat", "iot")


@dataclass(frozen=True)
class SweepSpec:
    snr_start_db: float
    snr_stop_db: float
    snr_step_db: float = 5.0
    which: frozenset = frozenset(METHODS)
    n_trials: int = 100_000
    seed: int = 1
    networks: tuple[str, ...] = NETWORKS
    mu_solver: str = "lb"
    g_tol: float = BIVARIATE_TOL

    def __post_init__(self):
        object.__setattr__(self, "which", frozenset(self.which))
        if not self.which or not self.which <= set(METHODS):
            raise ConfigurationError(f"which must be a nonempty subset of {METHODS}")
        if not set(self.networks) <= set(NETWORKS) or not self.networks:
            raise ConfigurationError(f"networks must be a nonempty subset of {NETWORKS}")
        if self.snr_start_db > self.snr_stop_db:
            raise ConfigurationError("snr start must not exceed snr stop")
        if not self.snr_step_db > 0:
            raise ConfigurationError("snr step must be positive")
        if "mc" in self.which and self.n_trials < 1000:
            raise ConfigurationError("Monte Carlo needs at least 1000 trials")
        if self.mu_solver not in ("lb", "mc"):
            raise ConfigurationError("mu solver must be 'lb' or 'mc'")
        if not self.g_tol > 0:
            raise ConfigurationError("tolerance must be positive")

    def snr_points(self) -> list[float]:
        n = int(math.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9)) + 1
        return [round(self.snr_start_db + i * self.snr_step_db, 10) for i in range(n)]


def _cell(row: SweepRow, fn: Callable[[], float]):
    try:
        return fn()
    except NumericError:
        row.failed = True
        return None


def evaluate_point(cfg: NetworkConfig, snr_db: float, spec: SweepSpec,
                   mc_threads: int = 1) -> SweepRow:
    cfg = cfg.with_snr(snr_db)
    row = SweepRow(snr_db=snr_db)
    which, nets = spec.which, spec.networks
    if isinstance(cfg.power_split, AdaptiveSplit):
        eps = cfg.power_split.epsilon
        if spec.mu_solver == "mc":
            def evaluator(c):
                return run_mc(c, spec.n_trials, spec.seed, mc_threads)["sat"].p_hat
        else:
            evaluator = op_sat_lb
        try:
            sol = solve_mu(cfg, eps, evaluator)
        except NumericError:
            row.failed = True
            return row
        if not sol.feasible:
            # QoS cannot be met: the outage event is declared for both networks
            for net in nets:
                for m in which:
                    setattr(row, f"op_{net}_{m}", 1.0)
                if "mc" in which:
                    setattr(row, f"op_{net}_mc_se", 0.0)
            return row
        cfg = cfg.with_mu(sol.mu_star)
    row.mu_used = cfg.mu

    if "mc" in which:
        est = run_mc(cfg, spec.n_trials, spec.seed, mc_threads)
        for net in nets:
            setattr(row, f"op_{net}_mc", est[net].p_hat)
            setattr(row, f"op_{net}_mc_se", est[net].std_err)
    if "sat" in nets:
        if "lb" in which:
            row.op_sat_lb = _cell(row, lambda: op_sat_lb(cfg))
        if "asymp" in which:
            a = _cell(row, lambda: op_sat_asymp(cfg))
            if a is not None:
                row.op_sat_asymp, row.sat_asymp_valid = a.value, a.valid
        if "sa" in which:
            row.op_sat_sa = _cell(row, lambda: semianalytic_op_sat(cfg))
    if "iot" in nets:
        if "lb" in which:
            row.op_iot_lb = _cell(row, lambda: op_iot_lb(cfg, tol=spec.g_tol))
        if "asymp" in which:
            a = _cell(row, lambda: op_iot_asymp(cfg))
            if a is not None:
                row.op_iot_asymp, row.iot_asymp_valid = a.value, a.valid
        if "sa" in which:
            row.op_iot_sa = _cell(row, lambda: semianalytic_op_iot(cfg))
    return row


def run_sweep(cfg: NetworkConfig, spec: SweepSpec, threads: int = 1) -> list[SweepRow]:
    """Rows in SNR order; points run in parallel when threads > 1."""
    points = spec.snr_points()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: evaluate_point(cfg, s, spec), points))
    return [evaluate_point(cfg, s, spec, mc_threads=threads) for s in points]


def write_csv(rows: list[SweepRow], out: TextIO):
    out.write(csv_header() + "\n")
    for row in rows:
        out.write(row.to_csv_line() + "\n")
    out.flush()


@dataclass(frozen=True)
class Scenario:
    name: str
    cfg: NetworkConfig
    K: int
    mu_mode: str
    policy: str
    gamma_s: float


FIG_SNR = (10.0, 50.0, 5.0)
FIG_MU = 0.75
FIG_EPSILON = 0.1
FIG_NU_DB = -15.0
FIG_GAMMA_S = (1.0, 0.3)


def rate_for_threshold(gamma: float) -> float:
    return 0.5 * math.log2(1.0 + gamma)


def fig_scenarios(preset: str, base: NetworkConfig | None = None) -> list[Scenario]:
    if preset not in ("fig1", "fig2"):
        raise ConfigurationError(f"unknown preset {preset!r}")
    base = base or NetworkConfig()
    gammas = FIG_GAMMA_S if preset == "fig2" else (FIG_GAMMA_S[0],)
    out = []
    for gs in gammas:
        for K in (1, 2):
            for mu_mode in ("fixed", "adaptive"):
                for policy in ("fixed", "proportional"):
                    split = FixedSplit(FIG_MU) if mu_mode == "fixed" else AdaptiveSplit(FIG_EPSILON)
                    pol = (FixedInterference(20.0, 20.0) if policy == "fixed"
                           else ProportionalInterference(FIG_NU_DB))
                    cfg = replace(base, K=K, power_split=split, interference_policy=pol,
                                  r_s=rate_for_threshold(gs))
                    mu_tag = f"mu{FIG_MU:g}" if mu_mode == "fixed" else f"eps{FIG_EPSILON:g}"
                    name = f"{preset}_K{K}_{mu_tag}_{policy}"
                    if preset == "fig2":
                        name += f"_gs{gs:g}"
                    out.append(Scenario(name, cfg, K, mu_mode, policy, gs))
    return out


def run_preset(preset: str, out_dir: str, n_trials: int, seed: int, threads: int = 1,
               snr: tuple[float, float, float] = FIG_SNR, base: NetworkConfig | None = None,
               g_tol: float = BIVARIATE_TOL) -> tuple[list[str], bool]:
    """Write one CSV per scenario plus ``<preset>_index.dat``; returns (files, any_failed)."""
    os.makedirs(out_dir, exist_ok=True)
    nets = ("sat",) if preset == "fig1" else NETWORKS
    spec = SweepSpec(*snr, which=frozenset(METHODS), n_trials=n_trials, seed=seed,
                     networks=nets, g_tol=g_tol)
    files, failed = [], False
    index_lines = ["# file K mu_mode policy gamma_s"]
    for sc in fig_scenarios(preset, base):
        rows = run_sweep(sc.cfg, spec, threads)
        failed |= any(r.failed for r in rows)
        path = os.path.join(out_dir, sc.name + ".csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(rows, fh)
        files.append(path)
        index_lines.append(f"{sc.name}.csv {sc.K} {sc.mu_mode} {sc.policy} {sc.gamma_s:g}")
    index = os.path.join(out_dir, f"{preset}_index.dat")
    with open(index, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(index_lines) + "\n")
    files.append(index)
    return files, failed
