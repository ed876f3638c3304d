"""Command-line entry point: ``ostn <verb> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .adaptive import solve_mu
from .analysis import op_sat_lb
from .analysis.iot import BIVARIATE_TOL
from .config import ConfigFileError, parse_config
from .errors import ConfigurationError, NumericError
from .sweep import FIG_SNR, METHODS, SweepSpec, run_preset, run_sweep, write_csv
from .system import AdaptiveSplit, NetworkConfig, run_mc

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("OSTN_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigurationError(f"OSTN_THREADS must be an integer, got {env!r}")
        if n < 1:
            raise ConfigurationError("OSTN_THREADS must be positive")
        return n
    return 1


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _common(p: argparse.ArgumentParser, trials_default: int):
    p.add_argument("--config", help="flat key = value scenario file")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=_positive_int, default=trials_default)
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: $OSTN_THREADS or 1)")
    p.add_argument("--tol", type=float, default=BIVARIATE_TOL,
                   help="bivariate Meijer-G tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ostn", description="Outage analysis of an overlay "
                     "satellite-terrestrial IoT network.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="SNR sweep to CSV")
    _common(sw, 100_000)
    sw.add_argument("--snr-start", type=float, default=FIG_SNR[0])
    sw.add_argument("--snr-stop", type=float, default=FIG_SNR[1])
    sw.add_argument("--snr-step", type=float, default=FIG_SNR[2])
    sw.add_argument("--which", default=",".join(METHODS),
                    help="comma list drawn from mc,lb,asymp,sa")
    sw.add_argument("--mu-solver", choices=("lb", "mc"), default="lb")
    sw.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    for name in ("fig1", "fig2"):
        fp = sub.add_parser(name, help=f"{name} scenario matrix to CSV files")
        _common(fp, 100_000)
        fp.add_argument("--out", default=".", help="output directory")
        fp.add_argument("--snr-start", type=float, default=FIG_SNR[0])
        fp.add_argument("--snr-stop", type=float, default=FIG_SNR[1])
        fp.add_argument("--snr-step", type=float, default=FIG_SNR[2])

    sm = sub.add_parser("solve-mu", help="QoS-constrained power split")
    _common(sm, 100_000)
    sm.add_argument("--snr", type=float, default=None, help="SNR in dB (default: config)")
    sm.add_argument("--epsilon", type=float, default=None,
                    help="QoS level (default: config epsilon or 0.1)")
    sm.add_argument("--mu-solver", choices=("lb", "mc"), default="lb")

    si = sub.add_parser("simulate", help="Monte Carlo outage at one SNR")
    _common(si, 100_000)
    si.add_argument("--snr", type=float, default=None)
    si.add_argument("--mu", type=float, default=None)
    si.add_argument("--model", choices=("exact", "bound"), default="exact")
    return parser


def _load(args) -> NetworkConfig:
    return parse_config(args.config) if args.config else NetworkConfig()


def _cmd_sweep(args, threads: int) -> int:
    cfg = _load(args)
    which = frozenset(w.strip() for w in args.which.split(",") if w.strip())
    spec = SweepSpec(args.snr_start, args.snr_stop, args.snr_step, which=which,
                     n_trials=args.trials, seed=args.seed, mu_solver=args.mu_solver,
                     g_tol=args.tol)
    rows = run_sweep(cfg, spec, threads)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(rows, fh)
    return EXIT_NUMERIC if any(r.failed for r in rows) else EXIT_OK


def _cmd_fig(args, threads: int) -> int:
    base = _load(args) if args.config else None
    files, failed = run_preset(args.verb, args.out, args.trials, args.seed, threads,
                               (args.snr_start, args.snr_stop, args.snr_step), base, args.tol)
    for f in files:
        print(f)
    return EXIT_NUMERIC if failed else EXIT_OK


def _cmd_solve_mu(args, threads: int) -> int:
    cfg = _load(args)
    if args.snr is not None:
        cfg = cfg.with_snr(args.snr)
    eps = args.epsilon
    if eps is None:
        eps = cfg.power_split.epsilon if isinstance(cfg.power_split, AdaptiveSplit) else 0.1
    if not 0.0 < eps < 1.0:
        print(f"ostn: error: epsilon must lie in (0, 1), got {eps}", file=sys.stderr)
        return EXIT_USAGE
    if args.mu_solver == "mc":
        def evaluator(c):
            return run_mc(c, args.trials, args.seed, threads)["sat"].p_hat
    else:
        evaluator = op_sat_lb
    sol = solve_mu(cfg, eps, evaluator)
    print(f"status = {sol.status.value}")
    print(f"snr_db = {cfg.eta_db:g}")
    print(f"epsilon = {eps:g}")
    print("mu_star = " + ("NA" if sol.mu_star is None else f"{sol.mu_star:.8e}"))
    print(f"achieved_op_sat = {sol.achieved_op_sat:.8e}")
    print(f"iterations = {sol.iterations}")
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def _cmd_simulate(args, threads: int) -> int:
    cfg = _load(args)
    if args.snr is not None:
        cfg = cfg.with_snr(args.snr)
    if args.mu is not None:
        cfg = cfg.with_mu(args.mu)
    est = run_mc(cfg, args.trials, args.seed, threads, model=args.model)
    print(f"snr_db = {cfg.eta_db:g}")
    print(f"mu = {cfg.mu:g}")
    for net in ("sat", "iot"):
        e = est[net]
        print(f"op_{net} = {e.p_hat:.8e}")
        print(f"op_{net}_se = {e.std_err:.8e}")
    print(f"trials = {args.trials}")
    return EXIT_OK


COMMANDS = {"sweep": _cmd_sweep, "fig1": _cmd_fig, "fig2": _cmd_fig,
            "solve-mu": _cmd_solve_mu, "simulate": _cmd_simulate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        threads = _threads(args.threads)
        return COMMANDS[args.verb](args, threads)
    except ConfigFileError as exc:
        print(f"ostn: config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ConfigurationError as exc:
        print(f"ostn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"ostn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
