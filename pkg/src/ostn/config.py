"""Flat ``key = value`` scenario files.

Blank lines and ``#`` comments are ignored, unknown keys are rejected and
every key has a default, so an empty file yields the baseline scenario.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .channels import sr_coeffs
from .errors import ConfigurationError, DomainError, OSTNError
from .system import (AdaptiveSplit, FixedInterference, FixedSplit, NetworkConfig,
                     ProportionalInterference)


class ConfigFileError(OSTNError):
    exit_code = 66


class ConfigMissingError(ConfigFileError):
    exit_code = 66


class ConfigParseError(ConfigFileError):
    exit_code = 65


class ConfigValidationError(ConfigFileError):
    exit_code = 78


@dataclass(frozen=True)
class _Key:
    kind: type
    default: object


KEYS: dict[str, _Key] = {
    "K": _Key(int, 1),
    "M1": _Key(int, 2),
    "M2": _Key(int, 2),
    "m_ac": _Key(int, 5),
    "b_ac": _Key(float, 0.251),
    "omega_ac": _Key(float, 0.279),
    "m_s": _Key(int, 2),
    "b_s": _Key(float, 0.063),
    "omega_s": _Key(float, 0.0005),
    "omega_t": _Key(float, 0.2),
    "omega_cb": _Key(float, 1.0),
    "omega_cd": _Key(float, 1.0),
    "snr_db": _Key(float, 30.0),
    "power_split": _Key(str, None),
    "mu": _Key(float, None),
    "epsilon": _Key(float, None),
    "r_p": _Key(float, 0.5),
    "r_s": _Key(float, 0.5),
    "interference_policy": _Key(str, "fixed"),
    "eta_s_db": _Key(float, 20.0),
    "eta_t_db": _Key(float, 20.0),
    "nu_db": _Key(float, -15.0),
}

DEFAULT_MU = 0.75
DEFAULT_EPSILON = 0.1


def _convert(key: str, raw: str, lineno: int):
    kind = KEYS[key].kind
    try:
        if kind is int:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        if kind is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        return raw.strip().lower()
    except ValueError:
        raise ConfigParseError(f"line {lineno}: {key} expects {kind.__name__}, got {raw!r}")


def parse_config_text(text: str) -> NetworkConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigParseError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}")
        if not raw:
            raise ConfigParseError(f"line {lineno}: empty value for {key!r}")
        values[key] = _convert(key, raw, lineno)
    return build_config(values)


def build_config(values: dict[str, object]) -> NetworkConfig:
    v = {k: spec.default for k, spec in KEYS.items()}
    v.update(values)
    try:
        split = v["power_split"]
        if split is None:
            split = "adaptive" if v["epsilon"] is not None and v["mu"] is None else "fixed"
        if split == "fixed":
            if v["epsilon"] is not None:
                raise ConfigValidationError("epsilon given with a fixed power split")
            power = FixedSplit(DEFAULT_MU if v["mu"] is None else v["mu"])
        elif split == "adaptive":
            if v["mu"] is not None:
                raise ConfigValidationError("mu given with an adaptive power split")
            power = AdaptiveSplit(DEFAULT_EPSILON if v["epsilon"] is None else v["epsilon"])
        else:
            raise ConfigValidationError(f"power_split must be fixed or adaptive, got {split!r}")
        pol = v["interference_policy"]
        if pol == "fixed":
            policy = FixedInterference(v["eta_s_db"], v["eta_t_db"])
        elif pol == "proportional":
            policy = ProportionalInterference(v["nu_db"])
        else:
            raise ConfigValidationError(
                f"interference_policy must be fixed or proportional, got {pol!r}")
        return NetworkConfig(
            K=v["K"], M1=v["M1"], M2=v["M2"],
            sr_main=sr_coeffs(v["m_ac"], v["b_ac"], v["omega_ac"]),
            sr_interf=sr_coeffs(v["m_s"], v["b_s"], v["omega_s"]),
            omega_t=v["omega_t"], omega_cb=v["omega_cb"], omega_cd=v["omega_cd"],
            eta_db=v["snr_db"], power_split=power, r_p=v["r_p"], r_s=v["r_s"],
            interference_policy=policy)
    except (ConfigurationError, DomainError) as exc:
        raise ConfigValidationError(str(exc)) from exc


def parse_config(path: str | os.PathLike) -> NetworkConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigMissingError(f"config file not found: {path}")
    except OSError as exc:
        raise ConfigMissingError(f"cannot read config file {path}: {exc}")
    return parse_config_text(text)
