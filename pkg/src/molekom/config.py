"""Scenario configs: JSON in mixed lab units, validated and converted to SI.

Field names carry their unit (d_um, tau_ms, D_p_m2s) so a config file can
never be silently misread; everything downstream of this module is SI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .channel import ChannelParams
from .mc import FIDELITIES, ISI_MODELS, McConfig
from .stats import NoiseParams, TxSchedule


class ConfigParseError(Exception):
    """The config file is not readable JSON."""


class ConfigValidationError(Exception):
    """The config parsed but violates the scenario schema."""


DEFAULTS: dict[str, Any] = {
    "experiment": "custom",
    "seed": 12345,
    "out_dir": "results",
    "d_um": 1.0,
    "tau_ms": 10.0,
    "D_p_m2s": 5e-10,
    "D_tx_m2s": 1e-9,
    "D_rx_m2s": 1e-9,
    "index_origin": "slot-end",
    "k": 20,
    "Q": 30,
    "beta": 0.5,
    "mu_o": 10.0,
    "sigma2_o": 10.0,
    "mc": {
        "n_trials": 100_000,
        "fidelity": "slot-level",
        "dt_fraction": 0.001,
        "isi_model": "categorical",
        "max_offset": 3,
        "record_trials": 0,
    },
    "params": {},
}


@dataclass(frozen=True)
class Scenario:
    """A fully resolved experiment run."""

    experiment: str
    seed: int
    out_dir: Path
    channel: ChannelParams
    schedule: TxSchedule
    noise: NoiseParams
    mc: McConfig
    params: dict[str, Any] = field(default_factory=dict)
    resolved: dict[str, Any] = field(default_factory=dict)


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON config file; raises ConfigParseError on unreadable input."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigParseError(f"config file {path} must contain a JSON object")
    return raw


def _require_number(cfg: dict, key: str, minimum: float | None = None, strict: bool = False):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigValidationError(f"{key} must be a number, got {v!r}")
    if minimum is not None:
        if strict and not v > minimum:
            raise ConfigValidationError(f"{key} must be > {minimum}, got {v}")
        if not strict and not v >= minimum:
            raise ConfigValidationError(f"{key} must be >= {minimum}, got {v}")
    return v


def parse_config(raw: dict[str, Any]) -> Scenario:
    """Merge ``raw`` over the defaults, validate, and convert units to SI."""
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigValidationError(f"unknown config keys: {sorted(unknown)}")
    cfg = {**DEFAULTS, **raw}
    mc_raw = raw.get("mc", {})
    if not isinstance(mc_raw, dict):
        raise ConfigValidationError("mc must be an object")
    unknown_mc = set(mc_raw) - set(DEFAULTS["mc"])
    if unknown_mc:
        raise ConfigValidationError(f"unknown mc keys: {sorted(unknown_mc)}")
    mc_cfg = {**DEFAULTS["mc"], **mc_raw}
    if not isinstance(cfg["params"], dict):
        raise ConfigValidationError("params must be an object")

    try:
        channel = ChannelParams(
            d=_require_number(cfg, "d_um", 0.0, strict=True) * 1e-6,
            D_p=_require_number(cfg, "D_p_m2s", 0.0, strict=True),
            D_tx=_require_number(cfg, "D_tx_m2s", 0.0),
            D_rx=_require_number(cfg, "D_rx_m2s", 0.0),
            tau=_require_number(cfg, "tau_ms", 0.0, strict=True) * 1e-3,
            index_origin=cfg["index_origin"],
        )

        k = cfg["k"]
        if not isinstance(k, int) or k < 1:
            raise ConfigValidationError(f"k must be a positive integer, got {k!r}")
        q_raw = cfg["Q"]
        if isinstance(q_raw, (int, float)) and not isinstance(q_raw, bool):
            Q = (int(q_raw),) * k
        elif isinstance(q_raw, list):
            Q = tuple(int(v) for v in q_raw)
        else:
            raise ConfigValidationError(f"Q must be an integer or list, got {q_raw!r}")
        schedule = TxSchedule(Q=Q, beta=float(_require_number(cfg, "beta", 0.0, strict=True)), k=k)

        noise = NoiseParams(
            mu_o=float(_require_number(cfg, "mu_o", 0.0)),
            sigma2_o=float(_require_number(cfg, "sigma2_o", 0.0)),
        )

        seed = cfg["seed"]
        if not isinstance(seed, int) or seed < 0:
            raise ConfigValidationError(f"seed must be a non-negative integer, got {seed!r}")
        n_trials = mc_cfg["n_trials"]
        if not isinstance(n_trials, int) or n_trials < 1:
            raise ConfigValidationError(f"mc.n_trials must be a positive integer, got {n_trials!r}")
        if mc_cfg["fidelity"] not in FIDELITIES:
            raise ConfigValidationError(f"mc.fidelity must be one of {FIDELITIES}")
        if mc_cfg["isi_model"] not in ISI_MODELS:
            raise ConfigValidationError(f"mc.isi_model must be one of {ISI_MODELS}")
        dt_fraction = mc_cfg["dt_fraction"]
        if not isinstance(dt_fraction, (int, float)) or not 0 < dt_fraction <= 0.01:
            raise ConfigValidationError("mc.dt_fraction must lie in (0, 0.01]")
        mc = McConfig(
            n_trials=n_trials,
            seed=seed,
            fidelity=mc_cfg["fidelity"],
            dt=float(dt_fraction) * channel.tau,
            isi_model=mc_cfg["isi_model"],
            max_offset=int(mc_cfg["max_offset"]),
            record_trials=int(mc_cfg["record_trials"]),
        )
    except ConfigValidationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigValidationError(str(exc)) from exc

    resolved = {**cfg, "Q": list(schedule.Q), "mc": mc_cfg}
    return Scenario(
        experiment=str(cfg["experiment"]),
        seed=seed,
        out_dir=Path(str(cfg["out_dir"])),
        channel=channel,
        schedule=schedule,
        noise=noise,
        mc=mc,
        params=dict(cfg["params"]),
        resolved=resolved,
    )
