"""Named experiments and their machine-readable outputs.

Each experiment takes a resolved :class:`~molekom.config.Scenario`, writes
CSV (curves) and/or JSON (scalar summaries) under the scenario's output
directory, and returns the written paths. Every output file embeds the
fully resolved config in its header comments; identical config + seed means
byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Iterable

from .alloc import BudgetProblem, sweep_two_slot
from .channel import ChannelParams, arrival_prob, arrival_prob_table
from .config import ConfigValidationError, Scenario
from .detector import effective_threshold
from .mc import simulate_slot_level, simulate_trajectory
from .perf import avg_error_prob, capacity, link_performance, roc_sweep
from .stats import NoiseParams, TxSchedule, gaussian_validity, hypothesis_moments

EXPERIMENT_NAMES = (
    "fig1a",
    "fig1b",
    "fig1c",
    "fig2a",
    "fig2b",
    "validate-q",
    "validate-moments",
    "custom",
)


def list_experiments() -> tuple[str, ...]:
    return EXPERIMENT_NAMES


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)


def _write_csv(path: Path, header_cfg: dict, columns: list[str], rows: Iterable[tuple]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("# molekom result\n")
        f.write("# config " + json.dumps(header_cfg, sort_keys=True) + "\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _merge_params(scenario: Scenario, defaults: dict[str, Any]) -> tuple[dict[str, Any], dict]:
    unknown = set(scenario.params) - set(defaults)
    if unknown:
        raise ConfigValidationError(
            f"unknown params for experiment {scenario.experiment!r}: {sorted(unknown)}"
        )
    merged = {**defaults, **scenario.params}
    header = {**scenario.resolved, "params": merged}
    return merged, header


def _mobility(scenario: Scenario, d_value: float) -> ChannelParams:
    return replace(scenario.channel, D_tx=d_value, D_rx=d_value)


def run_fig1a(scenario: Scenario) -> list[Path]:
    """Operating curves (P_D vs P_FA) for several molecule counts and mobilities."""
    params, header = _merge_params(
        scenario,
        {"Q_values": [20, 30], "D_values": [1e-11, 1e-9], "slot": 1, "n_points": 201},
    )
    rows = []
    for d_value in params["D_values"]:
        channel = _mobility(scenario, d_value)
        qtab = arrival_prob_table(scenario.schedule.k, channel)
        for q in params["Q_values"]:
            sched = TxSchedule.uniform(int(q), scenario.schedule.k, scenario.schedule.beta)
            m = hypothesis_moments(int(params["slot"]), sched, scenario.noise, qtab)
            for p_fa, p_d in roc_sweep(m, int(params["n_points"])):
                rows.append((int(q), d_value, d_value, p_fa, p_d))
    return [_write_csv(scenario.out_dir / "fig1a.csv", header,
                       ["Q", "D_tx", "D_rx", "P_FA", "P_D"], rows)]


def run_fig1b(scenario: Scenario) -> list[Path]:
    """Error probability vs MSI variance, closed form next to slot-level MC."""
    params, header = _merge_params(
        scenario,
        {
            "sigma2_values": list(range(1, 21)),
            "D_values": [1e-11, 1e-10, 1e-9],
            "Q": 30,
            "mu_o": 0.0,
        },
    )
    rows = []
    for d_value in params["D_values"]:
        channel = _mobility(scenario, d_value)
        qtab = arrival_prob_table(scenario.schedule.k, channel)
        sched = TxSchedule.uniform(int(params["Q"]), scenario.schedule.k, scenario.schedule.beta)
        for s2 in params["sigma2_values"]:
            noise = NoiseParams(mu_o=float(params["mu_o"]), sigma2_o=float(s2))
            analytic = avg_error_prob(sched, noise, qtab).p_e
            mc = simulate_slot_level(sched, noise, qtab, scenario.mc)
            rows.append((float(s2), d_value, d_value, analytic, mc.p_e, mc.se_p_e))
    return [_write_csv(scenario.out_dir / "fig1b.csv", header,
                       ["sigma2_o", "D_tx", "D_rx", "Pe_analytic", "Pe_mc", "mc_stderr"], rows)]


def run_fig1c(scenario: Scenario) -> list[Path]:
    """Capacity vs MSI variance for several slot counts."""
    params, header = _merge_params(
        scenario,
        {
            "sigma2_values": list(range(1, 21)),
            "k_values": [5, 10, 20],
            "D_value": 1e-11,
            "Q": 100,
            "mu_o": 10.0,
        },
    )
    d_value = float(params["D_value"])
    channel = _mobility(scenario, d_value)
    rows = []
    for k in params["k_values"]:
        qtab = arrival_prob_table(int(k), channel)
        sched = TxSchedule.uniform(int(params["Q"]), int(k), scenario.schedule.beta)
        for s2 in params["sigma2_values"]:
            noise = NoiseParams(mu_o=float(params["mu_o"]), sigma2_o=float(s2))
            c, beta_star = capacity(sched, noise, qtab)
            rows.append((float(s2), int(k), d_value, d_value, c, beta_star))
    return [_write_csv(scenario.out_dir / "fig1c.csv", header,
                       ["sigma2_o", "k", "D_tx", "D_rx", "capacity_bits", "beta_star"], rows)]


def run_fig2a(scenario: Scenario) -> list[Path]:
    """Two-slot budget sweep for several mobilities at fixed MSI."""
    params, header = _merge_params(
        scenario,
        {"budget": 60, "D_values": [1e-11, 1e-10, 1e-9], "mu_o": 5.0, "sigma2_o": 5.0},
    )
    noise = NoiseParams(mu_o=float(params["mu_o"]), sigma2_o=float(params["sigma2_o"]))
    rows = []
    for d_value in params["D_values"]:
        problem = BudgetProblem(
            total=int(params["budget"]), slots=2, channel=_mobility(scenario, d_value),
            noise=noise, beta=scenario.schedule.beta,
        )
        sweep = sweep_two_slot(problem)
        for q1, pe, _ok in sweep.points:
            rows.append((d_value, d_value, q1, pe, q1 == sweep.best_q1))
    return [_write_csv(scenario.out_dir / "fig2a.csv", header,
                       ["D_tx", "D_rx", "Q1", "Pe", "is_argmin"], rows)]


def run_fig2b(scenario: Scenario) -> list[Path]:
    """Two-slot budget sweep for several MSI variances at fixed mobility."""
    params, header = _merge_params(
        scenario,
        {"budget": 60, "D_value": 1e-10, "sigma2_values": [1, 5, 10, 20], "mu_o": 5.0},
    )
    channel = _mobility(scenario, float(params["D_value"]))
    rows = []
    for s2 in params["sigma2_values"]:
        problem = BudgetProblem(
            total=int(params["budget"]), slots=2, channel=channel,
            noise=NoiseParams(mu_o=float(params["mu_o"]), sigma2_o=float(s2)),
            beta=scenario.schedule.beta,
        )
        sweep = sweep_two_slot(problem)
        for q1, pe, _ok in sweep.points:
            rows.append((float(s2), q1, pe, q1 == sweep.best_q1))
    return [_write_csv(scenario.out_dir / "fig2b.csv", header,
                       ["sigma2_o", "Q1", "Pe", "is_argmin"], rows)]


def run_validate_q(scenario: Scenario) -> list[Path]:
    """Trajectory-sampled arrival probabilities against the quadrature values."""
    params, header = _merge_params(
        scenario,
        {"n_molecules": 100_000, "release_slot": 1, "allowance": 0.01},
    )
    cfg = replace(scenario.mc, fidelity="trajectory")
    i = int(params["release_slot"])
    res = simulate_trajectory(scenario.channel, i, int(params["n_molecules"]), cfg)
    rows = []
    all_ok = True
    for off in range(cfg.max_offset + 1):
        analytic = arrival_prob(off, i, scenario.channel)
        q_hat = float(res.q_hat[off])
        se = float(res.stderr[off])
        tol = 3.0 * se + float(params["allowance"])
        ok = abs(q_hat - analytic) <= tol
        all_ok = all_ok and ok
        rows.append((off, analytic, q_hat, se, tol, ok))
    path = _write_csv(scenario.out_dir / "validate_q.csv", header,
                      ["offset", "q_analytic", "q_mc", "mc_stderr", "tolerance", "ok"], rows)
    print(f"validate-q: {'PASS' if all_ok else 'FAIL'} "
          f"({len(rows)} offsets, {params['n_molecules']} molecules, dt={res.dt:g}s)")
    return [path]


def run_validate_moments(scenario: Scenario) -> list[Path]:
    """Slot-level MC moments of the received count against the closed forms."""
    _, header = _merge_params(scenario, {})
    qtab = arrival_prob_table(scenario.schedule.k, scenario.channel)
    res = simulate_slot_level(scenario.schedule, scenario.noise, qtab, scenario.mc)
    rows = []
    all_ok = True
    for j in range(1, scenario.schedule.k + 1):
        m = hypothesis_moments(j, scenario.schedule, scenario.noise, qtab)
        for hyp, mean_a, var_a, mean_mc, var_mc, se_m, se_v, n in (
            (0, m.mu0, m.sigma2_0, res.mean_h0[j - 1], res.var_h0[j - 1],
             res.se_mean_h0[j - 1], res.se_var_h0[j - 1], res.n_trials - int(res.n1[j - 1])),
            (1, m.mu1, m.sigma2_1, res.mean_h1[j - 1], res.var_h1[j - 1],
             res.se_mean_h1[j - 1], res.se_var_h1[j - 1], int(res.n1[j - 1])),
        ):
            ok = abs(mean_mc - mean_a) <= 3.0 * se_m and abs(var_mc - var_a) <= 3.0 * se_v
            all_ok = all_ok and ok
            rows.append((j, hyp, n, mean_a, float(mean_mc), float(se_m),
                         var_a, float(var_mc), float(se_v), ok))
    path = _write_csv(scenario.out_dir / "validate_moments.csv", header,
                      ["slot", "hypothesis", "n", "mean_analytic", "mean_mc", "mean_se",
                       "var_analytic", "var_mc", "var_se", "ok"], rows)
    print(f"validate-moments: {'PASS' if all_ok else 'FAIL'} "
          f"({scenario.schedule.k} slots, {scenario.mc.n_trials} trials)")
    return [path]


def run_custom(scenario: Scenario) -> list[Path]:
    """Full pipeline on the configured scenario: per-slot table + JSON summary."""
    params, header = _merge_params(
        scenario, {"compute_capacity": True, "run_mc": True}
    )
    qtab = arrival_prob_table(scenario.schedule.k, scenario.channel)
    link = link_performance(scenario.schedule, scenario.noise, qtab)

    rows = []
    for j, slot in enumerate(link.slots, start=1):
        m = hypothesis_moments(j, scenario.schedule, scenario.noise, qtab)
        gp, kind = effective_threshold(m, scenario.schedule.beta)
        ok = gaussian_validity(j, scenario.schedule, qtab).ok
        rows.append((j, m.mu0, m.sigma2_0, m.mu1, m.sigma2_1, gp, kind,
                     slot.p_d, slot.p_fa, slot.p_e, slot.mi, ok))
    slots_path = _write_csv(
        scenario.out_dir / "custom_slots.csv", header,
        ["slot", "mu0", "sigma2_0", "mu1", "sigma2_1", "gamma_prime", "threshold_kind",
         "P_D", "P_FA", "P_e", "MI", "gaussian_ok"], rows)

    summary: dict[str, Any] = {
        "config": header,
        "analytic": {
            "P_D": link.p_d, "P_FA": link.p_fa, "P_e": link.p_e, "MI": link.mi,
        },
    }
    if params["compute_capacity"]:
        c, beta_star = capacity(scenario.schedule, scenario.noise, qtab)
        summary["capacity_bits"] = c
        summary["beta_star"] = beta_star
    if params["run_mc"]:
        mc = simulate_slot_level(scenario.schedule, scenario.noise, qtab, scenario.mc)
        summary["mc"] = {
            "n_trials": mc.n_trials,
            "P_D": mc.p_d, "P_FA": mc.p_fa, "P_e": mc.p_e,
            "se_P_D": mc.se_p_d, "se_P_FA": mc.se_p_fa, "se_P_e": mc.se_p_e,
        }
    summary_path = scenario.out_dir / "custom_summary.json"
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    with open(summary_path, "w", newline="\n") as f:
        json.dump(summary, f, sort_keys=True, indent=2)
        f.write("\n")
    return [slots_path, summary_path]


_RUNNERS: dict[str, Callable[[Scenario], list[Path]]] = {
    "fig1a": run_fig1a,
    "fig1b": run_fig1b,
    "fig1c": run_fig1c,
    "fig2a": run_fig2a,
    "fig2b": run_fig2b,
    "validate-q": run_validate_q,
    "validate-moments": run_validate_moments,
    "custom": run_custom,
}


def run_experiment(scenario: Scenario) -> list[Path]:
    try:
        runner = _RUNNERS[scenario.experiment]
    except KeyError:
        raise ConfigValidationError(
            f"unknown experiment {scenario.experiment!r}; choose from {EXPERIMENT_NAMES}"
        ) from None
    return runner(scenario)
