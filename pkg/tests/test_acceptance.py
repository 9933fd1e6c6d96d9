"""Acceptance suite: one test per release criterion, stated tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion. Each test prints its verdict before asserting, so the report
is complete even when a criterion fails.
"""

import json
import math

import numpy as np
import pytest
from scipy.special import erfc

from molekom import (
    BudgetProblem,
    ChannelParams,
    HypothesisMoments,
    McConfig,
    NoiseParams,
    TxSchedule,
    arrival_prob,
    arrival_prob_table,
    avg_error_prob,
    capacity,
    hitting_time_pdf,
    hypothesis_moments,
    q_tail,
    roc_sweep,
    simulate_slot_level,
    simulate_trajectory,
    sweep_two_slot,
    threshold,
)
from molekom.cli import main as cli_main

BASE = dict(d=1e-6, D_p=5e-10, tau=0.01)


def channel(d_value):
    return ChannelParams(D_tx=d_value, D_rx=d_value, **BASE)


def report(num, name, ok):
    print(f"\nACCEPTANCE {num:>2} {name}: {'PASS' if ok else 'FAIL'}")
    return ok


def test_criterion_1_arrival_anchor_values():
    got = {
        (1e-9, 1): arrival_prob(0, 1, channel(1e-9)),
        (1e-9, 2): arrival_prob(0, 2, channel(1e-9)),
        (1e-11, 1): arrival_prob(0, 1, channel(1e-11)),
        (1e-11, 2): arrival_prob(0, 2, channel(1e-11)),
    }
    want = {(1e-9, 1): 0.4505, (1e-9, 2): 0.3480, (1e-11, 1): 0.7511, (1e-11, 2): 0.7338}
    errs = {k: abs(got[k] - want[k]) for k in want}
    ok = all(e <= 0.01 for e in errs.values())
    report(1, "same-slot arrival anchors (slot-end origin, tau=0.01s)", ok)
    assert ok, f"anchor mismatches: {errs}"


def test_criterion_2_quadrature_against_trapezoid_oracle():
    def oracle(offset, i, p, panels=1_000_000):
        # integrate in u = sqrt(t): the offset-0 integrand has an integrable
        # 1/sqrt(t) spike that a uniform grid in t cannot resolve
        u = np.linspace(math.sqrt(offset * p.tau), math.sqrt((offset + 1) * p.tau), panels + 1)
        if u[0] == 0.0:
            u = u[1:]
        g = 2.0 * u * hitting_time_pdf(u * u, i, p)
        extra = g[0] * u[0] / 2.0 if offset == 0 else 0.0
        return float(np.trapezoid(g, u) + extra)

    rng = np.random.default_rng(20240815)
    worst = 0.0
    for _ in range(50):
        p = ChannelParams(
            d=10 ** rng.uniform(-6.5, -5.5),
            D_p=10 ** rng.uniform(-10.5, -9.5),
            D_tx=10 ** rng.uniform(-12, -9),
            D_rx=10 ** rng.uniform(-12, -9),
            tau=10 ** rng.uniform(-2.5, -1.5),
        )
        offset = int(rng.integers(0, 4))
        i = int(rng.integers(1, 5))
        worst = max(worst, abs(arrival_prob(offset, i, p) - oracle(offset, i, p)))
    ok = worst <= 1e-6
    report(2, f"adaptive quadrature vs 1e6-panel trapezoid (worst {worst:.2e})", ok)
    assert ok


def test_criterion_3_trajectory_cross_validation():
    ch = channel(1e-9)
    analytic = np.array([arrival_prob(o, 1, ch) for o in range(4)])

    def run(dt_div, seed):
        cfg = McConfig(
            n_trials=1, seed=seed, fidelity="trajectory", dt=ch.tau / dt_div, max_offset=3
        )
        return simulate_trajectory(ch, 1, 100_000, cfg)

    coarse = run(1000, 424242)
    within = np.abs(coarse.q_hat - analytic) <= 3.0 * coarse.stderr + 0.01
    fine = run(4000, 424242)
    l1_coarse = float(np.abs(coarse.q_hat - analytic).sum())
    l1_fine = float(np.abs(fine.q_hat - analytic).sum())
    shrinks = l1_fine < l1_coarse
    ok = bool(within.all() and shrinks)
    report(
        3,
        f"trajectory vs quadrature (L1 {l1_coarse:.4f} -> {l1_fine:.4f} at dt/4)",
        ok,
    )
    assert within.all(), f"offsets outside tolerance: {np.where(~within)[0]}"
    assert shrinks, f"discrepancy did not shrink: {l1_coarse:.5f} -> {l1_fine:.5f}"


def test_criterion_4_moment_validation_at_1e7_trials():
    ch = channel(1e-9)
    qtab = arrival_prob_table(5, ch)
    rng = np.random.default_rng(77)
    failures = []
    for draw in range(2):
        Q = tuple(int(q) for q in rng.integers(5, 41, size=5))
        beta = float(rng.choice([0.3, 0.5, 0.7]))
        sched = TxSchedule.of(Q, beta)
        noise = NoiseParams(mu_o=float(rng.uniform(0, 8)), sigma2_o=float(rng.uniform(2, 12)))
        res = simulate_slot_level(sched, noise, qtab, McConfig(n_trials=10_000_000, seed=1000 + draw))
        for j in range(1, 6):
            m = hypothesis_moments(j, sched, noise, qtab)
            i = j - 1
            checks = [
                ("mean_h0", res.mean_h0[i], m.mu0, res.se_mean_h0[i]),
                ("var_h0", res.var_h0[i], m.sigma2_0, res.se_var_h0[i]),
                ("mean_h1", res.mean_h1[i], m.mu1, res.se_mean_h1[i]),
                ("var_h1", res.var_h1[i], m.sigma2_1, res.se_var_h1[i]),
            ]
            for name, mc_v, an_v, se in checks:
                if abs(mc_v - an_v) > 3.0 * se:
                    failures.append(f"draw{draw} slot{j} {name}: |{mc_v:.4f}-{an_v:.4f}| > 3*{se:.2g}")
    ok = not failures
    report(4, "slot-level MC moments vs closed forms (k=5, 1e7 trials, 3 SE)", ok)
    assert ok, failures


def test_criterion_5_threshold_optimality():
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(20):
        mu0 = rng.uniform(0, 20)
        mu1 = mu0 + rng.uniform(2, 60)
        s0 = rng.uniform(5, 50)
        s1 = s0 + rng.uniform(1, 60)
        beta = rng.uniform(0.2, 0.8)
        m = HypothesisMoments(mu0=mu0, sigma2_0=s0, mu1=mu1, sigma2_1=s1, slot=1)
        thr = threshold(m, beta)

        def risk(gp):
            p_d = q_tail((gp - m.mu1) / math.sqrt(m.sigma2_1))
            p_fa = q_tail((gp - m.mu0) / math.sqrt(m.sigma2_0))
            return beta * (1.0 - p_d) + (1.0 - beta) * p_fa

        grid = np.linspace(mu0 - 6 * math.sqrt(s0), mu1 + 6 * math.sqrt(s1), 10_000)
        worst = max(worst, risk(thr.gamma_prime) - float(np.min(risk(grid))))
    ok = worst <= 1e-4
    report(5, f"closed-form threshold vs brute-force Bayes risk (worst {worst:.2e})", ok)
    assert ok


def test_criterion_6_analytic_mc_agreement():
    # NOTE: expected to fail; see the analysis below and the repo docs. The
    # simulator draws exact binomials, and their shape error against the
    # Gaussian closed forms exceeds 3 binomial SE at 1e6 trials.
    k = 20
    sched = TxSchedule.uniform(30, k, 0.5)
    noise = NoiseParams(mu_o=0.0, sigma2_o=10.0)
    failures = []
    gaps = []
    for d_value in (1e-11, 1e-10, 1e-9):
        qtab = arrival_prob_table(k, channel(d_value))
        lp = avg_error_prob(sched, noise, qtab)
        res = simulate_slot_level(sched, noise, qtab, McConfig(n_trials=1_000_000, seed=606))
        for name, an, mc, se in (
            ("P_e", lp.p_e, res.p_e, res.se_p_e),
            ("P_D", lp.p_d, res.p_d, res.se_p_d),
            ("P_FA", lp.p_fa, res.p_fa, res.se_p_fa),
        ):
            gap = mc - an
            gaps.append(f"D={d_value:g} {name} {gap:+.1e} (3se {3*se:.1e})")
            if abs(gap) > 3.0 * se:
                failures.append(gaps[-1])
    ok = not failures
    report(6, "analytic vs MC detection metrics at 3 binomial SE / 1e6 trials", ok)
    assert ok, (
        "Gaussian closed forms differ from the exact-binomial simulator by more "
        "than 3 binomial SE at 1e6 trials. This gap is the approximation error "
        "the simulator is designed to expose (exact binomial sampling plus the "
        "symbol-mixture collapse in the per-slot Gaussian model); it is "
        "irreducible at this tolerance. Absolute agreement stays within 5e-3. "
        f"Violations: {failures}"
    )


def test_criterion_7_figure_trends():
    k = 20
    sched = TxSchedule.uniform(30, k, 0.5)
    msgs = []

    # error probability rises with MSI variance, for every mobility
    pe_by_d = {}
    for d_value in (1e-11, 1e-10, 1e-9):
        qtab = arrival_prob_table(k, channel(d_value))
        pes = [
            avg_error_prob(sched, NoiseParams(0.0, float(s2)), qtab).p_e for s2 in range(1, 21)
        ]
        if not all(a <= b + 1e-12 for a, b in zip(pes, pes[1:])):
            msgs.append(f"Pe not monotone in sigma2_o at D={d_value:g}")
        pe_by_d[d_value] = pes

    # error probability rises with mobility
    for idx in range(20):
        seq = [pe_by_d[d][idx] for d in (1e-11, 1e-10, 1e-9)]
        if not all(a <= b + 1e-12 for a, b in zip(seq, seq[1:])):
            msgs.append(f"Pe not monotone in mobility at sigma2_o={idx + 1}")

    # capacity falls with MSI variance and with slot count
    cap = {}
    for kk in (5, 10, 20):
        qtab = arrival_prob_table(kk, channel(1e-11))
        sched_c = TxSchedule.uniform(100, kk, 0.5)
        cap[kk] = [
            capacity(sched_c, NoiseParams(10.0, float(s2)), qtab)[0] for s2 in (1.0, 10.0, 20.0)
        ]
        if not all(a >= b - 1e-9 for a, b in zip(cap[kk], cap[kk][1:])):
            msgs.append(f"capacity not monotone in sigma2_o at k={kk}")
    for col in range(3):
        seq = [cap[kk][col] for kk in (5, 10, 20)]
        if not all(a >= b - 1e-9 for a, b in zip(seq, seq[1:])):
            msgs.append(f"capacity not monotone in k at sigma2 index {col}")

    # operating curve for 30 molecules dominates 20 molecules
    qtab = arrival_prob_table(k, channel(1e-9))
    noise = NoiseParams(0.0, 10.0)
    m20 = hypothesis_moments(1, TxSchedule.uniform(20, k, 0.5), noise, qtab)
    m30 = hypothesis_moments(1, TxSchedule.uniform(30, k, 0.5), noise, qtab)
    fa20, pd20 = map(np.array, zip(*roc_sweep(m20, 400)))
    fa30, pd30 = map(np.array, zip(*roc_sweep(m30, 400)))
    if not np.all(pd30 >= np.interp(fa30, fa20, pd20) - 1e-9):
        msgs.append("30-molecule operating curve does not dominate 20-molecule curve")

    ok = not msgs
    report(7, "monotone trends (Pe, capacity, operating curves)", ok)
    assert ok, msgs


def test_criterion_8_capacity_argmax_prior():
    qtab = arrival_prob_table(20, channel(1e-11))
    sched = TxSchedule.uniform(100, 20, 0.5)
    _, beta_star = capacity(sched, NoiseParams(10.0, 10.0), qtab)
    ok = abs(beta_star - 0.5) <= 0.05
    report(8, f"capacity-achieving prior beta*={beta_star:.3f} (0.5 +/- 0.05)", ok)
    assert ok


def test_criterion_9_budget_allocation_anchors():
    msgs = []

    # equal split is not the argmin in any of the fixed-MSI mobility scenarios
    for d_value in (1e-11, 1e-10, 1e-9):
        problem = BudgetProblem(
            total=60, slots=2, channel=channel(d_value), noise=NoiseParams(5.0, 5.0), beta=0.5
        )
        if sweep_two_slot(problem).best_q1 == 30:
            msgs.append(f"equal split optimal at D={d_value:g}")

    # first-slot argmin moves 25 -> 28 as MSI variance goes 1 -> 20
    argmins = {}
    for s2 in (1.0, 20.0):
        problem = BudgetProblem(
            total=60, slots=2, channel=channel(1e-10), noise=NoiseParams(5.0, float(s2)), beta=0.5
        )
        argmins[s2] = sweep_two_slot(problem).best_q1
    if abs(argmins[1.0] - 25) > 1:
        msgs.append(f"argmin at sigma2_o=1 is {argmins[1.0]}, want 25 +/- 1")
    if abs(argmins[20.0] - 28) > 1:
        msgs.append(f"argmin at sigma2_o=20 is {argmins[20.0]}, want 28 +/- 1")
    if not argmins[20.0] > argmins[1.0]:
        msgs.append("argmin does not increase with MSI variance")

    # higher mobility pushes budget to the second slot
    mobile_argmins = [
        sweep_two_slot(
            BudgetProblem(
                total=60, slots=2, channel=channel(dv), noise=NoiseParams(5.0, 5.0), beta=0.5
            )
        ).best_q1
        for dv in (1e-11, 1e-10, 1e-9)
    ]
    if not (mobile_argmins[0] >= mobile_argmins[1] >= mobile_argmins[2]):
        msgs.append(f"argmin not decreasing with mobility: {mobile_argmins}")

    ok = not msgs
    report(9, f"budget split anchors (argmins {argmins[1.0]} -> {argmins[20.0]})", ok)
    assert ok, msgs


def test_criterion_10_byte_identical_output_across_threads(tmp_path, monkeypatch):
    cfg = {
        "experiment": "fig1b",
        "seed": 9001,
        "k": 5,
        "mc": {"n_trials": 20_000},
        "params": {"sigma2_values": [5, 10], "D_values": [1e-10]},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    traj_cfg = {
        "experiment": "validate-q",
        "seed": 9002,
        "params": {"n_molecules": 20_000},
    }
    traj_path = tmp_path / "traj.json"
    traj_path.write_text(json.dumps(traj_cfg))

    out = tmp_path / "out"
    outputs = {}
    for threads in ("1", "8"):
        monkeypatch.setenv("MOLEKOM_THREADS", threads)
        assert cli_main(["run", str(cfg_path), "--out", str(out)]) == 0
        assert cli_main(["run", str(traj_path), "--out", str(out)]) == 0
        outputs[threads] = (
            (out / "fig1b.csv").read_bytes(),
            (out / "validate_q.csv").read_bytes(),
        )
    ok = outputs["1"] == outputs["8"]
    report(10, "byte-identical CSV at 1 and 8 worker threads", ok)
    assert ok


def test_static_limit_regression():
    # zero-mobility arrival probabilities collapse to the closed-form
    # erfc difference; cheap guard on the analytic branch the trajectory
    # validation relies on
    p = ChannelParams(d=1e-6, D_p=5e-10, D_tx=0.0, D_rx=0.0, tau=0.01)

    def cdf(T):
        return erfc(p.d / (2.0 * math.sqrt(p.D_p * T))) if T > 0 else 0.0

    for off in range(3):
        expected = cdf((off + 1) * p.tau) - cdf(off * p.tau)
        assert arrival_prob(off, 1, p) == pytest.approx(expected, abs=1e-9)
