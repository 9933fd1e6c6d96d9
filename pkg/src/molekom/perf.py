"""Closed-form link performance: detection, error, mutual information, capacity.

Everything here is a deterministic function of the hypothesis moments and
the decision threshold; the Monte Carlo module cross-checks these numbers
from the generative model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .channel import QTable
from .detector import SlotThreshold, effective_threshold
from .stats import HypothesisMoments, NoiseParams, TxSchedule, hypothesis_moments

# Conditional probabilities are clamped away from {0, 1} before logs.
_PROB_FLOOR = 1e-15


def q_tail(x):
    """Standard normal tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).

    Accepts scalars or arrays; absolute error is at double-precision level.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SlotPerformance:
    """Per-slot detection/false-alarm/error probabilities and mutual information."""

    slot: int
    p_d: float
    p_fa: float
    p_e: float
    mi: float

    def __post_init__(self) -> None:
        for name in ("p_d", "p_fa", "p_e", "mi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"slot {self.slot}: {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class LinkPerformance:
    """Slot-averaged metrics over slots 1..k, plus optional capacity results."""

    k: int
    p_d: float
    p_fa: float
    p_e: float
    mi: float
    slots: tuple[SlotPerformance, ...]
    capacity: float | None = None
    beta_star: float | None = None


def slot_pd_pfa(moments: HypothesisMoments, thr) -> tuple[float, float]:
    """Detection and false-alarm probabilities of the threshold test.

    P_D = Q((gamma' - mu1)/sigma1), P_FA = Q((gamma' - mu0)/sigma0).
    ``thr`` may be a SlotThreshold or a bare threshold value (+/-inf encode
    the constant decisions).
    """
    gp = thr.gamma_prime if isinstance(thr, SlotThreshold) else float(thr)
    if gp == math.inf:
        return 0.0, 0.0
    if gp == -math.inf:
        return 1.0, 1.0
    p_d = q_tail((gp - moments.mu1) / math.sqrt(moments.sigma2_1))
    p_fa = q_tail((gp - moments.mu0) / math.sqrt(moments.sigma2_0))
    return p_d, p_fa


def mutual_information(p_d: float, p_fa: float, beta: float) -> float:
    """Mutual information (bits) of the binary channel induced by the test.

    The transition matrix is Pr(y=1|x=1) = p_d, Pr(y=1|x=0) = p_fa with
    input prior Pr(x=1) = beta; conditionals are clamped to
    [1e-15, 1 - 1e-15] so the 0*log(0) = 0 convention holds at the ROC
    endpoints.
    """
    for name, v in (("p_d", p_d), ("p_fa", p_fa)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0, 1]")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"prior beta must lie in (0, 1), got {beta}")
    cond = np.clip(
        np.array([[1.0 - p_fa, p_fa], [1.0 - p_d, p_d]]), _PROB_FLOOR, 1.0 - _PROB_FLOOR
    )
    px = np.array([1.0 - beta, beta])
    py = px @ cond
    mi = float(np.sum(px[:, None] * cond * np.log2(cond / py[None, :])))
    return max(0.0, mi)


def slot_performance(j: int, sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> SlotPerformance:
    """Full per-slot metrics with the threshold fallbacks applied.

    Degenerate slots collapse to a constant decision, so their error
    probability is the prior-only Bayes risk min(beta, 1-beta) and their
    mutual information is zero.
    """
    m = hypothesis_moments(j, sched, noise, qtab)
    gp, _ = effective_threshold(m, sched.beta)
    p_d, p_fa = slot_pd_pfa(m, gp)
    p_e = sched.beta * (1.0 - p_d) + (1.0 - sched.beta) * p_fa
    return SlotPerformance(slot=j, p_d=p_d, p_fa=p_fa, p_e=p_e, mi=mutual_information(p_d, p_fa, sched.beta))


def link_performance(sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> LinkPerformance:
    """Per-slot metrics for slots 1..k and their arithmetic means."""
    if qtab.k < sched.k:
        raise ValueError(f"arrival table covers {qtab.k} slots but schedule has {sched.k}")
    slots = tuple(slot_performance(j, sched, noise, qtab) for j in range(1, sched.k + 1))
    k = sched.k
    return LinkPerformance(
        k=k,
        p_d=sum(s.p_d for s in slots) / k,
        p_fa=sum(s.p_fa for s in slots) / k,
        p_e=sum(s.p_e for s in slots) / k,
        mi=sum(s.mi for s in slots) / k,
        slots=slots,
    )


def avg_error_prob(sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> LinkPerformance:
    """Slot-averaged error probability beta*(1-P_D[j]) + (1-beta)*P_FA[j]."""
    return link_performance(sched, noise, qtab)


def _avg_mi(sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> float:
    return link_performance(sched, noise, qtab).mi


def capacity(
    sched: TxSchedule,
    noise: NoiseParams,
    qtab: QTable,
    beta_grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Maximum over the prior of the slot-averaged mutual information.

    The prior enters the moments, the threshold, and the information measure,
    so the whole pipeline is re-evaluated per grid point. The coarse grid
    (default 0.01..0.98 step 0.01) is refined once around its maximizer at
    step 0.001; ties resolve to the smaller beta. Returns (C, beta_star).
    """
    if beta_grid is None:
        coarse = np.arange(1, 99) / 100.0
    else:
        coarse = np.asarray(sorted(beta_grid), dtype=float)
        if coarse.size == 0 or coarse.min() <= 0.0 or coarse.max() >= 1.0:
            raise ValueError("beta_grid must be a non-empty subset of (0, 1)")

    def mi_at(beta: float) -> float:
        return _avg_mi(replace(sched, beta=float(beta)), noise, qtab)

    coarse_vals = np.array([mi_at(b) for b in coarse])
    idx = int(np.argmax(coarse_vals))
    lo = coarse[idx - 1] if idx > 0 else max(coarse[idx] - 0.01, 1e-3)
    hi = coarse[idx + 1] if idx + 1 < coarse.size else min(coarse[idx] + 0.01, 1.0 - 1e-3)
    n_fine = max(2, int(round((hi - lo) / 0.001)) + 1)
    fine = np.linspace(lo, hi, n_fine)
    fine_vals = np.array([mi_at(b) for b in fine])

    betas = np.concatenate([coarse, fine])
    vals = np.concatenate([coarse_vals, fine_vals])
    order = np.lexsort((betas, -vals))  # best value first, smaller beta on ties
    best = order[0]
    return float(vals[best]), float(betas[best])


def roc_sweep(moments: HypothesisMoments, n_points: int) -> list[tuple[float, float]]:
    """Threshold-parametrized operating curve for one slot.

    Sweeps gamma_prime over [mu0 - 6*sigma0, mu1 + 6*sigma1] and returns
    (P_FA, P_D) pairs sorted by P_FA ascending; P_D is non-decreasing along
    the sweep because both coordinates are decreasing in the threshold.
    """
    if n_points < 2:
        raise ValueError(f"need at least 2 sweep points, got {n_points}")
    s0 = math.sqrt(moments.sigma2_0)
    s1 = math.sqrt(moments.sigma2_1)
    # descending threshold => ascending P_FA
    gps = np.linspace(moments.mu1 + 6.0 * s1, moments.mu0 - 6.0 * s0, n_points)
    p_d = q_tail((gps - moments.mu1) / s1)
    p_fa = q_tail((gps - moments.mu0) / s0)
    return list(zip(p_fa.tolist(), p_d.tolist()))
