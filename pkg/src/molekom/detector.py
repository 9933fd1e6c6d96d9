"""Optimal per-slot threshold detection for the received molecule count.

Under Gaussian hypotheses with unequal variances the log-likelihood ratio
test is quadratic in the count; completing the square and keeping the upper
root reduces it to the one-sided rule "decide 1 iff R > gamma_prime".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .stats import HypothesisMoments

# Relative gap below which sigma1^2 - sigma0^2 is treated as zero: the gap
# equals Q[j]*q0*(2-q0), so a vanishing gap means there is no usable signal.
EPS_VAR = 1e-9


class DegenerateHypotheses(ValueError):
    """H0 and H1 variances coincide: no signal, threshold undefined."""


class NegativeDiscriminant(ArithmeticError):
    """Completed-square threshold is negative: symbol 1 is never preferred."""


@dataclass(frozen=True)
class SlotThreshold:
    """Decision threshold for one slot.

    gamma_prime = sqrt(gamma) - alpha, where alpha recentres the quadratic
    test statistic and gamma collects the prior and variance-ratio terms.
    """

    alpha: float
    gamma: float
    gamma_prime: float
    slot: int

    def __post_init__(self) -> None:
        if math.isfinite(self.gamma_prime):
            if self.gamma < 0:
                raise ValueError("finite threshold requires gamma >= 0")
            if abs(self.gamma_prime - (math.sqrt(self.gamma) - self.alpha)) > 1e-6 * max(
                1.0, abs(self.gamma_prime)
            ):
                raise ValueError("gamma_prime must equal sqrt(gamma) - alpha")


def threshold(moments: HypothesisMoments, beta: float, eps_var: float = EPS_VAR) -> SlotThreshold:
    """Optimal decision threshold from the slot's hypothesis moments and prior.

    alpha = (mu1*s0 - mu0*s1) / (s1 - s0)
    gamma = 2*s1*s0/(s1 - s0) * ln((1-beta)/beta * sqrt(s1/s0))
            + alpha^2 + (mu1^2*s0 - mu0^2*s1) / (s1 - s0)

    Raises DegenerateHypotheses when s1 ~= s0 (relative gap below eps_var)
    and NegativeDiscriminant when gamma < 0.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"prior beta must lie in (0, 1), got {beta}")
    s0, s1 = moments.sigma2_0, moments.sigma2_1
    mu0, mu1 = moments.mu0, moments.mu1
    dv = s1 - s0
    if abs(dv) < eps_var * s0:
        raise DegenerateHypotheses(
            f"slot {moments.slot}: variance gap {dv:.3g} below guard ({eps_var:g} * {s0:.3g})"
        )
    alpha = (mu1 * s0 - mu0 * s1) / dv
    gamma = (
        (2.0 * s1 * s0 / dv) * math.log((1.0 - beta) / beta * math.sqrt(s1 / s0))
        + alpha * alpha
        + (mu1 * mu1 * s0 - mu0 * mu0 * s1) / dv
    )
    if gamma < 0.0:
        raise NegativeDiscriminant(
            f"slot {moments.slot}: gamma = {gamma:.6g} < 0 (prior beta={beta} dominates)"
        )
    return SlotThreshold(alpha=alpha, gamma=gamma, gamma_prime=math.sqrt(gamma) - alpha, slot=moments.slot)


def decide(R: float, thr: SlotThreshold) -> int:
    """1 iff the received count exceeds the threshold; ties resolve to 0."""
    return 1 if R > thr.gamma_prime else 0


def llrt_decide(R: float, moments: HypothesisMoments, beta: float) -> int:
    """Direct log-likelihood-ratio decision, kept as a diagnostic.

    Evaluates ln[p(R|H1)/p(R|H0)] against ln[(1-beta)/beta] without the
    completed-square reduction. Agrees with ``decide`` whenever
    R >= -sqrt(gamma) - alpha (physical counts sit on that branch); the
    excluded lower branch belongs to the quadratic test's other root.
    """
    s0, s1 = moments.sigma2_0, moments.sigma2_1
    lam = math.log(math.sqrt(s0 / s1)) + (
        (R - moments.mu0) ** 2 * s1 - (R - moments.mu1) ** 2 * s0
    ) / (2.0 * s0 * s1)
    return 1 if lam > math.log((1.0 - beta) / beta) else 0


def effective_threshold(moments: HypothesisMoments, beta: float) -> tuple[float, str]:
    """Threshold with the degenerate-case fallbacks folded in.

    Returns (value, kind): kind "optimal" with the finite gamma_prime,
    otherwise a constant decision encoded as an infinite threshold.
    Degenerate hypotheses (no signal) decide the prior-favored symbol,
    realizing the prior-only risk min(beta, 1-beta). A negative gamma means
    the quadratic test (R + alpha)^2 >= gamma holds for every count (the
    signal hypothesis has the larger variance, and the prior term drove
    gamma below zero), so the likelihood-ratio decision is always 1.
    """
    try:
        return threshold(moments, beta).gamma_prime, "optimal"
    except DegenerateHypotheses:
        return (-math.inf, "always-one") if beta > 0.5 else (math.inf, "always-zero")
    except NegativeDiscriminant:
        return -math.inf, "always-one"
