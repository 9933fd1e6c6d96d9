"""Per-slot Gaussian hypothesis model for the received molecule count.

The count observed in slot j decomposes into the current-slot signal,
inter-symbol interference from earlier slots, multi-source interference
(MSI), and a counting error whose variance equals the expected count under
the realized hypothesis. This module turns a transmission schedule and an
arrival-probability table into the (mean, variance) pairs under H0/H1 that
the detector and the closed-form metrics consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .channel import QTable


@dataclass(frozen=True)
class TxSchedule:
    """Per-slot molecule counts Q[j], symbol-1 prior beta, and slot count k."""

    Q: tuple[int, ...]
    beta: float
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"slot count k must be >= 1, got {self.k}")
        if len(self.Q) != self.k:
            raise ValueError(f"len(Q)={len(self.Q)} does not match k={self.k}")
        if any(q < 0 for q in self.Q):
            raise ValueError("molecule counts must be >= 0")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"prior beta must lie in (0, 1), got {self.beta}")

    @classmethod
    def uniform(cls, q: int, k: int, beta: float) -> "TxSchedule":
        """Schedule releasing the same count in every slot."""
        return cls(Q=(q,) * k, beta=beta, k=k)

    @classmethod
    def of(cls, Q: Sequence[int], beta: float) -> "TxSchedule":
        return cls(Q=tuple(int(q) for q in Q), beta=beta, k=len(Q))


@dataclass(frozen=True)
class NoiseParams:
    """Multi-source interference, Gaussian with mean mu_o and variance sigma2_o."""

    mu_o: float
    sigma2_o: float

    def __post_init__(self) -> None:
        if self.mu_o < 0:
            raise ValueError(f"MSI mean must be >= 0, got {self.mu_o}")
        if self.sigma2_o < 0:
            raise ValueError(f"MSI variance must be >= 0, got {self.sigma2_o}")


@dataclass(frozen=True)
class HypothesisMoments:
    """Mean/variance of the received count in one slot under H0 and H1."""

    mu0: float
    sigma2_0: float
    mu1: float
    sigma2_1: float
    slot: int

    def __post_init__(self) -> None:
        if not self.sigma2_0 > 0:
            raise ValueError(f"slot {self.slot}: H0 variance must be > 0 (got {self.sigma2_0}); "
                             "add MSI noise or a nonzero MSI mean")
        if not self.sigma2_1 > 0:
            raise ValueError(f"slot {self.slot}: H1 variance must be > 0 (got {self.sigma2_1})")
        if self.mu1 < self.mu0 - 1e-9 * max(1.0, abs(self.mu0)):
            raise ValueError(f"slot {self.slot}: H1 mean below H0 mean")


def _isi_terms(j: int, sched: TxSchedule, qtab: QTable) -> tuple[float, float]:
    """Mean and variance contributed by slots 1..j-1.

    Each earlier slot j-i transmits with probability beta; its stray molecules
    reach slot j with probability q(offset=i, release-slot=j-i). Averaging the
    conditional binomial moments over the Bernoulli symbol gives a
    beta*Q*q*(1-q) term plus a beta*(1-beta)*(Q*q)^2 symbol-uncertainty term.
    """
    beta = sched.beta
    mean = 0.0
    var = 0.0
    for i in range(1, j):
        q_i = qtab.q(i, j - i)
        load = sched.Q[j - i - 1] * q_i
        mean += beta * load
        var += beta * load * (1.0 - q_i) + beta * (1.0 - beta) * load * load
    return mean, var


def _check_slot(j: int, sched: TxSchedule) -> None:
    if not 1 <= j <= sched.k:
        raise ValueError(f"slot index {j} outside 1..{sched.k}")


def moments_h0(j: int, sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> tuple[float, float]:
    """Mean and variance of the received count in slot j when symbol 0 was sent.

    mu0 = ISI mean + mu_o; the variance stacks ISI variance, MSI variance,
    and the counting-error variance, which equals mu0 itself.
    """
    _check_slot(j, sched)
    isi_mean, isi_var = _isi_terms(j, sched, qtab)
    mu0 = isi_mean + noise.mu_o
    sigma2_0 = isi_var + noise.sigma2_o + mu0
    return mu0, sigma2_0


def moments_h1(j: int, sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> tuple[float, float]:
    """Mean and variance of the received count in slot j when symbol 1 was sent.

    Adds the current-slot signal Q[j]*q0 (mean) and Q[j]*q0*(1-q0) (variance)
    on top of the H0 terms; the counting-error variance becomes mu1.
    """
    _check_slot(j, sched)
    isi_mean, isi_var = _isi_terms(j, sched, qtab)
    q0 = qtab.q(0, j)
    signal = sched.Q[j - 1] * q0
    mu1 = signal + isi_mean + noise.mu_o
    sigma2_1 = signal * (1.0 - q0) + isi_var + noise.sigma2_o + mu1
    return mu1, sigma2_1


def hypothesis_moments(j: int, sched: TxSchedule, noise: NoiseParams, qtab: QTable) -> HypothesisMoments:
    """Both hypotheses' moments for slot j, sharing one ISI computation."""
    _check_slot(j, sched)
    isi_mean, isi_var = _isi_terms(j, sched, qtab)
    q0 = qtab.q(0, j)
    signal = sched.Q[j - 1] * q0
    mu0 = isi_mean + noise.mu_o
    mu1 = signal + isi_mean + noise.mu_o
    return HypothesisMoments(
        mu0=mu0,
        sigma2_0=isi_var + noise.sigma2_o + mu0,
        mu1=mu1,
        sigma2_1=signal * (1.0 - q0) + isi_var + noise.sigma2_o + mu1,
        slot=j,
    )


class GaussianValidity(NamedTuple):
    """Rule-of-thumb check that the binomial signal is Gaussian enough."""

    ok: bool
    signal_product: float
    complement_product: float


def gaussian_validity(j: int, sched: TxSchedule, qtab: QTable) -> GaussianValidity:
    """True when Q[j]*q0 > 5 and Q[j]*(1-q0) > 5 for the slot's own arrival probability."""
    _check_slot(j, sched)
    q0 = qtab.q(0, j)
    a = sched.Q[j - 1] * q0
    b = sched.Q[j - 1] * (1.0 - q0)
    return GaussianValidity(ok=(a > 5.0 and b > 5.0), signal_product=a, complement_product=b)
