"""Molecule-budget allocation across slots under a fixed total.

Splitting a budget unevenly can beat the equal split because later slots
see lower arrival probabilities and accumulated interference; these sweeps
minimize the slot-averaged error probability over integer allocations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, arrival_prob_table
from .perf import avg_error_prob
from .stats import NoiseParams, TxSchedule, gaussian_validity

# Exhaustive enumeration refuses above this many candidate allocations.
MAX_EXHAUSTIVE_CANDIDATES = 10_000_000


class BudgetError(ValueError):
    """Exhaustive search would enumerate too many allocations."""


@dataclass(frozen=True)
class BudgetProblem:
    """Fixed molecule budget spread over ``slots`` transmission slots."""

    total: int
    slots: int
    channel: ChannelParams
    noise: NoiseParams
    beta: float = 0.5

    def __post_init__(self) -> None:
        if self.slots < 2:
            raise ValueError(f"allocation needs at least 2 slots, got {self.slots}")
        if self.total < self.slots:
            raise ValueError(
                f"budget {self.total} cannot give every one of {self.slots} slots a molecule"
            )
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"prior beta must lie in (0, 1), got {self.beta}")


def _error_prob(problem: BudgetProblem, allocation: tuple[int, ...]) -> float:
    qtab = arrival_prob_table(problem.slots, problem.channel)
    sched = TxSchedule.of(allocation, problem.beta)
    return avg_error_prob(sched, problem.noise, qtab).p_e


@dataclass(frozen=True)
class TwoSlotSweep:
    """Full first-slot sweep: (Q1, P_e, gaussian-rule-ok) plus the argmin."""

    points: tuple[tuple[int, float, bool], ...]
    best_q1: int
    best_p_e: float


def sweep_two_slot(problem: BudgetProblem) -> TwoSlotSweep:
    """Evaluate every split (Q1, M - Q1) for Q1 = 1..M-1.

    Ties resolve toward the smaller Q1. Slots failing the Gaussian validity
    rule are still evaluated; the flag marks points where the closed form is
    on thin ice.
    """
    if problem.slots != 2:
        raise ValueError(f"two-slot sweep needs slots=2, got {problem.slots}")
    qtab = arrival_prob_table(2, problem.channel)
    points = []
    best_q1 = -1
    best_pe = math.inf
    for q1 in range(1, problem.total):
        sched = TxSchedule.of((q1, problem.total - q1), problem.beta)
        pe = avg_error_prob(sched, problem.noise, qtab).p_e
        ok = all(gaussian_validity(j, sched, qtab).ok for j in (1, 2))
        points.append((q1, pe, ok))
        if pe < best_pe:
            best_pe = pe
            best_q1 = q1
    return TwoSlotSweep(points=tuple(points), best_q1=best_q1, best_p_e=best_pe)


@dataclass(frozen=True)
class KSlotResult:
    """Best-found allocation over the integer simplex."""

    allocation: tuple[int, ...]
    p_e: float
    mode: str
    n_evaluated: int


def _compositions(total: int, parts: int):
    """Integer vectors >= 1 summing to ``total``, in lexicographic order."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[p + 1] - bounds[p] for p in range(parts))


def sweep_k_slot(
    problem: BudgetProblem,
    mode: str = "exhaustive",
    restarts: int = 5,
    seed: int = 0,
) -> KSlotResult:
    """Minimize the averaged error probability over integer allocations.

    "exhaustive" enumerates the whole simplex (slots <= 4; provably optimal);
    "coordinate" greedily moves single molecules between slots, starting from
    the equal split plus ``restarts`` random allocations drawn from
    deterministic seeds.
    """
    if mode == "exhaustive":
        if problem.slots > 4:
            raise ValueError("exhaustive mode supports at most 4 slots; use coordinate mode")
        n_cand = math.comb(problem.total - 1, problem.slots - 1)
        if n_cand > MAX_EXHAUSTIVE_CANDIDATES:
            raise BudgetError(f"{n_cand} candidate allocations exceed the exhaustive budget")
        best_alloc = None
        best_pe = math.inf
        for alloc in _compositions(problem.total, problem.slots):
            pe = _error_prob(problem, alloc)
            if pe < best_pe:
                best_pe = pe
                best_alloc = alloc
        return KSlotResult(allocation=best_alloc, p_e=best_pe, mode=mode, n_evaluated=n_cand)

    if mode != "coordinate":
        raise ValueError(f"mode must be 'exhaustive' or 'coordinate', got {mode!r}")

    k = problem.slots
    evaluated = 0

    def descend(start: tuple[int, ...]) -> tuple[tuple[int, ...], float]:
        nonlocal evaluated
        current = start
        current_pe = _error_prob(problem, current)
        evaluated += 1
        improved = True
        while improved:
            improved = False
            for src in range(k):
                for dst in range(k):
                    if src == dst or current[src] <= 1:
                        continue
                    cand = list(current)
                    cand[src] -= 1
                    cand[dst] += 1
                    pe = _error_prob(problem, tuple(cand))
                    evaluated += 1
                    if pe < current_pe - 1e-15:
                        current = tuple(cand)
                        current_pe = pe
                        improved = True
        return current, current_pe

    base = problem.total // k
    rem = problem.total - base * k
    starts = [tuple(base + (1 if j < rem else 0) for j in range(k))]
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(r,)))
        cuts = np.sort(rng.choice(np.arange(1, problem.total), size=k - 1, replace=False))
        bounds = np.concatenate([[0], cuts, [problem.total]])
        starts.append(tuple(int(bounds[p + 1] - bounds[p]) for p in range(k)))

    best_alloc = None
    best_pe = math.inf
    for s in starts:
        alloc, pe = descend(s)
        if pe < best_pe or (pe == best_pe and (best_alloc is None or alloc < best_alloc)):
            best_alloc = alloc
            best_pe = pe
    return KSlotResult(allocation=best_alloc, p_e=best_pe, mode=mode, n_evaluated=evaluated)
