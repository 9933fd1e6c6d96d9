"""Performance analysis of a 1D diffusive molecular link with mobile endpoints.

Closed-form detection, error, and capacity metrics for a slotted
molecule-count channel between two Brownian nanomachines, each validated by
an independent Monte Carlo simulator (slot-level count sampling and full
trajectory stepping).
"""

from .alloc import BudgetError, BudgetProblem, KSlotResult, TwoSlotSweep, sweep_k_slot, sweep_two_slot
from .backend import active_backend, get_kernels, numba_available
from .channel import (
    ChannelParams,
    QTable,
    QuadratureError,
    arrival_prob,
    arrival_prob_table,
    hitting_time_pdf,
)
from .detector import (
    DegenerateHypotheses,
    NegativeDiscriminant,
    SlotThreshold,
    decide,
    effective_threshold,
    llrt_decide,
    threshold,
)
from .mc import (
    McConfig,
    SlotLevelResult,
    TrajectoryResult,
    TrialResult,
    rng_stream,
    simulate_slot_level,
    simulate_trajectory,
)
from .perf import (
    LinkPerformance,
    SlotPerformance,
    avg_error_prob,
    capacity,
    link_performance,
    mutual_information,
    q_tail,
    roc_sweep,
    slot_pd_pfa,
    slot_performance,
)
from .stats import (
    GaussianValidity,
    HypothesisMoments,
    NoiseParams,
    TxSchedule,
    gaussian_validity,
    hypothesis_moments,
    moments_h0,
    moments_h1,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "BudgetProblem",
    "ChannelParams",
    "DegenerateHypotheses",
    "GaussianValidity",
    "HypothesisMoments",
    "KSlotResult",
    "LinkPerformance",
    "McConfig",
    "NegativeDiscriminant",
    "NoiseParams",
    "QTable",
    "QuadratureError",
    "SlotLevelResult",
    "SlotPerformance",
    "SlotThreshold",
    "TrajectoryResult",
    "TrialResult",
    "TwoSlotSweep",
    "TxSchedule",
    "active_backend",
    "arrival_prob",
    "arrival_prob_table",
    "avg_error_prob",
    "capacity",
    "decide",
    "effective_threshold",
    "gaussian_validity",
    "get_kernels",
    "hitting_time_pdf",
    "hypothesis_moments",
    "link_performance",
    "llrt_decide",
    "moments_h0",
    "moments_h1",
    "mutual_information",
    "numba_available",
    "q_tail",
    "rng_stream",
    "roc_sweep",
    "simulate_slot_level",
    "simulate_trajectory",
    "slot_pd_pfa",
    "slot_performance",
    "sweep_k_slot",
    "sweep_two_slot",
    "threshold",
    "__version__",
]
