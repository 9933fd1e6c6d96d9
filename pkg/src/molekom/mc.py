"""Two-fidelity Monte Carlo validation of the analytic pipeline.

Slot-level fidelity samples the generative count model (Bernoulli symbols,
exact binomial/categorical arrivals, Gaussian MSI and counting error) and
tallies detection statistics against the closed forms. Trajectory fidelity
steps the molecule-receiver gap as Brownian motion and validates the arrival
probabilities themselves.

Trials are split into fixed-size chunks, each driven by an independent
spawned random stream; results are reduced in chunk order, so a given seed
produces identical output regardless of the worker-thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend as _backend
from .channel import ChannelParams, QTable
from .detector import effective_threshold
from .stats import NoiseParams, TxSchedule, hypothesis_moments

FIDELITIES = ("slot-level", "trajectory")
ISI_MODELS = ("categorical", "binomial")

# Fixed chunk sizes; part of the stream layout, never derived from thread count.
TRIAL_CHUNK = 1 << 14
MOLECULE_CHUNK = 1 << 13


@dataclass(frozen=True)
class McConfig:
    """Simulation settings.

    dt is the trajectory time step (defaults to tau/1000, must be <= tau/100).
    isi_model picks how stray molecules land: "categorical" assigns each
    molecule at most one landing slot (physical default); "binomial" draws
    independent binomials per offset, which shares the same marginals.
    max_offset bounds the trajectory horizon; later arrivals count as lost.
    """

    n_trials: int
    seed: int
    fidelity: str = "slot-level"
    dt: float | None = None
    isi_model: str = "categorical"
    max_offset: int = 3
    record_trials: int = 0
    backend: str | None = None

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.fidelity not in FIDELITIES:
            raise ValueError(f"fidelity must be one of {FIDELITIES}, got {self.fidelity!r}")
        if self.isi_model not in ISI_MODELS:
            raise ValueError(f"isi_model must be one of {ISI_MODELS}, got {self.isi_model!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.max_offset < 0:
            raise ValueError(f"max_offset must be >= 0, got {self.max_offset}")
        if self.record_trials < 0:
            raise ValueError("record_trials must be >= 0")


@dataclass(frozen=True)
class TrialResult:
    """One recorded frame: symbols, received counts, and decisions per slot.

    ``received`` is clamped at zero for reporting; detection always used the
    raw (possibly negative) value in ``received_raw``.
    """

    symbols: tuple[int, ...]
    received: tuple[float, ...]
    received_raw: tuple[float, ...]
    decisions: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(r < 0 for r in self.received):
            raise ValueError("clamped received counts must be >= 0")
        if any(d not in (0, 1) for d in self.decisions):
            raise ValueError("decisions must be 0/1")


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Deterministic, statistically independent stream for one chunk index."""
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream_id must be >= 0")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,)))


def _map_chunks(worker, specs):
    """Run chunk workers, preserving chunk order in the returned list."""
    threads = _backend.thread_count()
    if threads == 1 or len(specs) == 1:
        return [worker(s) for s in specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, specs))


@dataclass(frozen=True)
class SlotLevelResult:
    """Empirical detection statistics and conditional moments per slot."""

    n_trials: int
    k: int
    # per-slot conditional tallies
    n1: np.ndarray
    slot_p_d: np.ndarray
    slot_p_fa: np.ndarray
    slot_p_e: np.ndarray
    # slot-averaged metrics and their standard errors
    p_d: float
    p_fa: float
    p_e: float
    se_p_d: float
    se_p_fa: float
    se_p_e: float
    # conditional moments of the received count, per hypothesis
    mean_h0: np.ndarray
    var_h0: np.ndarray
    mean_h1: np.ndarray
    var_h1: np.ndarray
    se_mean_h0: np.ndarray
    se_var_h0: np.ndarray
    se_mean_h1: np.ndarray
    se_var_h1: np.ndarray
    # analytic quantities the simulated receiver used
    thresholds: np.ndarray
    threshold_kinds: tuple[str, ...]
    analytic_mu0: np.ndarray
    analytic_mu1: np.ndarray
    trials: tuple[TrialResult, ...] = field(default=())


def _moment_stats(sums: np.ndarray, n: np.ndarray):
    """Mean/variance and their standard errors from the first four power sums."""
    with np.errstate(invalid="ignore", divide="ignore"):
        n_safe = np.where(n > 1, n, np.nan)
        mean = sums[0] / n_safe
        m2 = sums[1] / n_safe - mean**2
        var = m2 * n_safe / (n_safe - 1)
        m4 = (
            sums[3] / n_safe
            - 4.0 * mean * sums[2] / n_safe
            + 6.0 * mean**2 * sums[1] / n_safe
            - 3.0 * mean**4
        )
        se_mean = np.sqrt(np.maximum(m2, 0.0) / n_safe)
        var_of_var = (m4 - (n_safe - 3.0) / (n_safe - 1.0) * m2**2) / n_safe
        se_var = np.sqrt(np.maximum(var_of_var, 0.0))
    return mean, var, se_mean, se_var


def simulate_slot_level(
    sched: TxSchedule, noise: NoiseParams, qtab: QTable, cfg: McConfig
) -> SlotLevelResult:
    """Sample the count model and tally detection statistics per slot.

    Binomial arrivals are sampled exactly (never via their Gaussian
    approximations), so the comparison against the closed forms also measures
    the approximation error. Detection statistics are conditioned on the
    realized symbol of the slot under test; earlier symbols stay Bernoulli,
    which is what the hypothesis moments average over.
    """
    if cfg.fidelity != "slot-level":
        raise ValueError(f"simulate_slot_level requires slot-level fidelity, got {cfg.fidelity!r}")
    if qtab.k < sched.k:
        raise ValueError(f"arrival table covers {qtab.k} slots but schedule has {sched.k}")
    k = sched.k

    moments = [hypothesis_moments(j, sched, noise, qtab) for j in range(1, k + 1)]
    resolved = [effective_threshold(m, sched.beta) for m in moments]
    thr = np.array([r[0] for r in resolved])
    kinds = tuple(r[1] for r in resolved)
    mu0 = np.array([m.mu0 for m in moments])
    mu1 = np.array([m.mu1 for m in moments])

    qraw = np.ascontiguousarray(qtab.as_array()[:k, :k])
    qcum = np.cumsum(qraw, axis=1)
    Q = np.asarray(sched.Q, dtype=np.int64)
    sigma_o = math.sqrt(noise.sigma2_o)
    kernels = _backend.get_kernels(cfg.backend)
    isi_binomial = cfg.isi_model == "binomial"

    specs = []
    start = 0
    c = 0
    while start < cfg.n_trials:
        n_c = min(TRIAL_CHUNK, cfg.n_trials - start)
        rec_n = min(cfg.record_trials, n_c) if c == 0 else 0
        specs.append((c, n_c, rec_n))
        start += n_c
        c += 1

    def worker(spec):
        c, n_c, rec_n = spec
        rng = rng_stream(cfg.seed, c)
        rec_x = np.zeros((rec_n, k), dtype=np.int8)
        rec_R = np.zeros((rec_n, k))
        rec_dec = np.zeros((rec_n, k), dtype=np.int8)
        out = kernels.slot_level_chunk(
            rng, n_c, Q, sched.beta, qraw, qcum, mu0, mu1, thr, noise.mu_o, sigma_o,
            isi_binomial, rec_n, rec_x, rec_R, rec_dec,
        )
        return out, (rec_x, rec_R, rec_dec)

    results = _map_chunks(worker, specs)

    n1 = np.zeros(k, dtype=np.int64)
    det1 = np.zeros(k, dtype=np.int64)
    det0 = np.zeros(k, dtype=np.int64)
    err = np.zeros(k, dtype=np.int64)
    s0 = np.zeros((4, k))
    s1 = np.zeros((4, k))
    for (c_n1, c_det1, c_det0, c_err, c_s0, c_s1), _ in results:
        n1 += c_n1
        det1 += c_det1
        det0 += c_det0
        err += c_err
        s0 += c_s0
        s1 += c_s1

    n = cfg.n_trials
    n0 = n - n1
    with np.errstate(invalid="ignore", divide="ignore"):
        slot_p_d = np.where(n1 > 0, det1 / np.where(n1 > 0, n1, 1), np.nan)
        slot_p_fa = np.where(n0 > 0, det0 / np.where(n0 > 0, n0, 1), np.nan)
    slot_p_e = err / n

    def _nanmean(a: np.ndarray) -> float:
        return float(np.nanmean(a)) if not np.all(np.isnan(a)) else math.nan

    p_d = _nanmean(slot_p_d)
    p_fa = _nanmean(slot_p_fa)
    p_e = float(err.sum() / (n * k))
    with np.errstate(invalid="ignore", divide="ignore"):
        se_p_d = float(np.sqrt(np.nansum(slot_p_d * (1 - slot_p_d) / n1)) / k)
        se_p_fa = float(np.sqrt(np.nansum(slot_p_fa * (1 - slot_p_fa) / n0)) / k)
    se_p_e = float(math.sqrt(max(p_e * (1 - p_e), 0.0) / (n * k)))

    mean_h0, var_h0, se_mean_h0, se_var_h0 = _moment_stats(s0, n0.astype(float))
    mean_h1, var_h1, se_mean_h1, se_var_h1 = _moment_stats(s1, n1.astype(float))

    trials = []
    rec_x, rec_R, rec_dec = results[0][1]
    for t in range(rec_x.shape[0]):
        raw = rec_R[t]
        trials.append(
            TrialResult(
                symbols=tuple(int(v) for v in rec_x[t]),
                received=tuple(float(v) for v in np.maximum(raw, 0.0)),
                received_raw=tuple(float(v) for v in raw),
                decisions=tuple(int(v) for v in rec_dec[t]),
            )
        )

    return SlotLevelResult(
        n_trials=n, k=k, n1=n1,
        slot_p_d=slot_p_d, slot_p_fa=slot_p_fa, slot_p_e=slot_p_e,
        p_d=p_d, p_fa=p_fa, p_e=p_e,
        se_p_d=se_p_d, se_p_fa=se_p_fa, se_p_e=se_p_e,
        mean_h0=mean_h0, var_h0=var_h0, mean_h1=mean_h1, var_h1=var_h1,
        se_mean_h0=se_mean_h0, se_var_h0=se_var_h0,
        se_mean_h1=se_mean_h1, se_var_h1=se_var_h1,
        thresholds=thr, threshold_kinds=kinds,
        analytic_mu0=mu0, analytic_mu1=mu1,
        trials=tuple(trials),
    )


@dataclass(frozen=True)
class TrajectoryResult:
    """Arrival histogram over slot offsets plus the lost fraction."""

    counts: np.ndarray
    lost: int
    n_molecules: int
    dt: float

    @property
    def q_hat(self) -> np.ndarray:
        """Empirical arrival probability per offset."""
        return self.counts / self.n_molecules

    @property
    def stderr(self) -> np.ndarray:
        """Binomial standard error per offset."""
        q = self.q_hat
        return np.sqrt(q * (1.0 - q) / self.n_molecules)

    @property
    def loss_fraction(self) -> float:
        return self.lost / self.n_molecules


def simulate_trajectory(
    params: ChannelParams, i: int, n_molecules: int, cfg: McConfig
) -> TrajectoryResult:
    """Estimate arrival probabilities by stepping Brownian trajectories.

    The release separation is drawn exactly from its Gaussian law (the
    machines diffuse freely before release; nothing can be absorbed), then
    the molecule-receiver gap advances by Normal(0, 2*D_p_eff*dt) per step
    and the molecule is absorbed at the first step where the gap crosses
    zero. Molecules not absorbed within (max_offset+1) slots are lost.
    Each molecule gets an independent trajectory, so the per-offset counts
    are binomial.
    """
    if cfg.fidelity != "trajectory":
        raise ValueError(f"simulate_trajectory requires trajectory fidelity, got {cfg.fidelity!r}")
    if i < 1:
        raise ValueError(f"release slot index must be >= 1, got {i}")
    if n_molecules < 1:
        raise ValueError("need at least one molecule")
    dt = cfg.dt if cfg.dt is not None else params.tau / 1000.0
    if dt > params.tau / 100.0:
        raise ValueError(f"trajectory dt must be <= tau/100 = {params.tau / 100.0:g}, got {dt:g}")

    n_bins = cfg.max_offset + 1
    n_steps = int(math.ceil(n_bins * params.tau / dt - 1e-9))
    release_sigma = math.sqrt(2.0 * params.D_tot * params.mobility_time(i))
    step_std = math.sqrt(2.0 * params.D_p_eff * dt)
    kernels = _backend.get_kernels(cfg.backend)

    specs = []
    start = 0
    c = 0
    while start < n_molecules:
        n_c = min(MOLECULE_CHUNK, n_molecules - start)
        specs.append((c, n_c))
        start += n_c
        c += 1

    def worker(spec):
        c, n_c = spec
        rng = rng_stream(cfg.seed, c)
        return kernels.trajectory_chunk(
            rng, n_c, params.d, release_sigma, step_std, n_steps, dt, params.tau, n_bins
        )

    hists = _map_chunks(worker, specs)
    total = np.zeros(n_bins + 1, dtype=np.int64)
    for h in hists:
        total += h
    return TrajectoryResult(
        counts=total[:n_bins], lost=int(total[n_bins]), n_molecules=n_molecules, dt=dt
    )
