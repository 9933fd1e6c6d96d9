"""Arrival statistics of a 1D diffusive link between mobile nanomachines.

A point transmitter releases molecules into a semi-infinite one-dimensional
fluid medium and a point receiver absorbs any molecule that reaches it.
Transmitter, receiver, and molecules all perform independent Brownian motion.
Time is slotted with duration ``tau``; the quantity everything downstream
consumes is ``q(offset, i)``, the probability that a molecule released in
slot ``i`` is absorbed ``offset`` slots after its release slot.

All quantities are SI (meters, seconds, m^2/s). Unit scaling from the CLI
config layer happens in :mod:`molekom.config`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

# Adaptive Gauss-Kronrod tolerances for the per-slot arrival integrals.
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
_QUAD_LIMIT = 200

INDEX_ORIGINS = ("slot-end", "slot-start")


class QuadratureError(ArithmeticError):
    """The adaptive integrator could not reach tolerance within its budget."""


@dataclass(frozen=True)
class ChannelParams:
    """Physical constants of the link.

    d: initial transmitter-receiver distance (m)
    D_p: molecule diffusion coefficient (m^2/s)
    D_tx, D_rx: transmitter / receiver nanomachine diffusion coefficients (m^2/s)
    tau: slot duration (s)
    index_origin: when the machine-mobility spread at release is evaluated.
        "slot-end" accumulates machine displacement over ``i*tau`` (the
        convention under which the bundled reference scenarios are
        calibrated); "slot-start" uses ``(i-1)*tau``.
    """

    d: float
    D_p: float
    D_tx: float
    D_rx: float
    tau: float
    index_origin: str = "slot-end"

    def __post_init__(self) -> None:
        if not self.d > 0:
            raise ValueError(f"distance d must be > 0, got {self.d}")
        if not self.tau > 0:
            raise ValueError(f"slot duration tau must be > 0, got {self.tau}")
        if not self.D_p > 0:
            raise ValueError(f"molecule diffusion coefficient D_p must be > 0, got {self.D_p}")
        if self.D_tx < 0 or self.D_rx < 0:
            raise ValueError("nanomachine diffusion coefficients must be >= 0")
        if self.index_origin not in INDEX_ORIGINS:
            raise ValueError(f"index_origin must be one of {INDEX_ORIGINS}")

    @property
    def D_tot(self) -> float:
        """Combined machine mobility: D_tx + D_rx."""
        return self.D_tx + self.D_rx

    @property
    def D_p_eff(self) -> float:
        """Effective molecule-receiver diffusion coefficient: D_rx + D_p."""
        return self.D_rx + self.D_p

    def mobility_time(self, i: int) -> float:
        """Time over which machine displacement has accumulated at release in slot ``i``."""
        if self.index_origin == "slot-end":
            return i * self.tau
        return (i - 1) * self.tau


def hitting_time_pdf(t, i: int, p: ChannelParams):
    """First-hitting-time density f(t; i) of a molecule released in slot ``i``.

    By release time the machines have diffused for ``t_m = mobility_time(i)``,
    so the molecule starts at a Gaussian separation N(d, 2*D_tot*t_m) from
    the receiver; afterwards the molecule-receiver gap diffuses with
    ``D_p_eff``. Marginalizing the classical one-boundary first-passage
    density over that random separation gives, with a = t_m*D_tot and
    D = D_p_eff:

        f(t) = sqrt(a*D) * exp(-d^2/(4a)) / (pi*sqrt(t)*(a + t*D))
             + d / sqrt(4*pi*D*(t + a/D)^3) * exp(-d^2 / (4*D*(t + a/D)))
               * erf(d / (2*sqrt(a*(a + t*D)/(D*t))))

    The degenerate static case a = 0 reduces to the classical
    d / sqrt(4*pi*D*t^3) * exp(-d^2/(4*D*t)).

    ``t`` may be a scalar or an array (seconds since release); returns the
    density in 1/s with matching shape.
    """
    if i < 1:
        raise ValueError(f"release slot index must be >= 1, got {i}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise ValueError("hitting time density is defined for t > 0 only")

    D = p.D_p_eff
    a = p.mobility_time(i) * p.D_tot
    if a == 0.0:
        out = p.d / np.sqrt(4.0 * np.pi * D * t_arr**3) * np.exp(-p.d**2 / (4.0 * D * t_arr))
    else:
        shifted = t_arr + a / D
        spread = np.sqrt(a * D) * np.exp(-p.d**2 / (4.0 * a)) / (
            np.pi * np.sqrt(t_arr) * (a + t_arr * D)
        )
        drift = (
            p.d
            / np.sqrt(4.0 * np.pi * D * shifted**3)
            * np.exp(-p.d**2 / (4.0 * D * shifted))
            * erf(p.d / (2.0 * np.sqrt(a * (a + t_arr * D) / (D * t_arr))))
        )
        out = spread + drift
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def arrival_prob(offset: int, i: int, p: ChannelParams) -> float:
    """Probability that a molecule released in slot ``i`` arrives ``offset`` slots later.

    Integrates ``hitting_time_pdf`` over [offset*tau, (offset+1)*tau] with the
    adaptive quadrature tolerances above. Raises :class:`QuadratureError` if
    the integrator reports non-convergence.
    """
    if offset < 0:
        raise ValueError(f"slot offset must be >= 0, got {offset}")
    if i < 1:
        raise ValueError(f"release slot index must be >= 1, got {i}")

    result = quad(
        lambda t: hitting_time_pdf(t, i, p),
        offset * p.tau,
        (offset + 1) * p.tau,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=_QUAD_LIMIT,
        full_output=1,
    )
    if len(result) > 3:
        # quad appends an explanation string when it could not converge
        raise QuadratureError(
            f"arrival integral did not converge for offset={offset}, i={i}: {result[3]}"
        )
    value = result[0]
    return float(min(max(value, 0.0), 1.0))


class QTable:
    """Immutable arrival-probability table for release slots 1..k.

    ``q(offset, i)`` is valid for 1 <= i <= k and 0 <= offset <= k - i
    (arrivals beyond slot k are outside the transmission window). Built once
    per (k, params) and shared read-only by every downstream consumer.
    """

    __slots__ = ("k", "_values")

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("QTable expects a square (k, k) array")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "k", values.shape[0])
        object.__setattr__(self, "_values", values)

    def __setattr__(self, name, value):
        raise AttributeError("QTable is immutable")

    def q(self, offset: int, i: int) -> float:
        if not 1 <= i <= self.k:
            raise IndexError(f"release slot {i} outside 1..{self.k}")
        if not 0 <= offset <= self.k - i:
            raise IndexError(f"offset {offset} outside 0..{self.k - i} for slot {i}")
        return float(self._values[i - 1, offset])

    def row(self, i: int) -> np.ndarray:
        """Arrival probabilities for release slot ``i`` over offsets 0..k-i."""
        if not 1 <= i <= self.k:
            raise IndexError(f"release slot {i} outside 1..{self.k}")
        return self._values[i - 1, : self.k - i + 1]

    def as_array(self) -> np.ndarray:
        """Dense read-only (k, k) view; entries past offset k-i are zero."""
        return self._values

    def __repr__(self) -> str:
        return f"QTable(k={self.k})"


@lru_cache(maxsize=32)
def arrival_prob_table(k: int, p: ChannelParams) -> QTable:
    """All arrival probabilities needed for a k-slot transmission, memoized."""
    if k < 1:
        raise ValueError(f"slot count must be >= 1, got {k}")
    values = np.zeros((k, k))
    for i in range(1, k + 1):
        for offset in range(0, k - i + 1):
            values[i - 1, offset] = arrival_prob(offset, i, p)
    return QTable(values)
