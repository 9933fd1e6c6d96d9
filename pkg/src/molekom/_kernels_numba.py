"""Numba-jitted Monte Carlo kernels (default backend).

Same contracts as :mod:`molekom._kernels_numpy`; trials run as per-frame
loops with early exits, drawing from the passed numpy Generator.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, nogil=True)
def _slot_level_loop(rng, n, Q, beta, qraw, qcum, mu0, mu1, thr, mu_o, sigma_o,
                     isi_binomial, record_n, rec_x, rec_R, rec_dec,
                     n1, det1, det0, err, s0, s1):
    k = Q.shape[0]
    x = np.zeros(k, dtype=np.int8)
    arrivals = np.zeros(k)
    for t in range(n):
        for j in range(k):
            x[j] = 1 if rng.random() < beta else 0
            arrivals[j] = 0.0
        for ri in range(k):
            if x[ri] == 0:
                continue
            nv = k - ri
            if isi_binomial:
                for o in range(nv):
                    p = qraw[ri, o]
                    c = 0
                    for _ in range(Q[ri]):
                        if rng.random() < p:
                            c += 1
                    arrivals[ri + o] += c
            else:
                for _ in range(Q[ri]):
                    u = rng.random()
                    for o in range(nv):
                        if u < qcum[ri, o]:
                            arrivals[ri + o] += 1.0
                            break
        for j in range(k):
            mr = mu1[j] if x[j] == 1 else mu0[j]
            R = arrivals[j] + mu_o + sigma_o * rng.standard_normal() + np.sqrt(mr) * rng.standard_normal()
            d = 1 if R > thr[j] else 0
            if x[j] == 1:
                n1[j] += 1
                if d == 1:
                    det1[j] += 1
                else:
                    err[j] += 1
                acc = R
                for m in range(4):
                    s1[m, j] += acc
                    acc *= R
            else:
                if d == 1:
                    det0[j] += 1
                    err[j] += 1
                acc = R
                for m in range(4):
                    s0[m, j] += acc
                    acc *= R
            if t < record_n:
                rec_x[t, j] = x[j]
                rec_R[t, j] = R
                rec_dec[t, j] = d


def slot_level_chunk(rng, n, Q, beta, qraw, qcum, mu0, mu1, thr, mu_o, sigma_o,
                     isi_binomial, record_n, rec_x, rec_R, rec_dec):
    k = Q.shape[0]
    n1 = np.zeros(k, dtype=np.int64)
    det1 = np.zeros(k, dtype=np.int64)
    det0 = np.zeros(k, dtype=np.int64)
    err = np.zeros(k, dtype=np.int64)
    s0 = np.zeros((4, k))
    s1 = np.zeros((4, k))
    _slot_level_loop(rng, n, Q, beta, qraw, qcum, mu0, mu1, thr, mu_o, sigma_o,
                     isi_binomial, record_n, rec_x, rec_R, rec_dec,
                     n1, det1, det0, err, s0, s1)
    return n1, det1, det0, err, s0, s1


@njit(cache=True, nogil=True)
def _trajectory_loop(rng, n, d, release_sigma, step_std, n_steps, dt, tau, n_bins, hist):
    for _ in range(n):
        gap = d + release_sigma * rng.standard_normal()
        if gap < 0.0:
            gap = -gap
        hit = 0
        for step in range(1, n_steps + 1):
            gap += step_std * rng.standard_normal()
            if gap <= 0.0:
                hit = step
                break
        if hit == 0:
            hist[n_bins] += 1
        else:
            off = int((hit - 0.5) * dt / tau)
            if off >= n_bins:
                off = n_bins - 1
            hist[off] += 1


def trajectory_chunk(rng, n, d, release_sigma, step_std, n_steps, dt, tau, n_bins):
    hist = np.zeros(n_bins + 1, dtype=np.int64)
    _trajectory_loop(rng, n, d, release_sigma, step_std, n_steps, dt, tau, n_bins, hist)
    return hist
