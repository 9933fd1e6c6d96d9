"""Pure-numpy Monte Carlo kernels (fallback backend).

Same contracts as :mod:`molekom._kernels_numba`; draws are vectorized per
chunk, so the stream consumption differs from the numba backend.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

# Step block bounding the (molecules x steps) temporary in trajectory chunks.
_STEP_BLOCK = 1024


def slot_level_chunk(rng, n, Q, beta, qraw, qcum, mu0, mu1, thr, mu_o, sigma_o,
                     isi_binomial, record_n, rec_x, rec_R, rec_dec):
    """Simulate ``n`` transmission frames; return per-slot tallies and power sums.

    Returns (n1, det1, det0, err, s0, s1) where s0/s1 hold the first four
    power sums of the received count conditioned on the slot's own symbol.
    """
    k = Q.shape[0]
    x = rng.random((n, k)) < beta

    arrivals = np.zeros((n, k))
    if isi_binomial:
        # independent binomial per (release slot, offset)
        for ri in range(k):
            for o in range(k - ri):
                c = rng.binomial(int(Q[ri]), qraw[ri, o], size=n)
                arrivals[:, ri + o] += np.where(x[:, ri], c, 0)
    else:
        # one categorical landing slot per molecule, sampled as a multinomial
        for ri in range(k):
            nv = k - ri
            pv = np.empty(nv + 1)
            pv[:nv] = qraw[ri, :nv]
            pv[nv] = max(0.0, 1.0 - pv[:nv].sum())
            pv /= pv.sum()
            counts = rng.multinomial(int(Q[ri]), pv, size=n)
            arrivals[:, ri:] += counts[:, :nv] * x[:, ri : ri + 1]

    msi = mu_o + sigma_o * rng.standard_normal((n, k))
    mean_r = np.where(x, mu1, mu0)
    counting = np.sqrt(mean_r) * rng.standard_normal((n, k))
    R = arrivals + msi + counting
    dec = R > thr

    n1 = x.sum(axis=0).astype(np.int64)
    det1 = (dec & x).sum(axis=0).astype(np.int64)
    det0 = (dec & ~x).sum(axis=0).astype(np.int64)
    err = (dec != x).sum(axis=0).astype(np.int64)

    s0 = np.zeros((4, k))
    s1 = np.zeros((4, k))
    R0 = np.where(x, 0.0, R)
    R1 = np.where(x, R, 0.0)
    p0 = R0.copy()
    p1 = R1.copy()
    for m in range(4):
        s0[m] = p0.sum(axis=0)
        s1[m] = p1.sum(axis=0)
        if m < 3:
            p0 *= R0
            p1 *= R1

    if record_n > 0:
        r = min(record_n, n)
        rec_x[:r] = x[:r]
        rec_R[:r] = R[:r]
        rec_dec[:r] = dec[:r]
    return n1, det1, det0, err, s0, s1


def trajectory_chunk(rng, n, d, release_sigma, step_std, n_steps, dt, tau, n_bins):
    """Absorption histogram for ``n`` independent molecules.

    Returns int64 counts of length n_bins + 1; the last bin is molecules
    never absorbed within the horizon.
    """
    hist = np.zeros(n_bins + 1, dtype=np.int64)
    gap = np.abs(d + release_sigma * rng.standard_normal(n))
    hit_step = np.zeros(n, dtype=np.int64)  # 0 = not absorbed
    idx = np.arange(n)
    done = 0
    while done < n_steps and idx.size:
        b = min(_STEP_BLOCK, n_steps - done)
        paths = gap[:, None] + np.cumsum(step_std * rng.standard_normal((idx.size, b)), axis=1)
        crossed = paths <= 0.0
        any_hit = crossed.any(axis=1)
        first = crossed.argmax(axis=1)
        hit_step[idx[any_hit]] = done + first[any_hit] + 1
        keep = ~any_hit
        idx = idx[keep]
        gap = paths[keep, -1]
        done += b

    hist[n_bins] = np.count_nonzero(hit_step == 0)
    hits = hit_step[hit_step > 0]
    offs = ((hits - 0.5) * dt / tau).astype(np.int64)
    np.clip(offs, 0, n_bins - 1, out=offs)
    hist[:n_bins] += np.bincount(offs, minlength=n_bins)
    return hist
