import numpy as np
import pytest

from molekom import ChannelParams, NoiseParams, TxSchedule, arrival_prob_table

# Baseline link used across the suite: 1 um distance, molecule coefficient
# 5e-10 m^2/s, slot duration 0.01 s, both machines at 1e-9 m^2/s.
BASE = dict(d=1e-6, D_p=5e-10, tau=0.01)


@pytest.fixture(scope="session")
def channel_mobile():
    return ChannelParams(D_tx=1e-9, D_rx=1e-9, **BASE)


@pytest.fixture(scope="session")
def channel_slow():
    return ChannelParams(D_tx=1e-11, D_rx=1e-11, **BASE)


@pytest.fixture(scope="session")
def qtab_mobile_k5(channel_mobile):
    return arrival_prob_table(5, channel_mobile)


@pytest.fixture(scope="session")
def qtab_mobile_k20(channel_mobile):
    return arrival_prob_table(20, channel_mobile)


@pytest.fixture(scope="session")
def sched_k5():
    return TxSchedule.uniform(30, 5, 0.5)


@pytest.fixture(scope="session")
def noise_default():
    return NoiseParams(mu_o=10.0, sigma2_o=10.0)


def make_qtable(rows):
    """Square zero-padded QTable from a ragged list of per-slot offset rows."""
    from molekom import QTable

    k = len(rows)
    arr = np.zeros((k, k))
    for i, row in enumerate(rows):
        arr[i, : len(row)] = row
    return QTable(arr)
