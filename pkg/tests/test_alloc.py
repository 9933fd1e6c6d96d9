import pytest

from molekom import (
    BudgetError,
    BudgetProblem,
    ChannelParams,
    NoiseParams,
    TxSchedule,
    arrival_prob_table,
    avg_error_prob,
    sweep_k_slot,
    sweep_two_slot,
)
from tests.conftest import make_qtable


def make_problem(d_value=1e-10, total=30, slots=2, mu_o=5.0, sigma2_o=5.0, beta=0.5):
    ch = ChannelParams(d=1e-6, D_p=5e-10, D_tx=d_value, D_rx=d_value, tau=0.01)
    return BudgetProblem(
        total=total, slots=slots, channel=ch, noise=NoiseParams(mu_o, sigma2_o), beta=beta
    )


class TestValidation:
    def test_budget_must_cover_slots(self):
        with pytest.raises(ValueError):
            make_problem(total=1, slots=2)

    def test_needs_two_slots(self):
        with pytest.raises(ValueError):
            make_problem(slots=1)

    def test_two_slot_sweep_needs_two_slots(self):
        with pytest.raises(ValueError):
            sweep_two_slot(make_problem(slots=3, total=30))


class TestTwoSlot:
    def test_covers_every_split_and_recomputes(self):
        problem = make_problem(total=20)
        sweep = sweep_two_slot(problem)
        assert [p[0] for p in sweep.points] == list(range(1, 20))
        qtab = arrival_prob_table(2, problem.channel)
        for q1, pe, _ in sweep.points[:5]:
            sched = TxSchedule.of((q1, 20 - q1), 0.5)
            assert pe == avg_error_prob(sched, problem.noise, qtab).p_e
        best = min(sweep.points, key=lambda p: (p[1], p[0]))
        assert (sweep.best_q1, sweep.best_p_e) == (best[0], best[1])

    def test_argmin_beats_every_candidate(self):
        sweep = sweep_two_slot(make_problem(total=30))
        assert all(sweep.best_p_e <= pe for _, pe, _ in sweep.points)

    def test_equal_split_not_optimal(self):
        sweep = sweep_two_slot(make_problem(d_value=1e-10, total=60))
        assert sweep.best_q1 != 30

    def test_gaussian_rule_flags_small_allocations(self):
        sweep = sweep_two_slot(make_problem(total=30))
        flags = {q1: ok for q1, _, ok in sweep.points}
        assert not flags[1]  # one molecule in slot 1 fails the rule
        assert flags[15]

    def test_budget_shifts_to_later_slot_with_mobility(self):
        # more mobile machines lose more first-slot arrivals, so the optimal
        # first-slot share shrinks
        argmins = [
            sweep_two_slot(make_problem(d_value=dv, total=60)).best_q1
            for dv in (1e-11, 1e-10, 1e-9)
        ]
        assert argmins[0] >= argmins[1] >= argmins[2]

    def test_symmetric_channel_gives_symmetric_curve(self):
        # identical per-slot arrival probabilities and no interference make
        # the error probability an exact function of the unordered split
        qtab = make_qtable([[0.6, 0.0], [0.6]])
        noise = NoiseParams(5.0, 5.0)
        for q1 in range(1, 20):
            a = avg_error_prob(TxSchedule.of((q1, 20 - q1), 0.5), noise, qtab).p_e
            b = avg_error_prob(TxSchedule.of((20 - q1, q1), 0.5), noise, qtab).p_e
            assert a == pytest.approx(b, rel=1e-12)


class TestKSlot:
    def test_two_slot_consistency(self):
        problem = make_problem(total=25)
        exhaustive = sweep_k_slot(problem, mode="exhaustive")
        sweep = sweep_two_slot(problem)
        assert exhaustive.allocation == (sweep.best_q1, 25 - sweep.best_q1)
        assert exhaustive.p_e == pytest.approx(sweep.best_p_e, rel=1e-14)

    def test_exhaustive_is_optimal_and_recomputable(self):
        problem = make_problem(total=12, slots=3)
        res = sweep_k_slot(problem, mode="exhaustive")
        assert sum(res.allocation) == 12
        qtab = arrival_prob_table(3, problem.channel)
        assert res.p_e == avg_error_prob(
            TxSchedule.of(res.allocation, 0.5), problem.noise, qtab
        ).p_e
        # every candidate on the simplex is no better
        from molekom.alloc import _compositions, _error_prob

        for alloc in _compositions(12, 3):
            assert res.p_e <= _error_prob(problem, alloc) + 1e-15

    def test_coordinate_matches_exhaustive_on_random_draws(self):
        import numpy as np

        rng = np.random.default_rng(40)
        hits = 0
        draws = 5
        for _ in range(draws):
            problem = make_problem(
                d_value=10 ** rng.uniform(-11, -9),
                total=int(rng.integers(9, 16)),
                slots=3,
                mu_o=float(rng.uniform(0, 8)),
                sigma2_o=float(rng.uniform(1, 10)),
            )
            exhaustive = sweep_k_slot(problem, mode="exhaustive")
            coord = sweep_k_slot(problem, mode="coordinate", seed=1)
            assert coord.p_e >= exhaustive.p_e - 1e-15
            if coord.allocation == exhaustive.allocation:
                hits += 1
        assert hits >= draws - 1

    def test_exhaustive_refuses_large_problems(self):
        with pytest.raises(ValueError):
            sweep_k_slot(
                BudgetProblem(
                    total=10, slots=5, channel=make_problem().channel, noise=NoiseParams(5, 5)
                ),
                mode="exhaustive",
            )
        with pytest.raises(BudgetError):
            sweep_k_slot(make_problem(total=3000, slots=4), mode="exhaustive")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            sweep_k_slot(make_problem(), mode="annealing")
