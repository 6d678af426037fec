import math

import numpy as np
import pytest

from mpisac import power
from mpisac.errors import Infeasible, InvalidScenario, OracleTooLarge, UnreachableTarget
from mpisac.power import P4Instance, grid_oracle, min_sensing_powers, solve_p4


def inst(x, a, b, P_T=1.0, P_sum=2.0, sigma2=1.0, gamma=1.0):
    return P4Instance(x=tuple(x), a=tuple(a), b=tuple(b),
                      P_T=P_T, P_sum=P_sum, sigma2=sigma2, gamma=gamma)


# Hand-solved: one sensing radar pinned at 0.25, comm amplitudes (1, 2)
# over the remaining 1.75 with a per-radar cap of 1. The stronger user
# hits the cap, the other takes the leftover 0.75, and the multiplier
# sits at 1 / (2 sqrt(0.75)).
HAND = inst((1, 0, 0), a=(0.0, 1.0, 2.0), b=(4.0, 0.0, 0.0))
HAND_P = (0.25, 0.75, 1.0)
HAND_OBJ = math.sqrt(0.75) + 2.0
HAND_LAM = 1.0 / (2.0 * math.sqrt(0.75))


class TestClosedFormCases:
    def test_proportional_split(self):
        # uncapped two-user split puts power proportional to a_i^2
        sol = solve_p4(inst((0, 0), a=(1.0, 2.0), b=(0, 0), P_T=5.0, P_sum=5.0))
        assert sol.p == pytest.approx((1.0, 4.0), abs=1e-9)
        assert sol.objective == pytest.approx(5.0, abs=1e-9)
        assert sol.lam == pytest.approx(0.5, abs=1e-9)

    def test_cap_binds_strong_user(self):
        sol = solve_p4(inst((0, 0), a=(1.0, 2.0), b=(0, 0), P_T=3.0, P_sum=5.0))
        assert sol.p == pytest.approx((2.0, 3.0), abs=1e-9)
        assert sol.objective == pytest.approx(math.sqrt(2) + 2 * math.sqrt(3),
                                              abs=1e-9)

    def test_sensing_pin_feeds_single_comm(self):
        sol = solve_p4(inst((1, 0), a=(0.0, 1.0), b=(1.0, 0.0),
                            P_T=10.0, P_sum=5.0))
        assert sol.p == pytest.approx((1.0, 4.0), abs=1e-9)
        assert sol.objective == pytest.approx(2.0, abs=1e-9)


class TestHandInstance:
    def test_solution(self):
        sol = solve_p4(HAND)
        assert sol.p == pytest.approx(HAND_P, abs=1e-9)
        assert sol.objective == pytest.approx(HAND_OBJ, abs=1e-9)
        assert sol.lam == pytest.approx(HAND_LAM, abs=1e-6)
        assert sol.min_powers == pytest.approx((0.25, 0.0, 0.0), abs=1e-15)

    def test_oracle_agrees(self):
        sol = solve_p4(HAND)
        ora = grid_oracle(HAND, step=1e-4)
        assert sol.objective == pytest.approx(ora.objective, rel=1e-6)

    def test_interior_stationarity(self):
        # interior comm power: a / (2 sqrt(p)) equals the multiplier
        sol = solve_p4(HAND)
        assert HAND.a[1] / (2.0 * math.sqrt(sol.p[1])) == \
            pytest.approx(sol.lam, rel=1e-6)
        # capped power: its marginal value still exceeds the multiplier
        assert HAND.a[2] / (2.0 * math.sqrt(sol.p[2])) >= sol.lam - 1e-9


class TestMinPowers:
    def test_values(self):
        got = min_sensing_powers(inst((1, 1, 0), a=(0, 0, 1), b=(2.0, 8.0, 0.0),
                                      sigma2=2.0, gamma=3.0))
        assert got == pytest.approx((3.0, 0.75, 0.0))

    def test_unit_normalization(self):
        got = min_sensing_powers(inst((1,), a=(0,), b=(6.0,),
                                      sigma2=2.0, gamma=3.0))
        assert got == (1.0,)

    def test_all_comm_is_zero(self):
        assert min_sensing_powers(inst((0, 0), a=(1, 1), b=(0, 0))) == (0.0, 0.0)

    def test_unreachable(self):
        with pytest.raises(UnreachableTarget, match="radar 1"):
            min_sensing_powers(inst((0, 1), a=(1, 0), b=(1.0, 0.0)))

    def test_bad_selection(self):
        with pytest.raises(InvalidScenario):
            min_sensing_powers(inst((1, 2), a=(0, 0), b=(1, 1)))
        with pytest.raises(InvalidScenario):
            min_sensing_powers(P4Instance(x=(1, 0), a=(1.0,), b=(1.0, 1.0),
                                          P_T=1, P_sum=1, sigma2=1, gamma=1))


class TestFeasibility:
    def test_per_radar_cap(self):
        bad = inst((1, 0), a=(0, 1), b=(0.5, 0), P_T=1.0, P_sum=10.0)
        with pytest.raises(Infeasible, match="cap"):
            solve_p4(bad)

    def test_budget(self):
        bad = inst((1, 1), a=(0, 0), b=(2.0, 2.0), P_T=1.0, P_sum=0.6)
        with pytest.raises(Infeasible, match="budget"):
            solve_p4(bad)

    def test_boundary_is_feasible(self):
        # pinned powers exactly at the cap and the budget must pass
        sol = solve_p4(inst((1, 1), a=(0, 0), b=(1.0, 1.0), P_T=1.0, P_sum=2.0))
        assert sol.p == pytest.approx((1.0, 1.0))
        assert sol.objective == 0.0

    def test_oracle_feasibility_matches(self):
        for bad in (inst((1, 0), a=(0, 1), b=(0.5, 0), P_T=1.0, P_sum=10.0),
                    inst((1, 1), a=(0, 0), b=(2.0, 2.0), P_T=1.0, P_sum=0.6)):
            with pytest.raises(Infeasible):
                solve_p4(bad)
            with pytest.raises(Infeasible):
                grid_oracle(bad, step=0.01)


def random_feasible_instance(rng):
    while True:
        K = int(rng.integers(2, 6))
        ncomm = int(rng.integers(0, min(3, K) + 1))
        comm = set(int(i) for i in rng.choice(K, size=ncomm, replace=False))
        x = tuple(0 if i in comm else 1 for i in range(K))
        a = tuple(float(rng.uniform(0.5, 2.0)) for _ in range(K))
        b = tuple(float(rng.uniform(0.5, 4.0)) for _ in range(K))
        trial = inst(x, a, b,
                     P_T=float(rng.uniform(0.5, 1.5)),
                     P_sum=float(rng.uniform(1.0, 3.0)))
        try:
            pmin = min_sensing_powers(trial)
            power._feasible_or_raise(trial, pmin)
        except Infeasible:
            continue
        return trial


def oracle_step(trial):
    # resolution scaled to the feasible box so small budgets stay accurate;
    # 3 free comm powers get a coarser grid to bound the cell count
    pmin = min_sensing_powers(trial)
    cap = min(trial.P_T, trial.P_sum - sum(pmin))
    denom = 600 if sum(1 for v in trial.x if not v) >= 3 else 2000
    return max(cap, 1e-6) / denom


class TestAgainstOracle:
    def test_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            trial = random_feasible_instance(rng)
            sol = solve_p4(trial)
            ora = grid_oracle(trial, step=oracle_step(trial))
            assert sol.objective >= ora.objective - 1e-9
            assert sol.objective == pytest.approx(ora.objective, rel=1e-3,
                                                  abs=1e-9)
            assert sum(sol.p) <= trial.P_sum + 1e-9
            assert all(p <= trial.P_T + 1e-9 for p in sol.p)
            assert all(p >= 0.0 for p in sol.p)
            for i, xi in enumerate(trial.x):
                if xi:
                    assert sol.p[i] == pytest.approx(sol.min_powers[i])
            slack = trial.P_sum - sum(sol.p)
            assert sol.lam * slack <= 1e-6

    def test_kkt_on_interior_powers(self):
        rng = np.random.default_rng(43)
        for _ in range(40):
            trial = random_feasible_instance(rng)
            sol = solve_p4(trial)
            for i, xi in enumerate(trial.x):
                if xi or sol.p[i] <= 0.0:
                    continue
                if sol.p[i] < trial.P_T * (1 - 1e-9):
                    resid = abs(trial.a[i] / (2.0 * math.sqrt(sol.p[i])) - sol.lam)
                    assert resid <= 1e-6 * max(1.0, sol.lam)
                else:
                    assert trial.a[i] / (2.0 * math.sqrt(trial.P_T)) >= \
                        sol.lam - 1e-9


class TestOracleShape:
    def test_no_comm(self):
        sol = grid_oracle(inst((1, 1), a=(0, 0), b=(2.0, 2.0)), step=0.01)
        assert sol.objective == 0.0
        assert sol.p == pytest.approx((0.5, 0.5))

    def test_single_comm_closed_form(self):
        sol = grid_oracle(inst((1, 0), a=(0, 1.5), b=(2.0, 0)), step=0.01)
        # all leftover budget, up to the cap
        assert sol.p[1] == pytest.approx(1.0)
        assert sol.objective == pytest.approx(1.5)

    def test_refinement_never_hurts(self):
        coarse = grid_oracle(HAND, step=0.01)
        fine = grid_oracle(HAND, step=0.005)
        assert fine.objective >= coarse.objective - 1e-12

    def test_too_many_comm(self):
        bad = inst((0, 0, 0, 0), a=(1, 1, 1, 1), b=(0, 0, 0, 0))
        with pytest.raises(OracleTooLarge):
            grid_oracle(bad, step=0.01)

    def test_cell_guard(self):
        wide = inst((0, 0, 0), a=(1, 1, 1), b=(0, 0, 0))
        with pytest.raises(OracleTooLarge):
            grid_oracle(wide, step=1e-9)

    def test_bad_step(self):
        with pytest.raises(InvalidScenario):
            grid_oracle(HAND, step=0.0)


class TestMonotonicity:
    def test_objective_grows_with_budget(self):
        objs = [solve_p4(inst((1, 0, 0), a=(0, 1, 2), b=(4, 0, 0), P_T=1.0,
                              P_sum=s)).objective
                for s in (0.5, 1.0, 1.5, 2.0, 3.0)]
        assert objs == sorted(objs)

    def test_objective_grows_with_amplitude(self):
        objs = [solve_p4(inst((1, 0, 0), a=(0, av, 2), b=(4, 0, 0))).objective
                for av in (0.5, 1.0, 1.5, 2.0)]
        assert objs == sorted(objs)

    def test_cap_saturation(self):
        # once every comm radar sits at the cap, more budget changes nothing
        lo = solve_p4(inst((0, 0), a=(1, 1), b=(0, 0), P_T=0.5, P_sum=1.0))
        hi = solve_p4(inst((0, 0), a=(1, 1), b=(0, 0), P_T=0.5, P_sum=5.0))
        assert lo.objective == pytest.approx(hi.objective, rel=1e-12)
        assert lo.p == pytest.approx((0.5, 0.5))
        assert lo.lam == 0.0

    def test_zero_amplitude_gets_nothing(self):
        sol = solve_p4(inst((0, 0), a=(0.0, 1.0), b=(0, 0), P_T=5.0, P_sum=5.0))
        assert sol.p[0] == 0.0
        assert sol.p[1] == pytest.approx(5.0)
