import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpisac import optimizer, power
from mpisac.channel import synthesize_channels
from mpisac.errors import Infeasible, InvalidScenario, TooLargeForEnumeration
from mpisac.optimizer import (
    HmoConfig,
    evaluate_selection,
    exhaustive_solve,
    hmo_solve,
    neighborhood_sample,
    surrogate_objective,
)
from mpisac.scenario import ErrorProfile, scenario_from_dict


@pytest.fixture()
def roomy_sc(tiny_sc):
    """tiny_sc with caps lifted so every one of the 4 selections is feasible."""
    return replace(tiny_sc, params=replace(tiny_sc.params, P_T=2.0, P_sum=4.0))


class TestEvaluateSelection:
    def test_field_consistency(self, default_sc, default_table):
        x = (1, 0, 1, 0, 1, 0)
        mu = 0.3
        sol = evaluate_selection(default_sc, x, mu, table=default_table)
        assert sol.x == x
        assert sol.mu == mu
        assert sol.objective == (1.0 - mu) * sol.accuracy + mu * sol.rate
        assert sol.trace == ()
        pr = default_sc.params
        assert sum(sol.p) <= pr.P_sum + 1e-9
        assert all(0.0 <= p <= pr.P_T + 1e-9 for p in sol.p)

    def test_matches_direct_objective(self, default_sc, default_table):
        x = (1, 0, 1, 0, 1, 0)
        mu = 0.3
        sol = evaluate_selection(default_sc, x, mu, table=default_table)
        beams = default_table.select(x)
        assert surrogate_objective(x, sol.p, default_sc, beams, mu) == sol.objective

    def test_channels_and_table_routes_agree(self, default_sc, default_channels,
                                             default_table):
        a = evaluate_selection(default_sc, (0, 1, 0, 0, 0, 1), 0.7,
                               channels=default_channels)
        b = evaluate_selection(default_sc, (0, 1, 0, 0, 0, 1), 0.7,
                               table=default_table)
        assert a == b

    def test_infeasible_propagates(self, default_sc, default_channels):
        starved = replace(default_sc,
                          params=replace(default_sc.params, P_sum=2e-6))
        with pytest.raises(Infeasible):
            evaluate_selection(starved, (1, 0, 0, 0, 0, 0), 0.5,
                               channels=default_channels)

    def test_bad_selection_rejected(self, default_sc, default_table):
        with pytest.raises(InvalidScenario):
            evaluate_selection(default_sc, (1, 0), 0.5, table=default_table)

    def test_bad_mu_rejected(self, default_sc, default_table):
        with pytest.raises(ValueError, match="mu"):
            evaluate_selection(default_sc, (0,) * 6, 1.0001, table=default_table)


class TestNeighborhoodSample:
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=8),
           st.integers(1, 4), st.integers(0, 2**31 - 1))
    def test_properties(self, xs, L, seed):
        x = tuple(xs)
        r1 = neighborhood_sample(x, L, np.random.default_rng(seed))
        r2 = neighborhood_sample(x, L, np.random.default_rng(seed))
        assert r1 == r2
        assert len(r1) == len(x)
        assert set(r1) <= {0, 1}
        dist = sum(1 for u, v in zip(r1, x) if u != v)
        assert 1 <= dist <= min(L, len(x))

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            neighborhood_sample((), 2, np.random.default_rng(0))


class TestHmo:
    def test_matches_exhaustive_when_space_is_tiny(self, roomy_sc):
        # 4 selections, all feasible; the search must always land on the top
        ch = synthesize_channels(roomy_sc)
        for mu in (0.0, 0.5, 1.0):
            ex = exhaustive_solve(roomy_sc, mu, channels=ch)
            for seed in range(5):
                hm = hmo_solve(roomy_sc, mu, HmoConfig(seed=seed), channels=ch)
                assert hm.objective == ex.objective
                assert hm.x == ex.x

    def test_never_beats_exhaustive(self, default_sc, default_channels):
        ex = exhaustive_solve(default_sc, 0.5, channels=default_channels)
        for seed in range(5):
            hm = hmo_solve(default_sc, 0.5, HmoConfig(seed=seed),
                           channels=default_channels)
            assert hm.objective <= ex.objective + 1e-12

    def test_trace_nondecreasing(self, default_sc, default_channels):
        for seed in range(20):
            sol = hmo_solve(default_sc, 0.5, HmoConfig(seed=seed),
                            channels=default_channels)
            assert len(sol.trace) >= 1
            assert sol.trace[-1] == sol.objective
            for earlier, later in zip(sol.trace, sol.trace[1:]):
                assert later >= earlier

    def test_deterministic(self, default_sc, default_channels):
        cfg = HmoConfig(seed=7)
        s1 = hmo_solve(default_sc, 0.5, cfg, channels=default_channels)
        s2 = hmo_solve(default_sc, 0.5, cfg, channels=default_channels)
        assert s1 == s2

    def test_finds_improvement_over_fallback_start(self, tiny_sc):
        # the single-sensor start is infeasible here, so the search begins
        # at all-comm and must still climb to the better selection
        ch = synthesize_channels(tiny_sc)
        sol = hmo_solve(tiny_sc, 0.0, HmoConfig(seed=0), channels=ch)
        assert sol.x == (0, 1)
        assert sol.trace[0] == 0.5
        assert sol.objective > 0.5

    def test_starved_budget_stays_all_comm(self, default_sc, default_channels):
        starved = replace(default_sc,
                          params=replace(default_sc.params, P_sum=2e-6))
        sol = hmo_solve(starved, 0.5, channels=default_channels)
        assert sol.x == (0,) * 6
        assert sol.accuracy == 0.5
        assert len(sol.trace) == 1

    def test_mu_argument_overrides_config(self, default_sc, default_channels):
        cfg = HmoConfig(mu=0.9, seed=3)
        explicit = hmo_solve(default_sc, 0.0, cfg, channels=default_channels)
        from_cfg = hmo_solve(default_sc, config=cfg, channels=default_channels)
        assert explicit.mu == 0.0
        assert explicit.objective == explicit.accuracy
        assert from_cfg.mu == 0.9

    def test_config_validation(self, default_sc):
        with pytest.raises(ValueError, match="mu"):
            hmo_solve(default_sc, 1.5)
        with pytest.raises(ValueError, match="mu"):
            hmo_solve(default_sc, config=HmoConfig(mu=-0.2))
        for bad in (HmoConfig(L=0), HmoConfig(max_iter=0), HmoConfig(max_regen=0)):
            with pytest.raises(ValueError, match="at least 1"):
                hmo_solve(default_sc, 0.5, bad)


class TestExhaustive:
    def test_enumerates_every_selection(self, default_sc, default_channels,
                                        monkeypatch):
        seen = []
        real = power.solve_p4

        def counting(inst):
            seen.append(inst.x)
            return real(inst)

        monkeypatch.setattr(power, "solve_p4", counting)
        exhaustive_solve(default_sc, 0.5, channels=default_channels)
        assert len(seen) == 64
        assert len(set(seen)) == 64

    def test_solution_matches_reevaluation(self, default_sc, default_channels):
        ex = exhaustive_solve(default_sc, 0.25, channels=default_channels)
        ev = evaluate_selection(default_sc, ex.x, 0.25,
                                channels=default_channels)
        assert ev.objective == ex.objective
        assert ev.p == ex.p
        assert ex.trace == (ex.objective,)

    def test_tie_takes_smallest_binary_value(self, tiny_sc):
        # identical error rates make the two singletons score the same
        # float; the pair is priced out by the budget, so the tie must
        # resolve to the lower binary value (radar 0 alone)
        tie = replace(tiny_sc,
                      params=replace(tiny_sc.params, P_T=2.0, P_sum=1.63),
                      errors=ErrorProfile(P=(0.1, 0.1), Q=(0.1, 0.1)))
        ch = synthesize_channels(tie)
        lone0 = evaluate_selection(tie, (1, 0), 0.0, channels=ch)
        lone1 = evaluate_selection(tie, (0, 1), 0.0, channels=ch)
        assert lone0.objective == lone1.objective == 0.9
        with pytest.raises(Infeasible):
            evaluate_selection(tie, (1, 1), 0.0, channels=ch)
        sol = exhaustive_solve(tie, 0.0, channels=ch)
        assert sol.x == (1, 0)
        assert sol.objective == 0.9

    def test_enumeration_guard(self):
        pos = [[1.5 + 1.4 * math.cos(2 * math.pi * i / 21),
                2.25 + 1.4 * math.sin(2 * math.pi * i / 21), 1.5]
               for i in range(21)]
        big = scenario_from_dict({
            "seed": 0,
            "params": {"K": 21, "M": 22, "P_T": 0.01, "P_sum": 0.05,
                       "sigma2": 1e-8, "gamma": 1000.0},
            "geometry": {
                "room_bounds": [[0.0, 0.0, 0.0], [3.0, 4.5, 3.0]],
                "dfr_positions": pos,
                "target_position": [1.5, 2.25, 1.5],
                "receiver_position": [0.33, 3.35, 1.5]},
            "errors": {"P": [0.1] * 21, "Q": [0.1] * 21},
        })
        with pytest.raises(TooLargeForEnumeration):
            exhaustive_solve(big, 0.5)

    def test_bad_mu_rejected(self, default_sc):
        with pytest.raises(ValueError, match="mu"):
            exhaustive_solve(default_sc, -0.1)
