import numpy as np
import pytest

from ctbduel.baselines import RucbPolicy, RucbState, WsPolicy, WsState, rucb_step, rucb_upper, ws_record, ws_step
from ctbduel.errors import ConfigurationError


class TestRucb:
    def test_cold_start_optimistic(self, rng):
        u = rucb_upper(np.zeros((4, 4), dtype=int), 0.51, 1)
        assert np.all(u[~np.eye(4, dtype=bool)] == 1.0)
        firsts = {rucb_step(RucbState(4), 1, rng)[0] for _ in range(200)}
        assert firsts == {0, 1, 2, 3}

    def test_unplayed_arms_always_candidates(self):
        w = np.zeros((4, 4), dtype=int)
        w[0, 1] = w[1, 2] = 30
        u = rucb_upper(w, 0.51, 100)
        assert np.all(u[3] >= 0.5) and np.all(u[:, 3] == np.where(np.arange(4) == 3, 0.5, 1.0))

    def test_dominated_arm_leaves_candidates(self):
        w = np.zeros((3, 3), dtype=int)
        w[0, 1] = 10
        t = 20
        u = rucb_upper(w, 0.51, t)
        expected = 0 + np.sqrt(0.51 * np.log(t) / 10)
        assert u[1, 0] == pytest.approx(expected)
        assert u[1, 0] < 0.5
        assert not np.all(u[1] >= 0.5)
        assert u[0, 1] == pytest.approx(1 + expected)

    def test_small_t_keeps_it(self):
        w = np.zeros((3, 3), dtype=int)
        w[0, 1] = 10
        assert rucb_upper(w, 0.51, 1000)[1, 0] >= 0.5

    def test_candidates_nonempty_and_valid(self, rng):
        pol = RucbPolicy(5, rng)
        probs = np.array([0.9, 0.8, 0.7, 0.6, 0.55])
        for t in range(1, 400):
            a, b = pol.select(t)
            assert a != b and 0 <= a < 5 and 0 <= b < 5
            pol.update(a, b, 0 if rng.random() < 0.5 + (probs[a] - probs[b]) else 1)

    def test_reproducible(self):
        def run():
            pol = RucbPolicy(6, np.random.default_rng(3))
            out = []
            for t in range(1, 100):
                a, b = pol.select(t)
                pol.update(a, b, t % 3 == 0)
                out.append((a, b))
            return out

        assert run() == run()

    def test_alpha(self):
        with pytest.raises(ConfigurationError):
            RucbState(3, alpha=0.5)


class TestWs:
    def test_cold_start(self, rng):
        pairs = {ws_step(WsState(4), rng) for _ in range(300)}
        assert {a for a, _ in pairs} == {0, 1, 2, 3}
        assert all(a != b for a, b in pairs)

    def test_incumbent_vs_argmax(self, rng):
        state = WsState(4)
        state.scores[:] = [2, 5, 0, -1]
        state.incumbent = 2
        assert ws_step(state, rng) == (2, 1)
        state.incumbent = 1
        assert ws_step(state, rng) == (1, 0)

    def test_winner_stays_and_zero_sum(self, rng):
        pol = WsPolicy(5, rng)
        for t in range(1, 200):
            a, b = pol.select(t)
            y = int(rng.integers(2))
            pol.update(a, b, y)
            assert pol.state.incumbent == (a if y == 0 else b)
            assert pol.state.scores.sum() == 0

    def test_record(self):
        s = ws_record(WsState(3), 0, 2, 1)
        assert s.scores.tolist() == [-1, 0, 1] and s.incumbent == 2
