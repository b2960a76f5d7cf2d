import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctbduel.cells import complete_table, enumerate_cells, make_table
from ctbduel.arms import ArmSet
from ctbduel.ctb import CTBPolicy, ScoreTable, init_scores, replay_scores, select_arms, update
from ctbduel.errors import ConfigurationError, DegenerateCandidateError, InvalidPairError


def three_cells():
    # best arms 0, 1, 2 (1-based: 1, 2, 3)
    return make_table([[0, 0, 0], [1, 0, 0], [1, 1, 1]], 3)


def table_sixway():
    rad = np.deg2rad([0, 100, 230])
    return enumerate_cells(ArmSet(np.column_stack([np.cos(rad), np.sin(rad)])))


class TestInitScores:
    def test_ctb1_zero(self):
        state = init_scores(table_sixway(), "ctb-1")
        np.testing.assert_array_equal(state.scores, np.zeros(6))

    def test_ctb3_from_prior(self):
        table = make_table([[0, 0, 0], [1, 1, 1]], 3, prior=[0.5, 0.5])
        state = init_scores(table, "ctb-3", q=0.6)
        np.testing.assert_allclose(state.scores, np.log(0.5) / np.log(1.5))
        assert state.scores[0] == pytest.approx(-1.70951, abs=1e-5)

    def test_ctb3_zero_mass(self):
        table = make_table([[0, 0, 0], [1, 1, 1]], 3, prior=[1.0, 0.0])
        state = init_scores(table, "ctb-3", q=0.8)
        assert state.scores[0] == 0.0 and state.scores[1] == -np.inf

    def test_ctb3_bad_q(self):
        with pytest.raises(ConfigurationError):
            init_scores(three_cells(), "ctb-3", q=0.5)
        with pytest.raises(ConfigurationError):
            init_scores(three_cells(), "ctb-3")


@pytest.mark.usefixtures("backend")
class TestSelect:
    def test_strict(self):
        s = ScoreTable([5, 3, 1])
        assert select_arms(s, three_cells()) == (0, 1)

    def test_tie_goes_to_lower_best_arm(self):
        table = make_table([[0, 0, 0], [0, 0, 1], [1, 0, 0]], 3)
        assert table.best.tolist() == [0, 0, 1]
        assert select_arms(ScoreTable([5, 5, 1]), table) == (0, 1)

    def test_argmax_first(self):
        table = make_table([[0, 0, 0], [1, 0, 0]], 3)
        assert select_arms(ScoreTable([2, 7]), table) == (1, 0)

    def test_infinite_cells_ignored(self):
        s = ScoreTable([-np.inf, 3, 1])
        assert select_arms(s, three_cells()) == (1, 2)

    def test_degenerate(self):
        table = make_table([[0, 0, 0], [0, 0, 1], [1, 1, 1]], 3)
        with pytest.raises(DegenerateCandidateError) as err:
            select_arms(ScoreTable([1, 2, -np.inf]), table)
        assert err.value.arm == 0

    def test_policy_degenerate_fallback(self):
        table = make_table([[0, 0, 0], [0, 0, 1], [1, 1, 1]], 3, prior=[0.5, 0.5, 0.0])
        policy = CTBPolicy(table, "ctb-3", q=0.7)
        first, second = policy.select(1)
        assert first == 0 and second == table.second[0]


@pytest.mark.usefixtures("backend")
class TestUpdate:
    def test_winner_side_incremented(self):
        table = complete_table(3)
        state = init_scores(table, "ctb-2-explicit")
        update(state, table, 0, 1, outcome=0)
        np.testing.assert_array_equal(state.inc, (table.bits[:, 0] == 0).astype(int))
        update(state, table, 2, 1, outcome=0)
        # arm 2 beat arm 1: cells with bit (1, 2) == 1 gain
        np.testing.assert_array_equal(state.inc, (table.bits[:, 0] == 0).astype(int) + (table.bits[:, 2] == 1))
        assert state.t == 2

    def test_minus_infinity_absorbing(self):
        table = three_cells()
        state = ScoreTable([-np.inf, 0, 0])
        for _ in range(5):
            update(state, table, 0, 1, 0)
        assert state.scores[0] == -np.inf

    def test_rejects_self_duel(self):
        with pytest.raises(InvalidPairError):
            update(ScoreTable([0, 0, 0]), three_cells(), 1, 1, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1)), max_size=60))
    def test_replay_equivalence(self, history):
        table = complete_table(4)
        init = np.linspace(-2, 1, len(table))
        state = ScoreTable(init)
        kept = [(a, b, y) for a, b, y in history if a != b]
        for a, b, y in kept:
            before = state.inc.copy()
            update(state, table, a, b, y)
            winner, loser = (a, b) if y == 0 else (b, a)
            assert (state.inc - before).sum() == table.winner_side(winner, loser).sum()
        np.testing.assert_array_equal(state.scores, replay_scores(init, table, kept))
        assert np.all((state.inc >= 0) & (state.inc <= len(kept)))


def test_policy_deterministic():
    table = table_sixway()
    outcomes = np.random.default_rng(5).integers(0, 2, 100)

    def run():
        pol = CTBPolicy(table, "ctb-1")
        seq = []
        for t, y in enumerate(outcomes, 1):
            a, b = pol.select(t)
            pol.update(a, b, int(y))
            seq.append((a, b))
        return seq

    assert run() == run()
