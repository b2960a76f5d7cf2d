import itertools

import numpy as np
import pytest

from ctbduel.cells import cell_bits, complete_table, membership_sets, n_pairs
from ctbduel.ctb import ScoreTable, select_arms, update
from ctbduel.errors import ConfigurationError, InvalidPairError
from ctbduel.fast import (
    FastCTBPolicy,
    PairState,
    best_cell_value,
    best_cell_values,
    decomposed_init,
    load_prior_matrix,
    record_duel,
    reconstruct_score,
    select_arms_fast,
)


def brute_force_f(wins, priors, k):
    """max over e with e[k, j] = 1 and e[i, j] + e[j, i] = 1 of sum e * (q + r)."""
    n = wins.shape[0]
    a = wins + priors
    free = [(i, j) for i, j in itertools.combinations(range(n), 2) if k not in (i, j)]
    forced = sum(a[k, j] for j in range(n) if j != k)
    best = -np.inf
    for choice in itertools.product((0, 1), repeat=len(free)):
        val = forced
        for (i, j), c in zip(free, choice):
            val += a[i, j] if c == 0 else a[j, i]
        best = max(best, val)
    return best


class TestRecordDuel:
    def test_counts(self):
        s = PairState(3)
        record_duel(s, 0, 1, 0)
        assert s.wins[0, 1] == 1
        record_duel(s, 0, 1, 1)
        assert s.wins[1, 0] == 1
        assert s.t == 2 and s.wins.sum() == 2

    def test_conservation(self, rng):
        s = PairState(5)
        plays = np.zeros((5, 5), dtype=int)
        for _ in range(300):
            a, b = rng.choice(5, 2, replace=False)
            record_duel(s, a, b, int(rng.integers(2)))
            plays[a, b] += 1
            plays[b, a] += 1
        assert s.wins.sum() == 300
        np.testing.assert_array_equal(s.wins + s.wins.T, plays)

    def test_self_duel(self):
        with pytest.raises(InvalidPairError):
            record_duel(PairState(3), 2, 2, 0)

    def test_prior_shape(self):
        with pytest.raises(ConfigurationError):
            PairState(3, np.zeros((2, 2)))


@pytest.mark.usefixtures("backend")
class TestBestCellValue:
    def test_worked_example(self):
        s = PairState(3)
        s.wins[:] = [[0, 2, 0], [1, 0, 3], [1, 0, 0]]
        np.testing.assert_array_equal(best_cell_values(s), [5, 5, 3])
        for k in range(3):
            assert best_cell_value(s, k) == brute_force_f(s.wins, s.priors, k)
        assert select_arms_fast(s) == (0, 1)

    def test_zero_state(self):
        s = PairState(6)
        np.testing.assert_array_equal(best_cell_values(s), np.zeros(6))
        assert select_arms_fast(s) == (0, 1)

    def test_select_examples(self, monkeypatch):
        from ctbduel import fast

        monkeypatch.setattr(fast, "best_cell_values", lambda s: np.array([1.0, 9.0, 4.0]))
        assert select_arms_fast(PairState(3)) == (1, 2)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_brute_force(self, n, rng):
        for _ in range(30):
            s = PairState(n, rng.integers(-8, 9, (n, n)) / 4)
            s.wins[:] = rng.integers(0, 6, (n, n))
            np.fill_diagonal(s.wins, 0)
            f = best_cell_values(s)
            assert [brute_force_f(s.wins, s.priors, k) for k in range(n)] == f.tolist()

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_is_max_over_cells_with_that_best_arm(self, n, rng):
        table = complete_table(n)
        js = membership_sets(table)
        s = PairState(n, rng.integers(0, 5, (n, n)) / 2)
        s.wins[:] = rng.integers(0, 5, (n, n))
        np.fill_diagonal(s.wins, 0)
        m = np.array([reconstruct_score(s, b, decomposed_init(b, s.priors)) for b in table.bits])
        f = best_cell_values(s)
        for k in range(n):
            assert f[k] == m[table.best == k].max()


class TestReconstruct:
    def test_zero(self):
        assert reconstruct_score(PairState(4), np.zeros(6, dtype=np.uint8)) == 0

    def test_first_cell(self, rng):
        s = PairState(4)
        s.wins[:] = rng.integers(0, 9, (4, 4))
        np.fill_diagonal(s.wins, 0)
        assert reconstruct_score(s, np.zeros(6, dtype=np.uint8), 1.5) == 1.5 + np.triu(s.wins, 1).sum()

    def test_matches_explicit_history(self, rng):
        table = complete_table(4)
        explicit = ScoreTable(np.zeros(len(table)))
        s = PairState(4)
        for _ in range(50):
            a, b = rng.choice(4, 2, replace=False)
            y = int(rng.integers(2))
            update(explicit, table, a, b, y)
            record_duel(s, a, b, y)
        got = [reconstruct_score(s, bits) for bits in table.bits]
        np.testing.assert_array_equal(got, explicit.scores)


@pytest.mark.usefixtures("backend")
def test_fast_equals_explicit_ctb2_short(rng):
    n = 4
    table = complete_table(n)
    for seed in range(5):
        outcomes = np.random.default_rng(seed).random(100)
        explicit = ScoreTable(np.zeros(len(table)))
        fast = FastCTBPolicy(n)
        for u in outcomes:
            pair = select_arms(explicit, table)
            assert fast.select(0) == pair
            y = 0 if u < 0.7 else 1
            update(explicit, table, *pair, y)
            fast.update(*pair, y)


def test_load_prior_matrix(tmp_path):
    path = tmp_path / "r.txt"
    path.write_text("0 1.5 0\n-1 0 0\n0 0 0\n")
    mat = load_prior_matrix(path)
    assert mat.shape == (3, 3) and mat[0, 1] == 1.5
    path.write_text("0 1\n")
    with pytest.raises(ConfigurationError):
        load_prior_matrix(path)
