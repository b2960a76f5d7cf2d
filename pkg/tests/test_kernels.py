"""Compiled kernels against their numpy twins."""

import numpy as np
import pytest

from ctbduel import _kernels_py, kernels

compiled = kernels.compiled()
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")


@needs_compiled
def test_select_equivalent(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        m = int(rng.integers(1, 40))
        best = rng.integers(0, n, m).astype(np.int64)
        scores = rng.integers(-3, 4, m).astype(float)
        scores[rng.random(m) < 0.2] = -np.inf
        assert compiled.ctb_select(scores, best, n) == _kernels_py.ctb_select(scores, best, n)


@needs_compiled
def test_update_equivalent(rng):
    column = rng.integers(0, 2, 50).astype(np.uint8)
    a = np.zeros(50, dtype=np.int64)
    b = np.zeros(50, dtype=np.int64)
    for bit in (0, 1, 1, 0, 1):
        compiled.ctb_update(a, column, bit)
        _kernels_py.ctb_update(b, column, bit)
    np.testing.assert_array_equal(a, b)


@needs_compiled
def test_ip_values_bitwise(rng):
    for n in (2, 3, 5, 9):
        wins = rng.integers(0, 50, (n, n)).astype(np.int64)
        priors = rng.normal(size=(n, n))
        got = compiled.ip_values(wins, priors)
        want = _kernels_py.ip_values(wins, priors)
        assert got.tobytes() == want.tobytes()


@needs_compiled
@pytest.mark.parametrize("p", [0.6, 0.8, 1.0])
def test_occupation_counts_identical(p):
    a = compiled.occupation_counts(p, 3, 150, 500, np.random.PCG64(4))
    b = _kernels_py.occupation_counts(p, 3, 150, 500, np.random.PCG64(4))
    np.testing.assert_array_equal(a, b)


@pytest.mark.usefixtures("backend")
def test_occupation_deterministic_walk():
    counts = kernels.occupation_counts(1.0, 2, 10, 100, np.random.PCG64(0))
    # straight up: Z(t) = t, so {Z <= S} holds for t = 0..S
    np.testing.assert_array_equal(counts, np.tile([1, 2, 3], (10, 1)))
