"""Winning spaces, cell sign vectors and cell enumeration.

A cell is encoded by one bit per unordered arm pair (i, j), i < j, in
lexicographic pair order: bit 0 means arm i beats arm j anywhere in the
cell, bit 1 means arm j beats arm i. Cells are numbered by the binary
value of their bit vector (first pair most significant) plus one, so the
all-zero vector is cell 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arms import ArmSet, utilities_at
from .errors import BoundaryError, ConfigurationError, InvalidPairError

BOUNDARY_TOL = 1e-12
FEASIBILITY_MARGIN = 1e-9
BACKENDS = ("angular-sweep", "permutation-lp", "explicit")


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_position(i: int, j: int, n: int) -> int:
    """0-based bit position of the pair (i, j), i < j, among n arms."""
    if not 0 <= i < j < n:
        raise InvalidPairError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    return (2 * n - i - 1) * i // 2 + j - i - 1


def pair_arrays(n: int):
    """Arrays (I, J) with I[pos] < J[pos] the pair stored at bit ``pos``."""
    return np.triu_indices(n, 1)


def cell_index(bits) -> int:
    """Lexicographic rank of a bit vector, counting from 1."""
    value = 0
    for b in np.asarray(bits, dtype=np.uint8):
        value = (value << 1) | int(b)
    return value + 1


def cell_bits(index: int, n: int) -> np.ndarray:
    length = n_pairs(n)
    value = index - 1
    if not 0 <= value < (1 << length):
        raise ConfigurationError(f"cell index {index} out of range for {n} arms")
    return np.array([(value >> (length - 1 - k)) & 1 for k in range(length)], dtype=np.uint8)


def wins_per_arm(bits, n: int) -> np.ndarray:
    """Number of pairwise wins of each arm under the cell(s) ``bits``.

    Accepts a single vector (returns shape (n,)) or a stack (returns (M, n)).
    """
    bits = np.asarray(bits, dtype=np.int64)
    I, J = pair_arrays(n)
    win_i = np.zeros((len(I), n), dtype=np.int64)
    win_i[np.arange(len(I)), I] = 1
    win_j = np.zeros((len(I), n), dtype=np.int64)
    win_j[np.arange(len(I)), J] = 1
    return (1 - bits) @ win_i + bits @ win_j


def best_arm(bits, n: Optional[int] = None) -> Optional[int]:
    """The arm the cell ranks above every other arm, or None for a cyclic cell."""
    bits = np.asarray(bits)
    if n is None:
        n = _arms_from_length(len(bits))
    wins = wins_per_arm(bits, n)
    top = np.flatnonzero(wins == n - 1)
    return int(top[0]) if len(top) else None


def _arms_from_length(length: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * length)) / 2))
    if n_pairs(n) != length:
        raise ConfigurationError(f"{length} is not a valid cell-vector length")
    return n


def classify(point, arms: ArmSet, func=None) -> np.ndarray:
    """Sign vector of the cell containing ``point``.

    Raises BoundaryError when two arms' utilities at ``point`` tie within
    BOUNDARY_TOL.
    """
    u = utilities_at(point, arms.features, func)
    I, J = pair_arrays(arms.n_arms)
    diff = u[I] - u[J]
    if np.any(np.abs(diff) <= BOUNDARY_TOL):
        pos = int(np.argmin(np.abs(diff)))
        raise BoundaryError(f"point lies on the boundary of pair ({I[pos]}, {J[pos]})")
    return (diff < 0).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class CellTable:
    """Enumerated nonempty cells that have a best arm.

    ``bits`` is (M, n_pairs), sorted by cell index. ``bits_by_pair`` is the
    contiguous transpose used by the score update. ``second`` holds the
    runner-up arm (most pairwise wins after the best arm, lowest index on
    ties). ``representatives`` is None for explicit tables.
    """

    n_arms: int
    bits: np.ndarray
    best: np.ndarray
    second: np.ndarray
    prior: np.ndarray
    representatives: Optional[np.ndarray] = None
    backend: str = "explicit"
    approximate: bool = False

    def __post_init__(self):
        for name in ("bits", "best", "second", "prior", "representatives"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, copy=True)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)
        bt = np.ascontiguousarray(self.bits.T)
        bt.setflags(write=False)
        object.__setattr__(self, "bits_by_pair", bt)

    def __len__(self):
        return self.bits.shape[0]

    @property
    def m_count(self) -> int:
        return len(self)

    @property
    def indices(self) -> list:
        return [cell_index(b) for b in self.bits]

    def column(self, i: int, j: int) -> np.ndarray:
        """Bits of every cell at the position of the unordered pair {i, j}."""
        lo, hi = (i, j) if i < j else (j, i)
        return self.bits_by_pair[pair_position(lo, hi, self.n_arms)]

    def winner_side(self, winner: int, loser: int) -> np.ndarray:
        """Boolean mask of cells contained in the winning space H[winner, loser]."""
        target = 0 if winner < loser else 1
        return self.column(winner, loser) == target

    def find(self, bits) -> Optional[int]:
        """Row of the cell with sign vector ``bits``, or None."""
        hit = np.flatnonzero(np.all(self.bits == np.asarray(bits, dtype=np.uint8), axis=1))
        return int(hit[0]) if len(hit) else None

    def listing(self) -> str:
        """Tab-separated rows: index, bit string, best arm (1-based), prior mass."""
        rows = ["index\tbits\tbest_arm\tprior_mass"]
        for b, k, m in zip(self.bits, self.best, self.prior):
            rows.append(f"{cell_index(b)}\t{''.join(map(str, b))}\t{int(k) + 1}\t{float(m)!r}")
        return "\n".join(rows) + "\n"


def make_table(bits, n: int, prior=None, representatives=None, backend="explicit", approximate=False) -> CellTable:
    """Build a CellTable from sign vectors, dropping cells without a best arm."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1, n_pairs(n))
    wins = wins_per_arm(bits, n)
    keep = np.any(wins == n - 1, axis=1)
    bits, wins = bits[keep], wins[keep]
    if prior is None:
        prior = np.full(len(bits), 1.0 / max(len(bits), 1))
    else:
        prior = np.asarray(prior, dtype=float)[keep]
    if representatives is not None:
        representatives = np.asarray(representatives, dtype=float)[keep]
    order = np.lexsort(bits.T[::-1]) if len(bits) else np.arange(0)
    bits, wins, prior = bits[order], wins[order], prior[order]
    if representatives is not None:
        representatives = representatives[order]
    best = np.argmax(wins, axis=1).astype(np.int64)
    rest = wins.copy()
    rest[np.arange(len(best)), best] = -1
    second = np.argmax(rest, axis=1).astype(np.int64)
    return CellTable(n, bits, best, second, prior, representatives, backend, approximate)


def _sweep(arms: ArmSet) -> CellTable:
    n = arms.n_arms
    I, J = pair_arrays(n)
    diff = arms.features[I] - arms.features[J]
    alpha = np.arctan2(diff[:, 1], diff[:, 0])
    cuts = np.mod(np.concatenate([alpha + np.pi / 2, alpha - np.pi / 2]), 2 * np.pi)
    cuts = np.unique(cuts)
    # merge angles closer than the classification tolerance can resolve
    cuts = cuts[np.concatenate([[True], np.diff(cuts) > 1e-13])]
    if len(cuts) > 1 and cuts[0] + 2 * np.pi - cuts[-1] <= 1e-13:
        cuts = cuts[:-1]
    ends = np.append(cuts[1:], cuts[0] + 2 * np.pi)
    mids = (cuts + ends) / 2
    reps = np.column_stack([np.cos(mids), np.sin(mids)])
    mass = (ends - cuts) / (2 * np.pi)
    u = reps @ arms.features.T
    bits = (u[:, I] < u[:, J]).astype(np.uint8)
    # distinct arcs always carry distinct sign vectors; merge defensively anyway
    uniq, inverse = np.unique(bits, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    merged_mass = np.bincount(inverse, weights=mass, minlength=len(uniq))
    first_row = np.full(len(uniq), -1)
    for row, cls in enumerate(inverse):
        if first_row[cls] < 0 or mass[row] > mass[first_row[cls]]:
            first_row[cls] = row
    return make_table(uniq, n, merged_mass, reps[first_row], backend="angular-sweep")


def sample_prior(rng, count: int, dim: int) -> np.ndarray:
    """Points uniform on the unit sphere in ``dim`` dimensions."""
    x = rng.standard_normal((count, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _permutation_backend(arms, func, rng, theta_dim, samples, mass_samples, exact):
    n = arms.n_arms
    if n > 8:
        raise ConfigurationError("permutation-lp backend supports at most 8 arms")
    if rng is None:
        rng = np.random.default_rng(0)
    dim = theta_dim or arms.dim
    I, J = pair_arrays(n)

    def orderings(points):
        u = np.array([utilities_at(x, arms.features, func) for x in points])
        order = np.argsort(-u, axis=1, kind="stable")
        gaps = np.take_along_axis(u, order, axis=1)
        ok = np.all(gaps[:, :-1] - gaps[:, 1:] >= FEASIBILITY_MARGIN, axis=1)
        return order, ok, u

    if exact:
        if func is not None:
            raise ConfigurationError("exact feasibility needs a linear utility")
        found = {}
        for perm in itertools.permutations(range(n)):
            x = _lp_interior_point(arms.features[list(perm)])
            if x is not None:
                found[perm] = x
    else:
        pts = sample_prior(rng, samples, dim)
        order, ok, _ = orderings(pts)
        found = {}
        for row in np.flatnonzero(ok):
            found.setdefault(tuple(order[row]), pts[row])
    if not found:
        return make_table(np.zeros((0, n_pairs(n))), n, backend="permutation-lp", approximate=not exact)
    perms = list(found)
    rank = np.empty((len(perms), n), dtype=np.int64)
    for r, perm in enumerate(perms):
        rank[r, list(perm)] = np.arange(n)
    bits = (rank[:, I] > rank[:, J]).astype(np.uint8)
    reps = np.array([found[p] for p in perms])
    mass_pts = sample_prior(rng, mass_samples, dim)
    morder, _, _ = orderings(mass_pts)
    lookup = {p: r for r, p in enumerate(perms)}
    mass = np.zeros(len(perms))
    for row in morder:
        r = lookup.get(tuple(row))
        if r is not None:
            mass[r] += 1
    mass /= mass_samples
    return make_table(bits, n, mass, reps, backend="permutation-lp", approximate=not exact)


def _lp_interior_point(ordered_features):
    """A point where utilities strictly follow the given order, via an LP, or None."""
    from scipy.optimize import linprog

    diffs = ordered_features[:-1] - ordered_features[1:]
    dim = ordered_features.shape[1]
    # maximise s subject to diffs @ x >= s, |x_k| <= 1, s <= 1
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-diffs, np.ones((len(diffs), 1))])
    b_ub = np.zeros(len(diffs))
    bounds = [(-1, 1)] * dim + [(None, 1)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= FEASIBILITY_MARGIN:
        return None
    return res.x[:dim]


def enumerate_cells(
    arms: ArmSet,
    func=None,
    backend: str = "angular-sweep",
    cells=None,
    prior=None,
    rng: Optional[np.random.Generator] = None,
    theta_dim: Optional[int] = None,
    samples: int = 10_000,
    mass_samples: int = 100_000,
    exact: bool = False,
) -> CellTable:
    """Enumerate the nonempty, order-inducing cells of an arrangement.

    ``angular-sweep`` is exact for linear utilities in two dimensions and
    gives arc-length prior masses under a uniform prior on the circle.
    ``permutation-lp`` finds feasible orderings of up to 8 arms by sampling
    the uniform sphere prior (or by LP when ``exact``); masses are Monte Carlo.
    ``explicit`` takes the sign vectors in ``cells`` and optional ``prior``.
    """
    if backend == "angular-sweep":
        if func is not None or arms.dim != 2:
            raise ConfigurationError("angular-sweep needs a linear utility with d = 2")
        return _sweep(arms)
    if backend == "permutation-lp":
        return _permutation_backend(arms, func, rng, theta_dim, samples, mass_samples, exact)
    if backend == "explicit":
        if cells is None:
            raise ConfigurationError("explicit backend needs a list of cells")
        return make_table(cells, arms.n_arms, prior)
    raise ConfigurationError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def complete_table(n: int) -> CellTable:
    """Every sign vector that has a best arm: n * 2**C(n-1, 2) cells.

    This is the candidate set implicitly searched by the decomposable
    (pairwise-count) implementation with all-zero scores.
    """
    I, J = pair_arrays(n)
    blocks = []
    for k in range(n):
        free = [pos for pos in range(len(I)) if I[pos] != k and J[pos] != k]
        grid = np.array(list(itertools.product((0, 1), repeat=len(free))), dtype=np.uint8)
        block = np.zeros((len(grid), len(I)), dtype=np.uint8)
        block[:, free] = grid.reshape(len(grid), len(free))
        for pos in range(len(I)):
            if I[pos] == k:
                block[:, pos] = 0
            elif J[pos] == k:
                block[:, pos] = 1
        blocks.append(block)
    return make_table(np.vstack(blocks), n)


def membership_sets(table: CellTable) -> list:
    """Per cell, the set J_k of ordered pairs (winner, loser) whose winning space contains it."""
    I, J = pair_arrays(table.n_arms)
    out = []
    for b in table.bits:
        out.append({(int(i), int(j)) if bit == 0 else (int(j), int(i)) for i, j, bit in zip(I, J, b)})
    return out


def membership_of(bits, n: int) -> set:
    I, J = pair_arrays(n)
    return {(int(i), int(j)) if bit == 0 else (int(j), int(i)) for i, j, bit in zip(I, J, bits)}
