"""Pure-numpy twins of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

# walks per chunk in occupation_counts; bounds memory at ~chunk * horizon doubles
_WALK_CHUNK = 64


def ctb_select(scores, best, n_arms):
    arm_max = np.full(n_arms, -np.inf)
    np.maximum.at(arm_max, best, scores)
    first = int(np.argmax(arm_max))
    if arm_max[first] == -np.inf:
        return -1, -1
    arm_max[first] = -np.inf
    second = int(np.argmax(arm_max))
    if arm_max[second] == -np.inf:
        second = -1
    return first, second


def ctb_update(inc, column, winner_bit):
    inc[column == winner_bit] += 1


def ip_values(wins, priors):
    a = wins + priors
    n = a.shape[0]
    own = np.zeros(n)
    pair_sum = np.zeros(n)
    total = 0.0
    # same accumulation order as the compiled loop, so float results match bitwise
    for i in range(n):
        for j in range(i + 1, n):
            x, y = a[i, j], a[j, i]
            mx = x if x >= y else y
            total += mx
            pair_sum[i] += mx
            pair_sum[j] += mx
            own[i] += x
            own[j] += y
    return own + (total - pair_sum)


def occupation_counts(p, max_level, walks, horizon, bit_generator):
    gen = np.random.Generator(bit_generator)
    levels = np.arange(max_level + 1)
    out = np.zeros((walks, max_level + 1), dtype=np.int64)
    for start in range(0, walks, _WALK_CHUNK):
        stop = min(start + _WALK_CHUNK, walks)
        u = gen.random((stop - start, horizon))
        z = np.cumsum(np.where(u < p, 1, -1).astype(np.int32), axis=1)
        # t = 0 contributes Z(0) = 0 <= S for every level
        out[start:stop] = 1 + (z[:, :, None] <= levels).sum(axis=1)
    return out
