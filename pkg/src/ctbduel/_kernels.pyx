# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. ``_kernels_py`` holds the reference twins; both
modules must return identical values for identical inputs."""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY
from numpy.random cimport bitgen_t

cnp.import_array()


def ctb_select(const double[::1] scores, const cnp.int64_t[::1] best, Py_ssize_t n_arms):
    """Return (first, second) arm picks over finite cells; -1 marks a missing pick."""
    cdef Py_ssize_t m = scores.shape[0]
    cdef Py_ssize_t c, k
    cdef double s
    cdef double[::1] arm_max = np.full(n_arms, -INFINITY)
    for c in range(m):
        s = scores[c]
        k = best[c]
        if s > arm_max[k]:
            arm_max[k] = s
    cdef Py_ssize_t first = -1, second = -1
    cdef double top = -INFINITY
    for k in range(n_arms):
        if arm_max[k] > top:
            top = arm_max[k]
            first = k
    top = -INFINITY
    for k in range(n_arms):
        if k != first and arm_max[k] > top:
            top = arm_max[k]
            second = k
    return first, second


def ctb_update(cnp.int64_t[::1] inc, const cnp.uint8_t[::1] column, int winner_bit):
    """Add one to every cell whose bit in ``column`` equals ``winner_bit``."""
    cdef Py_ssize_t c
    cdef cnp.uint8_t w = <cnp.uint8_t> winner_bit
    for c in range(inc.shape[0]):
        if column[c] == w:
            inc[c] += 1


def ip_values(const cnp.int64_t[:, ::1] wins, const double[:, ::1] priors):
    """Closed-form optimum of the per-arm integer program, for every arm."""
    cdef Py_ssize_t n = wins.shape[0]
    cdef Py_ssize_t i, j
    cdef double a, b, mx
    cdef double total = 0.0
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] f = out
    cdef double[::1] own = np.zeros(n)
    cdef double[::1] pair_sum = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            a = wins[i, j] + priors[i, j]
            b = wins[j, i] + priors[j, i]
            mx = a if a >= b else b
            total += mx
            pair_sum[i] += mx
            pair_sum[j] += mx
            own[i] += a
            own[j] += b
    for i in range(n):
        f[i] = own[i] + (total - pair_sum[i])
    return out


def occupation_counts(double p, int max_level, Py_ssize_t walks, Py_ssize_t horizon, bit_generator):
    """Per-walk counts of t in [0, horizon] with Z(t) <= S, for S = 0..max_level.

    Uniforms are drawn walk-major from ``bit_generator`` (one per step), the
    same order ``Generator.random((walks, horizon))`` would produce.
    """
    cdef const char *name = "BitGenerator"
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, name):
        raise ValueError("invalid bit generator capsule")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, name)
    out = np.zeros((walks, max_level + 1), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] counts = out
    cdef Py_ssize_t w, t, s, lo
    cdef long z
    with bit_generator.lock, nogil:
        for w in range(walks):
            z = 0
            for s in range(max_level + 1):
                counts[w, s] += 1
            for t in range(horizon):
                if rng.next_double(rng.state) < p:
                    z += 1
                else:
                    z -= 1
                if z <= max_level:
                    lo = z if z > 0 else 0
                    for s in range(lo, max_level + 1):
                        counts[w, s] += 1
    return out
