# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels; see ``_pykernels`` for the conventions."""
from libc.stdint cimport uint64_t, int64_t, uint8_t

import numpy as np

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return z


cdef inline Py_ssize_t _player(uint64_t key, int64_t c, Py_ssize_t n) noexcept nogil:
    cdef uint64_t z = _mix(key + <uint64_t>c * GOLDEN)
    return <Py_ssize_t>(((z >> 32) * <uint64_t>n) >> 32)


cdef inline double _uniform(uint64_t key, int64_t c) noexcept nogil:
    cdef uint64_t z = _mix(key + <uint64_t>c * GOLDEN)
    return <double>(z >> 11) * INV53


cdef inline Py_ssize_t _stat(int family, uint8_t[::1] b, Py_ssize_t n, Py_ssize_t ones,
                             Py_ssize_t i) noexcept nogil:
    if family == 0:
        return 1 if ones - b[i] > 0 else 0
    if family == 1:
        return ones - b[i]
    if n == 1:
        return 0
    return (b[(i - 1 + n) % n] == 0) + (b[(i + 1) % n] == 0)


cdef inline int _z2(uint8_t[::1] b, Py_ssize_t j, Py_ssize_t n) noexcept nogil:
    return b[j] == 0 and b[(j + 1) % n] == 0


def run_chain(int family, double[::1] table, uint8_t[::1] bits, uint64_t key, int64_t counter,
              int64_t steps, int64_t record_every, uint8_t[:, ::1] snaps):
    cdef Py_ssize_t n = bits.shape[0]
    cdef Py_ssize_t i, j, ones = 0, k = 0
    cdef int64_t t, c = counter
    cdef uint8_t nb
    cdef double u
    for j in range(n):
        ones += bits[j]
    with nogil:
        t = 0
        while True:
            if t % record_every == 0:
                for j in range(n):
                    snaps[k, j] = bits[j]
                k += 1
            if t == steps:
                break
            i = _player(key, c, n)
            u = _uniform(key, c + 1)
            c += 2
            nb = 0 if u < table[_stat(family, bits, n, ones, i)] else 1
            ones += nb - bits[i]
            bits[i] = nb
            t += 1
    return c


def hit_time(int family, double[::1] table, uint8_t[::1] bits, uint64_t key, int64_t counter,
             int64_t cap, uint8_t[::1] weight_mask, uint8_t[::1] exact, int use_adj0):
    cdef Py_ssize_t n = bits.shape[0]
    cdef Py_ssize_t i, j, j1, ones = 0, ham = 1, adj = 0
    cdef int has_exact = exact.shape[0] > 0
    cdef int64_t t = 0, tau = -1, c = counter
    cdef uint8_t nb
    cdef double u
    for j in range(n):
        ones += bits[j]
    if has_exact:
        ham = 0
        for j in range(n):
            ham += bits[j] != exact[j]
    if use_adj0:
        for j in range(n):
            adj += _z2(bits, j, n)
    with nogil:
        while True:
            if weight_mask[ones] or (has_exact and ham == 0) or (use_adj0 and adj > 0):
                tau = t
                break
            if t == cap:
                break
            i = _player(key, c, n)
            u = _uniform(key, c + 1)
            c += 2
            t += 1
            nb = 0 if u < table[_stat(family, bits, n, ones, i)] else 1
            if nb != bits[i]:
                j1 = (i - 1 + n) % n
                if use_adj0:
                    adj -= _z2(bits, j1, n)
                    if j1 != i:
                        adj -= _z2(bits, i, n)
                ones += nb - bits[i]
                bits[i] = nb
                if has_exact:
                    ham += 1 if nb != exact[i] else -1
                if use_adj0:
                    adj += _z2(bits, j1, n)
                    if j1 != i:
                        adj += _z2(bits, i, n)
    return tau, c


def coupled_run(int family, double[::1] table_x, double[::1] table_y, uint8_t[::1] x,
                uint8_t[::1] y, uint64_t key, int64_t counter, int64_t steps):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, ox = 0, oy = 0, diff = 0, bad = 0, unseen = n
    cdef int64_t t, c = counter, tau_c = -1, tau_z = -1, eta = -1, viol = 0
    cdef uint8_t nx, ny
    cdef double u
    cdef uint8_t[::1] seen = bytearray(n)
    for j in range(n):
        ox += x[j]
        oy += y[j]
        diff += x[j] != y[j]
        bad += x[j] < y[j]
    if diff == 0:
        tau_c = 0
    if ox == 0:
        tau_z = 0
    with nogil:
        for t in range(1, steps + 1):
            i = _player(key, c, n)
            u = _uniform(key, c + 1)
            c += 2
            nx = 0 if u < table_x[_stat(family, x, n, ox, i)] else 1
            ny = 0 if u < table_y[_stat(family, y, n, oy, i)] else 1
            diff -= x[i] != y[i]
            bad -= x[i] < y[i]
            ox += nx - x[i]
            oy += ny - y[i]
            x[i] = nx
            y[i] = ny
            diff += nx != ny
            bad += nx < ny
            if not seen[i]:
                seen[i] = 1
                unseen -= 1
                if unseen == 0:
                    eta = t
            if bad > 0:
                viol += 1
            if tau_c < 0 and diff == 0:
                tau_c = t
            if tau_z < 0 and ox == 0:
                tau_z = t
    return tau_c, viol, tau_z, eta, c


def one_step_counts(int family, double[::1] table_x, double[::1] table_y, uint8_t[::1] x,
                    uint8_t[::1] y, uint64_t key, int64_t counter, int64_t trials,
                    int64_t[::1] counts_x, int64_t[::1] counts_y):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, ox = 0, oy = 0
    cdef int64_t k, c = counter
    cdef uint8_t nx, ny
    cdef double u
    cdef double[::1] px = np.empty(n)
    cdef double[::1] py = np.empty(n)
    for j in range(n):
        ox += x[j]
        oy += y[j]
    for j in range(n):
        px[j] = table_x[_stat(family, x, n, ox, j)]
        py[j] = table_y[_stat(family, y, n, oy, j)]
    with nogil:
        for k in range(trials):
            i = _player(key, c, n)
            u = _uniform(key, c + 1)
            c += 2
            nx = 0 if u < px[i] else 1
            ny = 0 if u < py[i] else 1
            counts_x[i if nx != x[i] else n] += 1
            counts_y[i if ny != y[i] else n] += 1
    return c
