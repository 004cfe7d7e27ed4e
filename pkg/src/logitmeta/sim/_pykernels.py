"""Pure-Python simulation kernels.

Same signatures and bit-for-bit the same output as the compiled ``_ckernels``
module; used when the extension is not built or ``LOGITMETA_PURE`` is set.

Kernel conventions (shared with the compiled module):

* ``family``: 0 = OR, 1 = Ising, 2 = ring.
* ``table[s]`` is the probability that the selected player picks bit 0 when
  its local statistic is ``s`` (OR: any other player on 1; Ising: number of
  other +1 spins; ring: number of neighbours on 0).
* ``bits`` is mutated in place and holds the final profile on return.
* Every step reads counters ``c`` (player) and ``c + 1`` (uniform).
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
INV53 = 1.0 / 9007199254740992.0


def _mix(z):
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def _stat(family, bits, n, ones, i):
    if family == 0:
        return 1 if ones - bits[i] > 0 else 0
    if family == 1:
        return ones - bits[i]
    if n == 1:
        return 0
    return (bits[(i - 1) % n] == 0) + (bits[(i + 1) % n] == 0)


def _draw(key, c, n):
    z1 = _mix((key + c * GOLDEN) & MASK64)
    z2 = _mix((key + (c + 1) * GOLDEN) & MASK64)
    return ((z1 >> 32) * n) >> 32, (z2 >> 11) * INV53


def _adj0(bits, n):
    return sum(1 for j in range(n) if bits[j] == 0 and bits[(j + 1) % n] == 0)


def _pairs(i, n):
    j = (i - 1) % n
    return (j,) if j == i else (j, i)


def run_chain(family, table, bits, key, counter, steps, record_every, snaps):
    n = len(bits)
    b = [int(v) for v in bits]
    tab = [float(v) for v in table]
    ones = sum(b)
    c = counter
    k = 0
    for t in range(steps + 1):
        if t % record_every == 0:
            snaps[k, :] = b
            k += 1
        if t == steps:
            break
        i, u = _draw(key, c, n)
        c += 2
        nb = 0 if u < tab[_stat(family, b, n, ones, i)] else 1
        ones += nb - b[i]
        b[i] = nb
    bits[:] = b
    return c


def hit_time(family, table, bits, key, counter, cap, weight_mask, exact, use_adj0):
    n = len(bits)
    b = [int(v) for v in bits]
    tab = [float(v) for v in table]
    wm = [int(v) for v in weight_mask]
    has_exact = len(exact) > 0
    tgt = [int(v) for v in exact]
    ones = sum(b)
    ham = sum(1 for j in range(n) if b[j] != tgt[j]) if has_exact else 1
    adj = _adj0(b, n) if use_adj0 else 0
    c = counter
    tau = -1
    t = 0
    while True:
        if wm[ones] or (has_exact and ham == 0) or (use_adj0 and adj > 0):
            tau = t
            break
        if t == cap:
            break
        i, u = _draw(key, c, n)
        c += 2
        t += 1
        nb = 0 if u < tab[_stat(family, b, n, ones, i)] else 1
        if nb != b[i]:
            if use_adj0:
                for j in _pairs(i, n):
                    adj -= b[j] == 0 and b[(j + 1) % n] == 0
            ones += nb - b[i]
            b[i] = nb
            if has_exact:
                ham += 1 if nb != tgt[i] else -1
            if use_adj0:
                for j in _pairs(i, n):
                    adj += b[j] == 0 and b[(j + 1) % n] == 0
    bits[:] = b
    return tau, c


def coupled_run(family, table_x, table_y, x, y, key, counter, steps):
    """Shared-player, shared-uniform coupling of two chains.

    Returns ``(tau_couple, violations, tau_zero_x, eta, counter)``: first
    meeting time, number of steps after which ``x_i >= y_i`` fails for some
    ``i``, first time ``x`` is all zeros, first time every player has been
    selected.  Times that do not occur within ``steps`` are -1.
    """
    n = len(x)
    bx = [int(v) for v in x]
    by = [int(v) for v in y]
    tx = [float(v) for v in table_x]
    ty = [float(v) for v in table_y]
    ox, oy = sum(bx), sum(by)
    diff = sum(1 for j in range(n) if bx[j] != by[j])
    bad = sum(1 for j in range(n) if bx[j] < by[j])
    seen = [False] * n
    unseen = n
    tau_c = 0 if diff == 0 else -1
    tau_z = 0 if ox == 0 else -1
    eta = -1
    viol = 0
    c = counter
    for t in range(1, steps + 1):
        i, u = _draw(key, c, n)
        c += 2
        nx = 0 if u < tx[_stat(family, bx, n, ox, i)] else 1
        ny = 0 if u < ty[_stat(family, by, n, oy, i)] else 1
        diff -= bx[i] != by[i]
        bad -= bx[i] < by[i]
        ox += nx - bx[i]
        oy += ny - by[i]
        bx[i] = nx
        by[i] = ny
        diff += nx != ny
        bad += nx < ny
        if not seen[i]:
            seen[i] = True
            unseen -= 1
            if unseen == 0:
                eta = t
        if bad > 0:
            viol += 1
        if tau_c < 0 and diff == 0:
            tau_c = t
        if tau_z < 0 and ox == 0:
            tau_z = t
    x[:] = bx
    y[:] = by
    return tau_c, viol, tau_z, eta, c


def one_step_counts(family, table_x, table_y, x, y, key, counter, trials, counts_x, counts_y):
    """Tally single coupled steps from fixed ``(x, y)``.

    ``counts[i]`` counts moves that switch player ``i``; ``counts[n]`` counts
    steps that leave the profile unchanged.
    """
    n = len(x)
    bx = [int(v) for v in x]
    by = [int(v) for v in y]
    tx = [float(v) for v in table_x]
    ty = [float(v) for v in table_y]
    ox, oy = sum(bx), sum(by)
    sx = [tx[_stat(family, bx, n, ox, i)] for i in range(n)]
    sy = [ty[_stat(family, by, n, oy, i)] for i in range(n)]
    cx = [0] * (n + 1)
    cy = [0] * (n + 1)
    c = counter
    for _ in range(trials):
        i, u = _draw(key, c, n)
        c += 2
        nx = 0 if u < sx[i] else 1
        ny = 0 if u < sy[i] else 1
        cx[i if nx != bx[i] else n] += 1
        cy[i if ny != by[i] else n] += 1
    counts_x[:] = np.asarray(counts_x) + cx
    counts_y[:] = np.asarray(counts_y) + cy
    return c
