"""Independent reference implementations used by the tests.

Nothing here imports the package: utilities are written out from the game
definitions, kernels are assembled entry by entry with ``math.exp``.
"""
import itertools
import math

import numpy as np


def profiles(n):
    """Bit profiles in state-index order (player 0 is the most significant bit)."""
    return [tuple(p) for p in itertools.product((0, 1), repeat=n)]


def utility(family, x, i, payoffs=None):
    n = len(x)
    if family == "or":
        return -1.0 if any(x) else 0.0
    if family == "ising":
        s = [2 * v - 1 for v in x]
        return float(s[i] * (sum(s) - s[i]))
    a, b, c, d = payoffs
    table = {(0, 0): a, (0, 1): c, (1, 0): d, (1, 1): b}
    if n == 1:
        return 2.0 * table[(x[0], x[0])]
    return table[(x[i], x[(i - 1) % n])] + table[(x[i], x[(i + 1) % n])]


def logit_matrix(family, n, beta, payoffs=None):
    states = profiles(n)
    index = {s: k for k, s in enumerate(states)}
    P = np.zeros((2 ** n, 2 ** n))
    for x in states:
        for i in range(n):
            weights = []
            for s in (0, 1):
                y = list(x)
                y[i] = s
                weights.append(math.exp(beta * utility(family, y, i, payoffs)))
            z = sum(weights)
            for s in (0, 1):
                y = list(x)
                y[i] = s
                P[index[x], index[tuple(y)]] += weights[s] / z / n
    return P


def power_stationary(P, iters=20000):
    """Stationary vector by power iteration on the lazy chain."""
    L = 0.5 * (P + np.eye(P.shape[0]))
    v = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(iters):
        v = v @ L
    return v


def gambler_ruin(n, h, up, down):
    """Hit ``n`` before ``0`` by explicit first-step equations (dense solve)."""
    A = np.eye(n + 1)
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    for k in range(1, n):
        A[k, k + 1] -= up
        A[k, k - 1] -= down
        A[k, k] -= 1.0 - up - down
    return float(np.linalg.solve(A, rhs)[h])


def hit_cdf(P, targets, start, t_max):
    """``Prob(tau <= t)`` by forward evolution of the killed chain."""
    Q = P.copy()
    targets = list(targets)
    v = np.zeros(P.shape[0])
    v[start] = 1.0
    out = []
    absorbed = 0.0
    for t in range(t_max + 1):
        if t:
            v = v @ Q
        absorbed += v[targets].sum()
        v[targets] = 0.0
        out.append(absorbed)
    return np.array(out)
