"""Pure-Python reference kernels.

Same loop order and accumulation order as the compiled ``_ckernels`` module,
so both produce bit-identical results.
"""
from __future__ import annotations

import math

import numpy as np


def paad_kernel(windows: np.ndarray, bounds: np.ndarray):
    K, n = windows.shape
    q = bounds.shape[1] - 1
    mu = np.zeros((K, q), dtype=np.float64)
    counts = np.zeros((K, q), dtype=np.int64)
    w = windows.tolist()
    b = bounds.tolist()
    for i in range(K):
        row = b[i]
        sums = [0.0] * q
        cnt = [0] * q
        for j in range(n):
            x = w[i][j]
            if x < row[0] or x > row[q]:
                raise ValueError(
                    f"element {x} of subsequence {i + 1} outside [{row[0]}, {row[q]}]")
            t = q - 1
            for s in range(q - 1):
                if x < row[s + 1]:
                    t = s
                    break
            sums[t] += x
            cnt[t] += 1
        for t in range(q):
            if cnt[t] > 0:
                mu[i, t] = sums[t] / cnt[t]
            counts[i, t] = cnt[t]
    return mu, counts


def similarity_kernel(mu: np.ndarray) -> np.ndarray:
    K, q = mu.shape
    m = mu.tolist()
    S = np.zeros((K, K), dtype=np.float64)
    for i in range(K):
        for k in range(K):
            acc = 0.0
            for t in range(q):
                d = m[i][t] - m[k][t]
                acc += d * d
            S[i, k] = math.sqrt(acc)
    return S


def scores_kernel(S: np.ndarray) -> np.ndarray:
    K = S.shape[0]
    s = S.tolist()
    rows = [0.0] * K
    total = 0.0
    for i in range(K):
        acc = 0.0
        for k in range(K):
            acc += s[i][k]
            total += s[i][k]
        rows[i] = acc
    if total == 0.0:
        raise ZeroDivisionError("all subsequences are identical; anomaly scores are undefined")
    den = total / (K * K)
    return np.array([(r / K) / den for r in rows], dtype=np.float64)
