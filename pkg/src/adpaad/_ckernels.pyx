# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for PAAD means, pairwise similarity and anomaly scores."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def paad_kernel(double[:, ::1] windows, double[:, ::1] bounds):
    cdef Py_ssize_t K = windows.shape[0]
    cdef Py_ssize_t n = windows.shape[1]
    cdef Py_ssize_t q = bounds.shape[1] - 1
    mu_arr = np.zeros((K, q), dtype=np.float64)
    counts_arr = np.zeros((K, q), dtype=np.int64)
    sums_arr = np.zeros(q, dtype=np.float64)
    cnt_arr = np.zeros(q, dtype=np.int64)
    cdef double[:, ::1] mu = mu_arr
    cdef cnp.int64_t[:, ::1] counts = counts_arr
    cdef double[::1] sums = sums_arr
    cdef cnp.int64_t[::1] cnt = cnt_arr
    cdef Py_ssize_t i, j, s, t
    cdef double x
    for i in range(K):
        for t in range(q):
            sums[t] = 0.0
            cnt[t] = 0
        for j in range(n):
            x = windows[i, j]
            if x < bounds[i, 0] or x > bounds[i, q]:
                raise ValueError(
                    f"element {x} of subsequence {i + 1} outside [{bounds[i, 0]}, {bounds[i, q]}]")
            t = q - 1
            for s in range(q - 1):
                if x < bounds[i, s + 1]:
                    t = s
                    break
            sums[t] += x
            cnt[t] += 1
        for t in range(q):
            if cnt[t] > 0:
                mu[i, t] = sums[t] / cnt[t]
            counts[i, t] = cnt[t]
    return mu_arr, counts_arr


def similarity_kernel(double[:, ::1] mu):
    cdef Py_ssize_t K = mu.shape[0]
    cdef Py_ssize_t q = mu.shape[1]
    S_arr = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] S = S_arr
    cdef Py_ssize_t i, k, t
    cdef double acc, d
    for i in range(K):
        for k in range(K):
            acc = 0.0
            for t in range(q):
                d = mu[i, t] - mu[k, t]
                acc += d * d
            S[i, k] = sqrt(acc)
    return S_arr


def scores_kernel(double[:, ::1] S):
    cdef Py_ssize_t K = S.shape[0]
    h_arr = np.zeros(K, dtype=np.float64)
    rows_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] h = h_arr
    cdef double[::1] rows = rows_arr
    cdef Py_ssize_t i, k
    cdef double acc, total = 0.0, den
    for i in range(K):
        acc = 0.0
        for k in range(K):
            acc += S[i, k]
            total += S[i, k]
        rows[i] = acc
    if total == 0.0:
        raise ZeroDivisionError("all subsequences are identical; anomaly scores are undefined")
    den = total / <double>(K * K)
    for i in range(K):
        h[i] = (rows[i] / <double>K) / den
    return h_arr
