"""Independent brute-force ADPAAD written from the definitions with plain lists.

Nothing here imports the package. Accumulation order follows the natural
reading of the sums (index order), which is also what the kernels do, so
results compare bit-for-bit.
"""
import math


def windows(series, n, step=1):
    out = []
    start = 0
    while start + n <= len(series):
        out.append([float(v) for v in series[start:start + n]])
        start += step
    return out


def bounds(window, q):
    L, H = min(window), max(window)
    b = [L + t * (H - L) / q for t in range(q)]
    b.append(H)
    return b


def subsection_of(x, b):
    q = len(b) - 1
    for t in range(q):
        upper_ok = x <= b[t + 1] if t == q - 1 else x < b[t + 1]
        if b[t] <= x and upper_ok:
            return t
    raise AssertionError("value not covered by any subsection")


def paad_row(window, q):
    b = bounds(window, q)
    total = [0.0] * q
    count = [0] * q
    for x in window:
        t = subsection_of(x, b)
        total[t] = total[t] + x
        count[t] = count[t] + 1
    return [total[t] / count[t] if count[t] else 0.0 for t in range(q)], count


def distance(u, v):
    acc = 0.0
    for a, b in zip(u, v):
        acc = acc + (a - b) * (a - b)
    return math.sqrt(acc)


def run(series, n, q, step=1, delta=1.0):
    ws = windows(series, n, step)
    K = len(ws)
    mu = [paad_row(w, q)[0] for w in ws]
    S = [[distance(mu[i], mu[k]) for k in range(K)] for i in range(K)]
    total = 0.0
    rows = []
    for i in range(K):
        r = 0.0
        for k in range(K):
            r = r + S[i][k]
            total = total + S[i][k]
        rows.append(r)
    g = total / (K * K)
    h = [(rows[i] / K) / g for i in range(K)]
    hits = [i + 1 for i in range(K) if h[i] >= delta]
    return {"mu": mu, "S": S, "h": h, "anomalies": hits}
