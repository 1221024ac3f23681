import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from adpaad.analysis import e_assumption_holds, estimate_E
from adpaad.classical_adpaad import run_classical
from adpaad.timeseries import TimeSeries

W6 = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)


@pytest.fixture
def w6():
    return TimeSeries.from_values(W6)


@pytest.fixture
def w6_csv(tmp_path):
    p = tmp_path / "w6.csv"
    p.write_text("value\n" + "\n".join(str(v) for v in W6) + "\n")
    return p


def grid_series(rng, length, hi=160):
    """Samples on a 1/16 grid in [0, 10]; exactly representable in fixed point."""
    return TimeSeries.from_values(rng.integers(0, hi + 1, size=length) / 16)


def random_budget_instances(count, seed=7, max_K=8, max_n=16, max_q=4):
    """Random (series, n, q) instances satisfying the E-assumption."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        K = int(rng.integers(2, max_K + 1))
        n = int(rng.integers(2, max_n + 1))
        q = int(rng.integers(1, min(max_q, n) + 1))
        ts = grid_series(rng, n + K - 1)
        try:
            res = run_classical(ts, n, q)
        except ZeroDivisionError:
            continue
        C = float(np.max(res.windows))
        E, _ = estimate_E(res.paad.mu, C)
        if e_assumption_holds(res.paad.mu, C, E):
            out.append((ts, n, q, res))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
