"""Error budget, per-stage bound checks and oracle-call scaling analysis."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

STAGES = ("mu", "similarity", "row_mean", "global_mean")


def precision_for(eps: float) -> int:
    """Smallest ``m`` with ``pi / 2**m <= eps``."""
    if eps <= 0:
        raise ValueError(f"stage error must be positive, got {eps}")
    m = max(1, math.ceil(math.log2(math.pi / eps)))
    while math.pi / 2 ** m > eps:
        m += 1
    while m > 1 and math.pi / 2 ** (m - 1) <= eps:
        m -= 1
    return m


@dataclass(frozen=True)
class ErrorBudget:
    """Stage errors: PAAD angles, similarity angles, row and global inner products."""

    epsilon: float
    E: float
    eps1: float
    eps2: float
    eps3: float
    eps4: float

    @classmethod
    def allocate(cls, epsilon: float, E: float) -> "ErrorBudget":
        if epsilon <= 0:
            raise ValueError("target error must be positive")
        if E <= 0:
            raise ValueError("E must be positive to allocate a budget (all PAAD differences vanish?)")
        return cls(epsilon=epsilon, E=E, eps1=E * E * epsilon / 6, eps2=E * epsilon / 3,
                   eps3=E * epsilon / 3, eps4=epsilon)

    @property
    def stage_eps(self) -> dict[str, float]:
        return dict(zip(STAGES, (self.eps1, self.eps2, self.eps3, self.eps4)))

    @property
    def m_required(self) -> dict[str, int]:
        return {k: precision_for(v) for k, v in self.stage_eps.items()}

    @property
    def m_uniform(self) -> int:
        return max(self.m_required.values())

    def score_bound(self) -> float:
        """``(eps3 + eps2)/E + 2 eps1/E^2``; equals ``epsilon`` for the allocation."""
        return (self.eps3 + self.eps2) / self.E + 2 * self.eps1 / self.E ** 2

    def as_dict(self) -> dict:
        d = asdict(self)
        d["m_required"] = self.m_required
        return d


def normalized_differences(mu: np.ndarray, C: float) -> np.ndarray:
    """``|mu_i^t - mu_k^t| / 2C`` for every pair ``i < k``; shape ``(pairs, q)``."""
    K = mu.shape[0]
    iu, ku = np.triu_indices(K, k=1)
    return np.abs(mu[iu] - mu[ku]) / (2.0 * C)


def estimate_E(mu: np.ndarray, C: float) -> tuple[float, float]:
    """Median of the nonzero normalised PAAD differences, and the share of all
    differences at or above it."""
    mu = getattr(mu, "mu", mu)
    if mu.shape[0] < 2:
        raise ValueError("E needs at least two subsequences")
    vals = normalized_differences(mu, C).ravel()
    nz = vals[vals > 0]
    if nz.size == 0:
        return 0.0, 0.0
    E = float(np.median(nz))
    return E, float(np.mean(vals >= E))


def e_assumption_pairs(mu: np.ndarray, C: float, E: float) -> np.ndarray:
    """Per pair ``i < k``: do at least half of the ``q`` differences reach ``E``?"""
    mu = getattr(mu, "mu", mu)
    vals = normalized_differences(mu, C)
    q = vals.shape[1]
    return np.sum(vals >= E, axis=1) * 2 >= q


def e_assumption_holds(mu: np.ndarray, C: float, E: float) -> bool:
    return E > 0 and bool(np.all(e_assumption_pairs(mu, C, E)))


@dataclass
class BoundCheck:
    name: str
    max_error: float
    bound: float
    passed: bool
    informational: bool = False

    @property
    def ratio(self) -> float:
        return self.max_error / self.bound if self.bound > 0 else math.inf

    def as_dict(self) -> dict:
        return {"name": self.name, "max_error": self.max_error, "bound": self.bound,
                "ratio": self.ratio, "passed": self.passed, "informational": self.informational}


def _ulp(record) -> float:
    return getattr(record, "ulp", 0.0)


def check_mu_bound(record) -> BoundCheck:
    """``max |mu_hat - mu| <= C eps1``, plus half an ulp for the output register."""
    err = float(np.max(np.abs(record.mu_hat - record.mu_exact)))
    bound = record.C * record.eps["mu"] + _ulp(record) / 2
    return BoundCheck("mu", err, bound, err <= bound)


def check_similarity_bound(record) -> BoundCheck:
    """``max |S_bar_hat - S_bar| <= eps2 + 2 eps1 / E``, plus the output rounding
    and the propagated rounding of the ``mu`` register."""
    err = float(np.max(np.abs(record.sbar_hat - record.sbar_exact)))
    if record.E > 0:
        u = _ulp(record)
        bound = (record.eps["similarity"] + 2 * record.eps["mu"] / record.E
                 + u / 2 + u / (2 * record.C))
    else:
        bound = math.inf
    return BoundCheck("similarity", err, bound, err <= bound)


def check_score_bound(record, epsilon: Optional[float] = None) -> BoundCheck:
    """``max |h_hat - h| <= epsilon``."""
    epsilon = record.epsilon if epsilon is None else epsilon
    err = float(np.max(np.abs(record.h_hat - record.h_exact)))
    return BoundCheck("score", err, epsilon, err <= epsilon)


def all_checks(record) -> list[BoundCheck]:
    return [check_mu_bound(record), check_similarity_bound(record), check_score_bound(record)]


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    return float(np.polyfit(lx, ly, 1)[0])


@dataclass
class ComplexityReport:
    n_values: list[int]
    step1_aa_calls: list[int]
    aa_slope: float
    K_values: list[int]
    similarity_ops: list[int]
    similarity_slope: float
    step_ratio_rows: list[dict]

    def as_dict(self) -> dict:
        return asdict(self)

    def passes(self, aa_window=(0.35, 0.65), sim_window=(1.8, 2.2)) -> bool:
        return (aa_window[0] <= self.aa_slope <= aa_window[1]
                and sim_window[0] <= self.similarity_slope <= sim_window[1])


def complexity_report(n_sweep: Mapping[int, object], K_sweep: Mapping[int, int],
                      ratio_records: Iterable[object] = ()) -> ComplexityReport:
    """Summarise oracle-call and classical-op counts gathered over sweeps.

    ``n_sweep`` maps window length to an ``OracleCounters``; ``K_sweep`` maps
    subsequence count to the classical similarity op count.
    """
    ns = sorted(n_sweep)
    aa = [n_sweep[n].step_total("1", kind="ox", upto="1.5") for n in ns]
    Ks = sorted(K_sweep)
    ops = [K_sweep[K] for K in Ks]
    rows = []
    for rec in ratio_records:
        c = rec.counters
        s1 = c.step_total("1", kind="ox")
        s2 = c.step_total("2", kind="ox")
        rows.append({
            "m_similarity": rec.m["similarity"],
            "step1_ox": s1,
            "step2_ox": s2,
            "ratio": s2 / s1,
            "model_ratio": 4 * 2 ** rec.m["similarity"],
        })
    return ComplexityReport(ns, aa, loglog_slope(ns, aa), Ks, ops, loglog_slope(Ks, ops), rows)


def write_rows(path, rows: Sequence[Mapping]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not rows:
        path.write_text("")
        return
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
