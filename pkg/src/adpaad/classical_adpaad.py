"""Exact classical ADPAAD: PAAD means, Euclidean similarity, anomaly scores.

This is the reference every simulated quantum estimate is compared against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .timeseries import (
    SubsectionPlan,
    TimeSeries,
    WindowPlan,
    assign_subsection,
    plan_subsections,
    subsequences,
)


class UndefinedScoresError(ZeroDivisionError):
    """All pairwise similarities are zero, so the score ratio is undefined."""


@dataclass
class OpCounter:
    """Elementary-operation tally for the classical cost model."""

    membership_tests: int = 0
    accumulations: int = 0
    similarity_terms: int = 0
    score_terms: int = 0

    @property
    def total(self) -> int:
        return self.membership_tests + self.accumulations + self.similarity_terms + self.score_terms

    def as_dict(self) -> dict:
        return {
            "membership_tests": self.membership_tests,
            "accumulations": self.accumulations,
            "similarity_terms": self.similarity_terms,
            "score_terms": self.score_terms,
            "total": self.total,
        }


@dataclass(frozen=True)
class PaadMatrix:
    mu: np.ndarray
    counts: np.ndarray

    @property
    def empty_flags(self) -> np.ndarray:
        return self.counts == 0

    @property
    def K(self) -> int:
        return self.mu.shape[0]

    @property
    def q(self) -> int:
        return self.mu.shape[1]


@dataclass(frozen=True)
class SimilarityMatrix:
    S: np.ndarray
    C: float
    q: int = 1

    @property
    def S_bar(self) -> np.ndarray:
        return self.S / (math.sqrt(self.q) * 2.0 * self.C)


@dataclass(frozen=True)
class ScoreVector:
    h: np.ndarray
    delta: Optional[float] = None
    anomalies: tuple[int, ...] = ()

    @property
    def T(self) -> int:
        return len(self.anomalies)


def paad(window: Sequence[float], bounds: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """PAAD row of one subsequence: subsection means and member counts.

    Empty subsections get mean 0 (their count of 0 marks them as empty).
    """
    q = len(bounds) - 1
    sums = [0.0] * q
    counts = [0] * q
    for x in window:
        t = assign_subsection(float(x), bounds)
        sums[t - 1] += float(x)
        counts[t - 1] += 1
    mu = np.array([s / c if c else 0.0 for s, c in zip(sums, counts)])
    return mu, np.array(counts, dtype=np.int64)


def paad_matrix(windows: np.ndarray, plan: SubsectionPlan,
                counter: Optional[OpCounter] = None) -> PaadMatrix:
    mu, counts = kernels.paad_kernel(windows, plan.bounds)
    if counter is not None:
        K, n = windows.shape
        counter.membership_tests += K * n * plan.q
        counter.accumulations += K * n
    return PaadMatrix(mu=mu, counts=counts)


def similarity(mu_i: Sequence[float], mu_k: Sequence[float]) -> float:
    if len(mu_i) != len(mu_k):
        raise ValueError(f"PAAD vectors differ in length: {len(mu_i)} vs {len(mu_k)}")
    acc = 0.0
    for a, b in zip(mu_i, mu_k):
        d = float(a) - float(b)
        acc += d * d
    return math.sqrt(acc)


def similarity_matrix(pm: PaadMatrix, C: float = 1.0,
                      counter: Optional[OpCounter] = None) -> SimilarityMatrix:
    S = kernels.similarity_kernel(pm.mu)
    if counter is not None:
        counter.similarity_terms += pm.K * pm.K * pm.q
    return SimilarityMatrix(S=S, C=C, q=pm.q)


def anomaly_scores(sim, counter: Optional[OpCounter] = None) -> ScoreVector:
    """Scores ``h_i = (row mean of S) / (global mean of S)``; they average to 1."""
    S = sim.S if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=np.float64)
    K = S.shape[0]
    if K < 2:
        raise ValueError("anomaly scores need at least two subsequences")
    try:
        h = kernels.scores_kernel(S)
    except ZeroDivisionError as exc:
        raise UndefinedScoresError(str(exc)) from None
    if counter is not None:
        counter.score_terms += K * K
    return ScoreVector(h=h)


def detect(scores: ScoreVector, delta: float) -> ScoreVector:
    """Mark subsequences with ``h_i >= delta``; indices are 1-based."""
    hits = tuple(int(i) + 1 for i in np.flatnonzero(scores.h >= delta))
    return ScoreVector(h=scores.h, delta=delta, anomalies=hits)


@dataclass
class ClassicalResult:
    windows: np.ndarray
    plan: SubsectionPlan
    paad: PaadMatrix
    similarity: SimilarityMatrix
    scores: ScoreVector
    C: float
    ops: OpCounter = field(default_factory=OpCounter)

    @property
    def h(self) -> np.ndarray:
        return self.scores.h


def run_classical(ts: TimeSeries, n: int, q: int, delta: float = 1.0,
                  step: int = 1) -> ClassicalResult:
    plan = WindowPlan.for_series(ts, n, step)
    windows = subsequences(ts, plan)
    sub = plan_subsections(windows, q)
    ops = OpCounter()
    pm = paad_matrix(windows, sub, ops)
    C = float(np.max(np.abs(windows)))
    sim = similarity_matrix(pm, C, ops)
    scores = detect(anomaly_scores(sim, ops), delta)
    return ClassicalResult(windows=windows, plan=sub, paad=pm, similarity=sim,
                           scores=scores, C=C, ops=ops)
