"""Simulated quantum ADPAAD pipeline.

Stages:

1. PAAD state ``K^-1/2 sum_i |i> q^-1/2 sum_t |t> |mu_i^t>``: QRAM loads,
   membership test, amplitude amplification, rotation, amplitude estimation
   and the sine gate.
2. Similarity state over ``|i>|k>`` holding ``S_bar(X_i, X_k)``.
3. Score state over ``|i>`` holding ``h_i``, from two inner-product
   estimates (row means and the global mean).
4. Grover search for ``h_i >= delta``.

Oracle accounting. The simulator evaluates each stage once, but the circuit
it models re-runs earlier stages inside amplitude estimation. The counters
record what the circuit would issue. One forward pass of the stage-1
preparation ``A1`` makes one ``O_X`` call and two ``O_s`` calls (load and
unload of the bounds). ``l`` amplification rounds make
``A1 = (2l + 1)`` passes. Estimation with ``m`` qubits costs
``2 (2**m - 1)`` further applications of the prepared unitary, so a stage
total is ``(2**(m+1) - 1)`` times its preparation. Stage 2 prepares two
copies of stage 1, stage 3 prepares stage 2, and each Grover query computes
and uncomputes stage 3.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import qarith, qprimitives as qp, statevector as sv
from .analysis import ErrorBudget, all_checks, e_assumption_holds, estimate_E
from .classical_adpaad import ClassicalResult, run_classical
from .kernels import BACKEND
from .qarith import FixedPointFormat
from .timeseries import TimeSeries

POSTSELECT = "postselect"
APPENDIX = "appendix"
MODES = ("classical", "quantum", "compare")


class PipelineError(RuntimeError):
    pass


class OracleReuseError(sv.IrreversibleMapError):
    pass


@dataclass
class OracleCounters:
    steps: dict[str, dict[str, int]] = field(default_factory=dict)

    def charge(self, step: str, ox: int = 0, os: int = 0) -> None:
        if ox < 0 or os < 0:
            raise ValueError("oracle counters are monotone")
        entry = self.steps.setdefault(step, {"ox": 0, "os": 0})
        entry["ox"] += int(ox)
        entry["os"] += int(os)

    def charge_passes(self, step: str, passes: int, unit: "OracleCounters") -> None:
        self.charge(step, passes * unit.ox_calls, passes * unit.os_calls)

    @property
    def ox_calls(self) -> int:
        return sum(v["ox"] for v in self.steps.values())

    @property
    def os_calls(self) -> int:
        return sum(v["os"] for v in self.steps.values())

    def step_total(self, stage: str, kind: str = "ox", upto: Optional[str] = None) -> int:
        total = 0
        for key, v in self.steps.items():
            if key.split(".")[0] != stage:
                continue
            if upto is not None and _step_key(key) > _step_key(upto):
                continue
            total += v[kind]
        return total

    def stage_unit(self, stage: str) -> "OracleCounters":
        unit = OracleCounters()
        unit.charge(stage, self.step_total(stage, "ox"), self.step_total(stage, "os"))
        return unit

    def as_dict(self) -> dict:
        steps = {k: dict(self.steps[k]) for k in sorted(self.steps, key=_step_key)}
        return {"ox_calls": self.ox_calls, "os_calls": self.os_calls, "steps": steps,
                "stages": {s: {"ox": self.step_total(s, "ox"), "os": self.step_total(s, "os")}
                           for s in ("1", "2", "3", "4")}}


def _step_key(key: str) -> tuple[int, ...]:
    return tuple(int(p) for p in key.split("."))


@dataclass(frozen=True)
class PipelineConfig:
    n: int
    q: int = 4
    step: int = 1
    delta: float = 1.0
    mode: str = "compare"
    aa_mode: str = POSTSELECT
    aa_iterations: Optional[int] = None
    membership: str = qarith.HALF_OPEN
    m: Optional[int] = None
    precision: str = "uniform"
    epsilon: float = 0.1
    ae_mode: str = qp.DETERMINISTIC
    fmt: FixedPointFormat = FixedPointFormat()
    search: str = qp.UNKNOWN_T
    seed: int = 42
    qubit_cap: int = sv.DEFAULT_QUBIT_CAP

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.aa_mode not in (POSTSELECT, APPENDIX):
            raise ValueError(f"aa_mode must be postselect or appendix, got {self.aa_mode!r}")
        if self.membership not in qarith.MEMBERSHIP_MODES:
            raise ValueError(f"unknown membership mode {self.membership!r}")
        if self.ae_mode not in qp.AE_MODES:
            raise ValueError(f"unknown AE mode {self.ae_mode!r}")
        if self.precision not in ("uniform", "per_stage"):
            raise ValueError(f"precision must be uniform or per_stage, got {self.precision!r}")
        if self.search not in (qp.KNOWN_T, qp.UNKNOWN_T):
            raise ValueError(f"unknown search strategy {self.search!r}")
        if self.n < 1 or self.q < 1 or self.step < 1:
            raise ValueError("window, subsections and stride must be positive")
        if self.q > self.n:
            raise ValueError(f"subsections q={self.q} exceed window n={self.n}")
        if self.m is not None and self.m < 1:
            raise ValueError("precision qubits must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.aa_iterations is not None and self.aa_iterations < 0:
            raise ValueError("aa_iterations must be nonnegative")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["fmt"] = asdict(self.fmt)
        return d


def postselect_iterations(n: int) -> int:
    """Amplification rounds that lift the sparsest nonempty subsection (1 of ``n``)."""
    if n <= 1:
        return 0
    theta = math.asin(1.0 / math.sqrt(n))
    return int(math.floor(math.pi / (4 * theta)))


@dataclass
class PaadStage:
    state: sv.HybridState
    branch_prob: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray
    readout: np.ndarray
    mu_hat: np.ndarray
    p_branch: np.ndarray
    ell: int


@dataclass
class SimilarityStage:
    state: sv.HybridState
    sbar_sq: np.ndarray
    alpha: np.ndarray
    alpha_hat: np.ndarray
    sbar_hat: np.ndarray


@dataclass
class ScoreStage:
    state: sv.HybridState
    row_hat: np.ndarray
    global_hat: float
    row_exact: np.ndarray
    global_exact: float
    h_hat: np.ndarray


@dataclass
class AnomalyReport:
    config: PipelineConfig
    digest: str
    K: int
    C: float
    shift: float = 0.0
    classical: Optional[ClassicalResult] = None
    paad: Optional[PaadStage] = None
    similarity: Optional[SimilarityStage] = None
    scores: Optional[ScoreStage] = None
    detected_quantum: Optional[tuple[int, ...]] = None
    search: Optional[qp.GroverResult] = None
    budget: Optional[ErrorBudget] = None
    E: float = 0.0
    E_fraction: float = 0.0
    E_assumption: bool = False
    m: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)
    counters: OracleCounters = field(default_factory=OracleCounters)
    wall_time: float = 0.0

    # Views used by the bound checks.
    @property
    def epsilon(self) -> float:
        return self.config.epsilon

    @property
    def ulp(self) -> float:
        return self.config.fmt.resolution

    @property
    def mu_hat(self) -> np.ndarray:
        return self.paad.mu_hat

    @property
    def appendix_uniform(self) -> bool:
        return self.config.aa_mode != APPENDIX or bool(np.ptp(self.paad.p_branch) < 1e-12)

    @property
    def mu_exact(self) -> np.ndarray:
        """Quantity stage 1 estimates: ``mu``, or ``p * mu`` under amplification."""
        mu = self.classical.paad.mu
        if self.config.aa_mode == APPENDIX:
            return self.paad.p_branch * mu
        return mu

    @property
    def sbar_hat(self) -> np.ndarray:
        return self.similarity.sbar_hat

    @property
    def sbar_exact(self) -> np.ndarray:
        if self.config.aa_mode == APPENDIX:
            mu = self.mu_exact
            d = mu[:, None, :] - mu[None, :, :]
            return np.sqrt(np.sum(d * d, axis=2)) / (2 * self.C * math.sqrt(self.config.q))
        return self.classical.similarity.S_bar

    @property
    def h_hat(self) -> np.ndarray:
        return self.scores.h_hat

    @property
    def h_exact(self) -> np.ndarray:
        return self.classical.h

    @property
    def detected_classical(self) -> Optional[tuple[int, ...]]:
        return None if self.classical is None else self.classical.scores.anomalies

    @property
    def sets_equal(self) -> Optional[bool]:
        if self.classical is None or self.detected_quantum is None:
            return None
        return tuple(self.detected_classical) == tuple(self.detected_quantum)

    def checks(self):
        if self.classical is None or self.scores is None:
            return []
        checks = all_checks(self)
        if not self.appendix_uniform:
            # non-uniform amplification does not cancel in h; report only
            checks[-1].informational = True
        return checks

    def failed_checks(self):
        return [c for c in self.checks() if not c.passed and not c.informational]

    def to_json(self, include_time: bool = True) -> dict:
        out: dict = {
            "input_digest": self.digest,
            "config": self.config.as_dict(),
            "kernel_backend": BACKEND,
            "K": self.K,
            "C": self.C,
            "shift": self.shift,
            "E": self.E,
            "E_fraction_at_or_above": self.E_fraction,
            "E_assumption_holds": self.E_assumption,
        }
        if self.budget is not None:
            out["budget"] = {**self.budget.as_dict(), "m_used": self.m, "eps_used": self.eps}
        elif self.m:
            out["budget"] = {"epsilon": self.config.epsilon, "m_used": self.m, "eps_used": self.eps}
        subs = []
        for i in range(self.K):
            rec: dict = {"index": i + 1}
            if self.classical is not None:
                rec["h_classical"] = float(self.classical.h[i])
            if self.scores is not None:
                rec["h_quantum"] = float(self.scores.h_hat[i])
            if self.classical is not None and self.scores is not None:
                rec["abs_diff"] = abs(rec["h_classical"] - rec["h_quantum"])
            subs.append(rec)
        out["subsequences"] = subs
        out["detected"] = {
            "classical": None if self.classical is None else list(self.detected_classical),
            "quantum": None if self.detected_quantum is None else list(self.detected_quantum),
            "sets_equal": self.sets_equal,
        }
        if self.classical is not None:
            out["classical_ops"] = self.classical.ops.as_dict()
        if self.scores is not None:
            out["counters"] = self.counters.as_dict()
            out["search"] = asdict(self.search) if self.search is not None else None
            out["bound_checks"] = [c.as_dict() for c in self.checks()]
            if self.paad is not None:
                out["aa"] = {"mode": self.config.aa_mode, "iterations": self.paad.ell,
                             "p_branch_min": float(self.paad.p_branch.min()),
                             "p_branch_max": float(self.paad.p_branch.max())}
                if self.classical is not None and self.config.aa_mode == APPENDIX:
                    out["aa"]["p_uniform"] = self.appendix_uniform
                    out["aa"]["h_deviation_from_classical"] = float(
                        np.max(np.abs(self.scores.h_hat - self.classical.h)))
        if include_time:
            out["wall_time_s"] = self.wall_time
        return out

    def dumps(self, include_time: bool = True) -> str:
        return json.dumps(self.to_json(include_time), indent=2, sort_keys=True)


def series_digest(ts: TimeSeries) -> str:
    return hashlib.sha256(np.asarray(ts.samples, dtype="<f8").tobytes()).hexdigest()


class QuantumADPAAD:
    """Stage-by-stage simulation of the quantum pipeline on one series."""

    def __init__(self, ts: TimeSeries, config: PipelineConfig,
                 classical: Optional[ClassicalResult] = None):
        self.config = config
        self.classical = classical or run_classical(ts, config.n, config.q, config.delta, config.step)
        windows = self.classical.windows
        if np.min(windows) < 0:
            raise PipelineError("quantum pipeline needs nonnegative data; shift the series first")
        self.C = float(np.max(np.abs(windows)))
        if self.C == 0:
            raise PipelineError("all samples are zero (C = 0)")
        fmt = config.fmt
        self.K, self.n = windows.shape
        self.q = config.q
        self.x_data = fmt.quantize(windows)
        self.bounds = fmt.quantize(self.classical.plan.bounds)
        self.counters = OracleCounters()
        self.rng = np.random.default_rng(config.seed)

        self.E, self.E_fraction = estimate_E(self.classical.paad.mu, self.C)
        self.E_assumption = e_assumption_holds(self.classical.paad.mu, self.C, self.E)
        self.budget = ErrorBudget.allocate(config.epsilon, self.E) if self.E > 0 else None
        self.m, self.eps = self._resolve_precision()
        self._stage_units: dict[str, OracleCounters] = {}

    def _resolve_precision(self):
        cfg = self.config
        stages = ("mu", "similarity", "row_mean", "global_mean")
        if cfg.m is not None:
            m = {s: cfg.m for s in stages}
        elif self.budget is None:
            raise PipelineError("E = 0: no budget can be allocated; pass an explicit precision")
        elif cfg.precision == "uniform":
            m = {s: self.budget.m_uniform for s in stages}
        else:
            m = dict(self.budget.m_required)
        if cfg.m is None and cfg.precision == "uniform":
            eps = dict(self.budget.stage_eps)
        elif cfg.m is None:
            eps = dict(self.budget.stage_eps)
        else:
            eps = {s: math.pi / 2 ** m[s] for s in stages}
        return m, eps

    # -- QRAM oracles -------------------------------------------------------
    def oracle_x(self, state: sv.HybridState, step: str = "1.3", uncompute: bool = False):
        if uncompute:
            sv.uncompute(state, "x")
        else:
            if "x" in state.annotations:
                raise OracleReuseError("O_X target register already loaded")
            sv.apply_basis_map(state, writes={"x": (("i", "j"), self.x_data)})
        self.counters.charge(step, ox=1)
        return state

    def oracle_s(self, state: sv.HybridState, step: str = "1.3", uncompute: bool = False):
        if uncompute:
            sv.uncompute(state, "a_hi")
            sv.uncompute(state, "a_lo")
        else:
            if "a_lo" in state.annotations or "a_hi" in state.annotations:
                raise OracleReuseError("O_s target registers already loaded")
            sv.apply_basis_map(state, writes={"a_hi": (("i", "t"), self.bounds[:, 1:]),
                                              "a_lo": (("i", "t"), self.bounds[:, :-1])})
        self.counters.charge(step, os=1)
        return state

    # -- stage 1 ------------------------------------------------------------
    def _layout(self, dims) -> sv.RegisterLayout:
        return sv.RegisterLayout.from_dims(dims, cap=self.config.qubit_cap)

    def membership_state(self) -> sv.HybridState:
        """Steps 1.1-1.4: indices in superposition, data loaded, membership flagged."""
        cfg = self.config
        K, q, n = self.K, self.q, self.n
        state = sv.init(self._layout([("i", K), ("t", q), ("j", n), ("member", 2), ("rot", 2)]))
        sv.hadamard_uniform(state, "i", K)
        sv.hadamard_uniform(state, "t", q)
        sv.hadamard_uniform(state, "j", n)
        self.oracle_x(state, "1.3")
        self.oracle_s(state, "1.3")
        x, lo, hi = state.value("x"), state.value("a_lo"), state.value("a_hi")
        sv.apply_basis_map(state, writes={"rho": (("i", "t", "j"),
                                                  _rho_table(self.x_data, self.bounds, cfg.fmt))})
        if cfg.membership == qarith.PAPER_LITERAL:
            pred = lambda s: s.value("rho") <= 0
        else:
            last = state.index("t") == q - 1
            flags = qarith.member_flags(x, lo, hi, last, qarith.HALF_OPEN, cfg.fmt)
            pred = lambda s, f=flags: f
        sv.apply_basis_map(state, flips={"member": pred})
        self.oracle_s(state, "1.4", uncompute=True)
        return state

    def prepare_paad_state(self) -> PaadStage:
        cfg = self.config
        K, q, n = self.K, self.q, self.n
        state = self.membership_state()
        unit = OracleCounters()
        unit.charge("1", ox=1, os=2)
        member = lambda s: s.index("member") == 1

        if cfg.aa_mode == POSTSELECT:
            ell = postselect_iterations(n)
            before = sv.branch_probabilities(state, ("i", "t"))
            sv.postselect(state, member, branch=("i", "t"))
            p_branch = np.ones((K, q))
            p_branch[(sv.branch_probabilities(state, ("i", "t"))[:K, :q] == 0)
                     | (before[:K, :q] == 0)] = 0.0
        else:
            ell = postselect_iterations(n) if cfg.aa_iterations is None else cfg.aa_iterations
            qp.amplitude_amplify(state, member, ell, branch=("i", "t"))
            p_branch = sv.conditional_probability(state, member, ("i", "t"))[:K, :q]
        self.counters.charge_passes("1.5", 2 * ell, unit)
        a1 = OracleCounters()
        a1.charge("1", (2 * ell + 1) * unit.ox_calls, (2 * ell + 1) * unit.os_calls)

        if cfg.aa_mode == APPENDIX:
            sv.apply_basis_map(state, flips={"rot": lambda s: s.index("member") == 0})
            sv.controlled_rotation(state, "x", self.C, "rot", where=member)
        else:
            sv.controlled_rotation(state, "x", self.C, "rot")
        sv.uncompute(state, "rho")
        sv.uncompute(state, "x")

        branch_prob = sv.conditional_probability(state, lambda s: s.index("rot") == 0,
                                                 ("i", "t"))[:K, :q]
        m1 = self.m["mu"]
        theta, theta_hat, readout = qp.estimate_angles(branch_prob, m1, cfg.ae_mode, self.rng)
        self.counters.charge_passes("1.7", 2 * (2 ** m1 - 1), a1)
        mu_hat = np.asarray(qarith.sine_square_scale(readout, self.C, cfg.fmt))

        out = sv.init(self._layout([("i", K), ("t", q)]))
        sv.hadamard_uniform(out, "i", K)
        sv.hadamard_uniform(out, "t", q)
        sv.apply_basis_map(out, writes={"mu": (("i", "t"), mu_hat)})
        self._stage_units["1"] = self.counters.stage_unit("1")
        return PaadStage(out, branch_prob, theta, theta_hat, readout, mu_hat, p_branch, ell)

    # -- stage 2 ------------------------------------------------------------
    def similarity_state(self, paad: PaadStage) -> SimilarityStage:
        cfg = self.config
        K, q = self.K, self.q
        state = sv.init(self._layout([("i", K), ("k", K), ("t", q), ("flag", 2)]))
        for reg, size in (("i", K), ("k", K), ("t", q)):
            sv.hadamard_uniform(state, reg, size)
        sv.apply_basis_map(state, writes={"mu_i": (("i", "t"), paad.mu_hat),
                                          "mu_k": (("k", "t"), paad.mu_hat)})
        self.counters.charge_passes("2.1", 2, self._stage_units["1"])
        a2 = OracleCounters()
        a2.charge("2", 2 * self._stage_units["1"].ox_calls, 2 * self._stage_units["1"].os_calls)
        diff = qarith.subtract(state.annotations["mu_i"].values[:, None, :],
                               state.annotations["mu_k"].values[None, :, :], cfg.fmt)
        sv.apply_basis_map(state, writes={"diff": (("i", "k", "t"), diff)})
        sv.uncompute(state, "mu_i")
        sv.uncompute(state, "mu_k")
        sv.controlled_rotation(state, "diff", self.C, "flag", signed=True)
        sbar_sq = sv.conditional_probability(state, lambda s: s.index("flag") == 0,
                                             ("i", "k"))[:K, :K]
        m2 = self.m["similarity"]
        alpha, alpha_hat, readout = qp.estimate_angles(sbar_sq, m2, cfg.ae_mode, self.rng)
        self.counters.charge_passes("2.4", 2 * (2 ** m2 - 1), a2)
        sbar_hat = np.asarray(qarith.sine_scale(readout, cfg.fmt))

        out = sv.init(self._layout([("i", K), ("k", K)]))
        sv.hadamard_uniform(out, "i", K)
        sv.hadamard_uniform(out, "k", K)
        sv.apply_basis_map(out, writes={"sbar": (("i", "k"), sbar_hat)})
        self._stage_units["2"] = self.counters.stage_unit("2")
        return SimilarityStage(out, sbar_sq, alpha, alpha_hat, sbar_hat)

    # -- stage 3 ------------------------------------------------------------
    def _xi(self, sbar_hat: np.ndarray) -> np.ndarray:
        return np.clip(sbar_hat, 0.0, 1.0)

    def row_mean_state(self, sim: SimilarityStage) -> sv.HybridState:
        """Steps 3.1-3.2: ``|i> (|0>|phi_i> + |1>|rho>)/sqrt 2``."""
        K = self.K
        state = sv.init(self._layout([("i", K), ("sel", 2), ("k", K), ("flag", 2)]))
        sv.hadamard_uniform(state, "i", K)
        sv.hadamard(state, "sel")
        sv.hadamard_uniform(state, "k", K)
        sv.apply_basis_map(state, writes={"sbar": (("i", "k"), sim.sbar_hat)})
        sv.apply_basis_map(state, writes={"xi": (("i", "k"), self._xi(sim.sbar_hat))})
        sv.controlled_rotation(state, "xi", 0.5, "flag", signed=True,
                               where=lambda s: s.index("sel") == 0)
        sv.uncompute(state, "sbar")
        return state

    def global_mean_states(self, sim: SimilarityStage):
        """Steps 3.4-3.6: the two states whose overlap is the global mean."""
        K = self.K
        psi = sv.init(self._layout([("i", K), ("k", K), ("flag", 2)]))
        sv.hadamard_uniform(psi, "i", K)
        sv.hadamard_uniform(psi, "k", K)
        phi = psi.copy()
        sv.apply_basis_map(psi, writes={"xi": (("i", "k"), self._xi(sim.sbar_hat))})
        sv.controlled_rotation(psi, "xi", 0.5, "flag", signed=True)
        return psi, phi

    def score_state(self, sim: SimilarityStage) -> ScoreStage:
        cfg = self.config
        K = self.K
        unit2 = self._stage_units["2"]

        state = self.row_mean_state(sim)
        self.counters.charge_passes("3.1", 1, unit2)
        sv.hadamard(state, "sel")
        p0 = sv.conditional_probability(state, lambda s: s.index("sel") == 0, ("i",))[:K]
        row_exact = 2 * p0 - 1
        m3 = self.m["row_mean"]
        _, theta_hat, _ = qp.estimate_angles(p0, m3, cfg.ae_mode, self.rng)
        row_hat = np.asarray(cfg.fmt.quantize(2 * np.sin(theta_hat) ** 2 - 1))
        self.counters.charge_passes("3.3", 2 * (2 ** m3 - 1), unit2)

        psi, phi = self.global_mean_states(sim)
        self.counters.charge_passes("3.4", 1, unit2)
        global_exact = float(np.vdot(phi.amps, psi.amps).real)
        m4 = self.m["global_mean"]
        global_hat = float(cfg.fmt.quantize(
            qp.inner_product_estimate(psi, phi, m4, cfg.ae_mode, self.rng))) + 0.0
        self.counters.charge_passes("3.7", 2 * (2 ** m4 - 1), unit2)

        if global_hat <= 0:
            raise PipelineError(
                f"estimated global similarity mean is {global_hat}; scores undefined at this precision")
        h_hat = np.asarray(qarith.divide(row_hat, global_hat, cfg.fmt))

        out = sv.init(self._layout([("i", K)]))
        sv.hadamard_uniform(out, "i", K)
        sv.apply_basis_map(out, writes={"h": (("i",), h_hat)})
        self._stage_units["3"] = self.counters.stage_unit("3")
        return ScoreStage(out, row_hat, global_hat, row_exact, global_exact, h_hat)

    # -- stage 4 ------------------------------------------------------------
    def quantum_detect(self, scores: ScoreStage, strategy: Optional[str] = None, rng=None):
        cfg = self.config
        delta = cfg.fmt.quantize(cfg.delta)
        h = scores.state.annotations["h"].values[: self.K]
        marked = lambda i: bool(qarith.compare_ge(h[i - 1], delta))
        res = qp.grover_search(marked, self.K, strategy or cfg.search,
                               rng=self.rng if rng is None else rng)
        self.counters.charge_passes("4", 2 * res.queries, self._stage_units["3"])
        return res

    def run(self) -> AnomalyReport:
        t0 = time.perf_counter()
        paad = self.prepare_paad_state()
        sim = self.similarity_state(paad)
        scores = self.score_state(sim)
        search = self.quantum_detect(scores)
        report = AnomalyReport(
            config=self.config, digest="", K=self.K, C=self.C,
            classical=self.classical if self.config.mode == "compare" else None,
            paad=paad, similarity=sim, scores=scores,
            detected_quantum=search.found, search=search, budget=self.budget,
            E=self.E, E_fraction=self.E_fraction, E_assumption=self.E_assumption,
            m=dict(self.m), eps=dict(self.eps), counters=self.counters)
        report.wall_time = time.perf_counter() - t0
        return report


def _rho_table(x: np.ndarray, bounds: np.ndarray, fmt: FixedPointFormat) -> np.ndarray:
    lo = bounds[:, :-1][:, :, None]
    hi = bounds[:, 1:][:, :, None]
    return np.asarray(qarith.qma_rho(x[:, None, :], lo, hi, fmt))


def run_pipeline(ts: TimeSeries, config: PipelineConfig, shift: float = 0.0) -> AnomalyReport:
    """Run the configured mode and return the full report."""
    t0 = time.perf_counter()
    digest = series_digest(ts)
    classical = run_classical(ts, config.n, config.q, config.delta, config.step)
    if config.mode == "classical":
        C = float(np.max(np.abs(classical.windows)))
        E, frac = estimate_E(classical.paad.mu, C) if classical.paad.K >= 2 else (0.0, 0.0)
        report = AnomalyReport(config=config, digest=digest, K=classical.paad.K, C=C,
                               shift=shift, classical=classical, E=E, E_fraction=frac,
                               E_assumption=e_assumption_holds(classical.paad.mu, C, E))
    else:
        report = QuantumADPAAD(ts, config, classical).run()
        report.digest = digest
        report.shift = shift
        if config.mode == "compare":
            report.classical = classical
    report.wall_time = time.perf_counter() - t0
    return report


def prepare_paad_state(ts: TimeSeries, config: PipelineConfig) -> PaadStage:
    return QuantumADPAAD(ts, config).prepare_paad_state()


def appendix_mode_run(ts: TimeSeries, config: PipelineConfig) -> AnomalyReport:
    """Run with ``aa_mode=appendix``; the report carries the score deviation
    from the classical oracle and whether branch probabilities were uniform."""
    return run_pipeline(ts, replace(config, aa_mode=APPENDIX, mode="compare"))
