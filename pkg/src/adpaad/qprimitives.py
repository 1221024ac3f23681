"""Amplitude amplification and estimation, inner-product estimation, Grover search.

Amplitude estimation runs on the two-dimensional invariant plane of the
Grover operator ``Q = -A S0 A^dagger S_chi``. Starting from
``sin(theta)|good> + cos(theta)|bad>``, ``Q`` rotates by ``2 theta`` and has
eigenphases ``+-2 theta``. Phase estimation with ``m`` ancillas therefore
reads out ``theta/pi`` or ``1 - theta/pi`` with the Fejer-kernel outcome law,
which is evaluated in closed form here instead of materialising ``2**m``
ancilla amplitudes for every branch. :func:`phase_estimation_circuit` does the
explicit version for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import statevector as sv

DETERMINISTIC = "deterministic"
SAMPLED = "sampled"
AE_MODES = (DETERMINISTIC, SAMPLED)

KNOWN_T = "known_T"
UNKNOWN_T = "unknown_T"


def rotation_angle(prob) -> np.ndarray:
    """``theta`` with ``sin^2(theta) = prob``."""
    p = np.clip(np.asarray(prob, dtype=np.float64), 0.0, 1.0)
    return np.arcsin(np.sqrt(p))


@dataclass(frozen=True)
class GroverOperator:
    theta: float
    ell: int = 0

    def matrix(self) -> np.ndarray:
        """``Q`` restricted to the plane, basis order (good, bad)."""
        c, s = math.cos(2 * self.theta), math.sin(2 * self.theta)
        return np.array([[c, s], [-s, c]], dtype=np.complex128)

    def initial(self) -> np.ndarray:
        return np.array([math.sin(self.theta), math.cos(self.theta)], dtype=np.complex128)

    def good_amplitude(self) -> float:
        return math.sin((2 * self.ell + 1) * self.theta)

    def eigenphases(self) -> np.ndarray:
        return np.sort(np.angle(np.linalg.eigvals(self.matrix())))


@dataclass(frozen=True)
class AmplitudeEstimate:
    theta: float
    theta_hat: float
    readout: float
    m: int
    mode: str

    @property
    def epsilon1(self) -> float:
        return math.pi / 2 ** self.m

    @property
    def prob_hat(self) -> float:
        return math.sin(self.theta_hat) ** 2


def amplitude_amplify(state: sv.HybridState, good, ell: int, branch: Sequence[str]) -> sv.HybridState:
    """Apply ``ell`` Grover iterations independently inside every branch.

    Each branch's normalised initial vector ``psi_b`` defines the reflection
    ``2|psi_b><psi_b| - I``; ``good`` marks the states that ``S_chi`` flips.
    Branches with no weight are left alone.
    """
    if ell < 0:
        raise ValueError("iteration count must be nonnegative")
    if ell == 0:
        return state
    branch = tuple(branch)
    axes = [state.axis(r) for r in branch]
    rest = [a for a in range(state.amps.ndim) if a not in axes]
    perm = axes + rest
    shape = state.amps.shape
    tensor = np.transpose(state.amps, perm)
    nb = int(np.prod([shape[a] for a in axes]))
    v = tensor.reshape(nb, -1).copy()
    mask = np.transpose(np.broadcast_to(good(state), shape), perm).reshape(nb, -1)
    norms = np.linalg.norm(v, axis=1)
    live = norms > 0
    psi = np.zeros_like(v)
    psi[live] = v[live] / norms[live, None]
    for _ in range(ell):
        v = np.where(mask, -v, v)
        overlap = np.einsum("bd,bd->b", psi.conj(), v)
        v = 2 * psi * overlap[:, None] - v
    out = v.reshape(tensor.shape)
    state.amps = np.transpose(out, np.argsort(perm))
    return state


def fejer(delta, M: int) -> np.ndarray:
    """``|M^-1 sum_k exp(2 pi i k delta)|^2``, the phase-estimation kernel."""
    d = np.mod(np.asarray(delta, dtype=np.float64), 1.0)
    s = np.sin(math.pi * d)
    num = np.sin(math.pi * M * d)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (num * num) / (M * M * s * s)
    return np.where(np.abs(s) < 1e-15, 1.0, val)


def ae_distribution(theta: float, m: int) -> np.ndarray:
    """Exact law of the ``m``-bit readout ``y`` when estimating ``theta``."""
    M = 1 << m
    y = np.arange(M) / M
    f = theta / math.pi
    p = 0.5 * (fejer(f - y, M) + fejer(-f - y, M))
    return p / p.sum()


def fold_readout(y, m: int) -> np.ndarray:
    """Map readout ``y`` to ``theta_hat/pi`` in ``[0, 1/2]`` (both branches agree)."""
    M = 1 << m
    y = np.asarray(y)
    return np.minimum(y, M - y) / M


def estimate_angles(prob, m: int, mode: str = DETERMINISTIC, rng=None):
    """Amplitude estimation for an array of branch probabilities.

    Returns ``(theta, theta_hat, readout)`` arrays, where ``readout`` is the
    raw register value ``y / 2**m`` (``theta/pi`` or ``1 - theta/pi``).
    """
    if m < 1:
        raise ValueError("need at least one precision qubit")
    theta = rotation_angle(prob)
    M = 1 << m
    if mode == DETERMINISTIC:
        y = np.rint(theta / math.pi * M).astype(np.int64)
    elif mode == SAMPLED:
        rng = np.random.default_rng(rng)
        flat = np.atleast_1d(theta).ravel()
        ys = np.empty(flat.size, dtype=np.int64)
        # one draw of the right size per distinct angle, in sorted-angle order
        uniq, inverse = np.unique(flat, return_inverse=True)
        for u, th in enumerate(uniq):
            where = np.flatnonzero(inverse == u)
            ys[where] = rng.choice(M, size=where.size, p=ae_distribution(float(th), m))
        y = ys.reshape(np.shape(theta))
    else:
        raise ValueError(f"unknown AE mode {mode!r}; expected one of {AE_MODES}")
    theta_hat = math.pi * fold_readout(y, m)
    readout = np.mod(y, M) / M
    return theta, theta_hat, readout


def amplitude_estimate(prob: float, m: int, mode: str = DETERMINISTIC, rng=None) -> AmplitudeEstimate:
    theta, theta_hat, readout = estimate_angles(prob, m, mode, rng)
    return AmplitudeEstimate(float(theta), float(theta_hat), float(readout), m, mode)


def phase_estimation_circuit(U: np.ndarray, psi: np.ndarray, m: int) -> np.ndarray:
    """Textbook phase estimation with an explicit ``2**m``-dim ancilla register.

    Returns the outcome distribution of the ancilla readout.
    """
    M = 1 << m
    d = psi.shape[0]
    joint = np.empty((M, d), dtype=np.complex128)
    cur = psi.astype(np.complex128)
    for c in range(M):
        joint[c] = cur
        cur = U @ cur
    joint /= math.sqrt(M)
    out = np.fft.fft(joint, axis=0) / math.sqrt(M)
    probs = np.sum(np.abs(out) ** 2, axis=1)
    return probs / probs.sum()


def selector_success(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Probability of reading the selector as 0 after ``(|0>|A> + |1>|B>)/sqrt 2`` and H.

    ``A`` and ``B`` are stacks of normalised vectors along the last axis.
    """
    plus = (A + B) / 2.0
    return np.sum(np.abs(plus) ** 2, axis=-1)


def overlap_estimates(A: np.ndarray, B: np.ndarray, m: int, mode: str = DETERMINISTIC, rng=None):
    """Estimate ``Re <A_b|B_b>`` for a stack of state pairs.

    Success probability ``(1 + Re<A|B>)/2`` is amplitude-estimated and mapped
    back; the additive error is at most ``pi / 2**m``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
    B = np.broadcast_to(np.asarray(B, dtype=np.complex128), A.shape)
    p0 = selector_success(A, B)
    _, theta_hat, _ = estimate_angles(p0, m, mode, rng)
    return 2.0 * np.sin(theta_hat) ** 2 - 1.0


def _as_vector(recipe) -> np.ndarray:
    obj = recipe() if callable(recipe) else recipe
    if isinstance(obj, sv.HybridState):
        return obj.amps.ravel()
    return np.asarray(obj, dtype=np.complex128).ravel()


def inner_product_estimate(prepA, prepB, m: int, mode: str = DETERMINISTIC, rng=None) -> float:
    """Estimate ``<A|B>`` for two normalised states on the same layout.

    ``prepA``/``prepB`` are states, amplitude arrays, or zero-argument
    callables returning either.
    """
    a = _as_vector(prepA)
    b = _as_vector(prepB)
    if a.shape != b.shape:
        raise ValueError("states live on different layouts")
    for name, vec in (("A", a), ("B", b)):
        if abs(np.vdot(vec, vec).real - 1.0) > 1e-9:
            raise ValueError(f"state {name} is not normalised")
    return float(overlap_estimates(a[None, :], b[None, :], m, mode, rng)[0])


@dataclass
class GroverResult:
    found: tuple[int, ...]
    iterations: int
    queries: int
    rounds: int
    strategy: str


def _marked_mask(marked, K: int) -> np.ndarray:
    if callable(marked):
        return np.array([bool(marked(i)) for i in range(1, K + 1)])
    mask = np.asarray(marked, dtype=bool)
    if mask.shape != (K,):
        raise ValueError(f"marking has shape {mask.shape}, expected ({K},)")
    return mask


def _grover_round(mask: np.ndarray, active: np.ndarray, iterations: int, rng) -> int:
    """Prepare uniform superposition over ``active``, iterate, measure. Returns 0-based index."""
    K = mask.size
    layout = sv.RegisterLayout.from_dims({"i": K})
    state = sv.init(layout)
    state.amps[:] = 0
    psi = np.zeros(state.amps.shape, dtype=np.complex128)
    psi[:K][active] = 1.0
    psi /= np.linalg.norm(psi)
    good = np.zeros(psi.shape, dtype=bool)
    good[:K] = mask & active
    v = psi.copy()
    for _ in range(iterations):
        v = np.where(good, -v, v)
        v = 2 * psi * np.vdot(psi, v) - v
    state.amps = v
    return sv.measure(state, "i", rng)


def grover_search(marked: Union[Callable[[int], bool], Sequence[bool]], K: int,
                  strategy: str = UNKNOWN_T, rng=None, T: Optional[int] = None,
                  patience: int = 24, max_rounds: Optional[int] = None) -> GroverResult:
    """Find every index ``i`` in ``1..K`` with ``marked(i)``.

    ``known_T`` runs the optimal iteration count for the remaining number of
    marked items; ``unknown_T`` uses the exponentially growing random
    schedule (growth factor 6/5) and stops after ``patience`` consecutive
    failures once the schedule has reached its cap. Found items are removed
    from the search space, and every measured candidate is re-checked.
    """
    rng = np.random.default_rng(rng)
    mask = _marked_mask(marked, K)
    active = np.ones(K, dtype=bool)
    found: list[int] = []
    iterations = queries = rounds = 0
    max_rounds = max_rounds if max_rounds is not None else 200 * K + 100

    if strategy == KNOWN_T:
        T = int(mask.sum()) if T is None else T
        while len(found) < T and rounds < max_rounds:
            N = int(active.sum())
            M = T - len(found)
            theta = math.asin(math.sqrt(min(1.0, M / N)))
            ell = int(math.floor(math.pi / (4 * theta)))
            idx = _grover_round(mask, active, ell, rng)
            rounds += 1
            iterations += ell
            queries += ell + 1
            if idx < K and active[idx] and mask[idx]:
                found.append(idx + 1)
                active[idx] = False
    elif strategy == UNKNOWN_T:
        lam = 6 / 5
        scale = 1.0
        misses_at_cap = 0
        while active.any() and rounds < max_rounds:
            N = int(active.sum())
            cap = math.sqrt(N)
            ell = int(rng.integers(0, max(1, int(scale))))
            idx = _grover_round(mask, active, ell, rng)
            rounds += 1
            iterations += ell
            queries += ell + 1
            if idx < K and active[idx] and mask[idx]:
                found.append(idx + 1)
                active[idx] = False
                scale = 1.0
                misses_at_cap = 0
                continue
            if scale >= cap:
                misses_at_cap += 1
                if misses_at_cap >= patience:
                    break
            scale = min(lam * scale, cap) if scale < cap else scale
    else:
        raise ValueError(f"unknown search strategy {strategy!r}")

    for i in found:
        if not mask[i - 1]:
            raise AssertionError(f"verification failed for index {i}")
    return GroverResult(tuple(sorted(found)), iterations, queries, rounds, strategy)
