"""Hybrid statevector: complex amplitudes plus basis-valued data annotations.

Index, flag and precision registers carry genuine amplitudes. Data registers
(samples, bounds, products, means, similarities, scores) never sit in a
superposition of values for a fixed index path, so each one is stored as a
classical array over the index registers it depends on. An annotation over
registers ``("i", "t")`` is an array of shape ``(2**w_i, 2**w_t)``.

Predicates passed to :func:`probability_of`, :func:`postselect` and the flag
flips of :func:`apply_basis_map` are callables ``pred(state) -> bool array``
built from :meth:`HybridState.index` and :meth:`HybridState.value`; the
result must broadcast against the amplitude tensor.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

DEFAULT_QUBIT_CAP = 26


class QubitCapExceeded(MemoryError):
    pass


class IrreversibleMapError(ValueError):
    pass


def width_for(dim: int) -> int:
    """Qubits needed to index ``dim`` values (0 for a trivial dimension)."""
    if dim < 1:
        raise ValueError(f"register dimension must be >= 1, got {dim}")
    return (dim - 1).bit_length()


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]
    cap: int = DEFAULT_QUBIT_CAP

    @classmethod
    def from_dims(cls, dims: Mapping[str, int] | Sequence[tuple[str, int]],
                  cap: int = DEFAULT_QUBIT_CAP) -> "RegisterLayout":
        items = dims.items() if isinstance(dims, Mapping) else dims
        return cls(tuple((name, width_for(d)) for name, d in items), cap)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.registers)

    @property
    def widths(self) -> dict[str, int]:
        return dict(self.registers)

    @property
    def num_qubits(self) -> int:
        return sum(w for _, w in self.registers)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(1 << w for _, w in self.registers)


@dataclass
class Annotation:
    regs: tuple[str, ...]
    values: np.ndarray


@dataclass
class HybridState:
    layout: RegisterLayout
    amps: np.ndarray
    annotations: dict[str, Annotation] = field(default_factory=dict)

    def axis(self, reg: str) -> int:
        try:
            return self.layout.names.index(reg)
        except ValueError:
            raise KeyError(f"no register named {reg!r}") from None

    def index(self, reg: str) -> np.ndarray:
        """Basis values of ``reg`` shaped to broadcast over the amplitudes."""
        ax = self.axis(reg)
        shape = [1] * self.amps.ndim
        shape[ax] = self.amps.shape[ax]
        return np.arange(self.amps.shape[ax]).reshape(shape)

    def value(self, name: str) -> np.ndarray:
        """Annotation ``name`` shaped to broadcast over the amplitudes."""
        ann = self.annotations[name]
        shape = [1] * self.amps.ndim
        order = sorted(range(len(ann.regs)), key=lambda r: self.axis(ann.regs[r]))
        vals = np.transpose(ann.values, order)
        for r in ann.regs:
            shape[self.axis(r)] = self.amps.shape[self.axis(r)]
        return vals.reshape(shape)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def copy(self) -> "HybridState":
        return HybridState(self.layout, self.amps.copy(),
                           {k: Annotation(a.regs, a.values.copy()) for k, a in self.annotations.items()})


def init(layout: RegisterLayout) -> HybridState:
    if layout.num_qubits > layout.cap:
        raise QubitCapExceeded(
            f"layout needs {layout.num_qubits} qubits; cap is {layout.cap}")
    amps = np.zeros(layout.shape, dtype=np.complex128)
    amps[(0,) * amps.ndim] = 1.0
    return HybridState(layout, amps)


def _take(arr: np.ndarray, ax: int, idx) -> tuple:
    sl = [slice(None)] * arr.ndim
    sl[ax] = idx
    return tuple(sl)


def hadamard_uniform(state: HybridState, reg: str, size: Optional[int] = None) -> HybridState:
    """Map ``|0>`` of ``reg`` to a uniform superposition over its first ``size`` values."""
    ax = state.axis(reg)
    dim = state.amps.shape[ax]
    size = dim if size is None else size
    if not 1 <= size <= dim:
        raise ValueError(f"size {size} does not fit register {reg!r} of dimension {dim}")
    rest = state.amps[_take(state.amps, ax, slice(1, None))]
    if np.any(rest != 0):
        raise ValueError(f"register {reg!r} is not in |0> on the whole support")
    a0 = state.amps[_take(state.amps, ax, 0)].copy()
    a0 /= math.sqrt(size)
    for v in range(size):
        state.amps[_take(state.amps, ax, v)] = a0
    return state


def apply_basis_map(state: HybridState,
                    writes: Optional[Mapping[str, tuple[Sequence[str], np.ndarray]]] = None,
                    flips: Optional[Mapping[str, Callable[[HybridState], np.ndarray]]] = None,
                    permutations: Optional[Mapping[str, Sequence[int]]] = None) -> HybridState:
    """Apply a reversible basis map.

    ``writes`` XORs data into empty registers (the annotation must not exist),
    ``flips`` applies an X gate to a flag register wherever the predicate
    holds, ``permutations`` relabels the basis values of a register.
    """
    for name, (regs, values) in (writes or {}).items():
        if name in state.annotations:
            raise IrreversibleMapError(f"register {name!r} already holds data")
        regs = tuple(regs)
        shape = tuple(state.amps.shape[state.axis(r)] for r in regs)
        vals = np.zeros(shape, dtype=np.float64)
        src = np.asarray(values, dtype=np.float64)
        vals[tuple(slice(0, s) for s in src.shape)] = src
        state.annotations[name] = Annotation(regs, vals)

    for flag, pred in (flips or {}).items():
        ax = state.axis(flag)
        if state.amps.shape[ax] != 2:
            raise ValueError(f"flag register {flag!r} must be a single qubit")
        mask = np.broadcast_to(pred(state), state.amps.shape)
        m0 = mask[_take(mask, ax, 0)]
        if not np.array_equal(m0, mask[_take(mask, ax, 1)]):
            raise IrreversibleMapError(f"flip condition depends on its own target {flag!r}")
        a0 = state.amps[_take(state.amps, ax, 0)].copy()
        a1 = state.amps[_take(state.amps, ax, 1)].copy()
        state.amps[_take(state.amps, ax, 0)] = np.where(m0, a1, a0)
        state.amps[_take(state.amps, ax, 1)] = np.where(m0, a0, a1)

    for reg, perm in (permutations or {}).items():
        ax = state.axis(reg)
        perm = np.asarray(perm, dtype=np.int64)
        dim = state.amps.shape[ax]
        if perm.shape != (dim,) or not np.array_equal(np.sort(perm), np.arange(dim)):
            raise IrreversibleMapError(f"map on register {reg!r} is not a bijection")
        new = np.empty_like(state.amps)
        new[_take(new, ax, perm)] = state.amps
        state.amps = new
        for ann in state.annotations.values():
            if reg in ann.regs:
                a = ann.regs.index(reg)
                moved = np.empty_like(ann.values)
                moved[_take(moved, a, perm)] = ann.values
                ann.values = moved
    return state


def inverse_permutation(perm: Sequence[int]) -> np.ndarray:
    return np.argsort(np.asarray(perm))


def uncompute(state: HybridState, name: str) -> HybridState:
    """Return data register ``name`` to ``|0>`` (inverse of its write)."""
    if name not in state.annotations:
        raise KeyError(f"register {name!r} holds no data")
    del state.annotations[name]
    return state


def controlled_rotation(state: HybridState, source: str, scale: float, target: str,
                        signed: bool = False, where=None, tol: float = 1e-12) -> HybridState:
    """Rotate flag ``target`` conditioned on annotation ``source``.

    Unsigned: ``sqrt(v/C)|0> + sqrt(1 - v/C)|1>``.
    Signed: ``v/(2C)|0> + sqrt(1 - (v/(2C))^2)|1>``.
    With ``where`` (a predicate not involving ``target``) the rotation is
    applied only on the basis states it selects.
    """
    ax = state.axis(target)
    if state.amps.shape[ax] != 2:
        raise ValueError(f"rotation target {target!r} must be a single qubit")
    half0, half1 = _take(state.amps, ax, 0), _take(state.amps, ax, 1)
    a0, a1 = state.amps[half0], state.amps[half1]  # views, updated in place
    sel0 = None
    if where is not None:
        sel = np.broadcast_to(where(state), state.amps.shape)
        sel0 = sel[half0]
    if np.any(a1 != 0 if sel0 is None else (a1 != 0) & sel0):
        raise ValueError(f"rotation target {target!r} is not in |0>")
    # annotation values never depend on the target, so keep them compact
    v = state.value(source)
    v = v[_take(v, ax, 0)]
    if signed:
        r = v / (2.0 * scale)
        bad = np.abs(r) > 1 + tol
        msg = f"|{source}| exceeds 2C on the support"
    else:
        r = v / scale
        bad = (r < -tol) | (r > 1 + tol)
        msg = f"{source} outside [0, C] on the support"
    if np.any(bad):
        hit = np.broadcast_to(bad, a0.shape) & (a0 != 0)
        if sel0 is not None:
            hit &= sel0
        if np.any(hit):
            raise ValueError(msg)
    if signed:
        r = np.clip(r, -1.0, 1.0)
        c0, c1 = r, np.sqrt(1.0 - r * r)
    else:
        r = np.clip(r, 0.0, 1.0)
        c0, c1 = np.sqrt(r), np.sqrt(1.0 - r)
    if sel0 is None:
        np.multiply(a0, c1, out=a1)
        a0 *= c0
    else:
        a1[...] = np.where(sel0, a0 * c1, a1)
        a0[...] = np.where(sel0, a0 * c0, a0)
    return state


def hadamard(state: HybridState, reg: str) -> HybridState:
    """Hadamard gate on a single-qubit register."""
    ax = state.axis(reg)
    if state.amps.shape[ax] != 2:
        raise ValueError(f"register {reg!r} must be a single qubit")
    a0 = state.amps[_take(state.amps, ax, 0)].copy()
    a1 = state.amps[_take(state.amps, ax, 1)].copy()
    r = 1 / math.sqrt(2)
    state.amps[_take(state.amps, ax, 0)] = (a0 + a1) * r
    state.amps[_take(state.amps, ax, 1)] = (a0 - a1) * r
    return state


def _weights(state: HybridState, predicate=None) -> np.ndarray:
    p = np.abs(state.amps) ** 2
    if predicate is not None:
        p = np.where(np.broadcast_to(predicate(state), p.shape), p, 0.0)
    return p


def probability_of(state: HybridState, predicate) -> float:
    return float(_weights(state, predicate).sum())


def branch_probabilities(state: HybridState, branch: Iterable[str], predicate=None) -> np.ndarray:
    """Probability mass per basis value of the ``branch`` registers, optionally
    restricted to basis states satisfying ``predicate``."""
    branch = tuple(branch)
    p = _weights(state, predicate)
    keep = [state.axis(r) for r in branch]
    other = tuple(a for a in range(p.ndim) if a not in keep)
    out = p.sum(axis=other)
    order = np.argsort(np.argsort(keep))
    return np.transpose(out, order) if len(branch) > 1 else out


def conditional_probability(state: HybridState, predicate, branch: Iterable[str]) -> np.ndarray:
    """``P(predicate | branch)`` per branch value; 0 on branches with no weight."""
    branch = tuple(branch)
    num = branch_probabilities(state, branch, predicate)
    den = branch_probabilities(state, branch)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def postselect(state: HybridState, predicate, branch: Optional[Iterable[str]] = None) -> HybridState:
    """Project onto ``predicate`` and renormalise.

    With ``branch`` registers given, each branch keeps its prior weight
    (renormalised within the branch); branches with no surviving amplitude
    vanish and the remaining ones are renormalised globally.
    """
    mask = np.broadcast_to(predicate(state), state.amps.shape)
    before = None
    if branch is not None:
        branch = tuple(branch)
        before = branch_probabilities(state, branch)
    kept = np.where(mask, state.amps, 0.0)
    total = float(np.vdot(kept, kept).real)
    if total <= 0.0:
        raise ValueError("postselection on a zero-probability event")
    if branch is None:
        state.amps = kept / math.sqrt(total)
        return state
    state.amps = kept
    after = branch_probabilities(state, branch)
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(after > 0, np.sqrt(before / np.where(after > 0, after, 1.0)), 0.0)
    shape = [1] * state.amps.ndim
    for r in branch:
        shape[state.axis(r)] = state.amps.shape[state.axis(r)]
    order = sorted(range(len(branch)), key=lambda r: state.axis(branch[r]))
    state.amps = state.amps * np.transpose(factor, order).reshape(shape)
    state.amps /= state.norm()
    return state


def measure(state: HybridState, register: str, rng=None) -> int:
    """Sample ``register`` from its marginal and collapse the state in place."""
    rng = np.random.default_rng(rng)
    marg = branch_probabilities(state, (register,))
    marg = marg / marg.sum()
    value = int(rng.choice(marg.size, p=marg))
    ax = state.axis(register)
    keep = np.zeros(state.amps.shape[ax], dtype=bool)
    keep[value] = True
    shape = [1] * state.amps.ndim
    shape[ax] = keep.size
    state.amps = np.where(keep.reshape(shape), state.amps, 0.0)
    state.amps /= state.norm()
    return value


def dump_csv(state: HybridState, path, tol: float = 0.0) -> int:
    """Write one record per nonzero basis state; returns the record count."""
    names = state.layout.names
    ann_names = sorted(state.annotations)
    full = {a: np.broadcast_to(state.value(a), state.amps.shape) for a in ann_names}
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + ann_names + ["re", "im"])
        for idx in zip(*np.nonzero(np.abs(state.amps) > tol)):
            amp = state.amps[idx]
            bits = [format(int(v), f"0{state.layout.widths[n]}b") if state.layout.widths[n] else ""
                    for n, v in zip(names, idx)]
            w.writerow(bits + [repr(float(full[a][idx])) for a in ann_names]
                       + [repr(float(amp.real)), repr(float(amp.imag))])
            rows += 1
    return rows
