"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
kernels are used. Setting ``ADPAAD_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ADPAAD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py


def paad_kernel(windows, bounds):
    return _impl.paad_kernel(np.ascontiguousarray(windows, dtype=np.float64),
                             np.ascontiguousarray(bounds, dtype=np.float64))


def similarity_kernel(mu):
    return _impl.similarity_kernel(np.ascontiguousarray(mu, dtype=np.float64))


def scores_kernel(S):
    return _impl.scores_kernel(np.ascontiguousarray(S, dtype=np.float64))
