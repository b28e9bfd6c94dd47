"""Hot pairwise kernel loops: compiled when available, numpy otherwise.

Set ``LAMETRANS_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("LAMETRANS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def single_layer_matrix(lam, mu, tgt, src, w):
    return _impl.single_layer_matrix(float(lam), float(mu), _c(tgt), _c(src), _c(w))


def traction_matrix(lam, mu, tgt, tnrm, src, w):
    return _impl.traction_matrix(float(lam), float(mu), _c(tgt), _c(tnrm), _c(src), _c(w))


def double_layer_matrix(lam, mu, tgt, src, snrm, w):
    return _impl.double_layer_matrix(float(lam), float(mu), _c(tgt), _c(src), _c(snrm), _c(w))


def single_layer_apply(lam, mu, tgt, src, wphi, with_grad=False):
    return _impl.single_layer_apply(
        float(lam), float(mu), _c(tgt), _c(src), _c(wphi), bool(with_grad)
    )


def use_backend(name):
    """Switch backend at runtime (``"cython"`` or ``"python"``); used by benchmarks."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _kernels_py, "python"
    elif name == "cython":
        from . import _kernels

        _impl, BACKEND = _kernels, "cython"
    else:
        raise ValueError(name)
