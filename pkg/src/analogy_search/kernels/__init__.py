"""Hot numeric kernels with a compiled core and a NumPy fallback.

The compiled extension (_ckernels, Cython) is preferred when importable;
otherwise the NumPy implementations in _pykernels are used. Set
ANALOGY_SEARCH_KERNELS=py to force the fallback, =c to require the
extension (raising if it is missing). Both backends implement the same
contracts; `benchmarks/bench_kernels.py` compares them.
"""

from __future__ import annotations

import os

from . import _pykernels

_requested = os.environ.get("ANALOGY_SEARCH_KERNELS", "auto").lower()

if _requested == "py":
    _impl = _pykernels
elif _requested == "c":
    from . import _ckernels as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
dot_scores = _impl.dot_scores
dot_matrix = _impl.dot_matrix
sqdist_matrix = _impl.sqdist_matrix

__all__ = ["BACKEND", "dot_scores", "dot_matrix", "sqdist_matrix"]
