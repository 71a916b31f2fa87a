"""Backend selection for the hot loops.

Set ``LERCHZ_DISABLE_NUMBA=1`` to force the pure-NumPy path; otherwise the
numba kernels are used whenever numba imports cleanly.
"""

import os

from . import _kernels_numpy

BACKEND = "numpy"
if os.environ.get("LERCHZ_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional at runtime
        _impl = _kernels_numpy
else:
    _impl = _kernels_numpy

head_sums = _impl.head_sums
em_corrections = _impl.em_corrections
laguerre_tail = _impl.laguerre_tail


def thread_cap() -> int:
    """Worker count honouring ``LERCHZ_THREADS``."""
    raw = os.environ.get("LERCHZ_THREADS")
    cpus = os.cpu_count() or 1
    if not raw:
        return cpus
    try:
        return max(1, min(int(raw), cpus))
    except ValueError:
        return cpus
