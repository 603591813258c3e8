"""Select the kernel implementation at import time.

The compiled ``_core`` extension is preferred; ``SEQMNS_PURE_PYTHON=1``
forces the numpy fallback (useful for benchmarking and for cross-checking the
two implementations against each other).
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("SEQMNS_PURE_PYTHON", "") == "1":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _core_py

BACKEND = "cython" if _impl is not _core_py else "python"

jacobi_eigh = _impl.jacobi_eigh
joint_table = _impl.joint_table
povm_from_raw = _impl.povm_from_raw
raw_witness = _impl.raw_witness


def implementations():
    """Every importable backend, keyed by name."""
    impls = {"python": _core_py}
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        impls["cython"] = _core
    return impls
