"""Kernel selection: compiled extension when importable, else pure Python.

Set ``AFGLIMM_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("AFGLIMM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

reach = _impl.reach
greatest_fixpoint = _impl.greatest_fixpoint
saturate = _impl.saturate
ideal_violation = _impl.ideal_violation

__all__ = ["BACKEND", "reach", "greatest_fixpoint", "saturate", "ideal_violation"]
