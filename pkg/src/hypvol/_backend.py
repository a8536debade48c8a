"""Selects the compiled kernels when they were built, else the pure-Python ones.

Set ``HYPVOL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

python_kernels = _pykernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("HYPVOL_PURE_PYTHON", "") in ("", "0"):
    kernels = compiled_kernels
else:
    kernels = _pykernels

BACKEND = kernels.BACKEND
