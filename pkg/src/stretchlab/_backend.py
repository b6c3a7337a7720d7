"""Kernel selection.

The compiled extension is used when importable; setting ``STRETCHLAB_PURE=1``
(or a failed build) selects the numpy fallback.  ``BACKEND`` names the
active one.
"""

import os

from . import _kernels_py

kernels = _kernels_py
BACKEND = "python"

if not os.environ.get("STRETCHLAB_PURE"):
    try:
        from . import _kernels as kernels  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass
