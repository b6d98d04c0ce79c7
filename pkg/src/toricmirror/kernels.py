"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``TORICMIRROR_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("TORICMIRROR_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

rank_mod_p = _impl.rank_mod_p
rref_mod_p = _impl.rref_mod_p
box_scan = _impl.box_scan

# compiled elimination multiplies residues in int64
MAX_COMPILED_PRIME = 2**31 - 1
