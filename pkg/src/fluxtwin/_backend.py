"""Select the compiled kernel core, falling back to pure Python.

Set ``FLUXTWIN_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _core_py

if os.environ.get("FLUXTWIN_PURE_PYTHON", "") not in ("", "0"):
    core = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as core
        BACKEND = "cython"
    except ImportError:
        core = _core_py
        BACKEND = "python"

OK = _core_py.OK
COINCIDENT = _core_py.COINCIDENT
TOO_COARSE = _core_py.TOO_COARSE
