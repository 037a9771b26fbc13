"""Hot numerical kernels.

The compiled Cython core is used when it has been built; otherwise (or when
``GEOMOD_PURE_PYTHON=1`` is set) the numpy fallback is selected.  ``BACKEND``
names the active implementation.
"""
import os

from . import _fallback
from ._fallback import level_offsets

fallback = _fallback

if os.environ.get("GEOMOD_PURE_PYTHON", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _core as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else _fallback
BACKEND = "cython" if compiled is not None else "numpy"

qseries = _impl.qseries
chen_product = _impl.chen_product
panel_signature = _impl.panel_signature

__all__ = ["BACKEND", "qseries", "chen_product", "panel_signature", "level_offsets", "fallback", "compiled"]
