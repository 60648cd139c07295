"""Hot elementwise kernels with a compiled core and a numpy fallback.

The compiled Cython module is preferred when it imported cleanly; set the
environment variable ``INDEXCODING_PURE_PYTHON=1`` before import to force the
numpy reference implementation.  ``BACKEND`` reports which one is active.

Both backends implement the same six functions with identical semantics:
reg_value, reg_gmat, reg_gdot, ref_value, ref_gmat, ref_gdot.
"""

import os

from . import _reference

if os.environ.get("INDEXCODING_PURE_PYTHON", "") not in ("", "0"):
    _impl = _reference
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _reference

BACKEND: str = _impl.BACKEND_NAME

reg_value = _impl.reg_value
reg_gmat = _impl.reg_gmat
reg_gdot = _impl.reg_gdot
ref_value = _impl.ref_value
ref_gmat = _impl.ref_gmat
ref_gdot = _impl.ref_gdot

__all__ = [
    "BACKEND",
    "reg_value",
    "reg_gmat",
    "reg_gdot",
    "ref_value",
    "ref_gmat",
    "ref_gdot",
]
