"""Hot-loop backend selection.

The compiled extension is preferred; the numpy twins in ``_kernels_py`` are
used when it is missing or when ``CTBDUEL_PURE=1`` is set in the environment.
"""

import os

from . import _kernels_py

if os.environ.get("CTBDUEL_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"

ctb_select = _impl.ctb_select
ctb_update = _impl.ctb_update
ip_values = _impl.ip_values
occupation_counts = _impl.occupation_counts


def compiled():
    """Return the compiled module, or None if it is not importable."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
