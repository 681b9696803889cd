"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled `_native` extension (Cython) is preferred; set the environment
variable ``QUERYFORGE_PURE=1`` to force the pure-Python implementation, e.g.
for the backend-comparison benchmark in ``benchmarks/``.
"""

import os

if os.environ.get("QUERYFORGE_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND
intersect_size = _impl.intersect_size
dice_sorted = _impl.dice_sorted
contains_window = _impl.contains_window

__all__ = ["BACKEND", "intersect_size", "dice_sorted", "contains_window"]
