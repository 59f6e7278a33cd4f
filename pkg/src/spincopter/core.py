"""Physics-kernel backend selection.

The compiled Cython kernel is preferred; the pure-Python twin is used when
the extension is unavailable or when SPINCOPTER_PURE_PYTHON=1 is set. Both
expose the same advance()/derivative() functions and produce bit-identical
results (see benchmarks/compare_backends.py for the speed difference).
"""

import os

if os.environ.get("SPINCOPTER_PURE_PYTHON", "") not in ("", "0"):
    from spincopter import _core_py as kernel
else:
    try:
        from spincopter import _core as kernel  # type: ignore[attr-defined]
    except ImportError:
        from spincopter import _core_py as kernel

BACKEND = kernel.BACKEND
advance = kernel.advance
derivative = kernel.derivative
