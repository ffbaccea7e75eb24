"""Hot-kernel backend selection.

LERAY_NUMBA=0 forces the pure-numpy reference backend, LERAY_NUMBA=1
requires numba (ImportError if unavailable); the default picks numba when
it imports cleanly and falls back to numpy otherwise.
"""

import os

_FLAG = os.environ.get("LERAY_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "off", "false", "no"):
    from . import reference as backend

    BACKEND = "numpy"
elif _FLAG in ("1", "on", "true", "yes"):
    from . import jit as backend

    BACKEND = "numba"
else:
    try:
        from . import jit as backend

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        from . import reference as backend

        BACKEND = "numpy"

def jit_available() -> bool:
    try:
        from . import jit  # noqa: F401
    except ImportError:  # pragma: no cover - depends on environment
        return False
    return True


eval_points = backend.eval_points
eval_gradient = backend.eval_gradient
eval_grid_2d = backend.eval_grid_2d
count_below_2d = backend.count_below_2d
u_grid_2d = backend.u_grid_2d
cosine_fractions = backend.cosine_fractions
surface_integral_2d = backend.surface_integral_2d

__all__ = [
    "BACKEND",
    "backend",
    "jit_available",
    "eval_points",
    "eval_gradient",
    "eval_grid_2d",
    "count_below_2d",
    "u_grid_2d",
    "cosine_fractions",
    "surface_integral_2d",
]
