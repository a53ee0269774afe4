"""Hot numeric kernels, compiled with numba when available.

Two implementations share one contract:

* ``numba_impl`` -- ``@njit`` loops, parallel over sample batches.
* ``numpy_impl`` -- the same arithmetic in the same order, vectorized over
  the batch axis with numpy.

The active backend is chosen once at import from ``TORUSFOURIER_BACKEND``
(``numba`` or ``numpy``; default ``numba`` when importable). Both modules
stay importable so tests and benchmarks can compare them side by side via
:func:`get_backend`.

``TORUSFOURIER_THREADS`` caps numba's thread pool.
"""

from __future__ import annotations

import os
import types
import warnings

# the bundled TBB is too old for numba; pick the always-available pool unless overridden
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from . import numpy_impl

ENV_BACKEND = "TORUSFOURIER_BACKEND"
ENV_THREADS = "TORUSFOURIER_THREADS"

KERNEL_NAMES = (
    "compensated_sum",
    "bilinear_sections",
    "partial_sum_table",
    "cauchy_violations_2d",
    "cauchy_violations_1d",
    "coordinate_ascent",
)

try:
    from . import numba_impl

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None
    HAVE_NUMBA = False


def _configure_threads() -> None:
    raw = os.environ.get(ENV_THREADS)
    if not raw or not HAVE_NUMBA:
        return
    import numba

    try:
        numba.set_num_threads(max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        warnings.warn(f"ignoring non-integer {ENV_THREADS}={raw!r}", stacklevel=2)


def get_backend(name: str) -> types.ModuleType:
    """Return the kernel module for ``name`` (``"numba"`` or ``"numpy"``)."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return numba_impl
    raise ValueError(f"unknown kernel backend {name!r}; expected 'numba' or 'numpy'")


def _select() -> str:
    requested = os.environ.get(ENV_BACKEND, "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested == "numba" and not HAVE_NUMBA:
        warnings.warn("numba is not importable; falling back to numpy kernels", stacklevel=2)
        return "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(f"{ENV_BACKEND} must be 'numba' or 'numpy', got {requested!r}")
    return requested


BACKEND = _select()
_configure_threads()
_active = get_backend(BACKEND)

compensated_sum = _active.compensated_sum
bilinear_sections = _active.bilinear_sections
partial_sum_table = _active.partial_sum_table
cauchy_violations_2d = _active.cauchy_violations_2d
cauchy_violations_1d = _active.cauchy_violations_1d
coordinate_ascent = _active.coordinate_ascent

__all__ = ["BACKEND", "HAVE_NUMBA", "KERNEL_NAMES", "get_backend", *KERNEL_NAMES]
