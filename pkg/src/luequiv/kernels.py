"""Backend selection for the phase-search kernels.

The compiled extension is used when importable; set ``LUEQUIV_BACKEND=python``
to force the numpy fallback.
"""
import os

from . import _coset_py

_requested = os.environ.get("LUEQUIV_BACKEND", "auto").lower()

try:
    if _requested == "python":
        raise ImportError("numpy backend requested")
    from . import _coset as _impl

    BACKEND = "cython"
except ImportError:
    if _requested == "cython":
        raise
    _impl = _coset_py
    BACKEND = "python"

objective_gradient = _impl.objective_gradient
descend = _impl.descend


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None = active)."""
    if name is None:
        return _impl
    if name == "python":
        return _coset_py
    if name == "cython":
        from . import _coset

        return _coset
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    names = ["python"]
    try:
        from . import _coset  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names
