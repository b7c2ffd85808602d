"""Hot numerical kernels.

The compiled Cython extensions are used when importable; otherwise the
numpy/pure-Python modules with the same signatures are used. Set
``DWPOLES_PURE_PYTHON=1`` to force the fallback.
"""
import importlib
import os

_FALLBACK = {"transfer": "transfer_py", "numerov": "numerov_py"}
_COMPILED = {"transfer": "_transfer", "numerov": "_numerov"}


def load(kernel, backend):
    """Return the kernel module for *backend* (``"cython"`` or ``"python"``)."""
    table = _COMPILED if backend == "cython" else _FALLBACK
    return importlib.import_module(f"{__name__}.{table[kernel]}")


def available_backends():
    names = ["python"]
    try:
        load("transfer", "cython")
        load("numerov", "cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


if os.environ.get("DWPOLES_PURE_PYTHON", "") not in ("", "0"):
    BACKEND = "python"
else:
    BACKEND = available_backends()[0]

transfer = load("transfer", BACKEND).transfer
numerov = load("numerov", BACKEND).numerov

__all__ = ["BACKEND", "available_backends", "load", "numerov", "transfer"]
