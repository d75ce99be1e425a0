"""Kernel selection: compiled extension when importable, NumPy fallback otherwise.

Set ``CCMKDV_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
impl = _kernels_py

if os.environ.get("CCMKDV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        impl = _kernels_py


def available():
    """Return the kernel modules that can be imported, keyed by name."""
    mods = {"python": _kernels_py}
    try:
        from . import _ckernels
        mods["cython"] = _ckernels
    except ImportError:
        pass
    return mods


pfaffian_ltl = impl.pfaffian_ltl
pfaffian_ltl_batch = impl.pfaffian_ltl_batch
expsum_max_exponent = impl.expsum_max_exponent
expsum_jet = impl.expsum_jet
