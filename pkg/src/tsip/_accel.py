"""Optional numba acceleration.

Set ``TSIP_DISABLE_NUMBA=1`` to run the pure-Python kernels; the same source
is used either way.
"""

import os

DISABLED = os.environ.get("TSIP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if DISABLED:
        raise ImportError("numba disabled by TSIP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap

BACKEND = "numba" if HAVE_NUMBA else "python"
