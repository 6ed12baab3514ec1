"""Backend selection for the inference kernels.

Set ``HMMARO_DISABLE_NUMBA=1`` to force the pure-numpy path. The numba path is
used whenever numba imports cleanly and the flag is unset.
"""

import os

_FLAG = "HMMARO_DISABLE_NUMBA"


def numba_requested():
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False


USE_NUMBA = NUMBA_AVAILABLE and numba_requested()
