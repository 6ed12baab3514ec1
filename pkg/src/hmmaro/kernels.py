"""Active kernel backend: numba when available and enabled, numpy otherwise."""

from . import _kernels_numpy
from ._accel import USE_NUMBA

if USE_NUMBA:
    from . import _kernels_numba as _active

    BACKEND = "numba"
else:
    _active = _kernels_numpy
    BACKEND = "numpy"

forward_scaled = _active.forward_scaled
backward_scaled = _active.backward_scaled
transition_counts = _active.transition_counts
viterbi_log = _active.viterbi_log
batch_loglik_discrete = _active.batch_loglik_discrete

__all__ = [
    "BACKEND",
    "forward_scaled",
    "backward_scaled",
    "transition_counts",
    "viterbi_log",
    "batch_loglik_discrete",
]
