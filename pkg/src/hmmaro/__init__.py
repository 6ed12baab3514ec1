"""HMM training with Baum-Welch EM and single-solution metaheuristics."""

from .em import ImpossibleSequenceError, ReestimateOutput, TrainConfig, bw_step, train_bw
from .inference import (
    ForwardBackwardResult,
    backward,
    forward,
    forward_backward,
    log_likelihood,
    sample,
    viterbi,
)
from .kernels import BACKEND
from .model import DiscreteEmission, GaussianMixtureEmission, HmmModel, Verdict, validate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DiscreteEmission",
    "ForwardBackwardResult",
    "GaussianMixtureEmission",
    "HmmModel",
    "ImpossibleSequenceError",
    "ReestimateOutput",
    "TrainConfig",
    "Verdict",
    "backward",
    "bw_step",
    "forward",
    "forward_backward",
    "log_likelihood",
    "sample",
    "train_bw",
    "validate",
    "viterbi",
]
