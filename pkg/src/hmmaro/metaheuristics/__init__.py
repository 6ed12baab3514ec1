from .aro import aro_run, delta_t, maro_run, mutation_prob, reproduce
from .base import CountingObjective, ObjectiveError, OptimizeResult, Trace
from .codec import Codec
from .hmm_objective import HmmShape, hmm_objective, model_to_vector, random_model, vector_to_model
from .sa import acceptance_probability, sa_run

__all__ = [
    "Codec",
    "CountingObjective",
    "HmmShape",
    "ObjectiveError",
    "OptimizeResult",
    "Trace",
    "acceptance_probability",
    "aro_run",
    "delta_t",
    "hmm_objective",
    "maro_run",
    "model_to_vector",
    "mutation_prob",
    "random_model",
    "reproduce",
    "sa_run",
    "vector_to_model",
]
