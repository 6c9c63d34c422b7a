"""Incremental offline data-driven optimization in nonstationary environments.

Each environment delivers a chunk of (x, y) samples. The chunks train a
weighted ensemble of RBF surrogates (historical chunks are rescaled into the
current objective range first), differential evolution searches that
surrogate, and the final solution is read off the last population.
"""
from .benchmarks import (
    DynamicProblem,
    SamplingPlan,
    advance_environment,
    evaluate_true,
    latin_hypercube,
    make_problem,
    sample_chunk,
)
from .config import ExperimentConfig, load_config
from .data import ChunkStats, DataChunk, SampleSet, chunk_stats, make_chunk, validate_chunk
from .de import DeParams, Population, crossover_binomial, init_population, mutate_rand1, optimize
from .ensemble import EnsembleSurrogate, ensemble_weights, predict_ensemble, update_ensemble
from .harness import VARIANTS, run_experiment, run_variant, summarize
from .rbf import RbfConfig, RbfModel, kmeans_centers, predict_rbf, rmse, train_rbf
from .solution import FinalSolution, produce_final
from .transfer import build_training_set, rescale_objectives

__version__ = "0.1.0"
