"""Extreme learning machines made robust to irrelevant inputs by LARS
variable selection followed by GA-based selective ensembling (LARSEN-ELM)."""

from .data import Dataset, NoiseProfile, blend_noise, gen_two_sines, load_boston, load_csv, split, standardize
from .elm import ElmConfig, ElmModel, elm_hidden_matrix, elm_predict, elm_train
from .gasen import (
    GaConfig,
    correlation_matrix,
    ensemble_error,
    ga_evolve,
    gasen_select,
    normalize_weights,
    optimal_weights_closed_form,
)
from .mrsr import LarsPath, VariableSelection, cumulative_correlation, lars_step_size, mrsr_path, select_variables
from .numerics import ContractError, NumericError, lstsq, pseudoinverse
from .pipeline import EnsembleModel, LarsenConfig, bag_sample, larsen_fit, larsen_predict

__version__ = "0.1.0"
