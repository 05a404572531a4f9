"""From-scratch classifiers over the distance features.

Four model families share one interface: fit_* builds a frozen model object,
predict/predict_proba dispatch on it, and save_model/load_model round-trip
it through versioned JSON without changing a single prediction.
"""

from .base import (
    MODEL_FORMAT_VERSION,
    LearningCurve,
    load_model,
    predict,
    predict_proba,
    save_model,
)
from .forest import ForestModel, fit_forest
from .gbt import GbtModel, fit_gbt
from .logistic import LogisticModel, fit_logistic, loss_and_gradient, softmax
from .svm import SvmModel, dual_objective, fit_svm, kernel_matrix, smo_solve
from .tree import Tree, grow_tree, tree_values

__all__ = [
    "MODEL_FORMAT_VERSION",
    "LearningCurve",
    "LogisticModel",
    "SvmModel",
    "ForestModel",
    "GbtModel",
    "Tree",
    "fit_logistic",
    "fit_svm",
    "fit_forest",
    "fit_gbt",
    "grow_tree",
    "tree_values",
    "predict",
    "predict_proba",
    "save_model",
    "load_model",
    "loss_and_gradient",
    "softmax",
    "dual_objective",
    "kernel_matrix",
    "smo_solve",
]
