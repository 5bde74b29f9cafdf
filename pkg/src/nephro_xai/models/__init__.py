"""From-scratch classifiers behind a single predictor interface.

Families: L1 logistic regression (LR), Gaussian/categorical naive Bayes
(NB), linear SVM with Platt calibration (LSVM), CART decision tree (DT),
random forest (RF), AdaBoost with stumps (ADA) and logistic-loss
gradient boosting (GBM).
"""

from nephro_xai.models.base import ModelSpec, Predictor, TrainingError, train
from nephro_xai.models.tree import TreeNode, export_tree
from nephro_xai.models.search import grid_search

__all__ = [
    "ModelSpec",
    "Predictor",
    "TrainingError",
    "train",
    "TreeNode",
    "export_tree",
    "grid_search",
]
