"""Diversity-aware weighted majority vote (DAMVI) for imbalanced binary classification."""

__version__ = "0.1.0"

from .algorithm import (DamviConfig, DamviReport, train_balanced_bagging, train_damvi,
                        train_ros_bagging, train_smote_bagging, train_uniform_bagging,
                        update_example_weights)
from .cbound import (OptimizerConfig, cbound_gradient, cbound_value, disagreement_matrix,
                     expected_disagreement, gibbs_risk, margin_moments, optimize_weights,
                     project_simplex, risk_vector)
from .dataset import Dataset, load_csv, make_synthetic, stratified_split
from .metrics import average_precision, f1_score, pr_curve, wilcoxon_rank_sum
from .tree import Tree, TreeParams, fit_tree, predict_tree
from .vote import Ensemble, VoteMatrix, empirical_mv_risk, ensemble_score, predict_mv, vote_matrix
