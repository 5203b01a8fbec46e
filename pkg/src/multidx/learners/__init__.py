"""Seven from-scratch classifiers, all probability-emitting.

Every learner is specified by a LearnerSpec (kind + hyperparameters +
seed), fits deterministically, and exposes predict_proba rows that sum
to one. Binary-native learners handle more classes one-vs-rest.
"""

from .base import (
    LEARNER_KINDS,
    LearnerError,
    LearnerSpec,
    TrainedLearner,
    fit,
    learner_from_state,
    predict_label,
    predict_proba,
)
from .bayes import GaussianNaiveBayesLearner
from .boosting import GradientBoostedTreesLearner
from .forest import RandomForestLearner
from .linear import LogisticRegressionLearner
from .neighbors import KNearestNeighborsLearner
from .svm import SvmRbfLearner
from .tree import DecisionTreeLearner

__all__ = [
    "LEARNER_KINDS",
    "LearnerError",
    "LearnerSpec",
    "TrainedLearner",
    "DecisionTreeLearner",
    "GaussianNaiveBayesLearner",
    "GradientBoostedTreesLearner",
    "KNearestNeighborsLearner",
    "LogisticRegressionLearner",
    "RandomForestLearner",
    "SvmRbfLearner",
    "fit",
    "learner_from_state",
    "predict_label",
    "predict_proba",
]
