from src.metrics.classification import accuracy, accuracy_curve
from src.metrics.consensus import consensus_error
from src.metrics.curves import MetricCurve
from src.metrics.ensemble import MomentEstimate, TrialEnsemble, ensemble_moments, sample_moments
from src.metrics.posterior_fit import w2_to_posterior_curve
from src.metrics.wasserstein import gaussian_w2

__all__ = [
    "MetricCurve",
    "MomentEstimate",
    "TrialEnsemble",
    "accuracy",
    "accuracy_curve",
    "consensus_error",
    "ensemble_moments",
    "gaussian_w2",
    "sample_moments",
    "w2_to_posterior_curve",
]
