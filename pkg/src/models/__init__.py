from src.models.oracles import (
    GradientOracle,
    ModelSpec,
    estimate_noise_bound,
    stochastic_gradient,
)
from src.models.posterior import GaussianPosterior, gaussian_posterior
from src.models.regression import linear_regression_model, logistic_regression_model
from src.models.toy import gaussian_toy_model

__all__ = [
    "GaussianPosterior",
    "GradientOracle",
    "ModelSpec",
    "estimate_noise_bound",
    "gaussian_posterior",
    "gaussian_toy_model",
    "linear_regression_model",
    "logistic_regression_model",
    "stochastic_gradient",
]
