import numpy as np

from src.errors import MetricError
from src.metrics.curves import MetricCurve
from src.metrics.ensemble import TrialEnsemble, sample_moments
from src.metrics.wasserstein import SYMMETRY_TOL, _w2_from_root
from src.models.posterior import GaussianPosterior
from src.utils.linalg import psd_sqrt, symmetric_part


def w2_to_posterior_curve(ensemble: TrialEnsemble, posterior: GaussianPosterior) -> MetricCurve:
    # Gaussian-moment proxy: each agent's empirical marginal is summarized by its mean
    # and covariance across trials and compared with the posterior in closed form.
    if ensemble.dim != posterior.dim:
        raise MetricError(f"Ensemble dimension {ensemble.dim} differs from posterior {posterior.dim}")

    target_cov = symmetric_part(posterior.covariance, SYMMETRY_TOL, MetricError)
    # The posterior square root is shared by every (snapshot, agent) pair.
    root = psd_sqrt(target_cov)
    trace = float(np.trace(target_cov))

    snaps, agents = ensemble.samples.shape[1], ensemble.samples.shape[2]
    values = np.empty((snaps, agents))
    for s in range(snaps):
        for i in range(agents):
            moments = sample_moments(ensemble.samples[:, s, i, :])
            values[s, i] = _w2_from_root(
                posterior.mean, root, trace, moments.mean, moments.covariance
            )
    return MetricCurve(name="w2", iterations=ensemble.iterations, per_agent=values)
