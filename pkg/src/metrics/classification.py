import numpy as np

from src.data.datasets import BINARY, Dataset
from src.errors import MetricError
from src.metrics.curves import MetricCurve
from src.metrics.ensemble import TrialEnsemble


def _check_test_set(test_set: Dataset) -> None:
    if test_set.kind != BINARY:
        raise MetricError("Accuracy needs a binary test set")
    if test_set.size == 0:
        raise MetricError("Accuracy is undefined on an empty test set")


def accuracy(params: np.ndarray, test_set: Dataset) -> float:
    # Predict 1 iff sigmoid(z^T x) >= 1/2, i.e. z^T x >= 0.
    _check_test_set(test_set)
    predictions = (test_set.features @ np.asarray(params, dtype=float)) >= 0.0
    return float(np.mean(predictions == (test_set.targets == 1.0)))


def accuracy_curve(ensemble: TrialEnsemble, test_set: Dataset) -> MetricCurve:
    # Accuracy per (snapshot, agent), averaged over trials.
    _check_test_set(test_set)
    truth = test_set.targets == 1.0
    snaps = ensemble.samples.shape[1]
    per_agent = np.empty((snaps, ensemble.num_agents))
    for s in range(snaps):
        # (trials, agents, test samples)
        scores = np.einsum("tid,nd->tin", ensemble.samples[:, s], test_set.features)
        per_agent[s] = ((scores >= 0.0) == truth).mean(axis=2).mean(axis=0)
    return MetricCurve(name="accuracy", iterations=ensemble.iterations, per_agent=per_agent)
