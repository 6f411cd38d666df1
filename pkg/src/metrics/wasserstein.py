import numpy as np

from src.errors import MetricError
from src.utils.linalg import psd_sqrt, symmetric_part

SYMMETRY_TOL = 1e-8


def _w2_from_root(mean1, root1, trace1, mean2, cov2) -> float:
    # root1 is S1^(1/2); the cross term is Tr((S1^(1/2) S2 S1^(1/2))^(1/2)).
    inner = root1 @ cov2 @ root1
    cross = np.trace(psd_sqrt(0.5 * (inner + inner.T)))
    shift = mean1 - mean2
    value = float(shift @ shift) + trace1 + float(np.trace(cov2)) - 2.0 * float(cross)
    return float(np.sqrt(max(value, 0.0)))


def gaussian_w2(m1, S1, m2, S2) -> float:
    m1 = np.atleast_1d(np.asarray(m1, dtype=float))
    m2 = np.atleast_1d(np.asarray(m2, dtype=float))
    S1 = symmetric_part(np.atleast_2d(S1), SYMMETRY_TOL, MetricError)
    S2 = symmetric_part(np.atleast_2d(S2), SYMMETRY_TOL, MetricError)
    if not (m1.shape == m2.shape and S1.shape == S2.shape == (m1.shape[0], m1.shape[0])):
        raise MetricError(
            f"Incompatible Gaussian parameters: {m1.shape}, {S1.shape}, {m2.shape}, {S2.shape}"
        )
    return _w2_from_root(m1, psd_sqrt(S1), float(np.trace(S1)), m2, S2)
