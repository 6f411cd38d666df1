from typing import Tuple

import numpy as np
from scipy import linalg


def symmetric_part(matrix: np.ndarray, tol: float, error_cls=ValueError) -> np.ndarray:
    # Returns (A + A^T) / 2 after checking A was symmetric up to tol.
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise error_cls(f"Expected a square matrix, got shape {matrix.shape}")
    deviation = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if deviation > tol:
        raise error_cls(f"Matrix is not symmetric (max deviation {deviation:.3e})")
    return 0.5 * (matrix + matrix.T)


def clamped_eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Symmetric eigendecomposition with eigenvalues clamped at 0, which removes tiny
    # negative values left by round-off.
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    return np.clip(eigenvalues, 0.0, None), eigenvectors


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = clamped_eigh(matrix)
    return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T


def psd_project(matrix: np.ndarray) -> np.ndarray:
    # Clamp a symmetric matrix onto the PSD cone. Matrices that are already PSD
    # are returned untouched so exact values survive.
    eigenvalues = linalg.eigvalsh(matrix)
    if eigenvalues.size == 0 or eigenvalues[0] >= 0.0:
        return matrix
    clamped, eigenvectors = clamped_eigh(matrix)
    return (eigenvectors * clamped) @ eigenvectors.T


def sigma_max(matrix: np.ndarray) -> float:
    # Largest singular value through eig(A^T A).
    gram = matrix.T @ matrix
    eigenvalues, _ = clamped_eigh(0.5 * (gram + gram.T))
    return float(np.sqrt(eigenvalues[-1])) if eigenvalues.size else 0.0


def extreme_eigenvalues(matrix: np.ndarray) -> Tuple[float, float]:
    eigenvalues = linalg.eigvalsh(0.5 * (matrix + matrix.T))
    return float(eigenvalues[0]), float(eigenvalues[-1])
