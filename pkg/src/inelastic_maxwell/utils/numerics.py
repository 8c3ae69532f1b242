import math

import numpy as np

from .errors import ArgumentError


def exact_mean(values) -> float:
    """Correctly rounded mean of a 1D array (math.fsum)."""
    values = np.asarray(values, dtype=float).ravel()
    return math.fsum(values) / values.size


def exact_column_means(array: np.ndarray) -> np.ndarray:
    """Correctly rounded mean of every column of a 2D array."""
    array = np.asarray(array, dtype=float)
    return np.array([math.fsum(column) / array.shape[0] for column in array.T])


def squared_norms(array: np.ndarray) -> np.ndarray:
    """Row-wise squared Euclidean norms."""
    array = np.asarray(array, dtype=float)
    return np.einsum("ij,ij->i", array, array)


def as_cloud(points, name: str = "points") -> np.ndarray:
    """Coerce a point cloud to a float array of shape (N, d)."""
    cloud = np.asarray(points, dtype=float)
    if cloud.ndim == 1:
        cloud = cloud[:, None]
    if cloud.ndim != 2:
        raise ArgumentError(f"{name} must be a list of vectors, got shape {cloud.shape}")
    return cloud
