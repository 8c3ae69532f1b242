import csv
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List

import numpy as np

from ..utils.errors import ArgumentError
from ..utils.io import atomic_open
from ..utils.logger import get_logger
from ..utils.numerics import as_cloud, exact_column_means

logger = get_logger(__name__)


@dataclass
class MomentState:
    """Centered moments of a velocity ensemble.

    Attributes:
        mean (np.ndarray): Mean velocity
        theta (float): Temperature, trace(P) / d
        P (np.ndarray): Centered second-moment tensor
        m2 (float): trace(P)
        m4 (float): Mean |v - mean|^4
        m2bar (float): Sum of P_ij^2
    """

    mean: np.ndarray
    theta: float
    P: np.ndarray
    m2: float
    m4: float
    m2bar: float

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def isotropic(cls, m2: float, m4: float, dim: int = 3) -> "MomentState":
        """Zero-mean state with P = (m2 / d) I."""
        P = np.eye(dim) * (m2 / dim)
        return cls(
            mean=np.zeros(dim), theta=m2 / dim, P=P, m2=m2, m4=m4, m2bar=m2 * m2 / dim
        )

    def to_row(self) -> Dict[str, float]:
        row = {f"mean_{i}": float(self.mean[i]) for i in range(self.dim)}
        row.update(theta=self.theta, m2=self.m2, m4=self.m4, m2bar=self.m2bar)
        for i in range(self.dim):
            for j in range(i, self.dim):
                row[f"P_{i}{j}"] = float(self.P[i, j])
        return row


def moments_of(ens) -> MomentState:
    """
    Compute the moment state of an ensemble with compensated sums.

    Args:
        ens: VelocityEnsemble or an (N, d) array

    Returns:
        MomentState: mean is removed before P, m4 and m2bar
    """
    velocities = as_cloud(getattr(ens, "velocities", ens), "ensemble")
    n, dim = velocities.shape
    if n == 0:
        raise ArgumentError("moments of an empty ensemble are undefined")

    mean = exact_column_means(velocities)
    centered = velocities - mean
    P = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            P[i, j] = P[j, i] = math.fsum(centered[:, i] * centered[:, j]) / n
    sq = np.einsum("ij,ij->i", centered, centered)
    m2 = math.fsum(P[i, i] for i in range(dim))
    m4 = math.fsum(sq * sq) / n
    m2bar = math.fsum((P * P).ravel())
    return MomentState(mean=mean, theta=m2 / dim, P=P, m2=m2, m4=m4, m2bar=m2bar)


def moment_state_row(ms: MomentState, tau: float) -> Dict[str, float]:
    """One CSV row for a moment state recorded at time tau."""
    row = {"tau": tau}
    row.update(ms.to_row())
    return row


def write_moments_csv(path: str, rows: Iterable[Dict[str, float]]) -> str:
    """
    Write moment rows to CSV, columns taken from the first row.

    Args:
        path (str): Destination file
        rows (Iterable[Dict[str, float]]): Output of ``moment_state_row``

    Returns:
        str: The path written
    """
    rows: List[Dict[str, float]] = list(rows)
    if not rows:
        raise ArgumentError("no moment rows to write")
    try:
        with atomic_open(path, "w") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(float(v)) for k, v in row.items()})
        logger.info(f"Moments written to {path}")
        return path
    except OSError as e:
        logger.error(f"Error writing moments to {path}: {e}")
        raise
