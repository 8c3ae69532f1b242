import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config.config import MARGINAL_TOL, WEIGHT_SUM_TOL
from ..utils.errors import ArgumentError
from ..utils.io import atomic_open
from ..utils.logger import get_logger
from ..utils.numerics import as_cloud

logger = get_logger(__name__)


class DiscreteMeasure:
    """A finitely supported probability measure on R^d, d in {1, 2, 3}.

    Zero-weight atoms are dropped on construction; the remaining weights must
    be strictly positive and sum to one.
    """

    def __init__(self, atoms, weights=None):
        """
        Initialize the DiscreteMeasure.

        Args:
            atoms: Array-like of shape (n, d) or (n,) for d = 1
            weights: Array-like of shape (n,); uniform when omitted
        """
        atoms = as_cloud(atoms, "atoms")
        if atoms.shape[0] == 0:
            raise ArgumentError("a discrete measure needs at least one atom")
        if atoms.shape[1] not in (1, 2, 3):
            raise ArgumentError(f"atoms must live in dimension 1, 2 or 3, got {atoms.shape[1]}")
        if not np.all(np.isfinite(atoms)):
            raise ArgumentError("atoms must be finite")

        if weights is None:
            weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.shape[0] != atoms.shape[0]:
            raise ArgumentError(
                f"{atoms.shape[0]} atoms but {weights.shape[0]} weights"
            )
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ArgumentError("weights must be finite and nonnegative")

        keep = weights > 0
        atoms, weights = atoms[keep], weights[keep]
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ArgumentError(f"weights sum to {total!r}, expected 1")

        self.atoms = atoms
        self.weights = weights

    @classmethod
    def empirical(cls, points) -> "DiscreteMeasure":
        """Equal-weight measure on the given points."""
        return cls(points)

    @classmethod
    def dirac(cls, point) -> "DiscreteMeasure":
        """Unit mass at a single point."""
        return cls(np.atleast_2d(np.asarray(point, dtype=float)), [1.0])

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    def mean(self) -> np.ndarray:
        return np.array(
            [math.fsum(self.weights * column) for column in self.atoms.T]
        )

    def second_moment(self, center=None) -> float:
        """Weighted mean of |v - center|^2 (center defaults to the origin)."""
        shifted = self.atoms if center is None else self.atoms - np.asarray(center, dtype=float)
        return math.fsum(self.weights * np.einsum("ij,ij->i", shifted, shifted))

    def __repr__(self):
        return f"DiscreteMeasure(size={self.size}, dim={self.dim})"


@dataclass
class TransportPlan:
    """A coupling between two discrete measures.

    Exactly one of ``permutation`` (equal-size equal-weight case: source i is
    sent to target permutation[i]) and ``flow`` (n x m mass matrix) is set.
    ``cost`` is the transport cost in squared-distance units.
    """

    cost: float
    source: np.ndarray
    target: np.ndarray
    permutation: Optional[np.ndarray] = None
    flow: Optional[np.ndarray] = None

    def pairs(self):
        """Yield (source index, target index, mass, squared distance)."""
        if self.permutation is not None:
            mass = 1.0 / self.source.shape[0]
            for i, j in enumerate(self.permutation):
                gap = self.source[i] - self.target[j]
                yield i, int(j), mass, float(gap @ gap)
        else:
            rows, cols = np.nonzero(self.flow)
            for i, j in zip(rows, cols):
                gap = self.source[i] - self.target[j]
                yield int(i), int(j), float(self.flow[i, j]), float(gap @ gap)

    def check_marginals(self, source_weights, target_weights, tol: float = MARGINAL_TOL) -> bool:
        """True when the flow reproduces both marginals within ``tol``."""
        if self.permutation is not None:
            n = self.source.shape[0]
            return sorted(self.permutation.tolist()) == list(range(n))
        rows_ok = np.allclose(self.flow.sum(axis=1), source_weights, rtol=0.0, atol=tol)
        cols_ok = np.allclose(self.flow.sum(axis=0), target_weights, rtol=0.0, atol=tol)
        return bool(rows_ok and cols_ok)

    def to_csv(self, path: str) -> str:
        """
        Write the plan as CSV for debugging.

        Args:
            path (str): Destination file

        Returns:
            str: The path written
        """
        try:
            with atomic_open(path, "w") as f:
                writer = csv.writer(f)
                writer.writerow(["source", "target", "mass", "squared_cost"])
                for i, j, mass, sq in self.pairs():
                    writer.writerow([i, j, repr(mass), repr(sq)])
            logger.info(f"Transport plan written to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing transport plan to {path}: {e}")
            raise
