import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..config.config import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from ..utils.errors import ArgumentError, ConfigurationError
from ..utils.io import atomic_open
from ..utils.logger import get_logger
from ..utils.numerics import as_cloud, exact_column_means, squared_norms

logger = get_logger(__name__)

SNAPSHOT_HEADER = np.dtype(
    [
        ("magic", "S8"),
        ("version", "<u4"),
        ("dim", "<u4"),
        ("n", "<u8"),
        ("time", "<f8"),
        ("seed", "<u8"),
    ]
)


@dataclass
class VelocityEnsemble:
    """N particle velocities standing in for a velocity distribution.

    Attributes:
        velocities (np.ndarray): (N, d) array, d in {1, 3}
        time (float): Current scaled (or original) time
        generation (int): Number of steps taken
        seed (int): Master seed the ensemble was drawn with
    """

    velocities: np.ndarray
    time: float = 0.0
    generation: int = 0
    seed: int = 0

    def __post_init__(self):
        self.velocities = as_cloud(self.velocities, "velocities")
        if self.velocities.shape[0] == 0:
            raise ArgumentError("an ensemble needs at least one particle")
        if not np.all(np.isfinite(self.velocities)):
            raise ArgumentError("velocities must be finite")

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    @property
    def dim(self) -> int:
        return self.velocities.shape[1]

    def mean(self) -> np.ndarray:
        return exact_column_means(self.velocities)

    def temperature(self) -> float:
        """Centered second moment divided by the dimension."""
        centered = self.velocities - self.mean()
        return math.fsum(squared_norms(centered)) / (self.n * self.dim)

    def advanced(self, velocities: np.ndarray, dtau: float) -> "VelocityEnsemble":
        """A new ensemble one step later."""
        return VelocityEnsemble(
            velocities=velocities,
            time=self.time + dtau,
            generation=self.generation + 1,
            seed=self.seed,
        )

    def copy(self) -> "VelocityEnsemble":
        return VelocityEnsemble(self.velocities.copy(), self.time, self.generation, self.seed)

    def save(self, path: str) -> str:
        """
        Write a binary snapshot: a little-endian header followed by float64 velocities.

        Args:
            path (str): Destination file, written atomically

        Returns:
            str: The path written
        """
        header = np.zeros(1, dtype=SNAPSHOT_HEADER)
        header["magic"] = SNAPSHOT_MAGIC
        header["version"] = SNAPSHOT_VERSION
        header["dim"] = self.dim
        header["n"] = self.n
        header["time"] = self.time
        header["seed"] = self.seed
        try:
            with atomic_open(path, "wb") as f:
                f.write(header.tobytes())
                f.write(np.ascontiguousarray(self.velocities, dtype="<f8").tobytes())
            logger.info(f"Snapshot of {self.n} particles written to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing snapshot to {path}: {e}")
            raise

    @classmethod
    def load(cls, path: str) -> "VelocityEnsemble":
        """Read a binary snapshot written by ``save``."""
        try:
            with open(path, "rb") as f:
                raw = f.read()
        except OSError as e:
            logger.error(f"Error reading snapshot {path}: {e}")
            raise ConfigurationError(f"cannot read snapshot {path}: {e}", key="path") from e

        if len(raw) < SNAPSHOT_HEADER.itemsize:
            raise ConfigurationError(f"{path} is too short to be a snapshot", key="path")
        header = np.frombuffer(raw[: SNAPSHOT_HEADER.itemsize], dtype=SNAPSHOT_HEADER)[0]
        if bytes(header["magic"]) != SNAPSHOT_MAGIC:
            raise ConfigurationError(f"{path} is not a velocity snapshot", key="path")
        if int(header["version"]) != SNAPSHOT_VERSION:
            raise ConfigurationError(
                f"{path}: unsupported snapshot version {int(header['version'])}", key="path"
            )

        n, dim = int(header["n"]), int(header["dim"])
        body = raw[SNAPSHOT_HEADER.itemsize:]
        if len(body) != 8 * n * dim:
            raise ConfigurationError(
                f"{path}: expected {n * dim} velocity components, found {len(body) // 8}",
                key="path",
            )
        velocities = np.frombuffer(body, dtype="<f8").astype(float).reshape(n, dim)
        return cls(velocities, time=float(header["time"]), seed=int(header["seed"]))

    def to_csv(self, path: str) -> str:
        """One row per particle, columns v0 .. v{d-1}."""
        try:
            with atomic_open(path, "w") as f:
                writer = csv.writer(f)
                writer.writerow([f"v{i}" for i in range(self.dim)])
                for row in self.velocities:
                    writer.writerow([repr(float(x)) for x in row])
            logger.info(f"Ensemble CSV written to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing ensemble CSV to {path}: {e}")
            raise


def _match_moments(sample: np.ndarray, mean: np.ndarray, theta: float) -> np.ndarray:
    centered = sample - exact_column_means(sample)
    current = math.fsum(squared_norms(centered)) / sample.size
    if current > 0 and theta > 0:
        centered = centered * math.sqrt(theta / current)
    elif theta == 0:
        centered = np.zeros_like(centered)
    return centered + mean


def initial_ensemble(
    recipe: str,
    n: int,
    dim: int,
    rng: np.random.Generator,
    mean: Optional[Sequence[float]] = None,
    theta: float = 1.0,
    path: Optional[str] = None,
    seed: int = 0,
) -> VelocityEnsemble:
    """
    Draw an initial ensemble with exactly the requested mean and temperature.

    Args:
        recipe (str): gaussian, uniform-cube, two-point, dirac or file
        n (int): Particle count
        dim (int): Velocity dimension
        rng (np.random.Generator): Random stream for the draw
        mean (Sequence[float], optional): Target mean, zero by default
        theta (float): Target temperature (ignored for dirac and file)
        path (str, optional): Snapshot for the file recipe
        seed (int): Seed recorded in the ensemble

    Returns:
        VelocityEnsemble: Ensemble at time 0
    """
    if recipe == "file":
        if path is None:
            raise ConfigurationError("the file recipe needs a snapshot path", key="path")
        ens = VelocityEnsemble.load(path)
        if ens.n != n or ens.dim != dim:
            raise ConfigurationError(
                f"snapshot {path} holds {ens.n}x{ens.dim} velocities, expected {n}x{dim}",
                key="path",
            )
        return VelocityEnsemble(ens.velocities, time=0.0, seed=seed)

    if n < 1:
        raise ArgumentError(f"n must be positive, got {n}")
    mean = np.zeros(dim) if mean is None else np.asarray(mean, dtype=float).ravel()
    if mean.shape != (dim,):
        raise ConfigurationError(f"mean must have {dim} components", key="mean")
    if not theta >= 0:
        raise ConfigurationError(f"theta must be nonnegative, got {theta}", key="theta")

    if recipe == "gaussian":
        sample = rng.standard_normal((n, dim))
    elif recipe == "uniform-cube":
        sample = rng.uniform(-1.0, 1.0, (n, dim))
    elif recipe == "two-point":
        signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        sample = np.repeat(rng.permutation(signs)[:, None], dim, axis=1)
    elif recipe == "dirac":
        return VelocityEnsemble(np.tile(mean, (n, 1)), seed=seed)
    else:
        raise ConfigurationError(f"unknown initial recipe '{recipe}'", key="recipe")

    velocities = _match_moments(sample, mean, theta)
    logger.debug(f"Initial {recipe} ensemble: n = {n}, d = {dim}, theta = {theta}")
    return VelocityEnsemble(velocities, seed=seed)
