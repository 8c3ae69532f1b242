import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, trapezoid

from ..config.config import CUTOFF_TOL, INVERSE_CDF_POINTS, QUAD_TOL
from ..utils.errors import ArgumentError, ConfigurationError
from ..utils.logger import get_logger

logger = get_logger(__name__)

Density = Callable[[np.ndarray], np.ndarray]


class CrossSection:
    """Angular collision kernel b(cos theta) under the cutoff normalization.

    The kernel is parameterized by c = cos(theta) on [-1, 1]; the cutoff
    condition reads 2 pi * integral of b(c) dc over [-1, 1] = 1, so that
    2 pi b(c) is the probability density of the deflection cosine.
    """

    def __init__(
        self,
        kind: str,
        density: Density,
        residual: float = 0.0,
        breakpoints: Sequence[float] = (),
        knots: Optional[np.ndarray] = None,
        name: Optional[str] = None,
    ):
        """
        Initialize the CrossSection. Use the factory class methods.

        Args:
            kind (str): "constant", "density" or "table"
            density (Callable): Vectorized b(c)
            residual (float): Normalization mass minus one before any correction
            breakpoints (Sequence[float]): Discontinuities of b inside (-1, 1)
            knots (np.ndarray, optional): Table abscissae for piecewise linear kernels
            name (str, optional): Label used in logs and reports
        """
        self.kind = kind
        self.density = density
        self.residual = residual
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        self.knots = knots
        self.name = name or kind
        self._grid, self._cdf = self._inverse_cdf_table()

    @classmethod
    def constant(cls) -> "CrossSection":
        """Isotropic scattering, b = 1 / (4 pi)."""

        def density(c):
            return np.full_like(np.asarray(c, dtype=float), 1.0 / (4.0 * math.pi))

        return cls("constant", density, name="constant")

    @classmethod
    def from_density(
        cls, density: Density, breakpoints: Sequence[float] = (), name: str = "density"
    ) -> "CrossSection":
        """Closed-form kernel; must already satisfy the cutoff normalization."""
        mass = cls._mass(density, breakpoints)
        residual = mass - 1.0
        if abs(residual) > CUTOFF_TOL:
            raise ConfigurationError(
                f"2 pi * integral of b is {mass:.12g}, expected 1", key="cross_section"
            )
        return cls("density", density, residual=residual, breakpoints=breakpoints, name=name)

    @classmethod
    def linear(cls, slope: float = 1.0) -> "CrossSection":
        """b(c) = (1 + slope * c) / (4 pi), forward peaked for slope > 0."""
        if not -1.0 <= slope <= 1.0:
            raise ConfigurationError(f"slope must lie in [-1, 1], got {slope}", key="slope")

        def density(c):
            return (1.0 + slope * np.asarray(c, dtype=float)) / (4.0 * math.pi)

        return cls.from_density(density, name=f"linear({slope:g})")

    @classmethod
    def spike(cls, width: float = 1e-3) -> "CrossSection":
        """Uniform deflection cosine on [1 - width, 1]: grazing-dominated limit."""
        if not 0.0 < width <= 2.0:
            raise ConfigurationError(f"width must lie in (0, 2], got {width}", key="width")
        edge = 1.0 - width

        def density(c):
            c = np.asarray(c, dtype=float)
            return np.where(c >= edge, 1.0 / (2.0 * math.pi * width), 0.0)

        breakpoints = (edge,) if edge > -1.0 else ()
        return cls.from_density(density, breakpoints=breakpoints, name=f"spike({width:g})")

    @classmethod
    def from_table(cls, path: str) -> "CrossSection":
        """
        Load a two-column (cos theta, b) text table and renormalize it.

        Args:
            path (str): Whitespace separated table, '#' comments allowed

        Returns:
            CrossSection: piecewise linear kernel; ``residual`` records the
            normalization error of the raw table
        """
        try:
            table = np.loadtxt(path, comments="#", ndmin=2)
        except (OSError, ValueError) as e:
            logger.error(f"Error loading cross-section table {path}: {e}")
            raise ConfigurationError(f"cannot read table {path}: {e}", key="table") from e

        if table.shape[1] != 2 or table.shape[0] < 2:
            raise ConfigurationError(f"{path} must hold at least two (c, b) rows", key="table")
        c, b = table[:, 0], table[:, 1]
        if np.any(np.diff(c) <= 0) or c[0] < -1.0 or c[-1] > 1.0:
            raise ConfigurationError(
                f"{path}: cos(theta) must increase strictly within [-1, 1]", key="table"
            )
        if np.any(b < 0):
            raise ConfigurationError(f"{path}: b must be nonnegative", key="table")

        mass = 2.0 * math.pi * trapezoid(b, c)
        if not mass > 0:
            raise ConfigurationError(f"{path}: kernel has zero mass", key="table")
        b = b / mass
        logger.info(f"Loaded cross-section table {path} (normalization residual {mass - 1.0:.3e})")

        def density(x):
            return np.interp(np.asarray(x, dtype=float), c, b, left=0.0, right=0.0)

        return cls("table", density, residual=mass - 1.0, knots=c, name=path)

    @staticmethod
    def _mass(density: Density, breakpoints: Sequence[float] = ()) -> float:
        edges = [-1.0, *sorted(breakpoints), 1.0]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            value, _ = quad(lambda c: float(density(c)), lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
            total += value
        return 2.0 * math.pi * total

    def _inverse_cdf_table(self):
        if self.kind == "constant":
            return None, None
        grid = np.linspace(-1.0, 1.0, INVERSE_CDF_POINTS)
        # Jumps are resolved on both sides so no trapezoid straddles one
        extra = list(self.breakpoints) + [np.nextafter(b, -np.inf) for b in self.breakpoints]
        if self.knots is not None:
            extra.extend(self.knots.tolist())
        if extra:
            grid = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float)]))
        pdf = 2.0 * math.pi * np.asarray(self.density(grid), dtype=float)
        negative = pdf < 0
        if np.any(negative):
            raise ConfigurationError(
                f"cross-section {self.name} is negative at cos(theta) = {grid[negative][0]:.6g}",
                key="cross_section",
            )
        cdf = cumulative_trapezoid(pdf, grid, initial=0.0)
        if not cdf[-1] > 0:
            raise ConfigurationError(
                f"cross-section {self.name} has no mass on the sampling grid", key="cross_section"
            )
        # Fold the residual normalization error into the table
        cdf = cdf / cdf[-1]
        # Keep the last abscissa of every flat stretch so interpolation stays monotone
        keep = np.concatenate([np.diff(cdf) > 0, [True]])
        return grid[keep], cdf[keep]

    def sample_cos(self, u: np.ndarray) -> np.ndarray:
        """Map uniform variates on [0, 1) to deflection cosines."""
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return 2.0 * u - 1.0
        return np.interp(u, self._cdf, self._grid)

    def mean_cosine(self) -> float:
        """E[cos theta] = 2 pi * integral of c b(c) dc."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "table":
            # b is piecewise linear between knots, so Simpson on each piece is exact
            c = self.knots
            mid = 0.5 * (c[:-1] + c[1:])
            f0, f1, fm = c[:-1] * self.density(c[:-1]), c[1:] * self.density(c[1:]), mid * self.density(mid)
            return 2.0 * math.pi * float(np.sum((c[1:] - c[:-1]) * (f0 + 4.0 * fm + f1) / 6.0))
        edges = [-1.0, *self.breakpoints, 1.0]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            value, _ = quad(
                lambda c: c * float(self.density(c)), lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL
            )
            total += value
        return 2.0 * math.pi * total

    def check_normalized(self):
        """Raise ConfigurationError unless the kernel meets the cutoff condition."""
        if self.kind == "table":
            return
        mass = self._mass(self.density, self.breakpoints)
        if abs(mass - 1.0) > CUTOFF_TOL:
            raise ConfigurationError(
                f"cross-section {self.name} is not normalized (mass {mass:.12g})",
                key="cross_section",
            )

    def __repr__(self):
        return f"CrossSection({self.name})"


def cross_section_from_name(kind: str, slope: float = 1.0, width: float = 1e-3,
                            table: Optional[str] = None) -> CrossSection:
    """Build a kernel from its configuration name."""
    if kind == "constant":
        return CrossSection.constant()
    if kind == "linear":
        return CrossSection.linear(slope)
    if kind == "spike":
        return CrossSection.spike(width)
    if kind == "table":
        if table is None:
            raise ConfigurationError("a table path is required", key="table")
        return CrossSection.from_table(table)
    raise ArgumentError(f"unknown cross-section kind '{kind}'")
