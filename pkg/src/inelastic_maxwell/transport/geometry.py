"""Transport between uniform measures on spheres, circles and Kac curves.

These are the elementary couplings behind the gain-operator contraction: the
gain measure of a collision is a uniform measure on a sphere (or, for a
general cross-section, on circles of fixed deflection angle), and the cost of
moving one such measure onto another is bounded in closed form.
"""
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..collision.kernels import frame_from_axis
from ..collision.rates import kac_gain_factor
from ..config.config import UNIT_TOL
from ..utils.errors import ArgumentError


def _vector3(value, name: str) -> np.ndarray:
    vector = np.asarray(value, dtype=float).ravel()
    if vector.shape != (3,):
        raise ArgumentError(f"{name} must be a 3-vector")
    return vector


@dataclass
class SphereSpec:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = _vector3(self.center, "center")
        if not self.radius >= 0:
            raise ArgumentError(f"radius must be nonnegative, got {self.radius}")
        self.radius = float(self.radius)


@dataclass
class CircleSpec:
    center: np.ndarray
    radius: float
    axis: np.ndarray

    def __post_init__(self):
        self.center = _vector3(self.center, "center")
        self.axis = _vector3(self.axis, "axis")
        if not self.radius >= 0:
            raise ArgumentError(f"radius must be nonnegative, got {self.radius}")
        if abs(np.linalg.norm(self.axis) - 1.0) > UNIT_TOL:
            raise ArgumentError("circle axis must be a unit vector")
        self.radius = float(self.radius)


@dataclass
class SphereMap:
    """Affine map T(v) = pole + factor * (v - pole) + shift.

    ``kind`` is one of "translation", "dilation" (about the common center),
    "homothety" (about the pole Omega) or "dirac" (a degenerate end point).
    """

    kind: str
    factor: float = 1.0
    pole: np.ndarray = field(default_factory=lambda: np.zeros(3))
    shift: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def apply(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return self.pole + self.factor * (points - self.pole) + self.shift


def sphere_transport_map(s: SphereSpec, s2: SphereSpec) -> Tuple[SphereMap, float]:
    """
    Map the uniform measure on sphere ``s`` onto the one on ``s2``.

    Equal radii give a translation, equal centers a dilation about the
    center, and otherwise the homothety of ratio r'/r about
    Omega = O + r/(r - r') (O' - O). Each of them moves mass at cost
    |O' - O|^2 + (r' - r)^2. When the source is a point the map is not
    defined; the returned descriptor then has kind "dirac" and the cost is
    that of the unique coupling. Two points reduce to a translation.

    Args:
        s (SphereSpec): Source sphere
        s2 (SphereSpec): Target sphere

    Returns:
        Tuple[SphereMap, float]: map descriptor and squared transport cost
    """
    offset = s2.center - s.center
    cost = float(offset @ offset) + (s2.radius - s.radius) ** 2

    if s.radius == s2.radius:
        # Includes two points, a Dirac-to-Dirac translation
        return SphereMap(kind="translation", shift=offset), cost
    if s.radius == 0.0:
        return SphereMap(kind="dirac", factor=0.0, pole=s.center.copy(), shift=offset), cost
    factor = s2.radius / s.radius
    if np.array_equal(s.center, s2.center):
        return SphereMap(kind="dilation", factor=factor, pole=s.center.copy()), cost
    pole = s.center + s.radius / (s.radius - s2.radius) * offset
    return SphereMap(kind="homothety", factor=factor, pole=pole), cost


def circle_cost_bound(a: CircleSpec, b: CircleSpec) -> float:
    """Upper bound on W2^2 between the uniform measures on two circles."""
    offset = a.center - b.center
    alignment = abs(float(a.axis @ b.axis))
    value = (
        float(offset @ offset)
        + a.radius ** 2
        + b.radius ** 2
        - a.radius * b.radius * (1.0 + alignment)
    )
    return max(value, 0.0)


def kac_curve_cost_bound(vw, xy, p_inel: float) -> float:
    """
    Upper bound on W2^2 between the uniform measures on two Kac collision curves.

    The curve of (v, w) is the image of theta -> (v'(theta), w'(theta)) in the
    plane; rotating and dilating one onto the other costs
    (1 - 2 beta)(|v - x|^2 + |w - y|^2).
    """
    v, w = (float(c) for c in vw)
    x, y = (float(c) for c in xy)
    return kac_gain_factor(p_inel) * ((v - x) ** 2 + (w - y) ** 2)


def sample_sphere(spec: SphereSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on a sphere by normalizing standard normal draws."""
    directions = rng.standard_normal((size, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return spec.center + spec.radius * directions


def sample_circle(spec: CircleSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on a circle in the plane orthogonal to its axis."""
    t1, t2, _ = frame_from_axis(spec.axis)
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    return (
        spec.center
        + spec.radius * np.cos(phi)[:, None] * t1
        + spec.radius * np.sin(phi)[:, None] * t2
    )
