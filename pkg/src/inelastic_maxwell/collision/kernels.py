"""Microscopic collision rules and the samplers built on them."""
import math
from typing import Optional, Tuple

import numpy as np

from ..config.config import UNIT_TOL
from ..utils.errors import ArgumentError
from ..utils.logger import get_logger
from .cross_section import CrossSection

logger = get_logger(__name__)


def post_collision_pairs(V: np.ndarray, W: np.ndarray, Sigma: np.ndarray, e: float):
    """
    Vectorized inelastic Maxwell collision.

    v' = (v + w)/2 + (1 - e)/4 (v - w) + (1 + e)/4 |v - w| sigma and
    w' = (v + w)/2 - (1 - e)/4 (v - w) - (1 + e)/4 |v - w| sigma.

    Args:
        V (np.ndarray): Pre-collision velocities (n, 3)
        W (np.ndarray): Partner velocities (n, 3)
        Sigma (np.ndarray): Unit scattering directions (n, 3)
        e (float): Restitution coefficient

    Returns:
        Tuple[np.ndarray, np.ndarray]: (V', W')
    """
    relative = V - W
    speed = np.sqrt(np.einsum("...i,...i->...", relative, relative))[..., None]
    center = 0.5 * (V + W)
    delta = (1.0 - e) / 4.0 * relative + (1.0 + e) / 4.0 * speed * Sigma
    return center + delta, center - delta


def post_collision_pair(v, w, sigma, e: float) -> Tuple[np.ndarray, np.ndarray]:
    """Single collision; equal velocities are left unchanged."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if v.shape != (3,) or w.shape != (3,) or sigma.shape != (3,):
        raise ArgumentError("post_collision_pair expects three 3-vectors")
    if abs(np.linalg.norm(sigma) - 1.0) > UNIT_TOL:
        raise ArgumentError(f"sigma must be a unit vector, |sigma| = {np.linalg.norm(sigma)!r}")
    if not 0.0 <= e <= 1.0:
        raise ArgumentError(f"restitution must lie in [0, 1], got {e}")
    return post_collision_pairs(v, w, sigma, e)


def frame_from_axis(k):
    """
    Complete a unit vector to a right-handed orthonormal frame (t1, t2, k).

    Uses the branchless construction of Duff et al.; the frame is continuous
    in k except across the plane k_z = 0, where the sign of k_z flips.

    Args:
        k: Unit 3-vector or an (n, 3) array of them

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: t1, t2, k with t1 x t2 = k
    """
    k = np.asarray(k, dtype=float)
    single = k.ndim == 1
    k = np.atleast_2d(k)
    if k.shape[1] != 3:
        raise ArgumentError("frame_from_axis expects 3-vectors")
    norms = np.linalg.norm(k, axis=1)
    if np.any(norms == 0):
        raise ArgumentError("cannot build a frame around the zero vector")
    k = k / norms[:, None]

    kx, ky, kz = k[:, 0], k[:, 1], k[:, 2]
    sign = np.copysign(1.0, kz)
    a = -1.0 / (sign + kz)
    b = kx * ky * a
    t1 = np.stack([1.0 + sign * kx * kx * a, sign * b, -sign * kx], axis=1)
    t2 = np.stack([b, sign + ky * ky * a, -ky], axis=1)
    if single:
        return t1[0], t2[0], k[0]
    return t1, t2, k


def draw_scattering(size: int, xs: CrossSection, rng: np.random.Generator) -> np.ndarray:
    """
    Draw the random variates of ``size`` scatterings ahead of time.

    Returns uniform unit vectors (size, 3) for the constant kernel and
    (u, phi) pairs (size, 2) otherwise; ``scatter`` turns them into sigma.
    """
    if xs.kind == "constant":
        directions = rng.standard_normal((size, 3))
        return directions / np.linalg.norm(directions, axis=1, keepdims=True)
    u = rng.random(size)
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    return np.stack([u, phi], axis=1)


def scatter(axes: np.ndarray, xs: CrossSection, variates: np.ndarray) -> np.ndarray:
    """Scattering directions about unit ``axes`` (n, 3) from pre-drawn variates."""
    if xs.kind == "constant":
        return variates
    t1, t2, axes = frame_from_axis(axes)
    cos_theta = np.clip(xs.sample_cos(variates[:, 0]), -1.0, 1.0)
    sin_theta = np.sqrt(1.0 - cos_theta * cos_theta)
    phi = variates[:, 1]
    return (
        cos_theta[:, None] * axes
        + (sin_theta * np.cos(phi))[:, None] * t1
        + (sin_theta * np.sin(phi))[:, None] * t2
    )


def sample_sigma(k, xs: CrossSection, rng: np.random.Generator) -> np.ndarray:
    """
    Draw scattering directions about the axis k.

    cos(theta) follows the density 2 pi b(c) on [-1, 1] and the azimuth is
    uniform. For the constant kernel the direction is uniform on the sphere
    and k is not used.

    Args:
        k: Unit 3-vector or (n, 3) array of axes
        xs (CrossSection): Normalized angular kernel
        rng (np.random.Generator): Random stream

    Returns:
        np.ndarray: Unit vectors with the shape of k
    """
    k = np.asarray(k, dtype=float)
    single = k.ndim == 1
    axes = np.atleast_2d(k)
    sigma = scatter(axes, xs, draw_scattering(axes.shape[0], xs, rng))
    return sigma[0] if single else sigma


def collision_axes(V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Unit relative velocities (v - w)/|v - w|; e_z where v = w."""
    relative = V - W
    norms = np.linalg.norm(relative, axis=1)
    axes = np.tile(np.array([0.0, 0.0, 1.0]), (relative.shape[0], 1))
    moving = norms > 0
    axes[moving] = relative[moving] / norms[moving, None]
    return axes


def kac_post_collision(v, w, theta, p_inel: float):
    """
    Inelastic Kac collision in the plane of (v, w).

    v' = v cos|cos|^p - w sin|sin|^p and w' = v sin|sin|^p + w cos|cos|^p;
    p = 0 is a rotation. Accepts scalars or arrays of equal shape.
    """
    if not p_inel >= 0.0:
        raise ArgumentError(f"p_inel must be nonnegative, got {p_inel}")
    c = np.cos(theta)
    s = np.sin(theta)
    cp = c * np.abs(c) ** p_inel
    sp = s * np.abs(s) ** p_inel
    v_new = v * cp - w * sp
    w_new = v * sp + w * cp
    return v_new, w_new


def _draw_pairs(n: int, size: int, rng: np.random.Generator):
    # Independent pairs with replacement, matching the product f(v) f(w)
    return rng.integers(0, n, size), rng.integers(0, n, size)


def sample_gain(
    velocities,
    e: float,
    size: int,
    rng: np.random.Generator,
    xs: Optional[CrossSection] = None,
) -> np.ndarray:
    """
    Sample the gain measure Q+(f, f) of an empirical cloud.

    Args:
        velocities: (N, 3) cloud
        e (float): Restitution coefficient
        size (int): Number of samples
        rng (np.random.Generator): Random stream
        xs (CrossSection, optional): Angular kernel; constant when omitted

    Returns:
        np.ndarray: (size, 3) post-collision velocities v'
    """
    velocities = np.asarray(velocities, dtype=float)
    if velocities.ndim != 2 or velocities.shape[1] != 3:
        raise ArgumentError("sample_gain expects an (N, 3) cloud")
    xs = xs or CrossSection.constant()
    i, j = _draw_pairs(velocities.shape[0], size, rng)
    V, W = velocities[i], velocities[j]
    sigma = sample_sigma(collision_axes(V, W), xs, rng)
    v_new, _ = post_collision_pairs(V, W, sigma, e)
    return v_new


def sample_kac_gain(velocities, p_inel: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Sample the Kac gain measure; returns (size, 1) velocities v'."""
    velocities = np.asarray(velocities, dtype=float).reshape(-1)
    i, j = _draw_pairs(velocities.shape[0], size, rng)
    theta = rng.uniform(0.0, 2.0 * math.pi, size)
    v_new, _ = kac_post_collision(velocities[i], velocities[j], theta, p_inel)
    return v_new[:, None]
