"""Analytic contraction constants of the collision operators."""
import math

from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from ..config.config import QUAD_TOL
from ..utils.errors import ArgumentError
from .cross_section import CrossSection


def _check_restitution(e: float):
    if not 0.0 <= e <= 1.0:
        raise ArgumentError(f"restitution must lie in [0, 1], got {e}")


def contraction_factor_gain(e: float) -> float:
    """Lipschitz constant sqrt((3 + e^2)/4) of the gain operator in W2."""
    _check_restitution(e)
    return math.sqrt((3.0 + e * e) / 4.0)


def angular_contraction_factor(theta: float, e: float) -> float:
    """Squared contraction of the gain measure restricted to deflection angle theta."""
    _check_restitution(e)
    return (3.0 + e * e) / 4.0 + (1.0 - e * e) / 4.0 * math.cos(theta)


def contraction_factor_cross_section(e: float, xs: CrossSection) -> float:
    """
    Squared contraction constant gamma_b for a general cutoff cross-section.

    gamma_b = (3 + e^2)/4 + (1 - e^2)/2 * pi * int_0^pi b(cos t) cos t sin t dt,
    the b-weighted average of ``angular_contraction_factor``.

    Args:
        e (float): Restitution coefficient
        xs (CrossSection): Normalized angular kernel

    Returns:
        float: gamma_b, at most 1
    """
    _check_restitution(e)
    xs.check_normalized()
    # pi * int b cos sin dtheta is half of E[cos theta]
    first_moment = 0.5 * xs.mean_cosine()
    return (3.0 + e * e) / 4.0 + (1.0 - e * e) / 2.0 * first_moment


def gain_bound_sq(w2_sq: float, mean_gap_sq: float, e: float) -> float:
    """Bound on W2^2(Q+f, Q+g) given W2^2(f, g) and |<f> - <g>|^2."""
    _check_restitution(e)
    return (3.0 + e * e) / 4.0 * w2_sq + (1.0 - e * e) / 4.0 * mean_gap_sq


def kac_gain_factor(p_inel: float) -> float:
    """
    Average energy retained by a Kac collision.

    Returns int_0^{2 pi} (|cos t|^{2(p+1)} + |sin t|^{2(p+1)}) dt / 2 pi,
    which equals 1 - 2 beta.
    """
    if not p_inel >= 0.0:
        raise ArgumentError(f"p_inel must be nonnegative, got {p_inel}")
    if p_inel == 0.0:
        return 1.0
    q = 2.0 * (p_inel + 1.0)
    # Both terms have period pi/2 symmetry on the circle
    value, _ = quad(
        lambda t: math.cos(t) ** q + math.sin(t) ** q,
        0.0,
        math.pi / 2.0,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
    )
    return 2.0 * value / math.pi


def kac_gain_factor_closed_form(p_inel: float) -> float:
    """Gamma-function form of ``kac_gain_factor``."""
    if not p_inel >= 0.0:
        raise ArgumentError(f"p_inel must be nonnegative, got {p_inel}")
    q = 2.0 * (p_inel + 1.0)
    return 2.0 * gamma_fn((q + 1.0) / 2.0) / (math.sqrt(math.pi) * gamma_fn(q / 2.0 + 1.0))


def kac_rate(p_inel: float) -> float:
    """Contraction rate beta of the inelastic Kac equation (0 iff elastic)."""
    if not p_inel >= 0.0:
        raise ArgumentError(f"p_inel must be nonnegative, got {p_inel}")
    if p_inel == 0.0:
        return 0.0
    return (1.0 - kac_gain_factor(p_inel)) / 2.0
