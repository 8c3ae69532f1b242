"""Closed-form temperature laws of the cooling and Kac equations."""
import numpy as np

from ..collision.params import ModelParams
from ..collision.rates import kac_rate
from ..utils.errors import ArgumentError
from ..utils.logger import get_logger

logger = get_logger(__name__)


def haff_theta(t, theta0: float, params: ModelParams):
    """
    Haff's law theta(t) = (theta0^(-1/2) + (1 - e^2) B t / 8)^(-2).

    Args:
        t: Original time, scalar or array, nonnegative
        theta0 (float): Initial temperature
        params (ModelParams): Model parameters

    Returns:
        Temperature at t. In the elastic case there is no cooling and theta0
        is returned with a logged warning.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ArgumentError("time must be nonnegative")
    if not theta0 > 0:
        raise ArgumentError(f"theta0 must be positive, got {theta0}")
    if params.elastic:
        logger.warning("Haff's law evaluated at e = 1: no cooling, returning theta0")
        value = np.full_like(t_arr, theta0)
    else:
        rate = (1.0 - params.e ** 2) * params.B / 8.0
        value = (theta0 ** -0.5 + rate * t_arr) ** -2.0
    return float(value) if value.ndim == 0 else value


def homogeneous_theta(tau, theta0: float):
    """Temperature in scaled time, theta0 e^(-2 tau)."""
    return theta0 * np.exp(-2.0 * np.asarray(tau, dtype=float))


def kac_mean(tau, mean0: float):
    """Mean velocity of the Kac equation, e^(-tau) mean0."""
    return mean0 * np.exp(-np.asarray(tau, dtype=float))


def kac_second_moment(tau, m2_0: float, p_inel: float):
    """Uncentered second moment of the Kac equation, e^(-2 beta tau) m2_0."""
    return m2_0 * np.exp(-2.0 * kac_rate(p_inel) * np.asarray(tau, dtype=float))


def kac_temperature(tau, theta0: float, mean0: float, p_inel: float):
    """
    Centered temperature of the Kac equation.

    theta(tau) = e^(-2 beta tau) theta0 + (e^(-2 beta tau) - e^(-2 tau)) mean0^2,
    the difference between the decaying second moment and the squared mean.
    """
    tau = np.asarray(tau, dtype=float)
    decay = np.exp(-2.0 * kac_rate(p_inel) * tau)
    return decay * theta0 + (decay - np.exp(-2.0 * tau)) * mean0 ** 2
