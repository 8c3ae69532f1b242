"""Change of time between the original and the scaled cooling equations."""
import math

import numpy as np
from scipy.integrate import quad

from ..collision.params import ModelParams
from ..collision.rates import contraction_factor_gain
from ..config.config import QUAD_TOL
from ..moments.laws import haff_theta
from ..utils.errors import ArgumentError


def _cooling_speed(theta0: float, params: ModelParams) -> float:
    if not theta0 > 0:
        raise ArgumentError(f"theta0 must be positive, got {theta0}")
    return params.B / params.E * math.sqrt(theta0)


def tau_of_t(t, theta0: float, params: ModelParams):
    """
    Scaled time tau(t) = ln(1 + (1 - e^2) B sqrt(theta0) t / 8).

    Args:
        t: Original time (scalar or array), nonnegative
        theta0 (float): Initial temperature
        params (ModelParams): Model parameters, e < 1

    Returns:
        Scaled time, same shape as t
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ArgumentError("time must be nonnegative")
    value = np.log1p(_cooling_speed(theta0, params) * t_arr)
    return float(value) if value.ndim == 0 else value


def t_of_tau(tau, theta0: float, params: ModelParams):
    """Inverse of ``tau_of_t``."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ArgumentError("scaled time must be nonnegative")
    value = np.expm1(tau_arr) / _cooling_speed(theta0, params)
    return float(value) if value.ndim == 0 else value


def tau_of_t_quadrature(t: float, theta0: float, params: ModelParams) -> float:
    """tau(t) from (B/E) times the integral of sqrt(theta) along Haff's law."""
    if t < 0:
        raise ArgumentError("time must be nonnegative")
    value, _ = quad(
        lambda w: math.sqrt(haff_theta(w, theta0, params)),
        0.0,
        t,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
    )
    return params.B / params.E * value


def steady_temperature(params: ModelParams) -> float:
    """Equilibrium temperature of the thermostatted equation."""
    return params.steady_temperature


def original_time_bound_sq(t: float, theta0: float, w2_sq0: float, mean_gap_sq: float,
                           params: ModelParams) -> float:
    """Contraction bound on W2^2 at original time t: theta(t)/theta0 weights the initial distance."""
    ratio = haff_theta(t, theta0, params) / theta0
    return ratio * w2_sq0 + (1.0 - ratio) * mean_gap_sq


def diffusive_time_rate(theta0: float, params: ModelParams) -> float:
    """Exponential W2 contraction rate in original time for the thermostatted equation."""
    if not theta0 > 0:
        raise ArgumentError(f"theta0 must be positive, got {theta0}")
    gamma = contraction_factor_gain(params.e) ** 2
    return (1.0 - gamma) * params.B * math.sqrt(min(theta0, steady_temperature(params)))
