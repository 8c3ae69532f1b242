"""Fourth-moment calculus of the self-similar equation.

Under the energy-conserving self-similar equation the fourth moment obeys
the closed linear equation

    dm4/dtau = (4 - E lambda) m4 + E (mu1 m2^2 + mu2 m2bar)

with m2 and m2bar frozen at their initial values.
"""
import csv
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from ..collision.params import ModelParams
from ..utils.errors import ArgumentError, ConfigurationError
from ..utils.io import atomic_open
from ..utils.logger import get_logger
from .observables import MomentState

logger = get_logger(__name__)

RK4_MAX_STEP = 0.01


@dataclass(frozen=True)
class AppendixCoefficients:
    alpha: float
    beta: float
    gamma: float
    lam: float
    mu1: float
    mu2: float


def _check_e(e: float):
    if not 0.0 < e <= 1.0:
        raise ArgumentError(f"restitution must lie in (0, 1], got {e}")


def appendix_coefficients(e: float) -> AppendixCoefficients:
    """
    Coefficients of the collisional fourth-moment balance.

    Args:
        e (float): Restitution coefficient

    Returns:
        AppendixCoefficients: alpha, beta, gamma and the derived lambda, mu1, mu2
    """
    _check_e(e)
    eps = (1.0 - e) / 2.0
    eps_p = 1.0 - eps
    s = eps * eps + eps_p * eps_p
    alpha = s * s - 1.0 + 4.0 / 3.0 * eps * eps * eps_p * eps_p
    beta = 2.0 * (s - 1.0 + 2.0 / 3.0 * eps_p * eps_p)
    gamma = 4.0 * (eps * eps - 1.0)
    return AppendixCoefficients(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        lam=-(alpha + beta + gamma) / 8.0,
        mu1=(alpha + beta - gamma) / 8.0,
        mu2=(alpha - beta) / 4.0,
    )


def lambda_quartic(e: float) -> float:
    """lambda as the polynomial (1 + 4 eps - 7 eps^2 + 4 eps^3 - 2 eps^4) / 3."""
    _check_e(e)
    eps = (1.0 - e) / 2.0
    return (1.0 + 4.0 * eps - 7.0 * eps ** 2 + 4.0 * eps ** 3 - 2.0 * eps ** 4) / 3.0


def cooling_rate(e: float) -> float:
    """
    The exponent 4 - E lambda, negative for every 0 < e < 1.

    Evaluated from 2 / (3 eps (1 - eps)) (-1 + 2 eps + eps^2 - 4 eps^3 + 2 eps^4).
    """
    _check_e(e)
    if e == 1.0:
        raise ConfigurationError("4 - E lambda needs E = 8/(1 - e^2), undefined for e = 1", key="e")
    eps = (1.0 - e) / 2.0
    poly = -1.0 + 2.0 * eps + eps ** 2 - 4.0 * eps ** 3 + 2.0 * eps ** 4
    return 2.0 / (3.0 * eps * (1.0 - eps)) * poly


def m4_rhs(ms: MomentState, params: ModelParams) -> float:
    """Right-hand side of the fourth-moment equation at state ``ms``."""
    c = appendix_coefficients(params.e)
    E = params.E
    return (4.0 - E * c.lam) * ms.m4 + E * (c.mu1 * ms.m2 ** 2 + c.mu2 * ms.m2bar)


def m4_fixed_point(m2: float, m2bar: float, e: float) -> float:
    """Stationary fourth moment E (mu1 m2^2 + mu2 m2bar) / (E lambda - 4)."""
    params = ModelParams(e=e)
    c = appendix_coefficients(e)
    E = params.E
    return E * (c.mu1 * m2 ** 2 + c.mu2 * m2bar) / (E * c.lam - 4.0)


def m4_closed_form(tau, m4_0: float, m2: float, m2bar: float, e: float):
    """Exact solution m4* + (m4(0) - m4*) e^((4 - E lambda) tau)."""
    fixed = m4_fixed_point(m2, m2bar, e)
    return fixed + (m4_0 - fixed) * np.exp(cooling_rate(e) * np.asarray(tau, dtype=float))


@dataclass
class M4Trajectory:
    tau: np.ndarray
    m4: np.ndarray
    m2: float
    m2bar: float

    def to_csv(self, path: str) -> str:
        """Write columns tau, m4, m2, m2bar."""
        try:
            with atomic_open(path, "w") as f:
                writer = csv.writer(f)
                writer.writerow(["tau", "m4", "m2", "m2bar"])
                for tau, m4 in zip(self.tau, self.m4):
                    writer.writerow([repr(float(tau)), repr(float(m4)), repr(self.m2), repr(self.m2bar)])
            logger.info(f"m4 trajectory written to {path}")
            return path
        except OSError as e:
            logger.error(f"Error writing m4 trajectory to {path}: {e}")
            raise


def integrate_m4(ms0: MomentState, params: ModelParams, tau_end: float, dtau: float = RK4_MAX_STEP) -> M4Trajectory:
    """
    Integrate the fourth-moment equation with the classical Runge-Kutta scheme.

    Args:
        ms0 (MomentState): Initial state; m2 and m2bar stay fixed
        params (ModelParams): Model parameters (e < 1)
        tau_end (float): Final scaled time
        dtau (float): Step, shortened so that steps tile [0, tau_end]

    Returns:
        M4Trajectory: m4 on the step grid, including tau = 0
    """
    if not tau_end >= 0:
        raise ArgumentError(f"tau_end must be nonnegative, got {tau_end}")
    if not dtau > 0:
        raise ArgumentError(f"dtau must be positive, got {dtau}")
    if dtau > RK4_MAX_STEP:
        logger.warning(f"RK4 step {dtau} exceeds the recommended {RK4_MAX_STEP}")

    c = appendix_coefficients(params.e)
    E = params.E
    slope = 4.0 - E * c.lam
    source = E * (c.mu1 * ms0.m2 ** 2 + c.mu2 * ms0.m2bar)

    def rhs(m4: float) -> float:
        return slope * m4 + source

    steps = max(1, math.ceil(tau_end / dtau - 1e-9)) if tau_end > 0 else 0
    h = tau_end / steps if steps else 0.0
    values: List[float] = [ms0.m4]
    m4 = ms0.m4
    for _ in range(steps):
        k1 = rhs(m4)
        k2 = rhs(m4 + 0.5 * h * k1)
        k3 = rhs(m4 + 0.5 * h * k2)
        k4 = rhs(m4 + h * k3)
        m4 = m4 + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        values.append(m4)

    logger.debug(f"Integrated m4 over {steps} RK4 steps to tau = {tau_end}")
    return M4Trajectory(
        tau=np.linspace(0.0, tau_end, steps + 1),
        m4=np.asarray(values),
        m2=ms0.m2,
        m2bar=ms0.m2bar,
    )
