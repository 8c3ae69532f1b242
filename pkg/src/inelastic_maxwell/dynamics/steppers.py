"""Stochastic particle stepping of the five evolution equations.

Collisions are binary events between uniformly chosen particles: over a step
dtau the number of pair events is Poisson(N rate dtau / 2), so that every
particle collides at the family's rate, and both partners are updated. Events
are applied in their drawn order; pairs that share no particle with an
earlier pending pair are applied together in one vectorized layer, which
gives the same result as applying them one at a time.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..collision.cross_section import CrossSection
from ..collision.kernels import (
    collision_axes,
    draw_scattering,
    kac_post_collision,
    post_collision_pairs,
    scatter,
)
from ..collision.params import KacParams, ModelParams
from ..config.config import FAMILIES, MAX_EVENTS_PER_STEP, THETA_FLOOR
from ..utils.errors import ArgumentError, ConfigurationError
from ..utils.logger import get_logger
from ..utils.numerics import exact_column_means, squared_norms
from ..utils.seeds import DYNAMICS, stream
from .ensemble import VelocityEnsemble

logger = get_logger(__name__)

# Applies collisions to rows (i, j) given the per-pair variates
PairUpdate = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple]


def _conflict_free_layers(i: np.ndarray, j: np.ndarray, n: int):
    """Yield index arrays of pairs that can be applied simultaneously, in order."""
    remaining = np.arange(i.shape[0])
    while remaining.size:
        first = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(first, i[remaining], remaining)
        np.minimum.at(first, j[remaining], remaining)
        ready = (first[i[remaining]] == remaining) & (first[j[remaining]] == remaining)
        yield remaining[ready]
        remaining = remaining[~ready]


def _collide(
    velocities: np.ndarray,
    rate: float,
    dtau: float,
    rng: np.random.Generator,
    draw: Callable[[int], np.ndarray],
    update: PairUpdate,
) -> np.ndarray:
    n = velocities.shape[0]
    if n < 2:
        raise ArgumentError("collisional stepping needs at least two particles")
    events = rng.poisson(n * rate * dtau / 2.0)
    if events == 0:
        return velocities.copy()

    i = rng.integers(0, n, events)
    j = (i + rng.integers(1, n, events)) % n
    variates = draw(events)

    velocities = velocities.copy()
    layers = 0
    for batch in _conflict_free_layers(i, j, n):
        a, b = i[batch], j[batch]
        v_new, w_new = update(velocities[a], velocities[b], variates[batch])
        velocities[a] = v_new
        velocities[b] = w_new
        layers += 1
    logger.debug(f"{events} collision events applied in {layers} layers")
    return velocities


def _maxwell_update(e: float, xs: CrossSection) -> PairUpdate:
    def update(V, W, variates):
        sigma = scatter(collision_axes(V, W), xs, variates)
        return post_collision_pairs(V, W, sigma, e)

    return update


def _require_dim(ens: VelocityEnsemble, dim: int, family: str):
    if ens.dim != dim:
        raise ConfigurationError(f"the {family} equation needs d = {dim}, got {ens.dim}", key="dimension")


def _maxwell_collisions(ens, e, xs, rate, dtau, rng) -> np.ndarray:
    xs = xs or CrossSection.constant()
    return _collide(
        ens.velocities,
        rate,
        dtau,
        rng,
        draw=lambda m: draw_scattering(m, xs, rng),
        update=_maxwell_update(e, xs),
    )


def step_homogeneous(ens: VelocityEnsemble, params: ModelParams, xs: Optional[CrossSection],
                     dtau: float, rng: np.random.Generator) -> VelocityEnsemble:
    """
    One step of the scaled cooling equation df/dtau = E Q(f, f).

    Args:
        ens (VelocityEnsemble): Current 3D ensemble
        params (ModelParams): Model parameters, e < 1
        xs (CrossSection, optional): Angular kernel; constant when omitted
        dtau (float): Step length
        rng (np.random.Generator): Stream owned by this ensemble

    Returns:
        VelocityEnsemble: Ensemble at time + dtau
    """
    _require_dim(ens, 3, "homogeneous")
    velocities = _maxwell_collisions(ens, params.e, xs, params.E, dtau, rng)
    return ens.advanced(velocities, dtau)


def step_cutoff(ens: VelocityEnsemble, params: ModelParams, xs: Optional[CrossSection],
                dtau: float, rng: np.random.Generator) -> VelocityEnsemble:
    """One step of df/dtau = Q+(f, f) - f: unit collision rate, any e in (0, 1]."""
    _require_dim(ens, 3, "cutoff")
    velocities = _maxwell_collisions(ens, params.e, xs, 1.0, dtau, rng)
    return ens.advanced(velocities, dtau)


def diffusion_strength(theta: float, params: ModelParams) -> float:
    """Thermostat coefficient (E A / B) theta^(p - 1/2), theta clamped at THETA_FLOOR."""
    if params.p_diff < 0.5 and theta < THETA_FLOOR:
        logger.warning(f"Temperature {theta:.3e} clamped to {THETA_FLOOR} in the thermostat")
    return params.E * params.A / params.B * max(theta, THETA_FLOOR) ** (params.p_diff - 0.5)


def step_diffusive(ens: VelocityEnsemble, params: ModelParams, xs: Optional[CrossSection],
                   dtau: float, rng: np.random.Generator) -> VelocityEnsemble:
    """
    One Lie-splitting step of the thermostatted cooling equation.

    Collisions at rate E are followed by centered Gaussian kicks of
    per-component variance 2 Theta^2 dtau, with Theta^2 evaluated at the
    post-collision temperature. A = 0 reduces to ``step_homogeneous``.
    """
    _require_dim(ens, 3, "diffusive")
    velocities = _maxwell_collisions(ens, params.e, xs, params.E, dtau, rng)
    if params.A > 0:
        centered = velocities - exact_column_means(velocities)
        theta = math.fsum(squared_norms(centered)) / velocities.size
        scale = math.sqrt(2.0 * diffusion_strength(theta, params) * dtau)
        velocities = velocities + scale * rng.standard_normal(velocities.shape)
    return ens.advanced(velocities, dtau)


def rescale_unit_temperature(velocities: np.ndarray) -> np.ndarray:
    """Remove the mean and scale to temperature one."""
    centered = velocities - exact_column_means(velocities)
    theta = math.fsum(squared_norms(centered)) / velocities.size
    if not theta > 0:
        raise ArgumentError("cannot rescale a collapsed ensemble (temperature 0)")
    return centered / math.sqrt(theta)


def step_selfsimilar(ens: VelocityEnsemble, params: ModelParams, xs: Optional[CrossSection],
                     dtau: float, rng: np.random.Generator) -> VelocityEnsemble:
    """
    One step of the self-similar equation dg/dtau + div(g v) = E Q(g, g).

    Realized as a homogeneous step followed by rescaling to zero mean and
    unit temperature.
    """
    _require_dim(ens, 3, "selfsimilar")
    velocities = _maxwell_collisions(ens, params.e, xs, params.E, dtau, rng)
    return ens.advanced(rescale_unit_temperature(velocities), dtau)


def step_kac(ens: VelocityEnsemble, kacp: KacParams, dtau: float,
             rng: np.random.Generator) -> VelocityEnsemble:
    """One step of the inelastic Kac equation at unit collision rate per particle."""
    _require_dim(ens, 1, "kac")
    p = kacp.p_inel

    def update(V, W, theta):
        return kac_post_collision(V, W, theta[:, None], p)

    velocities = _collide(
        ens.velocities,
        1.0,
        dtau,
        rng,
        draw=lambda m: rng.uniform(0.0, 2.0 * math.pi, m),
        update=update,
    )
    return ens.advanced(velocities, dtau)


@dataclass
class SimConfig:
    """Everything needed to advance one ensemble.

    Attributes:
        family (str): homogeneous, diffusive, selfsimilar, cutoff or kac
        params (ModelParams | KacParams): Physical parameters of the family
        cross_section (CrossSection): Angular kernel (3D families)
        dtau (float): Step length
        seed (int): Master seed
        n (int): Particle count
        stream (int): Index of the ensemble's dynamics stream
    """

    family: str
    params: Union[ModelParams, KacParams]
    dtau: float
    seed: int = 0
    n: int = 1000
    cross_section: CrossSection = field(default_factory=CrossSection.constant)
    stream: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family '{self.family}'", key="family")
        if self.family == "kac" and not isinstance(self.params, KacParams):
            raise ConfigurationError("the kac family needs KacParams", key="family")
        if self.family != "kac" and not isinstance(self.params, ModelParams):
            raise ConfigurationError(f"the {self.family} family needs ModelParams", key="family")
        if self.n < 2:
            raise ConfigurationError(f"N must be at least 2, got {self.n}", key="n")
        if not self.dtau > 0:
            raise ConfigurationError(f"dtau must be positive, got {self.dtau}", key="dtau")
        if self.dtau * self.collision_rate > MAX_EVENTS_PER_STEP:
            raise ConfigurationError(
                f"dtau * collision rate = {self.dtau * self.collision_rate:.4g} exceeds "
                f"{MAX_EVENTS_PER_STEP}",
                key="dtau",
            )

    @property
    def dimension(self) -> int:
        return 1 if self.family == "kac" else 3

    @property
    def collision_rate(self) -> float:
        """Collisions per particle per unit scaled time."""
        if self.family in ("cutoff", "kac"):
            return 1.0
        return self.params.E

    def rng(self) -> np.random.Generator:
        return stream(self.seed, DYNAMICS, self.stream)


def step(ens: VelocityEnsemble, config: SimConfig, rng: np.random.Generator,
         dtau: Optional[float] = None) -> VelocityEnsemble:
    """Advance by one step of the configured family."""
    dtau = config.dtau if dtau is None else dtau
    if config.family == "kac":
        return step_kac(ens, config.params, dtau, rng)
    stepper = {
        "homogeneous": step_homogeneous,
        "diffusive": step_diffusive,
        "selfsimilar": step_selfsimilar,
        "cutoff": step_cutoff,
    }[config.family]
    return stepper(ens, config.params, config.cross_section, dtau, rng)


def advance(ens: VelocityEnsemble, config: SimConfig, tau: float,
            rng: np.random.Generator) -> VelocityEnsemble:
    """
    Step until time ``tau``, shortening steps so that they tile the interval.

    Args:
        ens (VelocityEnsemble): Current ensemble
        config (SimConfig): Family and step size
        tau (float): Target time, not before ``ens.time``
        rng (np.random.Generator): Stream owned by this ensemble

    Returns:
        VelocityEnsemble: Ensemble with time exactly ``tau``
    """
    remaining = tau - ens.time
    if remaining < -1e-12:
        raise ArgumentError(f"cannot step back from {ens.time} to {tau}")
    if remaining <= 1e-12:
        return ens
    steps = max(1, math.ceil(remaining / config.dtau - 1e-9))
    h = remaining / steps
    for _ in range(steps):
        ens = step(ens, config, rng, h)
    ens.time = tau
    return ens
