from dataclasses import dataclass

from ..utils.errors import ConfigurationError


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the inelastic Maxwell model.

    Attributes:
        e (float): Restitution coefficient in (0, 1]
        B (float): Collision frequency prefactor
        A (float): Thermostat amplitude
        p_diff (float): Thermostat exponent in [0, 3/2)
    """

    e: float
    B: float = 1.0
    A: float = 0.0
    p_diff: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.e <= 1.0:
            raise ConfigurationError(f"must lie in (0, 1], got {self.e}", key="e")
        if not self.B > 0.0:
            raise ConfigurationError(f"must be positive, got {self.B}", key="B")
        if not self.A >= 0.0:
            raise ConfigurationError(f"must be nonnegative, got {self.A}", key="A")
        if not 0.0 <= self.p_diff < 1.5:
            raise ConfigurationError(f"must lie in [0, 3/2), got {self.p_diff}", key="p_diff")

    @property
    def eps(self) -> float:
        return (1.0 - self.e) / 2.0

    @property
    def eps_prime(self) -> float:
        return 1.0 - self.eps

    @property
    def elastic(self) -> bool:
        return self.e == 1.0

    @property
    def E(self) -> float:
        """Time-scaling constant 8 / (1 - e^2), undefined in the elastic case."""
        if self.elastic:
            raise ConfigurationError(
                "the cooling time scale E = 8/(1 - e^2) is undefined for e = 1", key="e"
            )
        return 8.0 / (1.0 - self.e ** 2)

    @property
    def steady_temperature(self) -> float:
        """Thermostatted equilibrium temperature (8A / (B(1 - e^2)))^(2/(3 - 2p))."""
        return (self.E * self.A / self.B) ** (2.0 / (3.0 - 2.0 * self.p_diff))


@dataclass(frozen=True)
class KacParams:
    """Inelasticity of the one-dimensional Kac model (p_inel = 0 is elastic)."""

    p_inel: float

    def __post_init__(self):
        if not self.p_inel >= 0.0:
            raise ConfigurationError(f"must be nonnegative, got {self.p_inel}", key="p_inel")

    @property
    def elastic(self) -> bool:
        return self.p_inel == 0.0

    @property
    def beta(self) -> float:
        from .rates import kac_rate

        return kac_rate(self.p_inel)
