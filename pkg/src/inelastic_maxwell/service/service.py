from typing import Dict, List, Optional, Sequence

import numpy as np

from ..collision.params import KacParams, ModelParams
from ..collision.rates import contraction_factor_cross_section, contraction_factor_gain
from ..collision.cross_section import CrossSection
from ..config.experiment import ExperimentSpec, parse_config
from ..dynamics.ensemble import VelocityEnsemble
from ..harness.report import VerificationReport
from ..harness.simulate import SimulationResult, simulate
from ..harness.suites import verify
from ..moments.fourth_moment import (
    appendix_coefficients,
    cooling_rate,
    m4_closed_form,
    m4_fixed_point,
)
from ..transport.solvers import w2_empirical
from ..utils.errors import ArgumentError
from ..utils.logger import get_logger

logger = get_logger(__name__)


class ExperimentService:
    """Entry points shared by the command line and the JSON API."""

    def load(self, config_path: str) -> ExperimentSpec:
        try:
            return parse_config(config_path)
        except Exception as e:
            logger.error(f"Error loading experiment {config_path}: {e}")
            raise

    def simulate(self, config_path: str) -> SimulationResult:
        """
        Run the paired experiment described by a config file.

        Args:
            config_path (str): Path to the experiment file

        Returns:
            SimulationResult: Recorded run and the files written
        """
        spec = self.load(config_path)
        try:
            return simulate(spec)
        except Exception as e:
            logger.error(f"Error simulating {spec.name}: {e}")
            raise

    def verify(self, suite: str, config_path: str) -> VerificationReport:
        """
        Run a verification suite and write its CSV report and JSON summary.

        Args:
            suite (str): Suite name, or "all"
            config_path (str): Path to the experiment file

        Returns:
            VerificationReport: The assembled report
        """
        spec = self.load(config_path)
        try:
            report = verify(suite, spec)
            report.to_csv(spec.output_path("report_csv", f"-{suite}-report.csv"))
            report.to_json(spec.output_path("report_json", f"-{suite}-report.json"))
            return report
        except Exception as e:
            logger.error(f"Error running suite {suite}: {e}")
            raise

    def w2_snapshots(self, path_a: str, path_b: str) -> float:
        """Exact W2 between two saved ensembles."""
        try:
            a = VelocityEnsemble.load(path_a)
            b = VelocityEnsemble.load(path_b)
            if a.n != b.n or a.dim != b.dim:
                raise ArgumentError(
                    f"snapshots hold {a.n}x{a.dim} and {b.n}x{b.dim} velocities"
                )
            return w2_empirical(a.velocities, b.velocities)
        except Exception as e:
            logger.error(f"Error comparing {path_a} and {path_b}: {e}")
            raise

    def w2(self, points_a: Sequence[Sequence[float]], points_b: Sequence[Sequence[float]]) -> float:
        """Exact W2 between two equal-size point clouds."""
        try:
            a = np.asarray(points_a, dtype=float)
            b = np.asarray(points_b, dtype=float)
            if a.shape != b.shape:
                raise ArgumentError(f"point clouds differ in shape: {a.shape} vs {b.shape}")
            return w2_empirical(a, b)
        except Exception as e:
            logger.error(f"Error computing W2: {e}")
            raise

    def coeffs(self, e: Optional[float] = None, p: Optional[float] = None) -> Dict[str, float]:
        """
        Model constants for a restitution coefficient and/or a Kac exponent.

        Args:
            e (float, optional): Restitution coefficient in (0, 1]
            p (float, optional): Kac inelasticity exponent, p >= 0

        Returns:
            Dict[str, float]: E (e < 1 only), gain and constant-kernel contraction
            factors, cooling rate 4 - E lambda, lambda, mu1, mu2, and beta
        """
        if e is None and p is None:
            raise ArgumentError("give a restitution coefficient, a Kac exponent or both")
        try:
            values: Dict[str, float] = {}
            if e is not None:
                params = ModelParams(e=e)
                coefficients = appendix_coefficients(e)
                if not params.elastic:
                    values["E"] = params.E
                    values["cooling_rate"] = cooling_rate(e)
                values["gain_factor"] = contraction_factor_gain(e)
                values["gamma_constant"] = contraction_factor_cross_section(e, CrossSection.constant())
                values["lambda"] = coefficients.lam
                values["mu1"] = coefficients.mu1
                values["mu2"] = coefficients.mu2
            if p is not None:
                values["beta"] = KacParams(p_inel=p).beta
            return values
        except Exception as e:
            logger.error(f"Error computing coefficients: {e}")
            raise

    def moments(self, e: float, m2: float, m2bar: float, m4_0: float,
                taus: List[float]) -> Dict[str, object]:
        """Fourth-moment trajectory of the self-similar flow and its fixed point."""
        try:
            trajectory = m4_closed_form(np.asarray(taus, dtype=float), m4_0, m2, m2bar, e)
            return {
                "tau": [float(t) for t in taus],
                "m4": [float(v) for v in np.atleast_1d(trajectory)],
                "fixed_point": m4_fixed_point(m2, m2bar, e),
            }
        except Exception as e:
            logger.error(f"Error computing moment trajectory: {e}")
            raise
