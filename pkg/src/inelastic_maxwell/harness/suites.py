"""Verification suites.

Every suite turns the analytic statements of the model into ``Check`` rows.
Deterministic statements carry fixed numerical tolerances; statistical ones
carry a slack of SLACK_FACTOR times the empirical self-distance between two
independent samples of the same law at the same N, scaled with the current
temperature where the ensembles cool or heat.
"""
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List

import numpy as np
from scipy.stats import chi2, linregress

from ..collision.cross_section import CrossSection
from ..collision.kernels import kac_post_collision, sample_gain, sample_sigma
from ..collision.params import KacParams, ModelParams
from ..collision.rates import (
    contraction_factor_cross_section,
    contraction_factor_gain,
    kac_gain_factor,
    kac_gain_factor_closed_form,
    kac_rate,
)
from ..config.config import (
    ASSIGNMENT_CAP,
    EQUALITY_TOL,
    MAX_EVENTS_PER_STEP,
    SLACK_FACTOR,
    SUITES,
)
from ..config.experiment import ExperimentSpec
from ..dynamics.ensemble import VelocityEnsemble, initial_ensemble
from ..dynamics.paired import run_paired
from ..dynamics.steppers import SimConfig, advance, step
from ..dynamics.timescale import t_of_tau, tau_of_t, tau_of_t_quadrature
from ..moments.fourth_moment import (
    appendix_coefficients,
    cooling_rate,
    integrate_m4,
    lambda_quartic,
    m4_closed_form,
    m4_fixed_point,
)
from ..moments.laws import haff_theta
from ..moments.observables import MomentState, moments_of
from ..transport.geometry import (
    CircleSpec,
    SphereSpec,
    circle_cost_bound,
    kac_curve_cost_bound,
    sample_circle,
    sample_sphere,
    sphere_transport_map,
)
from ..transport.measures import DiscreteMeasure
from ..transport.solvers import (
    convolve_measures,
    marginal,
    mixture,
    scale_measure,
    w2_discrete_lp,
    w2_empirical,
    w2_exact_1d,
    w2_exact_assignment,
)
from ..utils.errors import ArgumentError
from ..utils.logger import get_logger
from ..utils.seeds import INITIAL, SAMPLING, stream
from .report import Check, VerificationReport

logger = get_logger(__name__)

SUITE_IDS = {name: index for index, name in enumerate(SUITES)}

FLOW_E_VALUES = (0.3, 0.7)
FLOW_SCHEDULE = (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
FLOW_TAU_MAX = 3.0
TEMPERATURE_LAW_E = 0.5
TEMPERATURE_RECORD_EVERY = 0.25
SELFSIMILAR_E = 0.5
SELFSIMILAR_TAU_END = 10
DIFFUSIVE_E = 0.5
DIFFUSIVE_DTAU = 1e-3
DIFFUSIVE_CASES = ((0.0, 0.5), (1.0, 0.5))
DIFFUSIVE_TAU_END = 8.0
DIFFUSIVE_AVERAGE_FROM = 6.0
DIFFUSIVE_SCHEDULE = (0.0, 0.25, 0.5, 1.0, 2.0)
XS_SCHEDULE = (0.0, 1.0, 2.0, 3.0, 4.0)
XS_SIGMA_SAMPLES = 20000
KAC_SCHEDULE = tuple(np.linspace(0.0, 4.0, 9))
KAC_P = 1.0
MOMENTS_E = 0.5
MOMENTS_SCHEDULE = tuple(np.linspace(0.0, 10.0, 21))
MOMENTS_MATCH_UNTIL = 5.0
TEMPERATURE_TOL = 0.02
METRIC_TOL = 1e-10
KAC_RATE_TOL = 0.05
MOMENT_TOL = 0.05
STAT_SIGMAS = 4.0


def _assignment_n(spec: ExperimentSpec) -> int:
    return min(spec.experiment.n, ASSIGNMENT_CAP)


def _safe_dtau(spec: ExperimentSpec, rate: float) -> float:
    return min(spec.experiment.dtau, MAX_EVENTS_PER_STEP / rate)


def _slack_sq(bound_sq: float, slack: float) -> float:
    """Slack on a squared distance equivalent to ``slack`` on the distance."""
    root = math.sqrt(max(bound_sq, 0.0))
    return (root + slack) ** 2 - root * root


def _gaussian(n: int, dim: int, rng, mean=None, theta: float = 1.0) -> VelocityEnsemble:
    return initial_ensemble("gaussian", n, dim, rng, mean=mean, theta=theta)


def _sorted(ens: VelocityEnsemble) -> VelocityEnsemble:
    return VelocityEnsemble(np.sort(ens.velocities, axis=0), ens.time, ens.generation, ens.seed)


def _self_distance(n: int, dim: int, rng) -> float:
    """W2 between two independent standard normal N-samples."""
    a = rng.standard_normal((n, dim))
    b = rng.standard_normal((n, dim))
    return w2_empirical(a, b)


def _relative_gap(value: float, reference: float) -> float:
    return abs(value - reference) / max(1.0, abs(reference))


# ---------------------------------------------------------------- lemmas


def suite_lemmas(spec: ExperimentSpec) -> List[Check]:
    """Analytic constants, exact transport identities and closed forms."""
    name = "lemmas"
    rng = stream(spec.experiment.seed, SAMPLING, SUITE_IDS[name])
    checks = [Check.equality(name, "gain factor at e = 1", contraction_factor_gain(1.0), 1.0, EQUALITY_TOL)]

    constant, linear = CrossSection.constant(), CrossSection.linear(1.0)
    for e in spec.verify.e_values:
        checks.append(Check.equality(
            name, f"gamma_b constant kernel, e = {e:g}",
            contraction_factor_cross_section(e, constant), (3 + e * e) / 4, 1e-10))
        checks.append(Check.equality(
            name, f"gamma_b linear kernel, e = {e:g}",
            contraction_factor_cross_section(e, linear), (3 + e * e) / 4 + (1 - e * e) / 12, 1e-10))

    checks.append(Check.equality(name, "kac rate at p = 1", kac_rate(1.0), 0.125, 1e-10))
    for p in (0.5, 1.0, 2.0, 3.0):
        checks.append(Check.equality(
            name, f"kac gain factor quadrature vs gamma form, p = {p:g}",
            kac_gain_factor(p), kac_gain_factor_closed_form(p), 1e-10))

    elastic = appendix_coefficients(1.0)
    for label, value, expected in (
        ("alpha", elastic.alpha, 0.0), ("beta", elastic.beta, 4 / 3), ("gamma", elastic.gamma, -4.0),
        ("lambda", elastic.lam, 1 / 3), ("mu1", elastic.mu1, 2 / 3), ("mu2", elastic.mu2, -1 / 3),
    ):
        checks.append(Check.equality(name, f"elastic {label}", value, expected, EQUALITY_TOL))
    es = rng.uniform(1e-6, 1.0, 100)
    lam_gap = max(abs(appendix_coefficients(e).lam - lambda_quartic(e)) for e in es)
    checks.append(Check.equality(name, "lambda identity over 100 random e", lam_gap, 0.0, EQUALITY_TOL))
    grid = np.linspace(0.0, 1.0, 1002)[1:-1]
    rates = [cooling_rate(e) for e in grid]
    checks.append(Check.inequality(name, "4 - E lambda < 0 on 1000 points", max(rates), 0.0))
    rate_gap = max(
        _relative_gap(cooling_rate(e), 4.0 - ModelParams(e=e).E * appendix_coefficients(e).lam)
        for e in grid
    )
    checks.append(Check.equality(name, "4 - E lambda closed form", rate_gap, 0.0, 1e-10))

    ms0 = MomentState.isotropic(m2=3.0, m4=15.0)
    trajectory = integrate_m4(ms0, ModelParams(e=0.5), 5.0, 0.01)
    exact = m4_closed_form(trajectory.tau, 15.0, 3.0, 3.0, 0.5)
    rk4_gap = float(np.max(np.abs(trajectory.m4 - exact) / np.abs(exact)))
    checks.append(Check.equality(name, "m4 RK4 vs closed form", rk4_gap, 0.0, 1e-9))

    # Haff's law and the change of time
    params = ModelParams(e=0.5, B=1.0)
    residual = 0.0
    for t in np.logspace(-3, 3, 50):
        h = 1e-4 * t
        derivative = (haff_theta(t + h, 1.0, params) - haff_theta(t - h, 1.0, params)) / (2 * h)
        residual = max(residual, abs(derivative + 0.75 * haff_theta(t, 1.0, params) ** 1.5 / 4))
    checks.append(Check.inequality(name, "Haff law solves the temperature equation", residual, 1e-6))
    xs = rng.uniform(0.0, 100.0, 100)
    trip = max(_relative_gap(t_of_tau(tau_of_t(x, 1.0, params), 1.0, params), x) for x in xs)
    checks.append(Check.equality(name, "time change round trip", trip, 0.0, EQUALITY_TOL))
    scaled = ModelParams(e=0.5, B=8 / 0.75)
    checks.append(Check.equality(name, "tau(e - 1) = 1", tau_of_t(math.e - 1, 1.0, scaled), 1.0, EQUALITY_TOL))
    quad_gap = max(abs(tau_of_t_quadrature(t, 1.0, params) - tau_of_t(t, 1.0, params)) for t in (0.5, 2.0, 10.0))
    checks.append(Check.equality(name, "time change by quadrature", quad_gap, 0.0, 1e-10))

    checks.extend(_transport_lemmas(name, rng))
    checks.extend(_sphere_lemmas(name, rng))

    cloud = rng.standard_normal((200, 3))
    centered = cloud - cloud.mean(axis=0)
    gram = centered @ centered.T
    brute = math.fsum((gram * gram).ravel()) / 200 ** 2
    checks.append(Check.equality(name, "m2bar double-sum identity", moments_of(cloud).m2bar, brute, 1e-10))
    return checks


def _brute_force_w2_sq(X: np.ndarray, Y: np.ndarray) -> float:
    n = X.shape[0]
    best = math.inf
    for perm in itertools.permutations(range(n)):
        gaps = X - Y[list(perm)]
        best = min(best, math.fsum(np.einsum("ij,ij->i", gaps, gaps)) / n)
    return best


def _random_measure(rng, size: int, dim: int) -> DiscreteMeasure:
    weights = rng.dirichlet(np.ones(size))
    weights = weights / math.fsum(weights)
    return DiscreteMeasure(rng.standard_normal((size, dim)), weights)


def _transport_lemmas(name: str, rng) -> List[Check]:
    checks = []
    brute_gap = 0.0
    for instance in range(102):
        dim = 1 + instance % 3
        n = int(rng.integers(2, 7))
        X, Y = rng.standard_normal((n, dim)), rng.standard_normal((n, dim))
        distance, _ = w2_exact_assignment(X, Y, method="lsa")
        brute_gap = max(brute_gap, _relative_gap(distance ** 2, _brute_force_w2_sq(X, Y)))
    checks.append(Check.equality(name, "assignment vs permutation brute force", brute_gap, 0.0, EQUALITY_TOL))

    sort_gap = 0.0
    for _ in range(20):
        xs, ys = rng.standard_normal(50), rng.standard_normal(50)
        distance, _ = w2_exact_assignment(xs, ys, method="lsa")
        sort_gap = max(sort_gap, abs(w2_exact_1d(xs, ys) - distance))
    checks.append(Check.equality(name, "1D sorting vs assignment", sort_gap, 0.0, EQUALITY_TOL))

    lp_gap = 0.0
    for _ in range(20):
        X, Y = rng.standard_normal((8, 3)), rng.standard_normal((8, 3))
        lp, _ = w2_discrete_lp(DiscreteMeasure.empirical(X), DiscreteMeasure.empirical(Y))
        lp_gap = max(lp_gap, abs(lp - w2_exact_assignment(X, Y)[0]))
    checks.append(Check.equality(name, "transportation LP vs assignment", lp_gap, 0.0, EQUALITY_TOL))

    symmetry_gap = 0.0
    triangle_excess = -math.inf
    for instance in range(60):
        dim = 1 + instance % 3
        mu, nu, rho = (_random_measure(rng, int(rng.integers(1, 9)), dim) for _ in range(3))
        forward, _ = w2_discrete_lp(mu, nu)
        backward, _ = w2_discrete_lp(nu, mu)
        symmetry_gap = max(symmetry_gap, abs(forward - backward))
        via = w2_discrete_lp(mu, rho)[0] + w2_discrete_lp(rho, nu)[0]
        triangle_excess = max(triangle_excess, forward - via)
        X, Y = rng.standard_normal((8, dim)), rng.standard_normal((8, dim))
        symmetry_gap = max(symmetry_gap, abs(w2_exact_assignment(X, Y)[0] - w2_exact_assignment(Y, X)[0]))
    checks.append(Check.equality(name, "W2 symmetry", symmetry_gap, 0.0, METRIC_TOL))
    checks.append(Check.inequality(name, "W2 triangle inequality", triangle_excess, 0.0, METRIC_TOL))

    scale_gap = 0.0
    marginal_excess = -math.inf
    convolution_excess = -math.inf
    mixture_excess = -math.inf
    for instance in range(102):
        dim = 1 + instance % 3
        mu = _random_measure(rng, int(rng.integers(2, 9)), dim)
        nu = _random_measure(rng, int(rng.integers(2, 9)), dim)
        distance, _ = w2_discrete_lp(mu, nu)
        theta = float(rng.uniform(0.1, 10.0))
        scaled, _ = w2_discrete_lp(scale_measure(mu, theta), scale_measure(nu, theta))
        scale_gap = max(scale_gap, _relative_gap(scaled, distance / math.sqrt(theta)))

        marginal_sum = math.fsum(w2_discrete_lp(marginal(mu, j), marginal(nu, j))[0] ** 2 for j in range(dim))
        marginal_excess = max(marginal_excess, marginal_sum - distance ** 2)

        h = _random_measure(rng, int(rng.integers(1, 5)), dim)
        small_mu = _random_measure(rng, int(rng.integers(2, 6)), dim)
        small_nu = _random_measure(rng, int(rng.integers(2, 6)), dim)
        convolved, _ = w2_discrete_lp(convolve_measures(h, small_mu), convolve_measures(h, small_nu))
        plain, _ = w2_discrete_lp(small_mu, small_nu)
        convolution_excess = max(convolution_excess, convolved ** 2 - plain ** 2)

        alpha = float(rng.uniform())
        other_mu = _random_measure(rng, int(rng.integers(2, 9)), dim)
        other_nu = _random_measure(rng, int(rng.integers(2, 9)), dim)
        mixed, _ = w2_discrete_lp(mixture(mu, other_mu, alpha), mixture(nu, other_nu, alpha))
        other, _ = w2_discrete_lp(other_mu, other_nu)
        mixture_excess = max(
            mixture_excess, mixed ** 2 - (alpha * distance ** 2 + (1 - alpha) * other ** 2)
        )

    checks.append(Check.equality(name, "temperature scaling identity", scale_gap, 0.0, EQUALITY_TOL))
    checks.append(Check.inequality(name, "marginal superadditivity", marginal_excess, 0.0, EQUALITY_TOL))
    checks.append(Check.inequality(name, "convolution does not expand", convolution_excess, 0.0, EQUALITY_TOL))
    checks.append(Check.inequality(name, "joint convexity under mixtures", mixture_excess, 0.0, EQUALITY_TOL))
    return checks


def _sphere_lemmas(name: str, rng) -> List[Check]:
    cost_gap = 0.0
    surface_gap = 0.0
    for _ in range(100):
        s = SphereSpec(rng.standard_normal(3), float(rng.uniform(0.1, 2.0)))
        s2 = SphereSpec(rng.standard_normal(3), float(rng.uniform(0.1, 2.0)))
        sphere_map, cost = sphere_transport_map(s, s2)
        directions = rng.standard_normal((32, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        # Antipodal pairs make the empirical cost exact
        points = s.center + s.radius * np.vstack([directions, -directions])
        moved = sphere_map.apply(points)
        gaps = moved - points
        pushed_cost = math.fsum(np.einsum("ij,ij->i", gaps, gaps)) / points.shape[0]
        cost_gap = max(cost_gap, _relative_gap(pushed_cost, cost))
        radii = np.linalg.norm(moved - s2.center, axis=1)
        surface_gap = max(surface_gap, float(np.max(np.abs(radii - s2.radius))))
    return [
        Check.equality(name, "sphere map cost", cost_gap, 0.0, 1e-8),
        Check.equality(name, "sphere map lands on the target sphere", surface_gap, 0.0, 1e-8),
    ]


# ---------------------------------------------------------------- gain


def suite_gain(spec: ExperimentSpec) -> List[Check]:
    """Contraction of the gain operator on empirical measures."""
    name = "gain"
    n = _assignment_n(spec)
    seed = spec.experiment.seed
    checks = []
    shift = np.array([0.5, 0.0, 0.0])
    for k, e in enumerate(spec.verify.e_values):
        factor = contraction_factor_gain(e)
        for trial in range(spec.verify.trials):
            rng = stream(seed, SAMPLING, SUITE_IDS[name], k, trial)
            f = _gaussian(n, 3, rng).velocities
            g = initial_ensemble("uniform-cube", n, 3, rng, theta=1.0).velocities
            slack = SLACK_FACTOR * _self_distance(n, 3, rng)

            base = w2_empirical(f, g)
            measured = w2_empirical(sample_gain(f, e, n, rng), sample_gain(g, e, n, rng))
            checks.append(Check.inequality(
                name, f"equal means, e = {e:g}, trial {trial}", measured, factor * base, slack))

            g_shift = g + shift
            base_sq = w2_empirical(f, g_shift) ** 2
            bound_sq = factor ** 2 * base_sq + (1 - e * e) / 4 * float(shift @ shift)
            measured_sq = w2_empirical(sample_gain(f, e, n, rng), sample_gain(g_shift, e, n, rng)) ** 2
            checks.append(Check.inequality(
                name, f"unequal means, e = {e:g}, trial {trial}", measured_sq, bound_sq,
                _slack_sq(bound_sq, slack)))

    for trial in range(spec.verify.trials):
        rng = stream(seed, SAMPLING, SUITE_IDS[name], len(spec.verify.e_values), trial)
        checks.extend(_sampled_geometry_checks(name, trial, n, rng))
    return checks


def _sampled_geometry_checks(name: str, trial: int, n: int, rng) -> List[Check]:
    checks = []
    s = SphereSpec(rng.standard_normal(3), float(rng.uniform(0.5, 2.0)))
    s2 = SphereSpec(rng.standard_normal(3), float(rng.uniform(0.5, 2.0)))
    _, cost = sphere_transport_map(s, s2)
    larger = s if s.radius >= s2.radius else s2
    slack = SLACK_FACTOR * w2_empirical(sample_sphere(larger, n, rng), sample_sphere(larger, n, rng))
    measured = w2_empirical(sample_sphere(s, n, rng), sample_sphere(s2, n, rng))
    checks.append(Check.inequality(name, f"sphere samples, trial {trial}", measured, math.sqrt(cost), slack))

    axes = rng.standard_normal((2, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    c = CircleSpec(rng.standard_normal(3), float(rng.uniform(0.5, 2.0)), axes[0])
    c2 = CircleSpec(rng.standard_normal(3), float(rng.uniform(0.5, 2.0)), axes[1])
    larger = c if c.radius >= c2.radius else c2
    slack = SLACK_FACTOR * w2_empirical(sample_circle(larger, n, rng), sample_circle(larger, n, rng))
    measured = w2_empirical(sample_circle(c, n, rng), sample_circle(c2, n, rng))
    checks.append(Check.inequality(
        name, f"circle samples, trial {trial}", measured, math.sqrt(circle_cost_bound(c, c2)), slack))

    vw, xy = rng.standard_normal(2), rng.standard_normal(2)

    def curve(point):
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        v_new, w_new = kac_post_collision(point[0], point[1], theta, KAC_P)
        return np.stack([v_new, w_new], axis=1)

    larger = vw if vw @ vw >= xy @ xy else xy
    slack = SLACK_FACTOR * w2_empirical(curve(larger), curve(larger))
    measured = w2_empirical(curve(vw), curve(xy))
    checks.append(Check.inequality(
        name, f"kac curve samples, trial {trial}", measured,
        math.sqrt(kac_curve_cost_bound(vw, xy, KAC_P)), slack))
    return checks


# ---------------------------------------------------------------- flow


def _temperature_tol(n: int) -> float:
    return max(TEMPERATURE_TOL, STAT_SIGMAS * math.sqrt(2.0 / (3.0 * n)))


def _scaled_slack(slack0: float, record) -> float:
    return slack0 * math.sqrt(max(record.theta_a, record.theta_b, 0.0))


def suite_flow(spec: ExperimentSpec) -> List[Check]:
    """Contraction along the scaled cooling flow, with its equality case."""
    name = "flow"
    n = _assignment_n(spec)
    schedule = [t for t in spec.experiment.schedule if t <= FLOW_TAU_MAX] or list(FLOW_SCHEDULE)
    checks = []
    for e in FLOW_E_VALUES:
        params = ModelParams(e=e, B=1.0)
        dtau = _safe_dtau(spec, params.E)
        for seed in (spec.experiment.seed, spec.experiment.seed + 1):
            config_a = SimConfig("homogeneous", params, dtau, seed=seed, n=n, stream=0)
            config_b = SimConfig("homogeneous", params, dtau, seed=seed, n=n, stream=1)
            rng = stream(seed, INITIAL, SUITE_IDS[name])
            ens_a = _gaussian(n, 3, rng)
            dirac = initial_ensemble("dirac", n, 3, rng, mean=ens_a.mean())
            run = run_paired(config_a, config_b, ens_a, dirac, schedule)
            tol = _temperature_tol(n)
            for r in run.records:
                tag = f"e = {e:g}, seed {seed}, tau = {r.tau:g}"
                checks.append(Check.equality(
                    name, f"dirac equality, {tag}", r.w2_sq, 3 * r.theta_a,
                    EQUALITY_TOL * max(1.0, 3 * r.theta_a)))
                expected = math.exp(-2 * r.tau)
                checks.append(Check.equality(
                    name, f"temperature law, {tag}", r.theta_a, expected, tol * expected))

            ens_a = _gaussian(n, 3, rng)
            ens_b = initial_ensemble("uniform-cube", n, 3, rng, mean=[1.0, 0.0, 0.0], theta=1.0)
            slack0 = SLACK_FACTOR * _self_distance(n, 3, stream(seed, SAMPLING, SUITE_IDS[name]))
            run = run_paired(config_a, config_b, ens_a, ens_b, schedule)
            for r in run.records:
                slack = _scaled_slack(slack0, r)
                checks.append(Check.inequality(
                    name, f"two-data bound, e = {e:g}, seed {seed}, tau = {r.tau:g}",
                    r.w2_sq, r.bound_sq, _slack_sq(r.bound_sq, slack)))

    checks.extend(temperature_law_checks(name, spec))
    checks.extend(_selfsimilar_cauchy(name, spec, n))
    return checks


def temperature_law_checks(name: str, spec: ExperimentSpec) -> List[Check]:
    """
    Single-ensemble cooling run at ``verify.temperature_n`` particles.

    The scaled temperature is compared with theta0 exp(-2 tau). Original time
    is accumulated alongside from the measured temperature, dt = E / (B
    sqrt(theta)) dtau (trapezoidal), and the temperature at that time is
    compared with Haff's law.

    Args:
        name (str): Suite label for the checks
        spec (ExperimentSpec): Supplies the seed, the step and temperature_n

    Returns:
        List[Check]: Two checks per record time on a grid up to FLOW_TAU_MAX
    """
    n = spec.verify.temperature_n
    seed = spec.experiment.seed
    params = ModelParams(e=TEMPERATURE_LAW_E, B=1.0)
    per_record = max(1, math.ceil(TEMPERATURE_RECORD_EVERY / _safe_dtau(spec, params.E) - 1e-9))
    h = TEMPERATURE_RECORD_EVERY / per_record
    records = int(round(FLOW_TAU_MAX / TEMPERATURE_RECORD_EVERY))
    config = SimConfig("homogeneous", params, h, seed=seed, n=n, stream=4)
    ens = _gaussian(n, 3, stream(seed, INITIAL, SUITE_IDS[name], 4))
    rng = config.rng()
    theta0 = ens.temperature()
    tol = _temperature_tol(n)
    logger.info(f"Temperature laws: N = {n}, e = {TEMPERATURE_LAW_E:g}, {records * per_record} steps")

    checks = []
    t = 0.0
    slowness = 1.0 / math.sqrt(theta0)
    for k in range(1, records + 1):
        for _ in range(per_record):
            ens = step(ens, config, rng, h)
            next_slowness = 1.0 / math.sqrt(ens.temperature())
            t += params.E / params.B * h * (slowness + next_slowness) / 2.0
            slowness = next_slowness
        tau = k * TEMPERATURE_RECORD_EVERY
        theta = ens.temperature()
        expected = theta0 * math.exp(-2.0 * tau)
        checks.append(Check.equality(
            name, f"temperature law at N = {n}, e = {TEMPERATURE_LAW_E:g}, tau = {tau:g}",
            theta, expected, tol * expected))
        haff = haff_theta(t, theta0, params)
        checks.append(Check.equality(
            name, f"Haff law in original time at N = {n}, t = {t:.6g}", theta, haff, tol * haff))
    return checks


def _selfsimilar_cauchy(name: str, spec: ExperimentSpec, n: int) -> List[Check]:
    params = ModelParams(e=SELFSIMILAR_E, B=1.0)
    dtau = _safe_dtau(spec, params.E)
    seed = spec.experiment.seed
    slack = SLACK_FACTOR * _self_distance(n, 3, stream(seed, SAMPLING, SUITE_IDS[name], 1))
    checks = []
    for index, recipe in enumerate(("gaussian", "uniform-cube")):
        config = SimConfig("selfsimilar", params, dtau, seed=seed, n=n, stream=2 + index)
        ens = initial_ensemble(recipe, n, 3, stream(seed, INITIAL, SUITE_IDS[name], 2 + index), theta=1.0)
        rng = config.rng()
        snapshots = [ens.velocities]
        for tau in range(1, SELFSIMILAR_TAU_END + 1):
            ens = advance(ens, config, float(tau), rng)
            snapshots.append(ens.velocities)
        gaps = [w2_empirical(a, b) for a, b in zip(snapshots, snapshots[1:])]
        for k in range(1, len(gaps)):
            checks.append(Check.inequality(
                name, f"self-similar Cauchy gap non-increasing, {recipe}, tau = {k}",
                gaps[k], gaps[k - 1], slack))
        checks.append(Check.inequality(
            name, f"self-similar Cauchy gap below slack by tau = {SELFSIMILAR_TAU_END}, {recipe}",
            gaps[-1], slack))
    return checks


# ---------------------------------------------------------------- diffusive


def suite_diffusive(spec: ExperimentSpec) -> List[Check]:
    """Thermostatted equation: steady temperature and same-energy contraction."""
    name = "diffusive"
    n = _assignment_n(spec)
    seed = spec.experiment.seed
    checks = []
    average_times = np.arange(DIFFUSIVE_AVERAGE_FROM, DIFFUSIVE_TAU_END + 1e-9, 0.25)
    for index, (p, e) in enumerate(DIFFUSIVE_CASES):
        params = ModelParams(e=e, B=1.0, A=1.0, p_diff=p)
        config = SimConfig("diffusive", params, DIFFUSIVE_DTAU, seed=seed, n=n, stream=index)
        ens = _gaussian(n, 3, stream(seed, INITIAL, SUITE_IDS[name], index))
        rng = config.rng()
        temperatures = []
        for tau in average_times:
            ens = advance(ens, config, float(tau), rng)
            temperatures.append(ens.temperature())
        measured = math.fsum(temperatures) / len(temperatures)
        expected = params.steady_temperature
        checks.append(Check.equality(
            name, f"steady temperature, p = {p:g}, e = {e:g}", measured, expected,
            _temperature_tol(n) * expected))

    params = ModelParams(e=DIFFUSIVE_E, B=1.0, A=1.0, p_diff=0.0)
    config_a = SimConfig("diffusive", params, _safe_dtau(spec, params.E), seed=seed, n=n, stream=0)
    config_b = SimConfig("diffusive", params, _safe_dtau(spec, params.E), seed=seed, n=n, stream=1)
    rng = stream(seed, INITIAL, SUITE_IDS[name], len(DIFFUSIVE_CASES))
    ens_a = _gaussian(n, 3, rng)
    ens_b = initial_ensemble("uniform-cube", n, 3, rng, theta=1.0)
    slack0 = SLACK_FACTOR * _self_distance(n, 3, stream(seed, SAMPLING, SUITE_IDS[name]))
    run = run_paired(config_a, config_b, ens_a, ens_b, DIFFUSIVE_SCHEDULE)
    for r in run.records:
        checks.append(Check.inequality(
            name, f"same-energy bound, tau = {r.tau:g}", r.w2_sq, r.bound_sq,
            _slack_sq(r.bound_sq, _scaled_slack(slack0, r))))
    return checks


# ---------------------------------------------------------------- cross-section


def _decay_kernel(spec: ExperimentSpec) -> CrossSection:
    if spec.family == "cutoff":
        return spec.cross_section_model()
    return CrossSection.linear(1.0)


def suite_cross_section(spec: ExperimentSpec) -> List[Check]:
    """Angular sampling and the general cross-section contraction."""
    name = "cross-section"
    seed = spec.experiment.seed
    rng = stream(seed, SAMPLING, SUITE_IDS[name])
    checks = []

    axes = rng.standard_normal((XS_SIGMA_SAMPLES, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    sigma = sample_sigma(axes, CrossSection.constant(), rng)
    octants = (sigma > 0).astype(int) @ np.array([1, 2, 4])
    counts = np.bincount(octants, minlength=8)
    expected = XS_SIGMA_SAMPLES / 8
    statistic = float(np.sum((counts - expected) ** 2 / expected))
    checks.append(Check.inequality(name, "uniform sphere octant chi-square", statistic, float(chi2.ppf(0.999, 7))))

    for label, xs in (("linear(1)", CrossSection.linear(1.0)), ("spike(1e-3)", CrossSection.spike(1e-3))):
        cosines = np.einsum("ij,ij->i", sample_sigma(axes, xs, rng), axes)
        mean = float(np.mean(cosines))
        stderr = float(np.std(cosines)) / math.sqrt(cosines.size)
        target = xs.mean_cosine()
        tol = max(0.01 * abs(target), STAT_SIGMAS * stderr)
        checks.append(Check.equality(name, f"E[sigma.k] for {label}", mean, target, tol))
    checks.append(Check.equality(name, "E[sigma.k] = 1/3 for linear(1)", CrossSection.linear(1.0).mean_cosine(), 1 / 3, 1e-10))

    kernel = _decay_kernel(spec)
    for e in spec.verify.e_values:
        checks.append(Check.inequality(
            name, f"gamma_b <= 1 for {kernel.name}, e = {e:g}", contraction_factor_cross_section(e, kernel), 1.0))

    e = spec.model.e if spec.family == "cutoff" else 0.5
    params = ModelParams(e=e, B=1.0)
    gamma_b = contraction_factor_cross_section(e, kernel)
    n = _assignment_n(spec)
    dtau = _safe_dtau(spec, 1.0)
    config_a = SimConfig("cutoff", params, dtau, seed=seed, n=n, cross_section=kernel, stream=0)
    config_b = SimConfig("cutoff", params, dtau, seed=seed, n=n, cross_section=kernel, stream=1)
    init = stream(seed, INITIAL, SUITE_IDS[name])
    ens_a = _gaussian(n, 3, init)
    ens_b = initial_ensemble("uniform-cube", n, 3, init, theta=1.0)
    slack0 = SLACK_FACTOR * _self_distance(n, 3, rng)
    run = run_paired(config_a, config_b, ens_a, ens_b, XS_SCHEDULE)
    for r in run.records:
        checks.append(Check.inequality(
            name, f"cutoff bound, tau = {r.tau:g}", r.w2_sq, r.bound_sq,
            _slack_sq(r.bound_sq, _scaled_slack(slack0, r))))
    fit = linregress(run.taus, np.log(run.w2))
    checks.append(Check.inequality(
        name, "log W2 slope", float(fit.slope), -(1.0 - gamma_b) / 2.0, STAT_SIGMAS * float(fit.stderr)))
    return checks


# ---------------------------------------------------------------- kac


def suite_kac(spec: ExperimentSpec) -> List[Check]:
    """Inelastic Kac model: energy identity, decay rates and contraction."""
    name = "kac"
    seed = spec.experiment.seed
    p = spec.model.p_inel if spec.family == "kac" else KAC_P
    kacp = KacParams(p_inel=p)
    beta = kacp.beta
    n = spec.experiment.n
    rng = stream(seed, SAMPLING, SUITE_IDS[name])
    checks = []

    v, w = rng.standard_normal(10000), rng.standard_normal(10000)
    theta = rng.uniform(0.0, 2.0 * math.pi, 10000)
    v_new, w_new = kac_post_collision(v, w, theta, p)
    q = 2.0 * (p + 1.0)
    factor = np.abs(np.cos(theta)) ** q + np.abs(np.sin(theta)) ** q
    energy_gap = float(np.max(np.abs(v_new ** 2 + w_new ** 2 - factor * (v ** 2 + w ** 2)) / (v ** 2 + w ** 2)))
    checks.append(Check.equality(name, "energy identity per collision", energy_gap, 0.0, EQUALITY_TOL))

    dtau = _safe_dtau(spec, 1.0)
    init = stream(seed, INITIAL, SUITE_IDS[name])

    # One shared stream: both ensembles see the same pairs and angles, and
    # sorting makes index i the optimal partner of index i at tau = 0
    coupled = SimConfig("kac", kacp, dtau, seed=seed, n=n, stream=3)
    cold = _sorted(_gaussian(n, 1, init))
    hot = _sorted(_gaussian(n, 1, init, theta=4.0))
    run = run_paired(coupled, coupled, cold, hot, KAC_SCHEDULE)
    fit = linregress(run.taus, np.log(run.w2))
    checks.append(Check.equality(
        name, f"W2 decay rate between two solutions against beta = {beta:.6g}", -float(fit.slope), beta,
        max(KAC_RATE_TOL * beta, STAT_SIGMAS * float(fit.stderr))))

    uniform = _sorted(initial_ensemble("uniform-cube", n, 1, init, theta=1.0))
    shaped = run_paired(coupled, coupled, cold, uniform, KAC_SCHEDULE)
    shape_fit = linregress(shaped.taus, np.log(shaped.w2))
    checks.append(Check.inequality(
        name, "W2 decay rate between differently shaped solutions at least beta",
        float(shape_fit.slope), -(1.0 - KAC_RATE_TOL) * beta, STAT_SIGMAS * float(shape_fit.stderr)))

    m2 = np.array([r.moments_a.m2 + float(r.moments_a.mean @ r.moments_a.mean) for r in run.records])
    fit = linregress(run.taus, np.log(m2))
    checks.append(Check.equality(
        name, "second moment decay rate 2 beta", -float(fit.slope), 2 * beta,
        max(0.02 * 2 * beta, STAT_SIGMAS * float(fit.stderr))))

    moving = _gaussian(n, 1, init, mean=[1.0])
    moving = advance(moving, SimConfig("kac", kacp, dtau, seed=seed, n=n, stream=2), 1.0,
                     stream(seed, SAMPLING, SUITE_IDS[name], 2))
    checks.append(Check.equality(
        name, "mean decays like exp(-tau)", float(moving.mean()[0]), math.exp(-1.0),
        5.0 * math.sqrt(2.0 / n)))

    config_a = SimConfig("kac", kacp, dtau, seed=seed, n=n, stream=0)
    config_b = SimConfig("kac", kacp, dtau, seed=seed, n=n, stream=1)
    ens_a = _gaussian(n, 1, init)
    ens_b = initial_ensemble("uniform-cube", n, 1, init, theta=1.0)
    slack0 = SLACK_FACTOR * w2_exact_1d(rng.standard_normal(n), rng.standard_normal(n))
    run = run_paired(config_a, config_b, ens_a, ens_b, KAC_SCHEDULE)
    for r in run.records:
        checks.append(Check.inequality(
            name, f"kac bound, tau = {r.tau:g}", r.w2_sq, r.bound_sq,
            _slack_sq(r.bound_sq, _scaled_slack(slack0, r))))
    return checks


# ---------------------------------------------------------------- moments


def suite_moments(spec: ExperimentSpec) -> List[Check]:
    """Monte Carlo fourth moment under the self-similar flow against the moment equation."""
    name = "moments"
    seed = spec.experiment.seed
    n = spec.experiment.n
    params = ModelParams(e=MOMENTS_E, B=1.0)
    config = SimConfig("selfsimilar", params, _safe_dtau(spec, params.E), seed=seed, n=n, stream=0)
    ens = _gaussian(n, 3, stream(seed, INITIAL, SUITE_IDS[name]))
    rng = config.rng()
    m4_0 = moments_of(ens).m4
    fixed = m4_fixed_point(3.0, 3.0, MOMENTS_E)
    checks = [Check.equality(name, "theta = 1 after rescaling", ens.temperature(), 1.0, EQUALITY_TOL)]

    sup_measured, sup_stderr = -math.inf, 0.0
    for tau in MOMENTS_SCHEDULE:
        ens = advance(ens, config, float(tau), rng)
        ms = moments_of(ens)
        centered = ens.velocities - ms.mean
        sq = np.einsum("ij,ij->i", centered, centered)
        stderr = float(np.std(sq * sq)) / math.sqrt(n)
        if ms.m4 > sup_measured:
            sup_measured, sup_stderr = ms.m4, stderr
        if tau <= MOMENTS_MATCH_UNTIL:
            predicted = float(m4_closed_form(tau, m4_0, 3.0, 3.0, MOMENTS_E))
            checks.append(Check.equality(
                name, f"m4 against the moment equation, tau = {tau:g}", ms.m4, predicted,
                max(MOMENT_TOL * predicted, STAT_SIGMAS * stderr)))
    checks.append(Check.equality(name, "mean stays zero", float(np.max(np.abs(ens.mean()))), 0.0, EQUALITY_TOL))
    bound = 1.1 * max(m4_0, fixed)
    checks.append(Check.inequality(
        name, "sup m4 bounded", sup_measured, bound, STAT_SIGMAS * sup_stderr))
    return checks


SUITE_FUNCTIONS: Dict[str, Callable[[ExperimentSpec], List[Check]]] = {
    "gain": suite_gain,
    "flow": suite_flow,
    "diffusive": suite_diffusive,
    "cross-section": suite_cross_section,
    "kac": suite_kac,
    "moments": suite_moments,
    "lemmas": suite_lemmas,
}


def verify(suite_name: str, spec: ExperimentSpec) -> VerificationReport:
    """
    Run a verification suite, or all of them.

    Args:
        suite_name (str): One of SUITES
        spec (ExperimentSpec): Supplies the seed, N, step and verify settings

    Returns:
        VerificationReport: Checks in a deterministic order
    """
    if suite_name not in SUITES:
        raise ArgumentError(f"unknown suite '{suite_name}'; choose from {', '.join(SUITES)}")
    names = list(SUITE_FUNCTIONS) if suite_name == "all" else [suite_name]
    report = VerificationReport(
        suite=suite_name, seeds=[spec.experiment.seed, spec.experiment.seed + 1]
    )

    def run(name: str) -> List[Check]:
        logger.info(f"Running suite '{name}'")
        checks = SUITE_FUNCTIONS[name](spec)
        failed = sum(not c.passed for c in checks)
        logger.info(f"Suite '{name}': {len(checks) - failed}/{len(checks)} checks passed")
        return checks

    workers = min(spec.verify.workers, len(names))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]
    for checks in results:
        report.extend(checks)
    logger.info(report.summary())
    return report
