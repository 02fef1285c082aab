"""Service for probing the sharpness of the reverse inequalities."""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from app import config
from app.core.errors import (
    HypothesisConstructionError,
    HypothesisUnmetError,
    SearchError,
    UnsupportedWitnessError,
)
from app.core.functions import (
    GridFunction,
    as_vector,
    make_ball_family,
    make_constant_direction,
    make_lagrange_family,
    pairwise_ratio_bounds,
)
from app.core.vectors import row_re_inner
from app.db.models import (
    BallFamilySpec,
    InequalityReport,
    InequalitySpec,
    LagrangeFamilySpec,
    QuadratureConfig,
    ScalarProfile,
    SearchResult,
    SearchSpec,
)
from app.services.inequality_service import InequalityService, ball_factor

logger = logging.getLogger(__name__)

# InequalitySpec fields a search parameter may set directly
INEQUALITY_FIELDS = ("K", "rho", "m", "M", "gamma", "Gamma", "theta")
INITIAL_STEP = 0.25
SHRINK_FACTOR = 0.5

Candidate = Tuple[GridFunction, Dict[str, object]]


def to_unit_box(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    span = np.where(upper > lower, upper - lower, 1.0)
    return (x - lower) / span


def from_unit_box(u: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return lower + (upper - lower) * np.clip(u, 0.0, 1.0)


def _cosine_modulation(a: float, b: float, frequency: Optional[float] = None) -> ScalarProfile:
    """cos(omega (t - a)), by default one half period over [a, b]."""
    omega = math.pi / (b - a) if frequency is None else frequency
    return ScalarProfile(kind="cosine", frequency=omega, phase=-omega * a)


def ball_candidate(params: Dict[str, float], a: float, b: float, N: int) -> Candidate:
    """f(t) = e + rho cos(omega (t - a)) u in C^2 with e = (1, 0), u = (0, 1)."""
    rho = params["rho"]
    spec = BallFamilySpec(
        e=[1.0, 0.0], u=[0.0, 1.0], rho=rho,
        modulation=_cosine_modulation(a, b, params.get("frequency")),
    )
    f = make_ball_family(spec, a, b, N)
    e = [1.0, 0.0]
    derived = {
        "e": e, "rho": rho, "K": ball_factor(rho), "m": 1.0 - rho, "M": 1.0 + rho,
        "r": [rho] * (N + 1),
        "k": (f.norms() - row_re_inner(f.values, as_vector(e).coords)).tolist(),
    }
    return f, derived


def lagrange_candidate(params: Dict[str, float], a: float, b: float, N: int) -> Candidate:
    """phi = exp(-psi) with psi linear (slope) or sine (amplitude, frequency)."""
    if "amplitude" in params:
        amplitude = params["amplitude"]
        frequency = params.get("frequency", 1.0)
        psi = ScalarProfile(kind="sine", amplitude=amplitude, frequency=frequency)
        bound = abs(amplitude * frequency)
        theta, Theta = -bound, bound
    else:
        slope = params.get("slope", 1.0)
        psi = ScalarProfile(kind="linear", coefficients=[0.0, slope])
        theta, Theta = min(slope, 0.0), max(slope, 0.0)
    spec = LagrangeFamilySpec(psi=psi, theta=theta, Theta=Theta, a=a, b=b)
    f, gamma, Gamma = make_lagrange_family(spec, N)
    derived = {"e": [1.0], "m": gamma, "M": Gamma, "gamma": gamma, "Gamma": Gamma}
    return f, derived


def constant_direction_candidate(params: Dict[str, float], a: float, b: float, N: int) -> Candidate:
    """f(t) = exp(-rate t) e with e = (1,)."""
    rate = params.get("rate", 0.0)
    e = as_vector([1.0])
    f = make_constant_direction(ScalarProfile(kind="exponential", rate=-rate), e, a, b, N)
    m, M = pairwise_ratio_bounds(f)
    derived = {
        "e": [1.0], "K": 1.0, "m": m, "M": M, "gamma": m, "Gamma": M,
        "k": [0.0] * (N + 1),
    }
    return f, derived


CANDIDATE_BUILDERS = {
    "ball": ball_candidate,
    "lagrange": lagrange_candidate,
    "constant-direction": constant_direction_candidate,
}


def equality_witness(inequality_id: str, params: Dict[str, float], a: float, b: float, N: int) -> GridFunction:
    """A grid function attaining equality in the named inequality.

    Supported: triangle and multiplicative_K with K = 1 (f = exp(-rate t) e);
    multiplicative_ball and multiplicative_mM (f on the tangent circle of
    the admissible ball, constant norm); quadratic_mM and quadratic_ratio
    with m = M; weighted_gamma with gamma = 1 or Gamma = 1 (f constant);
    additive_k (ball family, with k(t) = ||f(t)|| - Re<f(t), e>).

    Raises:
        UnsupportedWitnessError: no constructive witness is known for the id and params
    """
    nodes = np.linspace(a, b, N + 1)

    if inequality_id in ("triangle", "multiplicative_K"):
        if params.get("K", 1.0) != 1.0:
            raise UnsupportedWitnessError(f"{inequality_id}: witness only for K = 1")
        f, _ = constant_direction_candidate(params, a, b, N)
        return f

    if inequality_id in ("multiplicative_ball", "multiplicative_mM"):
        if inequality_id == "multiplicative_ball":
            rho, scale = params.get("rho", 0.5), 1.0
        else:
            m, M = params["m"], params["M"]
            rho, scale = (M - m) / (M + m), 0.5 * (M + m)
        # points of the sphere ||x - e|| = rho seen from 0 at the widest angle
        root = math.sqrt(1.0 - rho * rho)
        arg = 2.0 * math.pi * (nodes - a) / (b - a)
        values = np.column_stack([
            np.full_like(nodes, root * root),
            rho * root * np.cos(arg),
            rho * root * np.sin(arg),
        ])
        return GridFunction(a, b, scale * values)

    if inequality_id in ("quadratic_mM", "quadratic_ratio"):
        if params.get("m", 1.0) != params.get("M", 1.0):
            raise UnsupportedWitnessError(f"{inequality_id}: witness only for m = M")
        return GridFunction(a, b, np.ones((N + 1, 1)))

    if inequality_id == "weighted_gamma":
        if params.get("gamma", 1.0) != 1.0 and params.get("Gamma", 1.0) != 1.0:
            raise UnsupportedWitnessError("weighted_gamma: witness only for gamma = 1 or Gamma = 1")
        return GridFunction(a, b, np.ones((N + 1, 1)))

    if inequality_id == "additive_k":
        f, _ = ball_candidate({"rho": params.get("rho", 0.5)}, a, b, N)
        return f

    raise UnsupportedWitnessError(f"No constructive equality witness for {inequality_id}")


class SearchService:
    """Service for maximizing relative gaps over admissible families."""

    def __init__(self, inequalities: Optional[InequalityService] = None, show_progress: Optional[bool] = None):
        """Initialize the search service.

        Args:
            inequalities: Evaluator for candidate reports
            show_progress: Show a tqdm bar over restarts; defaults to INEQ_SHOW_PROGRESS
        """
        self.inequalities = inequalities or InequalityService()
        self.show_progress = config.SHOW_PROGRESS if show_progress is None else show_progress

    def _evaluate(
        self, spec: SearchSpec, params: Dict[str, float], a: float, b: float, cfg: QuadratureConfig
    ) -> Optional[InequalityReport]:
        """Report for one candidate, or None when its hypothesis fails."""
        try:
            f, derived = CANDIDATE_BUILDERS[spec.family](params, a, b, cfg.N)
            fields = {k: v for k, v in derived.items() if k in InequalitySpec.model_fields}
            fields.update({k: v for k, v in params.items() if k in INEQUALITY_FIELDS})
            ineq = InequalitySpec(id=spec.inequality_id, **fields)
            return self.inequalities.evaluate(f, ineq, cfg)[0]
        except (HypothesisUnmetError, HypothesisConstructionError) as e:
            logger.debug(f"Candidate {params} infeasible: {e}")
            return None

    def maximize_relative_gap(
        self, spec: SearchSpec, cfg: QuadratureConfig, a: float = 0.0, b: float = 1.0
    ) -> SearchResult:
        """Coordinate search with random restarts in the unit box of the free parameters.

        Restart 0 starts at the midpoint, the others at seeded uniform points.
        Each restart probes +/- step along every coordinate, moves on
        improvement, and halves the step when no probe improves. The first
        midpoint evaluation is free; every later probe consumes budget.

        Raises:
            SearchError: no candidate satisfied its hypothesis
        """
        names = sorted(spec.free_params)
        lower = np.array([spec.free_params[n][0] for n in names], dtype=float)
        upper = np.array([spec.free_params[n][1] for n in names], dtype=float)
        rng = np.random.default_rng(spec.seed)
        starts = [np.full(len(names), 0.5)] + [rng.uniform(size=len(names)) for _ in range(spec.restarts - 1)]

        best: Dict[str, object] = {"score": -math.inf, "params": None, "report": None}
        evaluations = 0
        budget = spec.budget

        def params_at(u: np.ndarray) -> Dict[str, float]:
            point = dict(spec.fixed_params)
            point.update({n: float(v) for n, v in zip(names, from_unit_box(u, lower, upper))})
            return point

        def score(u: np.ndarray) -> float:
            nonlocal evaluations
            params = params_at(u)
            report = self._evaluate(spec, params, a, b, cfg)
            evaluations += 1
            value = -math.inf if report is None else report.rel_gap
            key = tuple(params[n] for n in sorted(params))
            if report is not None and (
                value > best["score"]
                or (value == best["score"] and key < tuple(best["params"][n] for n in sorted(best["params"])))
            ):
                best.update(score=value, params=params, report=report)
            return value

        for restart, start in enumerate(tqdm(starts, desc="restarts", disable=not self.show_progress)):
            if restart > 0:
                if budget <= 0:
                    break
                budget -= 1
            u = start.copy()
            current = score(u)
            if not names:
                break
            step = INITIAL_STEP
            shrinks = 0
            while budget > 0 and shrinks <= spec.shrinks:
                improved = False
                for axis in range(len(names)):
                    for direction in (1.0, -1.0):
                        if budget <= 0:
                            break
                        probe = u.copy()
                        probe[axis] = np.clip(probe[axis] + direction * step, 0.0, 1.0)
                        if probe[axis] == u[axis]:
                            continue
                        budget -= 1
                        value = score(probe)
                        if value > current:
                            u, current, improved = probe, value, True
                            break
                if not improved:
                    step *= SHRINK_FACTOR
                    shrinks += 1
            logger.debug(f"Restart {restart}: {params_at(u)} rel_gap={current:.6g}")

        if best["report"] is None:
            raise SearchError(f"No admissible candidate for {spec.family} / {spec.inequality_id}")
        logger.info(
            f"Search {spec.family}/{spec.inequality_id}: best rel_gap {best['score']:.6g} "
            f"at {best['params']} after {evaluations} evaluations"
        )
        return SearchResult(
            family=spec.family,
            inequality_id=spec.inequality_id,
            best_params=best["params"],
            best_rel_gap=best["score"],
            report=best["report"],
            evaluations=evaluations,
        )
