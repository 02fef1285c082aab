"""Service for evaluating the reverse triangle inequalities on grid functions."""

import logging
import math
import sys
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app import config
from app.core.errors import HypothesisUnmetError, InputError
from app.core.functions import GridFunction, as_vector, node_values
from app.core.quadrature import (
    bochner_integral,
    integral_norm,
    integrate_nodes,
    kernel_matrix,
    kernel_values,
    schwarz_gap_matrix,
    triangle_integral,
    triangle_norm_integral,
    weighted_norm_integral,
)
from app.core.vectors import ComplexVector, norm, re_inner
from app.db.models import (
    HypothesisReport,
    HypothesisSpec,
    InequalityReport,
    InequalitySpec,
    KernelSpec,
    NodeProfile,
    QuadratureConfig,
)
from app.services.hypothesis_service import HypothesisService, pairwise_slack

logger = logging.getLogger(__name__)

VectorLike = Union[ComplexVector, Sequence]
Kernel = Union[KernelSpec, np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]

GAMMA_MAPPING_NOTE = "weighted form evaluated with gamma := m, Gamma := M"


# Constants of the reverse inequalities

def ball_factor(rho: float) -> float:
    """K = 1 / sqrt(1 - rho^2) for the ball condition."""
    return 1.0 / math.sqrt(1.0 - rho * rho)


def mM_factor(m: float, M: float) -> float:
    """K = (M + m) / (2 sqrt(mM))."""
    return (M + m) / (2.0 * math.sqrt(m * M))


def ball_additive_coefficient(rho: float) -> float:
    root = math.sqrt(1.0 - rho * rho)
    return rho * rho / (root * (1.0 + root))


def mM_additive_coefficient(m: float, M: float) -> float:
    """(sqrt(M) - sqrt(m))^2 / (2 sqrt(mM)), which equals mM_factor(m, M) - 1."""
    return (math.sqrt(M) - math.sqrt(m)) ** 2 / (2.0 * math.sqrt(m * M))


def quadratic_mM_coefficient(m: float, M: float) -> float:
    """(M - m)^2 / (M + m)."""
    return (M - m) ** 2 / (M + m)


def weight_profile_bounds(gamma: float, Gamma: float, a: float, b: float) -> Tuple[float, float]:
    """Min and max over [a, b] of the linear weight (b - s) + gamma*Gamma (s - a).

    The weight runs from b - a at s = a to gamma*Gamma (b - a) at s = b.
    """
    ends = (b - a, gamma * Gamma * (b - a))
    return min(ends), max(ends)


def _hypothesis(**params) -> HypothesisSpec:
    try:
        return HypothesisSpec(**params)
    except ValidationError as e:
        raise InputError(f"Invalid {params.get('kind')} parameters: {e.errors()[0]['msg']}")


def _vector(e: VectorLike) -> ComplexVector:
    return e if isinstance(e, ComplexVector) else as_vector(e)


def _upper(matrix: np.ndarray) -> np.ndarray:
    return matrix[np.triu_indices(matrix.shape[0])]


class InequalityService:
    """Service for building LHS/RHS/gap reports with equality residuals."""

    def __init__(self, tol_ineq: Optional[float] = None, hypotheses: Optional[HypothesisService] = None):
        """Initialize the inequality service.

        Args:
            tol_ineq: Absolute and relative tolerance on abs_gap; defaults to INEQ_TOL_INEQ
            hypotheses: Checker used for preconditions
        """
        self.tol = config.TOL_INEQ if tol_ineq is None else float(tol_ineq)
        self.hypotheses = hypotheses or HypothesisService()

    def _report(
        self,
        inequality_id: str,
        lhs: float,
        rhs: float,
        residual: Optional[float] = None,
        hypothesis: Optional[HypothesisReport] = None,
        companions: Optional[List[InequalityReport]] = None,
        notes: Optional[List[str]] = None,
    ) -> InequalityReport:
        lhs, rhs = float(lhs), float(rhs)
        abs_gap = rhs - lhs
        rel_gap = abs_gap / max(abs(rhs), config.REL_GAP_FLOOR)
        if not math.isfinite(rel_gap):
            rel_gap = math.copysign(sys.float_info.max, abs_gap)
        satisfied = abs_gap >= -(self.tol + self.tol * max(abs(lhs), abs(rhs)))
        if not satisfied:
            logger.warning(f"{inequality_id} violated: lhs={lhs:.17g} rhs={rhs:.17g}")
        logger.debug(f"{inequality_id}: lhs={lhs:.17g} rhs={rhs:.17g} rel_gap={rel_gap:.3e}")
        return InequalityReport(
            id=inequality_id,
            lhs=lhs,
            rhs=rhs,
            abs_gap=abs_gap,
            rel_gap=rel_gap,
            satisfied=satisfied,
            equality_residual=None if residual is None else max(float(residual), 0.0),
            hypothesis=hypothesis,
            companions=companions or [],
            notes=notes or [],
        )

    def _require(self, inequality_id: str, report: HypothesisReport) -> HypothesisReport:
        if not report.holds:
            logger.info(f"{inequality_id}: hypothesis {report.kind} unmet (worst margin {report.worst_margin:.3e})")
            raise HypothesisUnmetError(inequality_id, report)
        return report

    # Dispatch

    def evaluate(self, f: GridFunction, spec: InequalitySpec, cfg: QuadratureConfig) -> List[InequalityReport]:
        """Evaluate one inequality spec; the complex suite yields three reports."""
        iid = spec.id
        if iid == "triangle":
            return [self.eval_triangle(f, cfg)]
        if iid == "karamata":
            return [self.eval_karamata(f, self._param(spec, "theta"), cfg)]
        if iid == "multiplicative_K":
            return [self.eval_multiplicative_reverse(f, self._param(spec, "e"), cfg, K=self._param(spec, "K"))]
        if iid == "multiplicative_ball":
            return [self.eval_multiplicative_reverse(f, self._param(spec, "e"), cfg, rho=self._param(spec, "rho"))]
        if iid == "multiplicative_mM":
            return [self.eval_multiplicative_reverse(
                f, self._param(spec, "e"), cfg, m=self._param(spec, "m"), M=self._param(spec, "M")
            )]
        if iid == "additive_k":
            return [self.eval_additive_reverse(f, self._param(spec, "e"), cfg, k=self._param(spec, "k"))]
        if iid == "additive_ball":
            return [self.eval_additive_reverse(f, self._param(spec, "e"), cfg, rho=self._param(spec, "rho"))]
        if iid == "additive_mM":
            return [self.eval_additive_reverse(
                f, self._param(spec, "e"), cfg, m=self._param(spec, "m"), M=self._param(spec, "M")
            )]
        if iid == "additive_r":
            return [self.eval_additive_reverse(f, self._param(spec, "e"), cfg, r=self._param(spec, "r"))]
        if iid in ("quadratic_kernel_upper", "quadratic_kernel_lower"):
            mode = "upper" if iid.endswith("upper") else "lower"
            return [self.eval_quadratic_kernel(f, self._param(spec, "kernel"), mode, cfg)]
        if iid == "quadratic_mM":
            return [self.eval_quadratic_mM(f, self._param(spec, "m"), self._param(spec, "M"), cfg)]
        if iid == "quadratic_ratio":
            return [self.eval_quadratic_ratio(f, self._param(spec, "m"), self._param(spec, "M"), cfg)]
        if iid == "weighted_gamma":
            return [self.eval_weighted_gamma(f, self._param(spec, "gamma"), self._param(spec, "Gamma"), cfg)]
        if iid == "complex_suite":
            return self.eval_complex_suite(f, self._param(spec, "m"), self._param(spec, "M"), cfg)
        raise InputError(f"Unknown inequality id {iid}")

    @staticmethod
    def _param(spec: InequalitySpec, name: str):
        value = getattr(spec, name)
        if value is None:
            raise InputError(f"{spec.id} needs parameter {name}")
        return value

    # Base inequalities

    def eval_triangle(self, f: GridFunction, cfg: QuadratureConfig) -> InequalityReport:
        """||int f|| <= int ||f||."""
        return self._report("triangle", norm(bochner_integral(f, cfg)), integral_norm(f, cfg))

    def eval_karamata(self, f: GridFunction, theta: float, cfg: QuadratureConfig) -> InequalityReport:
        """cos(theta) int |f| <= |int f| when |arg f| <= theta."""
        hypothesis = self._require("karamata", self.hypotheses.check_karamata(f, theta))
        return self._report(
            "karamata",
            math.cos(theta) * integral_norm(f, cfg),
            norm(bochner_integral(f, cfg)),
            hypothesis=hypothesis,
        )

    # Multiplicative and additive reverses with a unit vector e

    def eval_multiplicative_reverse(
        self,
        f: GridFunction,
        e: VectorLike,
        cfg: QuadratureConfig,
        K: Optional[float] = None,
        rho: Optional[float] = None,
        m: Optional[float] = None,
        M: Optional[float] = None,
    ) -> InequalityReport:
        """int ||f|| <= K ||int f||, with K given directly or derived from rho or (m, M).

        The residual measures the distance of int f from (1/K)(int ||f||) e,
        which vanishes exactly in the equality case.
        """
        e = _vector(e)
        companions: List[InequalityReport] = []
        if K is not None:
            iid = "multiplicative_K"
            hyp = _hypothesis(kind="diaz-metcalf-K", K=K, e=e.to_json())
            factor = float(K)
        elif rho is not None:
            iid = "multiplicative_ball"
            hyp = _hypothesis(kind="ball-rho", rho=rho, e=e.to_json())
            factor = ball_factor(rho)
        elif m is not None and M is not None:
            iid = "multiplicative_mM"
            hyp = _hypothesis(kind="mM-with-e", m=m, M=M, e=e.to_json())
            factor = mM_factor(m, M)
        else:
            raise InputError("Multiplicative reverse needs K, rho or (m, M)")

        hypothesis = self._require(iid, self.hypotheses.check_pointwise_e(f, hyp))
        integral = bochner_integral(f, cfg)
        total = integral_norm(f, cfg)
        residual = norm(integral - (total / factor) * e)
        if iid == "multiplicative_mM":
            companions.append(self._report(
                "additive_mM_companion",
                total - norm(integral),
                mM_additive_coefficient(m, M) * norm(integral),
            ))
        return self._report(
            iid, total, factor * norm(integral), residual=residual, hypothesis=hypothesis, companions=companions
        )

    def eval_additive_reverse(
        self,
        f: GridFunction,
        e: VectorLike,
        cfg: QuadratureConfig,
        k: Optional[NodeProfile] = None,
        rho: Optional[float] = None,
        m: Optional[float] = None,
        M: Optional[float] = None,
        r: Optional[NodeProfile] = None,
    ) -> InequalityReport:
        """int ||f|| - ||int f|| <= bound, for the k(t), rho, (m, M) and r(t) variants."""
        e = _vector(e)
        k, r = (p.tolist() if isinstance(p, np.ndarray) else p for p in (k, r))
        integral = bochner_integral(f, cfg)
        total = integral_norm(f, cfg)
        lhs = total - norm(integral)
        residual = None
        if k is not None:
            iid = "additive_k"
            hyp = _hypothesis(kind="additive-k-of-t", k=k, e=e.to_json())
            hypothesis = self._require(iid, self.hypotheses.check_pointwise_e(f, hyp))
            k_total = integrate_nodes(node_values(k, f), f, cfg)
            rhs = k_total
            # equality needs int ||f|| >= int k and int f = (int ||f|| - int k) e
            residual = norm(integral - (total - k_total) * e) + max(0.0, k_total - total)
        elif rho is not None:
            iid = "additive_ball"
            hyp = _hypothesis(kind="ball-rho", rho=rho, e=e.to_json())
            hypothesis = self._require(iid, self.hypotheses.check_pointwise_e(f, hyp))
            rhs = ball_additive_coefficient(rho) * re_inner(integral, e)
        elif m is not None and M is not None:
            iid = "additive_mM"
            hyp = _hypothesis(kind="mM-with-e", m=m, M=M, e=e.to_json())
            hypothesis = self._require(iid, self.hypotheses.check_pointwise_e(f, hyp))
            rhs = mM_additive_coefficient(m, M) * re_inner(integral, e)
        elif r is not None:
            iid = "additive_r"
            hyp = _hypothesis(kind="ball-r-of-t", r=r, e=e.to_json())
            hypothesis = self._require(iid, self.hypotheses.check_pointwise_e(f, hyp))
            rhs = 0.5 * integrate_nodes(node_values(r, f) ** 2, f, cfg)
        else:
            raise InputError("Additive reverse needs k, rho, (m, M) or r")
        return self._report(iid, lhs, rhs, residual=residual, hypothesis=hypothesis)

    # Quadratic reverses

    def eval_quadratic_kernel(
        self, f: GridFunction, kernel: Kernel, mode: str, cfg: QuadratureConfig
    ) -> InequalityReport:
        """(int ||f||)^2 against ||int f||^2 + 2 * triangle integral of k.

        upper: k dominates the Schwarz gap, the sum bounds the square from above;
        a coarser additive bound is attached. lower: 0 <= k <= gap refines the
        Schwarz inequality; the inner link of the chain is attached.
        """
        if isinstance(kernel, KernelSpec):
            K = kernel_matrix(kernel, f)
        else:
            K = kernel_values(kernel, f)
        iid = f"quadratic_kernel_{mode}"
        hypothesis = self._require(iid, self.hypotheses.check_kernel_domination(f, K, mode))

        total = integral_norm(f, cfg)
        integral_sq = norm(bochner_integral(f, cfg)) ** 2
        double = triangle_integral(K, f, cfg)
        residual = float(np.max(np.abs(_upper(K - schwarz_gap_matrix(f)))))
        if mode == "upper":
            coarse = self._report(
                "quadratic_kernel_coarse",
                total - math.sqrt(integral_sq),
                math.sqrt(2.0) * math.sqrt(max(double, 0.0)),
            )
            return self._report(
                iid, total ** 2, integral_sq + 2.0 * double,
                residual=residual, hypothesis=hypothesis, companions=[coarse],
            )
        chain = self._report("quadratic_kernel_chain", integral_sq, integral_sq + 2.0 * double)
        return self._report(
            iid, integral_sq + 2.0 * double, total ** 2,
            residual=residual, hypothesis=hypothesis, companions=[chain],
        )

    def _check_mM(self, m: float, M: float) -> None:
        if not (M >= 1.0 >= m >= 0.0) or M + m <= 0:
            raise InputError(f"Need M >= 1 >= m >= 0 and M + m > 0, got m={m}, M={M}")

    def eval_quadratic_mM(self, f: GridFunction, m: float, M: float, cfg: QuadratureConfig) -> InequalityReport:
        """(int ||f||)^2 <= ||int f||^2 + (1/2) (M-m)^2/(M+m) int (s-a) ||f(s)||^2 ds."""
        self._check_mM(m, M)
        hypothesis = self._require(
            "quadratic_mM", self.hypotheses.check_pairwise(f, _hypothesis(kind="pairwise-mM", m=m, M=M))
        )
        return self._quadratic_mM_report("quadratic_mM", f, m, M, cfg, hypothesis)

    def _quadratic_mM_report(
        self, iid: str, f: GridFunction, m: float, M: float, cfg: QuadratureConfig, hypothesis: HypothesisReport
    ) -> InequalityReport:
        c = quadratic_mM_coefficient(m, M)
        total = integral_norm(f, cfg)
        integral_sq = norm(bochner_integral(f, cfg)) ** 2
        # the (s - a) weighted integral is taken over the triangle, as ||f(s)||^2 integrated in t
        moment = triangle_norm_integral(f, cfg, variable="s")
        sq = f.norms() ** 2
        residual = float(np.max(np.abs(_upper(schwarz_gap_matrix(f) - 0.25 * c * sq.reshape(1, -1)))))
        return self._report(iid, total ** 2, integral_sq + 0.5 * c * moment, residual=residual, hypothesis=hypothesis)

    def eval_quadratic_ratio(self, f: GridFunction, m: float, M: float, cfg: QuadratureConfig) -> InequalityReport:
        """int ||f|| <= ((M+m)/(2 sqrt(Mm)))^(1/2) ||int f||, with the gap form attached."""
        self._check_mM(m, M)
        if m <= 0:
            raise InputError("Ratio form needs m > 0")
        hypothesis = self._require(
            "quadratic_ratio", self.hypotheses.check_pairwise(f, _hypothesis(kind="pairwise-mM", m=m, M=M))
        )
        return self._quadratic_ratio_report("quadratic_ratio", f, m, M, cfg, hypothesis)

    def _quadratic_ratio_report(
        self, iid: str, f: GridFunction, m: float, M: float, cfg: QuadratureConfig, hypothesis: HypothesisReport
    ) -> InequalityReport:
        factor = mM_factor(m, M)
        total = integral_norm(f, cfg)
        integral_norm_value = norm(bochner_integral(f, cfg))
        gap_form = self._report(
            f"{iid}_gap",
            total ** 2 - integral_norm_value ** 2,
            mM_additive_coefficient(m, M) * integral_norm_value ** 2,
        )
        n = f.norms()
        gram = (f.values @ f.values.conj().T).real
        residual = float(np.max(np.abs(_upper(np.outer(n, n) - factor * gram))))
        return self._report(
            iid, total, math.sqrt(factor) * integral_norm_value,
            residual=residual, hypothesis=hypothesis, companions=[gap_form],
        )

    # Weighted form

    def eval_weighted_gamma(
        self, f: GridFunction, gamma: float, Gamma: float, cfg: QuadratureConfig
    ) -> InequalityReport:
        """int [(b-s) + gamma Gamma (s-a)] ||f(s)||^2 ds <= ((Gamma+gamma)/2) ||int f||^2."""
        if Gamma + gamma <= 0:
            raise InputError(f"Weighted form needs Gamma + gamma > 0, got {gamma}, {Gamma}")
        hypothesis = self._require(
            "weighted_gamma",
            self.hypotheses.check_pairwise(f, _hypothesis(kind="pairwise-gammaGamma", gamma=gamma, Gamma=Gamma)),
        )
        return self._weighted_report("weighted_gamma", f, gamma, Gamma, cfg, hypothesis)

    def _weighted_report(
        self,
        iid: str,
        f: GridFunction,
        gamma: float,
        Gamma: float,
        cfg: QuadratureConfig,
        hypothesis: HypothesisReport,
        notes: Optional[List[str]] = None,
    ) -> InequalityReport:
        a, b = f.a, f.b
        product = gamma * Gamma
        weight = (b - f.nodes) + product * (f.nodes - a)
        lhs = weighted_norm_integral(f, weight, cfg)
        rhs = 0.5 * (Gamma + gamma) * norm(bochner_integral(f, cfg)) ** 2

        companions = []
        notes = list(notes or [])
        if product > 0:
            low, _ = weight_profile_bounds(gamma, Gamma, a, b)
            square_integral = integrate_nodes(f.norms() ** 2, f, cfg)
            name = f"{iid}_corollary_a" if product >= 1 else f"{iid}_corollary_b"
            companions.append(self._report(name, low * square_integral, rhs))
        else:
            notes.append("gamma * Gamma <= 0: no constant-weight corollary")

        # equality needs the pairwise form to vanish on the whole triangle
        residual = float(np.max(np.abs(_upper(pairwise_slack(f, gamma, Gamma)))))
        return self._report(
            iid, lhs, rhs, residual=residual, hypothesis=hypothesis, companions=companions, notes=notes
        )

    # Complex scalar suite

    def eval_complex_suite(self, f: GridFunction, m: float, M: float, cfg: QuadratureConfig) -> List[InequalityReport]:
        """Quadratic m-M form, ratio form and weighted form for a scalar complex function.

        The componentwise chains on Re f and Im f are the precondition.
        """
        if f.dim != 1:
            raise InputError(f"Complex suite needs a scalar function, got dim {f.dim}")
        self._check_mM(m, M)
        if m <= 0:
            raise InputError("Complex suite ratio form needs m > 0")
        hypothesis = self._require(
            "complex_suite",
            self.hypotheses.check_complex_componentwise(f, _hypothesis(kind="complex-componentwise", m=m, M=M)),
        )
        return [
            self._quadratic_mM_report("complex_quadratic_mM", f, m, M, cfg, hypothesis),
            self._quadratic_ratio_report("complex_quadratic_ratio", f, m, M, cfg, hypothesis),
            self._weighted_report("complex_weighted", f, m, M, cfg, hypothesis, notes=[GAMMA_MAPPING_NOTE]),
        ]
