"""Service for certifying admissibility conditions on the grid."""

import logging
from typing import Optional, Tuple

import numpy as np

from app import config
from app.core.errors import InputError
from app.core.functions import GridFunction, as_vector, node_values
from app.core.vectors import ComplexVector, is_unit, row_norms, row_re_inner
from app.core.quadrature import schwarz_gap_matrix
from app.db.models import EquivalenceReport, HypothesisReport, HypothesisSpec

logger = logging.getLogger(__name__)

POINTWISE_KINDS = ("diaz-metcalf-K", "ball-rho", "ball-r-of-t", "mM-with-e", "additive-k-of-t")
PAIRWISE_KINDS = ("pairwise-mM", "pairwise-gammaGamma")


def _worst(slack: np.ndarray) -> Tuple[float, list]:
    """Smallest slack and its location; ties go to the first index in row-major order."""
    flat = int(np.argmin(slack))
    location = [int(i) for i in np.unravel_index(flat, slack.shape)]
    return float(slack.flat[flat]), location


def _upper_pairs(size: int) -> np.ndarray:
    return np.triu(np.ones((size, size), dtype=bool))


def _masked(slack: np.ndarray) -> np.ndarray:
    """Pair slack with the entries below the diagonal (s < t) excluded."""
    return np.where(_upper_pairs(slack.shape[0]), slack, np.inf)


def pairwise_slack(f: GridFunction, lower: float, upper: float) -> np.ndarray:
    """(upper + lower) Re<f(t), f(s)> - ||f(t)||^2 - lower*upper ||f(s)||^2 at pairs (t_i, s_j).

    This is the expanded form of Re<upper f(s) - f(t), f(t) - lower f(s)>.
    """
    sq = f.norms() ** 2
    gram = (f.values @ f.values.conj().T).real
    return (upper + lower) * gram - sq.reshape(-1, 1) - lower * upper * sq.reshape(1, -1)


def equivalence_disagreements(
    x: np.ndarray, y: np.ndarray, m: float, M: float, tol: float = 1e-12
) -> np.ndarray:
    """Per-pair disagreement between the two forms of the m-M pairwise condition.

    The inner-product form Re<M y - x, x - m y> >= 0 and the ball form
    ||x - (M+m)/2 y|| <= (M-m)/2 ||y|| (compared squared) are evaluated
    independently for every row pair; True marks a pair where one accepts
    and the other rejects at tolerance tol.

    Args:
        x: Batch of vectors, shape (n, dim) or (dim,)
        y: Batch of vectors of the same shape
        m: Lower multiplier, 0 <= m <= 1
        M: Upper multiplier, M >= 1
        tol: Absolute slack tolerance

    Returns:
        Boolean array of shape (n,)
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.complex128))
    y = np.atleast_2d(np.asarray(y, dtype=np.complex128))
    if x.shape != y.shape:
        raise InputError(f"Pair batches differ in shape: {x.shape} != {y.shape}")
    m = np.asarray(m, dtype=float)
    M = np.asarray(M, dtype=float)
    m_col = m.reshape(-1, 1) if m.ndim else m
    M_col = M.reshape(-1, 1) if M.ndim else M
    inner_form = row_re_inner(M_col * y - x, x - m_col * y)
    centre = 0.5 * (M_col + m_col)
    ball_form = 0.25 * (M - m) ** 2 * row_norms(y) ** 2 - row_norms(x - centre * y) ** 2
    return (inner_form >= -tol) != (ball_form >= -tol)


class HypothesisService:
    """Service for checking hypotheses at every grid node or node pair."""

    def __init__(self, tol_hyp: Optional[float] = None):
        """Initialize the hypothesis service.

        Args:
            tol_hyp: Absolute tolerance on slack; defaults to INEQ_TOL_HYP
        """
        self.tol = config.TOL_HYP if tol_hyp is None else float(tol_hyp)

    def _report(self, kind: str, slack: np.ndarray, **extra) -> HypothesisReport:
        worst_margin, location = _worst(slack)
        report = HypothesisReport(
            kind=kind,
            holds=worst_margin >= -self.tol,
            worst_margin=worst_margin,
            worst_location=location,
            tolerance=self.tol,
            checked=int(np.count_nonzero(np.isfinite(slack))),
            **extra,
        )
        logger.debug(f"{kind}: holds={report.holds} worst={worst_margin:.3e} at {location}")
        return report

    def _unit_e(self, f: GridFunction, spec: HypothesisSpec) -> ComplexVector:
        if spec.e is None:
            raise InputError(f"{spec.kind} needs a unit vector e")
        e = as_vector(spec.e)
        if e.dim != f.dim:
            raise InputError(f"e has dim {e.dim} but f has dim {f.dim}")
        if not is_unit(e):
            raise InputError(f"{spec.kind} needs a unit vector e (within 1e-12)")
        return e

    def check(self, f: GridFunction, spec: HypothesisSpec) -> HypothesisReport:
        """Dispatch to the checker for spec.kind."""
        if spec.kind in POINTWISE_KINDS:
            return self.check_pointwise_e(f, spec)
        if spec.kind in PAIRWISE_KINDS:
            return self.check_pairwise(f, spec)
        if spec.kind == "complex-componentwise":
            return self.check_complex_componentwise(f, spec)
        return self.check_karamata(f, float(spec.theta))

    def check_pointwise_e(self, f: GridFunction, spec: HypothesisSpec) -> HypothesisReport:
        """Check an e-based condition at every node.

        Args:
            f: Grid function
            spec: Hypothesis of one of the e-based kinds

        Returns:
            HypothesisReport with worst_location = [node index]
        """
        if spec.kind not in POINTWISE_KINDS:
            raise InputError(f"{spec.kind} is not an e-based hypothesis")
        e = self._unit_e(f, spec)
        values = f.values
        norms = f.norms()
        re_e = row_re_inner(values, e.coords)
        distance = row_norms(values - e.coords)

        if spec.kind == "diaz-metcalf-K":
            return self._report(spec.kind, spec.K * re_e - norms)
        if spec.kind == "ball-rho":
            return self._report(spec.kind, spec.rho - distance)
        if spec.kind == "ball-r-of-t":
            return self._report(spec.kind, node_values(spec.r, f) - distance)
        if spec.kind == "additive-k-of-t":
            k = node_values(spec.k, f)
            if np.any(k < 0):
                raise InputError("additive-k-of-t needs k(t) >= 0 at every node")
            return self._report(spec.kind, k - (norms - re_e))

        # mM-with-e: the inner-product form and the ball form are both evaluated
        m, M = float(spec.m), float(spec.M)
        inner_form = row_re_inner(M * e.coords - values, values - m * e.coords)
        ball_form = 0.5 * (M - m) - row_norms(values - 0.5 * (M + m) * e.coords)
        inner_holds = float(np.min(inner_form)) >= -self.tol
        ball_holds = float(np.min(ball_form)) >= -self.tol
        if inner_holds != ball_holds:
            logger.warning(
                f"mM-with-e forms disagree: inner form min {np.min(inner_form):.3e}, "
                f"ball form min {np.min(ball_form):.3e}"
            )
        return self._report(spec.kind, inner_form, forms_agree=inner_holds == ball_holds)

    def check_pairwise(self, f: GridFunction, spec: HypothesisSpec) -> HypothesisReport:
        """Check Re<upper f(s) - f(t), f(t) - lower f(s)> >= 0 at every pair t_i <= s_j.

        Returns:
            HypothesisReport with worst_location = [i, j]
        """
        if spec.kind not in PAIRWISE_KINDS:
            raise InputError(f"{spec.kind} is not a pairwise hypothesis")
        lower, upper = spec.bounds()
        return self._report(spec.kind, _masked(pairwise_slack(f, lower, upper)))

    def check_equivalence_forms(self, f: GridFunction, spec: HypothesisSpec) -> EquivalenceReport:
        """Count node pairs where the inner-product and ball forms disagree."""
        if spec.kind not in PAIRWISE_KINDS:
            raise InputError(f"{spec.kind} is not a pairwise hypothesis")
        lower, upper = spec.bounds()
        rows, cols = np.triu_indices(f.N + 1)
        disagree = equivalence_disagreements(f.values[rows], f.values[cols], lower, upper, self.tol)
        count = int(np.count_nonzero(disagree))
        if count:
            logger.warning(f"{count} node pairs disagree between equivalent pairwise forms")
        return EquivalenceReport(disagreements=count, checked=int(rows.size), tolerance=self.tol)

    def check_complex_componentwise(self, f: GridFunction, spec: HypothesisSpec) -> HypothesisReport:
        """Check m Re f(s) <= Re f(t) <= M Re f(s) and the same for Im, at pairs t <= s.

        The pairwise condition it is sufficient for is evaluated as well;
        implication_failures counts pairs where the chains hold but it fails.
        """
        if f.dim != 1:
            raise InputError(f"Componentwise check needs a scalar function, got dim {f.dim}")
        m, M = float(spec.m), float(spec.M)
        z = f.values[:, 0]
        chain_slack = None
        for part in (z.real, z.imag):
            t_part = part.reshape(-1, 1)
            s_part = part.reshape(1, -1)
            slack = np.minimum(t_part - m * s_part, M * s_part - t_part)
            chain_slack = slack if chain_slack is None else np.minimum(chain_slack, slack)
        chain_slack = _masked(chain_slack)
        implied = _masked(pairwise_slack(f, m, M))
        failures = int(np.count_nonzero((chain_slack >= 0) & np.isfinite(chain_slack) & (implied < -self.tol)))
        if failures:
            logger.warning(f"Componentwise chains hold but the pairwise condition fails at {failures} pairs")
        return self._report(spec.kind, chain_slack, implication_failures=failures)

    def check_karamata(self, f: GridFunction, theta: float) -> HypothesisReport:
        """Check |arg f(t)| <= theta at every node; zero values fail."""
        if f.dim != 1:
            raise InputError(f"Karamata check needs a scalar function, got dim {f.dim}")
        if not 0 < theta < np.pi / 2:
            raise InputError(f"Karamata angle must lie in (0, pi/2), got {theta}")
        z = f.values[:, 0]
        slack = theta - np.abs(np.angle(z))
        slack = np.where(z == 0, -theta, slack)
        return self._report("karamata-theta", slack)

    def check_kernel_domination(self, f: GridFunction, kernel: np.ndarray, mode: str) -> HypothesisReport:
        """Compare a kernel with the Schwarz gap at every pair t <= s.

        upper: kernel >= gap. lower: 0 <= kernel <= gap.
        """
        gap = schwarz_gap_matrix(f)
        if mode == "upper":
            slack = kernel - gap
        elif mode == "lower":
            slack = np.minimum(gap - kernel, kernel)
        else:
            raise InputError(f"Kernel mode must be upper or lower, got {mode}")
        return self._report(f"kernel-{mode}", _masked(slack))
