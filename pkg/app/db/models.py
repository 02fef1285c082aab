"""
Data models for the inequality toolkit.

These pydantic models define specs, reports and the versioned scenario
schema. Scenario-facing models reject unknown fields.
"""

import math
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app import config

Rule = Literal["simpson", "trapezoid"]
# A JSON coordinate is a real number or an [re, im] pair
Coords = List[Union[float, List[float]]]

InequalityId = Literal[
    "triangle",
    "karamata",
    "multiplicative_K",
    "multiplicative_ball",
    "multiplicative_mM",
    "additive_k",
    "additive_ball",
    "additive_mM",
    "additive_r",
    "quadratic_kernel_upper",
    "quadratic_kernel_lower",
    "quadratic_mM",
    "quadratic_ratio",
    "weighted_gamma",
    "complex_suite",
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ScalarProfile(StrictModel):
    """Closed catalog of real functions of t.

    zero: 0; constant: value; linear: c0 + c1 t; polynomial: sum c_k t^k;
    sine / cosine: amplitude * sin|cos(frequency t + phase);
    exponential: amplitude * exp(rate t).
    """

    kind: Literal["zero", "constant", "linear", "sine", "cosine", "polynomial", "exponential"]
    value: float = 0.0
    coefficients: List[float] = Field(default_factory=list)
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    rate: float = 1.0

    @model_validator(mode="after")
    def _check_coefficients(self) -> "ScalarProfile":
        if self.kind == "linear" and len(self.coefficients) != 2:
            raise ValueError("linear profile needs coefficients [c0, c1]")
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial profile needs at least one coefficient")
        return self


# Node values given explicitly (length N + 1) are accepted wherever a profile is
NodeProfile = Union[ScalarProfile, List[float]]


class KernelSpec(StrictModel):
    """Catalog of pairwise kernels k(t, s) on the triangle t <= s."""

    kind: Literal["zero", "constant", "schwarz_gap", "cos_difference", "mM_bound"]
    scale: float = 1.0
    value: float = 0.0
    m: Optional[float] = None
    M: Optional[float] = None

    @model_validator(mode="after")
    def _check_bounds(self) -> "KernelSpec":
        if self.kind == "mM_bound" and (self.m is None or self.M is None or self.M + self.m <= 0):
            raise ValueError("mM_bound kernel needs m, M with M + m > 0")
        return self


class FunctionSpec(StrictModel):
    """Vector-valued function descriptor from the closed catalog."""

    family: Literal["function"] = "function"
    kind: Literal["constant", "polynomial", "circle", "phase", "profile", "exp_decay", "sign_switch"]
    vector: Optional[Coords] = None
    coefficients: List[Coords] = Field(default_factory=list)
    profile: Optional[ScalarProfile] = None
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    rate: float = 1.0

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "FunctionSpec":
        if self.kind in ("constant", "profile", "exp_decay", "sign_switch") and not self.vector:
            raise ValueError(f"{self.kind} function needs a vector")
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial function needs vector coefficients")
        if self.kind == "profile" and self.profile is None:
            raise ValueError("profile function needs a scalar profile")
        return self


class LagrangeFamilySpec(StrictModel):
    """phi(t) = exp(-psi(t)) with theta <= psi' <= Theta."""

    family: Literal["lagrange"] = "lagrange"
    psi: ScalarProfile
    theta: float = Field(le=0.0)
    Theta: float = Field(ge=0.0)
    a: float
    b: float

    @field_validator("psi")
    @classmethod
    def _psi_catalog(cls, psi: ScalarProfile) -> ScalarProfile:
        if psi.kind not in ("zero", "linear", "sine", "polynomial"):
            raise ValueError(f"psi must be zero, linear, sine or polynomial, got {psi.kind}")
        return psi

    @model_validator(mode="after")
    def _check_interval(self) -> "LagrangeFamilySpec":
        if not self.a < self.b:
            raise ValueError("interval needs a < b")
        return self

    @property
    def gamma(self) -> float:
        return math.exp(self.theta * (self.b - self.a))

    @property
    def Gamma(self) -> float:
        return math.exp(self.Theta * (self.b - self.a))


class BallFamilySpec(StrictModel):
    """f(t) = e + rho * modulation(t) * u with u orthogonal to e."""

    family: Literal["ball"] = "ball"
    e: Coords
    rho: float = Field(gt=0.0, lt=1.0)
    u: Coords
    modulation: ScalarProfile


FamilySpec = Annotated[
    Union[FunctionSpec, LagrangeFamilySpec, BallFamilySpec], Field(discriminator="family")
]


class QuadratureConfig(StrictModel):
    rule: Rule = config.DEFAULT_RULE
    N: int = config.DEFAULT_GRID_N
    # Rule for the triangle integral; None means the single-integral rule
    pair_rule: Optional[Rule] = None

    @model_validator(mode="after")
    def _check_grid(self) -> "QuadratureConfig":
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.rule == "simpson" and self.N % 2:
            raise ValueError("composite Simpson needs an even N")
        return self


HypothesisKind = Literal[
    "diaz-metcalf-K",
    "ball-rho",
    "ball-r-of-t",
    "mM-with-e",
    "additive-k-of-t",
    "pairwise-mM",
    "pairwise-gammaGamma",
    "complex-componentwise",
    "karamata-theta",
]


class HypothesisSpec(StrictModel):
    """A named admissibility condition and its parameters."""

    kind: HypothesisKind
    K: Optional[float] = None
    rho: Optional[float] = None
    m: Optional[float] = None
    M: Optional[float] = None
    gamma: Optional[float] = None
    Gamma: Optional[float] = None
    theta: Optional[float] = None
    k: Optional[NodeProfile] = None
    r: Optional[NodeProfile] = None
    e: Optional[Coords] = None

    @model_validator(mode="after")
    def _check_params(self) -> "HypothesisSpec":
        kind = self.kind
        if kind == "diaz-metcalf-K":
            if self.K is None or self.K < 1:
                raise ValueError("diaz-metcalf-K needs K >= 1")
        elif kind == "ball-rho":
            if self.rho is None or not 0 < self.rho < 1:
                raise ValueError("ball-rho needs 0 < rho < 1")
        elif kind == "ball-r-of-t":
            if self.r is None:
                raise ValueError("ball-r-of-t needs a profile r")
        elif kind == "additive-k-of-t":
            if self.k is None:
                raise ValueError("additive-k-of-t needs a profile k")
        elif kind == "mM-with-e":
            if self.m is None or self.M is None or not self.M >= self.m > 0:
                raise ValueError("mM-with-e needs M >= m > 0")
        elif kind in ("pairwise-mM", "complex-componentwise"):
            if self.m is None or self.M is None or not self.M >= 1 >= self.m >= 0:
                raise ValueError(f"{kind} needs M >= 1 >= m >= 0")
        elif kind == "pairwise-gammaGamma":
            if self.gamma is None or self.Gamma is None:
                raise ValueError("pairwise-gammaGamma needs gamma and Gamma")
        elif kind == "karamata-theta":
            if self.theta is None or not 0 < self.theta < math.pi / 2:
                raise ValueError("karamata-theta needs 0 < theta < pi/2")
        return self

    def bounds(self) -> Tuple[float, float]:
        """(lower, upper) multipliers of a pairwise condition."""
        if self.kind == "pairwise-gammaGamma":
            return float(self.gamma), float(self.Gamma)
        return float(self.m), float(self.M)


class HypothesisReport(BaseModel):
    kind: str
    holds: bool
    worst_margin: float
    worst_location: List[int]
    tolerance: float
    checked: int
    forms_agree: Optional[bool] = None
    implication_failures: Optional[int] = None


class EquivalenceReport(BaseModel):
    """Agreement of the inner-product form and the ball form of a pairwise condition."""

    disagreements: int
    checked: int
    tolerance: float


class InequalitySpec(StrictModel):
    """One inequality to evaluate, with its parameters."""

    id: InequalityId
    K: Optional[float] = None
    rho: Optional[float] = None
    m: Optional[float] = None
    M: Optional[float] = None
    gamma: Optional[float] = None
    Gamma: Optional[float] = None
    theta: Optional[float] = None
    e: Optional[Coords] = None
    k: Optional[NodeProfile] = None
    r: Optional[NodeProfile] = None
    kernel: Optional[KernelSpec] = None
    mode: Literal["upper", "lower"] = "upper"


class InequalityReport(BaseModel):
    id: str
    lhs: float
    rhs: float
    abs_gap: float
    rel_gap: float
    satisfied: bool
    equality_residual: Optional[float] = None
    hypothesis: Optional[HypothesisReport] = None
    companions: List["InequalityReport"] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


InequalityReport.model_rebuild()


class SearchSpec(StrictModel):
    family: Literal["ball", "lagrange", "constant-direction"]
    free_params: Dict[str, Tuple[float, float]]
    fixed_params: Dict[str, float] = Field(default_factory=dict)
    inequality_id: InequalityId
    budget: int = Field(default=200, ge=0)
    seed: int = 0
    restarts: int = Field(default=config.SEARCH_RESTARTS, ge=1)
    shrinks: int = Field(default=config.SEARCH_SHRINKS, ge=0)

    @field_validator("free_params")
    @classmethod
    def _check_ranges(cls, ranges: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
        for name, (lo, hi) in ranges.items():
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"range for {name} is empty or not finite")
        return ranges


class SearchResult(BaseModel):
    family: str
    inequality_id: str
    best_params: Dict[str, float]
    best_rel_gap: float
    report: InequalityReport
    evaluations: int
    label: str = "exploratory evidence only; not a sharpness certificate"


class SweepSpec(StrictModel):
    name: str
    targets: List[str] = Field(min_length=1)
    values: List[float]


class IntervalSpec(StrictModel):
    a: float
    b: float

    @model_validator(mode="after")
    def _check_order(self) -> "IntervalSpec":
        if not self.a < self.b:
            raise ValueError("interval needs a < b")
        return self


class GridSpec(StrictModel):
    N: int = config.DEFAULT_GRID_N
    rule: Rule = config.DEFAULT_RULE


class ToleranceSpec(StrictModel):
    tol_hyp: float = Field(default=config.TOL_HYP, ge=0.0)
    tol_ineq: float = Field(default=config.TOL_INEQ, ge=0.0)


class OutputSpec(StrictModel):
    format: Literal["json", "csv"] = "json"
    path: Optional[str] = None


class Scenario(StrictModel):
    """Declarative description of one verification run (schema version 1)."""

    schema_version: Literal[1]
    name: Optional[str] = None
    interval: IntervalSpec
    grid: GridSpec = Field(default_factory=GridSpec)
    family: FamilySpec
    hypotheses: List[HypothesisSpec] = Field(default_factory=list)
    inequalities: List[InequalitySpec] = Field(default_factory=list)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    search: Optional[SearchSpec] = None
    sweep: List[SweepSpec] = Field(default_factory=list)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _check_work(self) -> "Scenario":
        if not self.inequalities and self.search is None:
            raise ValueError("scenario needs at least one inequality or a search")
        return self
