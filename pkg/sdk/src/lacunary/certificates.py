"""Pydantic models for witnesses, factorization reports and certificates.

Everything a third party needs to re-verify a verdict is embedded: the
polynomials as coefficient triples, the grid exponent and all residuals.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .circle import TrigPolyField

Verdict = Literal[
    "NonExtreme",
    "ExtremeByDSet",
    "ExtremeByOuter",
    "ExtremeByLogIntegral",
    "ExtremeByUnimodular",
    "Inconclusive",
    "NotUnitNorm",
]

EXTREME_VERDICTS = ("ExtremeByDSet", "ExtremeByOuter", "ExtremeByLogIntegral", "ExtremeByUnimodular")


class L1Witness(BaseModel):
    """Midpoint pair u, v = f(1 ± ε(h - c)) in the L¹_Λ ball."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: Literal["periodic", "cofinite", "search"]
    f: TrigPolyField
    h: TrigPolyField
    c: float
    epsilon: float
    u: TrigPolyField
    v: TrigPolyField
    residual: float
    nonconstancy: float
    norm_u: float
    norm_v: float
    mean_shift: float
    alpha: Optional[list[float]] = None
    frequencies: Optional[list[int]] = None
    singular_values: Optional[list[float]] = None


class LinfWitness(BaseModel):
    """Pair f ± g·p with g = 1 - |f|; g itself is regenerated from f on the grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    f: TrigPolyField
    p: TrigPolyField
    beta: list[list[float]]
    excluded: list[int]
    residuals: list[float]
    sup_plus: float
    sup_minus: float
    gp_sup: float
    q: int
    singular_values: list[float]


class OracleWitness(BaseModel):
    """Perturbation g found by the linear-programming oracle."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    g: TrigPolyField
    coefficients: list[list[float]]
    scale: float
    g_sup: float
    sup_plus: float
    sup_minus: float
    objective_index: int
    q: int
    verify_q: int


class InconclusiveDetail(BaseModel):
    degree: int
    unknowns: int
    constraints: int
    rank: int
    nullity: int
    nonconstant_directions: int
    singular_values: list[float]


class MeasureEnclosure(BaseModel):
    """Bracket on m({|f| = 1}) as a fraction of the circle."""

    estimate: float
    lower: float
    upper: float
    exact: bool
    runs: int = 0


class RootEntry(BaseModel):
    re: float
    im: float
    multiplicity: int
    modulus: float
    residual: float
    residual_bound: float


class FactorizationReport(BaseModel):
    degree: int
    roots_inside: list[RootEntry]
    roots_on_boundary: list[RootEntry]
    roots_outside: list[RootEntry]
    is_outer: bool
    blaschke_degree: int
    boundary_tol: float
    ill_conditioned: list[RootEntry] = Field(default_factory=list)


class VanishingPoint(BaseModel):
    angle: float
    order: Optional[float]
    fit_residual: Optional[float] = None


class Arc(BaseModel):
    start: float
    end: float


class LogIntegralReport(BaseModel):
    classification: Literal["finite", "divergent", "divergent-suspect"]
    value: Optional[float] = None
    error: Optional[float] = None
    divergent: bool
    vanishing_points: list[VanishingPoint]
    unimodular_arcs: list[Arc]
    q: int


class ExtremalityCertificate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    verdict: Verdict
    p: Literal["1", "inf"]
    set_descriptor: str
    f: Optional[TrigPolyField] = None
    criterion: str
    scope: str = ""
    l1_witness: Optional[L1Witness] = None
    linf_witness: Optional[LinfWitness] = None
    inconclusive: Optional[InconclusiveDetail] = None
    measure: Optional[MeasureEnclosure] = None
    factorization: Optional[FactorizationReport] = None
    log_integral: Optional[LogIntegralReport] = None
    norm: Optional[float] = None
    notes: list[str] = Field(default_factory=list)

    @property
    def is_extreme(self) -> bool:
        return self.verdict in EXTREME_VERDICTS
