"""Pydantic schemas for experiment configs, reports and scan output"""
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..lac_config import DEFAULT_GRID_EXP, MAX_GRID_EXP, MIN_GRID_EXP
from ..spectra import SpectralSet

SCHEMA_VERSION = "1"

L1_CHECKS = ("periodic", "cofinite-l1", "search-l1", "classify-h1")
LINF_CHECKS = ("witness-linf", "classify-linf", "classify-hinf", "dset", "oracle")
ANALYTIC_CHECKS = ("classify-h1", "classify-hinf")


class RandomSource(BaseModel):
    """Seeded random trigonometric polynomials with spectrum in Λ ∩ band."""

    model_config = ConfigDict(extra="forbid")
    sparsity: int = Field(4, ge=1)
    band: int = Field(12, ge=1)
    seed: int = Field(0, ge=0)
    analytic: bool = False


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    p: Literal["1", "inf"]
    check: Literal[
        "periodic",
        "cofinite-l1",
        "search-l1",
        "classify-h1",
        "witness-linf",
        "classify-linf",
        "classify-hinf",
        "dset",
        "oracle",
    ]
    sets: list[str] = []
    template: Optional[str] = None
    bands: list[int] = []
    f: Optional[str] = None
    random: Optional[RandomSource] = None
    degree: int = Field(8, ge=1)
    q: int = Field(DEFAULT_GRID_EXP, ge=MIN_GRID_EXP, le=MAX_GRID_EXP - 1)
    sides: int = Field(64, ge=8)
    oracle_reps: int = Field(8, ge=1)
    repetitions: int = Field(1, ge=1)
    workers: int = Field(1, ge=1)
    output: Optional[str] = None
    format: Literal["json", "csv", "parquet"] = "csv"

    @model_validator(mode="after")
    def check_consistency(self):
        if self.p == "1" and self.check not in L1_CHECKS:
            raise ValueError(f"check {self.check} does not belong to p = 1")
        if self.p == "inf" and self.check not in LINF_CHECKS:
            raise ValueError(f"check {self.check} does not belong to p = inf")
        if self.template is not None:
            if "{band}" not in self.template:
                raise ValueError("a set template needs a {band} placeholder")
            if not self.bands:
                raise ValueError("a set template needs a list of bands")
        if not self.descriptors():
            raise ValueError("no spectral sets given")
        if self.f is not None and self.random is not None:
            raise ValueError("give either an explicit f or a random source, not both")
        if self.f is None and self.random is None:
            self.random = RandomSource(analytic=self.check in ANALYTIC_CHECKS)
        for descriptor in self.descriptors():
            SpectralSet.parse(descriptor)
        return self

    def descriptors(self) -> list[str]:
        expanded = []
        if self.template is not None:
            expanded = [self.template.replace("{band}", str(band)) for band in self.bands]
        return list(self.sets) + expanded


class Report(BaseModel):
    schema_version: Literal["1"] = SCHEMA_VERSION
    library_version: str
    command: str
    config: dict[str, Any]
    verdict: Optional[str] = None
    result: dict[str, Any]
    residuals: dict[str, float] = {}
    timings: dict[str, float] = {}


class ScanRow(BaseModel):
    set_index: int
    set_descriptor: str
    trial: int
    seed: list[int]
    f: str
    verdict: str
    residual: Optional[float] = None
    norm_defect: Optional[float] = None
    detail: str = ""
    elapsed_s: float


class VerdictCounts(BaseModel):
    set_descriptor: str
    counts: dict[str, int]


class ScanSummary(BaseModel):
    schema_version: Literal["1"] = SCHEMA_VERSION
    library_version: str
    config: ExperimentConfig
    trials: int
    per_set: list[VerdictCounts]
    totals: dict[str, int]
    residual_quantiles: dict[str, float]
    output: Optional[str] = None
