"""FastAPI service over the lacunary toolkit"""

import logging

from fastapi import Depends, FastAPI, Query, Request
from fastapi.responses import JSONResponse

from lacunary import __version__, extremality, factorization, scan, spectra, toeplitz
from lacunary.certificates import ExtremalityCertificate, LogIntegralReport
from lacunary.exceptions import NumericalAnomalyError, PreconditionError
from lacunary.expressions import parse_function
from lacunary.extremality import OracleResult
from lacunary.lac_config import MAX_GRID_EXP, MIN_GRID_EXP, LacunaryConfig
from lacunary.spectra import SetInfo, SpectralSet
from lacunary.toeplitz import KernelBasis

logger = logging.getLogger(__name__)

api_description = """
This API decides whether trigonometric polynomials are extreme points of the unit
balls of L¹_Λ and L∞_Λ, the subspaces of L¹ and L∞ on the circle whose Fourier
spectrum lies in a set Λ of integers. Every answer is a certificate that carries
the data needed to re-verify it. The endpoints are grouped into the following categories:

## Analytics
Check the health of the API.

## Sets
Parse a spectral-set descriptor such as `Z \\ {0}`, `AP(3,1) & Zplus` or `negpow(2) | Zplus`
and get its canonical form, period and family tags.

## Witnesses
Get a midpoint pair u, v with f = (u + v)/2 that shows f is not extreme.

## Classifications
Get a verdict for f in ball(H¹), ball(H∞(Λ)) or ball(L∞_Λ) with Λ cofinite, and D-set certificates.

## Analysis
Log integrals of 1 - |f|, Toeplitz kernels and the linear-programming feasibility oracle.

Functions are written as expressions in z, such as `(pi/4)*(1+z)` or `(z^2 + z^4)/2`.
"""

# FastAPI constructor with additional details added for OpenAPI Specification
app = FastAPI(
    description=api_description,
    title="Lacunary Extreme Points API",
    version=__version__,
)


# Dependency
def get_config():
    return LacunaryConfig()


@app.exception_handler(PreconditionError)
async def precondition_handler(request: Request, exc: PreconditionError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericalAnomalyError)
async def anomaly_handler(request: Request, exc: NumericalAnomalyError):
    logger.error(f"{request.url.path}: {exc}")
    return JSONResponse(status_code=500, content={"detail": f"numerical anomaly: {exc}"})


def _grid(grid_exp: int, config: LacunaryConfig) -> int:
    return grid_exp if grid_exp is not None else config.grid_exp


def _set(text: str, config: LacunaryConfig) -> SpectralSet:
    return SpectralSet.parse(text, band_default=config.band)


@app.get(
    "/",
    summary="Check to see if the lacunary API is running",
    description="""Use this endpoint to check if the API is running. You can also check it first before making other calls to be sure it's running.""",
    response_description="A JSON record with a message in it. If the API is running the message will say successful.",
    operation_id="v0_health_check",
    tags=["analytics"],
)
async def root():
    return {"message": "API health check successful"}


@app.get(
    "/v0/sets/",
    response_model=SetInfo,
    summary="Describe a spectral set",
    description="""Use this endpoint to parse a spectral-set descriptor. The answer has the canonical form, the family tags, the period when there is one and the finite complement in the default band.""",
    response_description="Canonical form, tags, period and complement of the set.",
    operation_id="v0_get_set_info",
    tags=["sets"],
)
def read_set(
    set: str = Query(..., description="Spectral-set descriptor, for example Z \\ {0} or AP(2,0)."),
    band: int = Query(None, ge=1, description="Half-width B of the default band [-B, B]."),
    config: LacunaryConfig = Depends(get_config),
):
    spectral_set = SpectralSet.parse(set, band_default=band or config.band)
    return spectra.describe(spectral_set)


@app.get(
    "/v0/witnesses/l1/",
    response_model=ExtremalityCertificate,
    summary="Get a non-extremality witness in the unit ball of L¹_Λ",
    description="""Use this endpoint to split a unit-norm f into u, v with the same norm. With method auto the periodic witness is used when Λ has a period, then the cofinite one, then a search over real polynomials of degree at most `degree`. A search that finds nothing answers Inconclusive.""",
    response_description="A certificate with the witness h, the constant c, the scale ε and the pair u, v.",
    operation_id="v0_get_l1_witness",
    tags=["witnesses"],
)
def read_l1_witness(
    set: str = Query(..., description="Spectral-set descriptor."),
    f: str = Query(..., description="Function expression with ‖f‖₁ = 1."),
    method: str = Query("auto", description="auto, periodic, cofinite or search."),
    degree: int = Query(None, ge=1, description="Degree bound D of the search."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, le=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return extremality.l1_certificate(
        parse_function(f),
        _set(set, config),
        method=method,
        degree=degree or config.search_degree,
        q=_grid(grid_exp, config),
        norm_tol=config.norm_tol,
    )


@app.get(
    "/v0/witnesses/linf/",
    response_model=ExtremalityCertificate,
    summary="Get a non-extremality witness in the unit ball of L∞_Λ for cofinite Λ",
    description="""Use this endpoint to get an analytic p with f ± (1 - |f|)p in the unit ball of L∞_Λ. Λ must miss only finitely many integers and |f| must differ from 1 on a set of positive measure.""",
    response_description="A certificate with p, its coefficients β and the spectral residuals.",
    operation_id="v0_get_linf_witness",
    tags=["witnesses"],
)
def read_linf_witness(
    set: str = Query(..., description="Cofinite spectral-set descriptor."),
    f: str = Query(..., description="Function expression with ‖f‖∞ = 1."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, le=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    spectral_set = _set(set, config)
    poly = parse_function(f)
    witness = extremality.cofinite_linf_witness(poly, spectral_set, _grid(grid_exp, config), config.norm_tol)
    return ExtremalityCertificate(
        verdict="NonExtreme",
        p="inf",
        set_descriptor=spectral_set.canonical(),
        f=poly,
        criterion="cofinite L∞ witness",
        linf_witness=witness,
    )


@app.get(
    "/v0/classifications/h1/",
    response_model=ExtremalityCertificate,
    summary="Classify f in the unit ball of H¹",
    description="""Use this endpoint to decide whether an analytic polynomial of unit L¹ norm is outer, which makes it an extreme point of ball(H¹). The root factorization is returned with the verdict.""",
    response_description="ExtremeByOuter, NonExtreme or NotUnitNorm with the factorization report.",
    operation_id="v0_get_h1_classification",
    tags=["classifications"],
)
def read_h1_classification(
    f: str = Query(..., description="Analytic function expression."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, le=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return factorization.classify_h1_extreme(parse_function(f), config.norm_tol, _grid(grid_exp, config))


@app.get(
    "/v0/classifications/hinf/",
    response_model=ExtremalityCertificate,
    summary="Classify f in the unit ball of H∞(Λ)",
    description="""Use this endpoint to apply the log-integral criterion: f is extreme exactly when ∫ log(1 - |f|) dm diverges. Λ must be Zplus with finitely many integers removed, or 2Zplus.""",
    response_description="ExtremeByLogIntegral, NonExtreme, Inconclusive or NotUnitNorm with the log-integral report.",
    operation_id="v0_get_hinf_classification",
    tags=["classifications"],
)
def read_hinf_classification(
    set: str = Query("Zplus", description="Spectral-set descriptor inside Zplus."),
    f: str = Query(..., description="Analytic function expression."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, lt=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return factorization.classify_hinf_extreme(
        parse_function(f), _set(set, config), _grid(grid_exp, config), config.norm_tol
    )


@app.get(
    "/v0/classifications/linf/",
    response_model=ExtremalityCertificate,
    summary="Classify f in the unit ball of L∞_Λ for cofinite Λ",
    description="""Use this endpoint to decide extremality for cofinite Λ: f is extreme exactly when |f| = 1 almost everywhere. Otherwise the certificate carries a witness.""",
    response_description="ExtremeByUnimodular or NonExtreme with its witness.",
    operation_id="v0_get_linf_classification",
    tags=["classifications"],
)
def read_linf_classification(
    set: str = Query(..., description="Cofinite spectral-set descriptor."),
    f: str = Query(..., description="Function expression with ‖f‖∞ = 1."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, le=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return extremality.classify_linf_cofinite(
        parse_function(f), _set(set, config), _grid(grid_exp, config), config.norm_tol
    )


@app.get(
    "/v0/dset-certificates/",
    response_model=ExtremalityCertificate,
    summary="Check the D-set sufficient condition for extremality in L∞_Λ",
    description="""Use this endpoint when Λ is a D-set such as Zplus or negpow(2) | Zplus. f is extreme when |f| = 1 on a set of positive measure, and the answer is Inconclusive otherwise.""",
    response_description="ExtremeByDSet or Inconclusive with a measure enclosure.",
    operation_id="v0_get_dset_certificate",
    tags=["classifications"],
)
def read_dset_certificate(
    set: str = Query(..., description="D-set descriptor."),
    f: str = Query(..., description="Function expression with ‖f‖∞ = 1."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, le=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return extremality.dset_extreme_certificate(
        parse_function(f), _set(set, config), _grid(grid_exp, config), norm_tol=config.norm_tol
    )


@app.get(
    "/v0/log-integrals/",
    response_model=LogIntegralReport,
    summary="Compute ∫ log(1 - |f|) dm",
    description="""Use this endpoint to find out whether the log integral of 1 - |f| is finite. Points where |f| touches 1 are located and their order of contact is reported.""",
    response_description="finite with a value and error, divergent, or divergent-suspect.",
    operation_id="v0_get_log_integral",
    tags=["analysis"],
)
def read_log_integral(
    f: str = Query(..., description="Function expression with ‖f‖∞ <= 1."),
    grid_exp: int = Query(None, ge=MIN_GRID_EXP, lt=MAX_GRID_EXP, description="Grid exponent q (2^q points)."),
    config: LacunaryConfig = Depends(get_config),
):
    return factorization.log_integral(parse_function(f), _grid(grid_exp, config), config.norm_tol)


@app.get(
    "/v0/toeplitz-kernels/",
    response_model=KernelBasis,
    summary="Get the truncated kernel of a Toeplitz operator",
    description="""Use this endpoint to get an orthonormal basis of the analytic polynomials f of degree at most `cap` with T_φ f = 0.""",
    response_description="Kernel dimension, basis and residual.",
    operation_id="v0_get_toeplitz_kernel",
    tags=["analysis"],
)
def read_toeplitz_kernel(
    phi: str = Query(..., description="Symbol expression, for example zbar^3."),
    cap: int = Query(..., ge=0, description="Degree cap D."),
):
    return toeplitz.kernel_basis(parse_function(phi), cap)


@app.get(
    "/v0/oracle-results/",
    response_model=OracleResult,
    summary="Run the linear-programming feasibility oracle",
    description="""Use this endpoint to look for g in the span of the monomials of Λ ∩ [-D, D] with ‖f ± g‖∞ <= 1. Finding one proves f is not extreme. Not finding one is Inconclusive.""",
    response_description="NonExtreme with a verified g, or Inconclusive.",
    operation_id="v0_get_oracle_result",
    tags=["analysis"],
)
def read_oracle_result(
    set: str = Query(..., description="Spectral-set descriptor."),
    f: str = Query(..., description="Function expression with ‖f‖∞ = 1."),
    degree: int = Query(None, ge=1, description="Degree D of the monomial basis."),
    seed: int = Query(0, description="Seed of the random objectives."),
    config: LacunaryConfig = Depends(get_config),
):
    basis = scan.monomial_basis(_set(set, config), degree or config.search_degree)
    return extremality.linf_feasibility_oracle(
        parse_function(f),
        basis,
        q=config.oracle_grid_exp,
        sides=config.polygon_sides,
        repetitions=config.oracle_reps,
        seed=seed,
        norm_tol=config.norm_tol,
    )
