"""Inner-outer structure of analytic polynomials and the classical criteria.

A polynomial F ∈ H¹ of unit norm is an extreme point of ball(H¹) iff it is
outer (no roots in the open disk). A polynomial f ∈ ball(H∞) is an extreme
point iff ∫ log(1 - |f|) dm = -∞.
"""

import logging
from typing import Optional

import numpy as np
from scipy.linalg import eigvals
from scipy.optimize import minimize_scalar

from . import spectra
from .certificates import (
    Arc,
    ExtremalityCertificate,
    FactorizationReport,
    LogIntegralReport,
    RootEntry,
    VanishingPoint,
)
from .circle import TrigPoly, grid_angles, l1_norm_estimate, linf_enclosure, spectrum_in, to_grid
from .exceptions import NumericalAnomalyError, PreconditionError
from .lac_config import (
    ARC_TOL,
    BOUNDARY_TOL,
    DEFAULT_GRID_EXP,
    MAX_GRID_EXP,
    NORM_TOL,
    UNIMODULAR_TOL,
)
from .spectra import SpectralSet

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-5
ROOT_RESIDUAL_TOL = 1e-10
# Regression radii 2^-6 .. 2^-12 around each point where |f| reaches 1.
VANISHING_RADII = 2.0 ** -np.arange(6, 13)
VANISHING_FLOOR = 1e-13
MAX_VANISHING_ORDER = 20
CANDIDATE_GAP = 1e-4
# Inclusive bound: 1 - (1 - 1e-10) is 1.0000000827e-10 in floating point, and FFT samples add a few ulp.
UNIMODULAR_LIMIT = UNIMODULAR_TOL * (1 + 1e-4)

H1_CRITERION = "outer functions of unit norm are the extreme points of ball(H1)"
H1_SCOPE = "ball(H1), i.e. Λ = Zplus; for a proper Λ ⊂ Zplus this is an H1-relative reference only"
HINF_CRITERION = "f is extreme in ball(H∞(Λ)) iff ‖f‖∞ = 1 and ∫ log(1-|f|) dm = -∞"


def _require_analytic(f: TrigPoly):
    if f.is_zero():
        raise PreconditionError("the zero polynomial has no factorization")
    if not f.is_analytic():
        raise PreconditionError(f"expected an analytic polynomial, spectrum {f.spectrum()} has negative frequencies")


def _polish(coefficients: np.ndarray, root: complex, multiplicity: int) -> complex:
    """Newton on the (multiplicity-1)-th derivative, where the root is simple."""
    poly = np.polynomial.Polynomial(coefficients).deriv(multiplicity - 1)
    slope = poly.deriv()
    r = complex(root)
    for _ in range(50):
        d = slope(r)
        if d == 0:
            break
        step = poly(r) / d
        r -= step
        if abs(step) <= 1e-16 * max(1.0, abs(r)):
            break
    return r if abs(r - root) <= CLUSTER_TOL else complex(root)


def _clusters(roots: np.ndarray) -> list[list[complex]]:
    groups: list[list[complex]] = []
    for r in sorted(roots, key=lambda w: (w.real, w.imag)):
        for group in groups:
            if abs(np.mean(group) - r) <= CLUSTER_TOL:
                group.append(r)
                break
        else:
            groups.append([r])
    return groups


def factorize(f: TrigPoly, boundary_tol: float = BOUNDARY_TOL) -> FactorizationReport:
    """Roots of Σ f̂(k) z^k by companion eigenvalues and Newton polishing."""
    _require_analytic(f)
    logger.debug(f"factorize {f!r}")
    low, high = min(f.spectrum()), max(f.spectrum())
    coefficients = np.array([f.coefficient(k) for k in range(low, high + 1)], dtype=complex)
    scale = float(np.abs(coefficients).max())

    entries: list[RootEntry] = []
    if low > 0:
        entries.append(
            RootEntry(re=0.0, im=0.0, multiplicity=low, modulus=0.0, residual=0.0, residual_bound=0.0)
        )
    if high > low:
        raw = eigvals(np.polynomial.polynomial.polycompanion(coefficients))
        for group in _clusters(raw):
            multiplicity = len(group)
            root = _polish(coefficients, complex(np.mean(group)), multiplicity)
            residual = float(abs(np.polynomial.polynomial.polyval(root, coefficients)))
            bound = ROOT_RESIDUAL_TOL * max(1.0, abs(root)) ** (high - low) * scale
            entries.append(
                RootEntry(
                    re=root.real,
                    im=root.imag,
                    multiplicity=multiplicity,
                    modulus=abs(root),
                    residual=residual,
                    residual_bound=bound,
                )
            )

    ill = [e for e in entries if e.residual > e.residual_bound]
    for entry in ill:
        if abs(entry.modulus - 1) <= CANDIDATE_GAP:
            logger.error(f"ill-conditioned root cluster near the circle: {entry}")
            raise NumericalAnomalyError(
                f"root {entry.re}+{entry.im}i (multiplicity {entry.multiplicity}) has residual "
                f"{entry.residual:.3e} above {entry.residual_bound:.3e} within 1e-4 of the unit circle"
            )

    inside = [e for e in entries if e.modulus < 1 - boundary_tol]
    boundary = [e for e in entries if abs(e.modulus - 1) <= boundary_tol]
    outside = [e for e in entries if e.modulus > 1 + boundary_tol]
    return FactorizationReport(
        degree=high,
        roots_inside=inside,
        roots_on_boundary=boundary,
        roots_outside=outside,
        is_outer=not inside,
        blaschke_degree=sum(e.multiplicity for e in inside),
        boundary_tol=boundary_tol,
        ill_conditioned=ill,
    )


def classify_h1_extreme(
    f: TrigPoly, norm_tol: float = NORM_TOL, q: int = DEFAULT_GRID_EXP
) -> ExtremalityCertificate:
    _require_analytic(f)
    logger.debug(f"classify_h1_extreme {f!r}")
    norm = l1_norm_estimate(f, q).value
    common = dict(p="1", set_descriptor="Zplus", f=f, criterion=H1_CRITERION, scope=H1_SCOPE, norm=norm)
    if abs(norm - 1) > norm_tol:
        return ExtremalityCertificate(
            verdict="NotUnitNorm", notes=[f"‖f‖₁ = {norm!r} differs from 1 by more than {norm_tol}"], **common
        )
    report = factorize(f)
    if report.is_outer:
        return ExtremalityCertificate(verdict="ExtremeByOuter", factorization=report, **common)
    return ExtremalityCertificate(
        verdict="NonExtreme",
        factorization=report,
        notes=[f"inner factor: Blaschke product of degree {report.blaschke_degree}"],
        **common,
    )


def _gap(f: TrigPoly, theta) -> np.ndarray:
    return 1 - np.abs(f.evaluate(theta))


def _vanishing_order(f: TrigPoly, theta0: float) -> tuple[Optional[float], Optional[float], bool]:
    """(order, fit residual, is_arc) of 1-|f| at theta0 from a log-log fit."""
    profile = np.array([(_gap(f, theta0 + r) + _gap(f, theta0 - r)) / 2 for r in VANISHING_RADII])
    if np.all(profile <= UNIMODULAR_LIMIT):
        return None, 0.0, True
    usable = profile >= VANISHING_FLOOR
    if usable.sum() < 3:
        return None, None, False
    x = np.log(VANISHING_RADII[usable])
    y = np.log(profile[usable])
    slope, intercept = np.polyfit(x, y, 1)
    fit_residual = float(np.abs(y - (slope * x + intercept)).max())
    order = float(slope)
    if abs(order - round(order)) <= 0.1:
        order = float(round(order))
    return order, fit_residual, False


def _vanishing_points(f: TrigPoly, q: int, gap: np.ndarray) -> list[float]:
    """Angles where |f| reaches 1, refined from the local maxima of |f| on the grid."""
    h = 2 * np.pi / gap.size
    local_min = (gap <= np.roll(gap, 1)) & (gap <= np.roll(gap, -1))
    strict = (gap < np.roll(gap, 1)) | (gap < np.roll(gap, -1))
    candidates = np.flatnonzero(local_min & strict & (gap < CANDIDATE_GAP))
    candidates = candidates[np.argsort(gap[candidates])][: 4 * f.spread() + 8]

    found: list[float] = []
    for j in candidates:
        result = minimize_scalar(
            lambda t: float(_gap(f, t)), bounds=(j * h - h, j * h + h), method="bounded", options={"xatol": 1e-13}
        )
        theta, value = (float(result.x), float(result.fun))
        if gap[j] < value:
            theta, value = j * h, float(gap[j])
        if value > UNIMODULAR_LIMIT:
            continue
        theta %= 2 * np.pi
        if all(abs((theta - t + np.pi) % (2 * np.pi) - np.pi) > 2 * h for t in found):
            found.append(theta)
    return sorted(found)


def _subtracted_mean(f: TrigPoly, q: int, points: list[tuple[float, float]]) -> float:
    theta = grid_angles(q)
    gap = np.maximum(1 - np.abs(to_grid(f, q).samples), 0.0)
    kept = gap >= ARC_TOL
    integrand = np.zeros_like(gap)
    integrand[kept] = np.log(gap[kept])
    for theta0, order in points:
        # ∫ log|1 - e^{i(θ-θ0)}| dm = 0, so the subtraction leaves the mean unchanged.
        distance = np.abs(1 - np.exp(1j * (theta - theta0)))
        near = distance > 0
        integrand[near] -= order * np.log(distance[near])
        kept &= near
    if not kept.all():
        # Excised nodes take the average of their neighbours.
        left = np.roll(integrand, 1)
        right = np.roll(integrand, -1)
        integrand[~kept] = (left[~kept] + right[~kept]) / 2
    return float(integrand.mean())


def log_integral(f: TrigPoly, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL) -> LogIntegralReport:
    """∫ log(1 - |f|) dm with the log singularities at |f| = 1 subtracted analytically."""
    logger.debug(f"log_integral {f!r} q={q}")
    if q >= MAX_GRID_EXP:
        raise PreconditionError(f"log integral compares q and q+1, so q must be below {MAX_GRID_EXP}")
    sup = linf_enclosure(f, q)
    if sup.value > 1 + norm_tol:
        raise PreconditionError(f"‖f‖∞ = {sup.value!r} exceeds 1 + {norm_tol}")

    gap = np.maximum(1 - np.abs(to_grid(f, q).samples), 0.0)
    if np.all(gap <= UNIMODULAR_LIMIT):
        return LogIntegralReport(
            classification="divergent",
            divergent=True,
            vanishing_points=[],
            unimodular_arcs=[Arc(start=0.0, end=2 * np.pi)],
            q=q,
        )

    vanishing = []
    arcs = []
    suspect = False
    for theta0 in _vanishing_points(f, q, gap):
        order, fit_residual, is_arc = _vanishing_order(f, theta0)
        if is_arc:
            r = VANISHING_RADII[0]
            arcs.append(Arc(start=theta0 - r, end=theta0 + r))
            continue
        if order is None or order >= MAX_VANISHING_ORDER or fit_residual > 0.5:
            logger.warning(f"vanishing point at {theta0:.6f} has no power-law profile: divergent-suspect")
            suspect = True
        vanishing.append(VanishingPoint(angle=theta0, order=order, fit_residual=fit_residual))

    if arcs:
        return LogIntegralReport(
            classification="divergent", divergent=True, vanishing_points=vanishing, unimodular_arcs=arcs, q=q
        )
    if suspect:
        return LogIntegralReport(
            classification="divergent-suspect", divergent=False, vanishing_points=vanishing, unimodular_arcs=[], q=q
        )

    points = [(v.angle, v.order) for v in vanishing]
    coarse = _subtracted_mean(f, q, points)
    fine = _subtracted_mean(f, q + 1, points)
    return LogIntegralReport(
        classification="finite",
        value=fine,
        error=abs(fine - coarse),
        divergent=False,
        vanishing_points=vanishing,
        unimodular_arcs=[],
        q=q,
    )


def _hinf_scope(spectral_set: SpectralSet) -> Optional[str]:
    node = spectral_set.descriptor
    excluded = spectra.cofinite_excluded(spectral_set, "Zplus")
    if excluded is not None:
        return f"Λ = Zplus minus the finite set {excluded}"
    if isinstance(node, spectra.APUnion) and node.progressions == ((2, 0),) and node.half == "Zplus":
        return "Λ = 2Zplus"
    return None


def classify_hinf_extreme(
    f: TrigPoly, spectral_set: SpectralSet, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL
) -> ExtremalityCertificate:
    logger.debug(f"classify_hinf_extreme {f!r} over {spectral_set}")
    scope = _hinf_scope(spectral_set)
    if scope is None:
        raise PreconditionError(f"criterion not established for Λ = {spectral_set}")
    check = spectrum_in(f, spectral_set)
    if not check.ok:
        raise PreconditionError(f"spectrum of f leaves Λ at {check.offenders}")

    sup = linf_enclosure(f, q)
    common = dict(
        p="inf", set_descriptor=spectral_set.canonical(), f=f, criterion=HINF_CRITERION, scope=scope, norm=sup.value
    )
    if abs(sup.value - 1) > norm_tol:
        return ExtremalityCertificate(
            verdict="NotUnitNorm", notes=[f"‖f‖∞ in [{sup.lower!r}, {sup.upper!r}]"], **common
        )
    report = log_integral(f, q, norm_tol)
    if report.classification == "divergent":
        return ExtremalityCertificate(verdict="ExtremeByLogIntegral", log_integral=report, **common)
    if report.classification == "finite":
        return ExtremalityCertificate(verdict="NonExtreme", log_integral=report, **common)
    return ExtremalityCertificate(
        verdict="Inconclusive",
        log_integral=report,
        notes=["a vanishing point of 1-|f| has no power-law profile"],
        **common,
    )
