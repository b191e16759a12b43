"""Witnesses of non-extremality and extremality certificates for L¹_Λ and L∞_Λ.

An L¹ witness is a real trigonometric polynomial h, nonconstant on the support
of f, with fh keeping its spectrum in Λ. Shifting h by c = ∫|f|h / ∫|f| and
scaling by ε = 1/‖h - c‖∞ turns it into the midpoint pair f(1 ± ε(h - c)).

An L∞ witness is an analytic p with (g·p)^(k) = 0 off Λ for g = 1 - |f|; then
f = ½(f + gp) + ½(f - gp) with both halves in the unit ball.
"""

import logging
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel
from scipy.linalg import null_space, svdvals
from scipy.optimize import linprog

from . import spectra
from .certificates import (
    ExtremalityCertificate,
    InconclusiveDetail,
    L1Witness,
    LinfWitness,
    MeasureEnclosure,
    OracleWitness,
)
from .circle import (
    GridFunction,
    TrigPoly,
    grid_angles,
    l1_norm_estimate,
    linf_enclosure,
    real_combination,
    refine_maxima,
    sparse_product,
    spectrum_in,
    to_grid,
)
from .exceptions import NumericalAnomalyError, PreconditionError
from .lac_config import (
    DEFAULT_GRID_EXP,
    LINF_RESIDUAL_TOL,
    MAX_GRID_EXP,
    MEAS_TOL,
    NORM_TOL,
    ORACLE_TOL,
    RESIDUAL_TOL,
)
from .spectra import SpectralSet

logger = logging.getLogger(__name__)

NULL_RCOND = 1e-9
MEAN_SHIFT_TOL = 1e-10
MEAN_SHIFT_CONVERGED = 1e-12
NONCONSTANCY_TOL = 1e-12
SUPPORT_TOL = 1e-8
VERIFY_GRID_EXP = 16
ORACLE_BOUND = 1e3


class ParallelogramCheck(BaseModel):
    hypothesis_holds: bool
    max_violation: float
    bound_holds: Optional[bool] = None


class OracleResult(BaseModel):
    verdict: Literal["NonExtreme", "Inconclusive"]
    witness: Optional[OracleWitness] = None
    attempts: int
    statuses: list[str]
    basis_size: int


# Shared helpers


def _grid_q(q: int, *polys: TrigPoly) -> int:
    """Smallest exponent >= q on which every given polynomial is alias free."""
    bandwidth = max(p.bandwidth() for p in polys)
    return min(MAX_GRID_EXP, max(q, (2 * bandwidth + 1).bit_length()))


def _unit_l1(f: TrigPoly, norm_tol: float, q: int) -> float:
    if f.is_zero():
        raise PreconditionError("f is identically zero")
    norm = l1_norm_estimate(f, _grid_q(q, f)).value
    if abs(norm - 1) > norm_tol:
        raise PreconditionError(f"‖f‖₁ = {norm!r} is not 1 within {norm_tol}; normalize f first")
    return norm


def _unit_sup(f: TrigPoly, norm_tol: float, q: int):
    if f.is_zero():
        raise PreconditionError("f is identically zero")
    enclosure = linf_enclosure(f, _grid_q(q, f))
    if abs(enclosure.value - 1) > norm_tol:
        raise PreconditionError(f"‖f‖∞ = {enclosure.value!r} is not 1 within {norm_tol}; normalize f first")
    return enclosure


def _require_spectrum(f: TrigPoly, spectral_set: SpectralSet):
    check = spectrum_in(f, spectral_set)
    if not check.ok:
        raise PreconditionError(f"spectrum of f leaves {spectral_set} at {check.offenders}")


def _require_cofinite(spectral_set: SpectralSet) -> list[int]:
    excluded = spectra.cofinite_excluded(spectral_set, "Z")
    if excluded is None:
        raise PreconditionError(f"Z \\ Λ is not a known finite set for Λ = {spectral_set}")
    return excluded


def lowest_degree_vector(basis: np.ndarray) -> np.ndarray:
    """Unit vector of span(basis) vanishing on the most highest-indexed coordinates.

    The largest-magnitude entry is made real and positive.
    """
    n, d = basis.shape
    vector = basis[:, 0]
    for s in range(n - 1, d - 2, -1):
        if s <= 0:
            break
        kernel = null_space(basis[n - s :, :], rcond=1e-10)
        if kernel.shape[1]:
            vector = basis @ kernel[:, 0]
            break
    vector = vector / np.linalg.norm(vector)
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def _support_mask(f: TrigPoly, q: int) -> np.ndarray:
    modulus = np.abs(to_grid(f, q).samples)
    return modulus > SUPPORT_TOL * modulus.max()


def _corrected_means(samples: np.ndarray) -> tuple[float, float]:
    """Richardson-corrected trapezoid means from the grids of half and of full size.

    The coarser grids are the even-indexed subsamples, so one grid gives both.
    """
    quarter, half, full = (float(samples[::step].mean()) for step in (4, 2, 1))
    return half + (half - quarter) / 3, full + (full - half) / 3


def _shift_constant(f: TrigPoly, h: TrigPoly, q: int):
    """c = ∫|f|h / ∫|f| on a grid fine enough that the next coarser pair agrees.

    Returns c, the mean shift ∫|f|(h - c) left on the coarser pair, the grid
    exponent, and the samples of |f| and h there.
    """
    level = q
    while True:
        weight = np.abs(to_grid(f, level).samples)
        values = to_grid(h, level).samples.real
        (num_coarse, num), (den_coarse, den) = _corrected_means(weight * values), _corrected_means(weight)
        c = num / den
        mean_shift = abs(num_coarse - c * den_coarse)
        if mean_shift <= MEAN_SHIFT_CONVERGED or level >= MAX_GRID_EXP:
            return c, mean_shift, level, weight, values
        level += 1


def _complete_midpoint(
    f: TrigPoly,
    h: TrigPoly,
    spectral_set: SpectralSet,
    method: str,
    residual: float,
    q: int,
    **extra,
) -> L1Witness:
    q_h = _grid_q(q, f, h)
    c, mean_shift, level, weight, h_values = _shift_constant(f, h, q_h)
    shifted = h - c
    epsilon = 1 / linf_enclosure(shifted, q_h).upper

    perturbation, _ = sparse_product(f, shifted)
    off = {k: v for k, v in perturbation.coeffs.items() if not spectral_set.contains(k)}
    if off:
        worst = max(abs(v) for v in off.values())
        if worst > RESIDUAL_TOL:
            logger.error(f"{method} witness leaves Λ with coefficient {worst:.3e}")
            raise NumericalAnomalyError(f"f·h has coefficient {worst:.3e} outside Λ at {sorted(off)}")
        perturbation = TrigPoly({k: v for k, v in perturbation.coeffs.items() if k not in off})
    if perturbation.is_zero():
        raise NumericalAnomalyError("f·(h - c) vanishes, so u = v")

    u = f + perturbation * epsilon
    v = f - perturbation * epsilon
    # |u|, |v| = |f|·|1 ± ε(h - c)| pointwise, so the norms reuse the grids of c.
    deviation = epsilon * (h_values - c)
    norm_f = _corrected_means(weight)[1]
    norm_u = _corrected_means(weight * np.abs(1 + deviation))[1]
    norm_v = _corrected_means(weight * np.abs(1 - deviation))[1]

    h_sup = float(np.abs(h_values).max())
    nonconstancy = float(h_values[weight > SUPPORT_TOL * weight.max()].var())

    failures = []
    if max(abs(norm_u - norm_f), abs(norm_v - norm_f)) > RESIDUAL_TOL:
        failures.append(f"‖u‖₁ = {norm_u!r}, ‖v‖₁ = {norm_v!r} against ‖f‖₁ = {norm_f!r}")
    if nonconstancy <= NONCONSTANCY_TOL * h_sup**2:
        failures.append(f"h is constant on the support of f (variance {nonconstancy:.3e})")
    if mean_shift > MEAN_SHIFT_TOL * max(1.0, 1 / epsilon):
        failures.append(f"∫|f|(h - c) dm = {mean_shift:.3e} at q={level}")
    if failures:
        logger.error(f"{method} witness failed verification: {failures}")
        raise NumericalAnomalyError("; ".join(failures))

    return L1Witness(
        method=method,
        f=f,
        h=h,
        c=c,
        epsilon=epsilon,
        u=u,
        v=v,
        residual=residual,
        nonconstancy=nonconstancy,
        norm_u=norm_u,
        norm_v=norm_v,
        mean_shift=mean_shift,
        **extra,
    )


def _residual_off(product: TrigPoly, frequencies: Sequence[int]) -> float:
    return max((abs(product.coefficient(k)) for k in frequencies), default=0.0)


# L¹ witnesses


def periodic_witness(
    f: TrigPoly, spectral_set: SpectralSet, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL
) -> L1Witness:
    """Witness h = Re(z^n) for a set with period n."""
    logger.debug(f"periodic_witness {f!r} over {spectral_set}")
    _unit_l1(f, norm_tol, q)
    _require_spectrum(f, spectral_set)
    period = spectra.period_of(spectral_set, spectral_set.band_default)
    if period.period is None:
        raise PreconditionError(f"no period up to {spectral_set.band_default} for Λ = {spectral_set}")
    n = period.period
    for shifted in (f.shift(n), f.shift(-n)):
        check = spectrum_in(shifted, spectral_set)
        if not check.ok:
            raise PreconditionError(f"z^(±{n})·f leaves Λ at {check.offenders}; period {n} is not valid")
    h = real_combination([1.0], [n])
    return _complete_midpoint(f, h, spectral_set, "periodic", 0.0, q, alpha=[1.0], frequencies=[n])


def _s_matrix(f: TrigPoly, excluded: list[int], frequencies: list[int]) -> np.ndarray:
    """Rows Re γ_ν, Im γ_ν of γ_ν(α) = (f h_α)^(k_ν); columns are the α_j."""
    matrix = np.zeros((2 * len(excluded), len(frequencies)))
    for j, n in enumerate(frequencies):
        product, _ = sparse_product(f, real_combination([1.0], [n]))
        for nu, k in enumerate(excluded):
            value = product.coefficient(k)
            matrix[2 * nu, j] = value.real
            matrix[2 * nu + 1, j] = value.imag
    return matrix


def cofinite_l1_witness(
    f: TrigPoly, spectral_set: SpectralSet, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL
) -> L1Witness:
    """Witness from the kernel of α ↦ ((f h_α)^(k_ν))_ν over h_α = Σ α_j Re(z^j), j ≤ 2N+1."""
    logger.debug(f"cofinite_l1_witness {f!r} over {spectral_set}")
    _unit_l1(f, norm_tol, q)
    _require_spectrum(f, spectral_set)
    excluded = _require_cofinite(spectral_set)
    frequencies = list(range(1, 2 * len(excluded) + 2))

    if not excluded:
        singular_values: list[float] = []
        alpha = np.array([1.0])
    else:
        matrix = _s_matrix(f, excluded, frequencies)
        singular_values = svdvals(matrix).tolist()
        kernel = null_space(matrix, rcond=NULL_RCOND)
        if kernel.shape[1] == 0:
            logger.error(f"S-matrix has trivial kernel, singular values {singular_values}")
            raise NumericalAnomalyError(f"no null vector; singular values {singular_values}")
        alpha = lowest_degree_vector(kernel)

    h = real_combination(alpha.tolist(), frequencies)
    product, _ = sparse_product(f, h)
    residual = _residual_off(product, excluded)
    if residual > RESIDUAL_TOL:
        logger.error(f"cofinite witness residual {residual:.3e}, singular values {singular_values}")
        raise NumericalAnomalyError(
            f"residual {residual:.3e} exceeds {RESIDUAL_TOL}; singular values {singular_values}"
        )
    return _complete_midpoint(
        f,
        h,
        spectral_set,
        "cofinite",
        residual,
        q,
        alpha=alpha.tolist(),
        frequencies=frequencies,
        singular_values=singular_values,
    )


def _search_basis(degree: int, allow_constant: bool) -> list[TrigPoly]:
    """Real basis of h ordered by degree: [1], Re z, Im z, Re z², Im z², ..."""
    basis = [TrigPoly.constant(1.0)] if allow_constant else []
    for j in range(1, degree + 1):
        basis.append(TrigPoly({j: 0.5, -j: 0.5}))
        basis.append(TrigPoly({j: -0.5j, -j: 0.5j}))
    return basis


def general_l1_witness_search(
    f: TrigPoly,
    spectral_set: SpectralSet,
    degree: int,
    allow_constant: bool = False,
    q: int = DEFAULT_GRID_EXP,
    norm_tol: float = NORM_TOL,
) -> Union[L1Witness, InconclusiveDetail]:
    """Search a real h of degree <= D with (fh)^(k) = 0 for every k ∉ Λ in the product band."""
    if degree < 1:
        raise PreconditionError(f"search degree must be >= 1, got {degree}")
    logger.debug(f"general_l1_witness_search {f!r} over {spectral_set}, D={degree}")
    _unit_l1(f, norm_tol, q)
    _require_spectrum(f, spectral_set)

    basis = _search_basis(degree, allow_constant)
    spectrum = f.spectrum()
    band = range(spectrum[0] - degree, spectrum[-1] + degree + 1)
    constrained = [k for k in band if not spectral_set.contains(k)]

    matrix = np.zeros((2 * len(constrained), len(basis)))
    for m, b in enumerate(basis):
        product, _ = sparse_product(f, b)
        for row, k in enumerate(constrained):
            value = product.coefficient(k)
            matrix[2 * row, m] = value.real
            matrix[2 * row + 1, m] = value.imag

    if constrained:
        singular_values = svdvals(matrix).tolist()
        kernel = null_space(matrix, rcond=NULL_RCOND)
    else:
        singular_values = []
        kernel = np.eye(len(basis))
    rank = len(basis) - kernel.shape[1]

    q_s = _grid_q(10, f, TrigPoly.monomial(degree))
    mask = _support_mask(f, q_s)
    theta = grid_angles(q_s)[mask]
    values = np.column_stack([b.evaluate(theta).real for b in basis])
    centred = values - values.mean(axis=0)

    directions = np.zeros((len(basis), 0))
    if kernel.shape[1]:
        _, sigma, vt = np.linalg.svd(centred @ kernel, full_matrices=False)
        rms = sigma / np.sqrt(max(mask.sum(), 1))
        keep = rms > 1e-6
        directions = kernel @ vt[keep].T

    detail = dict(
        degree=degree,
        unknowns=len(basis),
        constraints=2 * len(constrained),
        rank=rank,
        nullity=kernel.shape[1],
        nonconstant_directions=directions.shape[1],
        singular_values=singular_values,
    )
    if directions.shape[1] == 0:
        logger.info(f"no nonconstant null direction at degree {degree}: {detail}")
        return InconclusiveDetail(**detail)

    alpha = lowest_degree_vector(directions)
    h = sum((b * float(a) for a, b in zip(alpha, basis)), TrigPoly.zero())
    product, _ = sparse_product(f, h)
    residual = _residual_off(product, constrained)
    if residual > RESIDUAL_TOL:
        logger.error(f"search witness residual {residual:.3e} at degree {degree}")
        raise NumericalAnomalyError(f"residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return _complete_midpoint(
        f, h, spectral_set, "search", residual, q, alpha=alpha.tolist(), singular_values=singular_values
    )


# L∞ witnesses and certificates


def _gap_grid(f: TrigPoly, q: int) -> np.ndarray:
    return np.maximum(1 - np.abs(to_grid(f, q).samples), 0.0)


def cofinite_linf_witness(
    f: TrigPoly, spectral_set: SpectralSet, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL
) -> LinfWitness:
    """Analytic p of degree <= N with (g·p)^(k_ν) = 0, g = 1 - |f|."""
    logger.debug(f"cofinite_linf_witness {f!r} over {spectral_set}")
    excluded = _require_cofinite(spectral_set)
    _require_spectrum(f, spectral_set)
    _unit_sup(f, norm_tol, q)

    q = _grid_q(q, f)
    gap = _gap_grid(f, q)
    if np.count_nonzero(gap > MEAS_TOL) <= 1:
        raise PreconditionError(
            "|f| = 1 on the whole grid; such f is extreme, use classify_linf_cofinite"
        )

    size = gap.size
    coefficients = np.fft.fft(gap) / size
    n = len(excluded)
    if n:
        matrix = np.array([[coefficients[(k - j) % size] for j in range(n + 1)] for k in excluded])
        singular_values = svdvals(matrix).tolist()
        kernel = null_space(matrix, rcond=NULL_RCOND)
        if kernel.shape[1] == 0:
            logger.error(f"T-matrix has trivial kernel, singular values {singular_values}")
            raise NumericalAnomalyError(f"no null vector; singular values {singular_values}")
        beta = lowest_degree_vector(kernel)
    else:
        matrix = np.zeros((0, 1))
        singular_values = []
        beta = np.array([1.0 + 0j])

    p = TrigPoly(dict(enumerate(beta.tolist())))
    p = p / linf_enclosure(p, q).upper
    residuals = [abs(complex(np.dot(matrix[nu], np.array([p.coefficient(j) for j in range(n + 1)])))) for nu in range(n)]

    f_grid = to_grid(f, q).samples
    gp = gap * to_grid(p, q).samples
    sup_plus = float(np.abs(f_grid + gp).max())
    sup_minus = float(np.abs(f_grid - gp).max())
    gp_sup = float(np.abs(gp).max())

    failures = []
    if residuals and max(residuals) > LINF_RESIDUAL_TOL:
        failures.append(f"residuals {residuals}")
    if max(sup_plus, sup_minus) > 1 + LINF_RESIDUAL_TOL:
        failures.append(f"‖f ± gp‖∞ = {sup_plus!r}, {sup_minus!r}")
    if gp_sup <= NONCONSTANCY_TOL:
        failures.append("g·p vanishes on the grid")
    if failures:
        logger.error(f"L∞ witness failed verification: {failures}")
        raise NumericalAnomalyError("; ".join(failures))

    return LinfWitness(
        f=f,
        p=p,
        beta=[[b.real, b.imag] for b in beta.tolist()],
        excluded=excluded,
        residuals=residuals,
        sup_plus=sup_plus,
        sup_minus=sup_minus,
        gp_sup=gp_sup,
        q=q,
        singular_values=singular_values,
    )


def classify_linf_cofinite(
    f: TrigPoly, spectral_set: SpectralSet, q: int = DEFAULT_GRID_EXP, norm_tol: float = NORM_TOL
) -> ExtremalityCertificate:
    """Extreme in ball(L∞_Λ), Z \\ Λ finite, iff |f| = 1 almost everywhere."""
    logger.debug(f"classify_linf_cofinite {f!r} over {spectral_set}")
    _require_cofinite(spectral_set)
    _require_spectrum(f, spectral_set)
    sup = _unit_sup(f, norm_tol, q)
    common = dict(
        p="inf",
        set_descriptor=spectral_set.canonical(),
        f=f,
        criterion="for cofinite Λ, f is extreme in ball(L∞_Λ) iff |f| = 1 a.e.",
        scope="Z \\ Λ finite",
        norm=sup.value,
    )
    q = _grid_q(q, f)
    offenders = [int(np.count_nonzero(_gap_grid(f, level) > MEAS_TOL)) for level in (q, min(q + 2, MAX_GRID_EXP))]
    if not any(offenders):
        return ExtremalityCertificate(
            verdict="ExtremeByUnimodular",
            measure=MeasureEnclosure(estimate=1.0, lower=1.0, upper=1.0, exact=False),
            notes=[f"1 - |f| <= {MEAS_TOL} on grids 2^{q} and 2^{min(q + 2, MAX_GRID_EXP)}"],
            **common,
        )
    witness = cofinite_linf_witness(f, spectral_set, q, norm_tol)
    return ExtremalityCertificate(verdict="NonExtreme", linf_witness=witness, **common)


def _runs(mask: np.ndarray) -> list[int]:
    """Lengths of the circular runs of True in mask."""
    if mask.all():
        return [mask.size]
    start = int(np.argmin(mask))
    rolled = np.roll(mask, -start)
    edges = np.diff(np.concatenate(([0], rolled.astype(np.int8), [0])))
    return (np.flatnonzero(edges == -1) - np.flatnonzero(edges == 1)).tolist()


def dset_extreme_certificate(
    f: Union[TrigPoly, GridFunction],
    spectral_set: SpectralSet,
    q: int = DEFAULT_GRID_EXP,
    spectral_band: Optional[tuple[int, int]] = None,
    norm_tol: float = NORM_TOL,
) -> ExtremalityCertificate:
    """Sufficient test: Λ a D-set and m({|f| = 1}) > 0 make f extreme in ball(L∞_Λ)."""
    logger.debug(f"dset_extreme_certificate over {spectral_set}")
    if spectra.TAG_DSET not in spectra.classify_families(spectral_set):
        raise PreconditionError(f"Λ = {spectral_set} is not a recognized D-set")
    common = dict(
        p="inf",
        set_descriptor=spectral_set.canonical(),
        criterion="Λ is a D-set and |f| = 1 on a set of positive measure",
        scope="D-sets by citation: Zplus and negpow(n) ∪ Zplus",
    )

    if isinstance(f, TrigPoly):
        _require_spectrum(f, spectral_set)
        sup = _unit_sup(f, norm_tol, q)
        defect = TrigPoly.constant(1.0) - sparse_product(f, f.conj())[0]
        unimodular = defect.max_abs_coefficient() <= 1e-12
        measure = MeasureEnclosure(
            estimate=float(unimodular), lower=float(unimodular), upper=float(unimodular), exact=True
        )
        notes = ["for a polynomial, |f| = 1 on a set of positive measure forces |f| ≡ 1"]
        verdict = "ExtremeByDSet" if unimodular else "Inconclusive"
        return ExtremalityCertificate(verdict=verdict, f=f, measure=measure, notes=notes, norm=sup.value, **common)

    if spectral_band is None:
        raise PreconditionError("a grid function needs a declared spectral band")
    lo, hi = spectral_band
    outside = spectra.complement_in_band(spectral_set, (lo, hi))
    if outside:
        raise PreconditionError(f"declared band [{lo},{hi}] meets Z \\ Λ at {outside[:10]}")
    modulus = f.modulus()
    top = float(modulus.max())
    if abs(top - 1) > norm_tol:
        raise PreconditionError(f"max |f| on the grid is {top!r}, not 1 within {norm_tol}")
    near = (1 - modulus) <= MEAS_TOL
    runs = _runs(near) if near.any() else []
    size = f.size
    measure = MeasureEnclosure(
        estimate=float(near.sum()) / size,
        lower=sum(max(r - 1, 0) for r in runs) / size,
        upper=min(1.0, sum(r + 1 for r in runs) / size),
        exact=False,
        runs=len(runs),
    )
    verdict = "ExtremeByDSet" if measure.lower > 0 else "Inconclusive"
    return ExtremalityCertificate(
        verdict=verdict,
        measure=measure,
        notes=[f"grid function with declared spectral band [{lo},{hi}]"],
        **common,
    )


def parallelogram_bound(f: GridFunction, g: GridFunction, tol: float = 1e-12) -> ParallelogramCheck:
    """‖f ± g‖∞ <= 1 forces |g|² <= 1 - |f|² pointwise."""
    if f.q != g.q:
        raise PreconditionError(f"grids differ: 2^{f.q} and 2^{g.q}")
    hypothesis = max(np.abs(f.samples + g.samples).max(), np.abs(f.samples - g.samples).max()) <= 1 + tol
    violation = float(np.maximum(np.abs(g.samples) ** 2 - (1 - np.abs(f.samples) ** 2), 0.0).max())
    return ParallelogramCheck(
        hypothesis_holds=bool(hypothesis),
        max_violation=violation,
        bound_holds=(violation <= tol) if hypothesis else None,
    )


# Feasibility oracle


def _oracle_points(f: TrigPoly, q: int) -> np.ndarray:
    """Grid angles plus a fine local grid around the maxima of |f| near 1."""
    local = 2 * np.pi / (1 << VERIFY_GRID_EXP) * np.arange(-32, 33)
    extra = [theta + local for theta, value in refine_maxima(f, _grid_q(q, f), count=4) if value > 1 - 1e-3]
    return np.concatenate([grid_angles(q), *extra]) if extra else grid_angles(q)


def _polygon_constraints(f_values: np.ndarray, b_values: np.ndarray, sides: int):
    """A x <= b encoding f_j ± g_j inside a K-gon with a vertex along f_j.

    Each edge normal d gives |<d, g_j>| <= cos(π/K) - <d, f_j>. For even K the
    normals come in opposite pairs, so half of them with |<d, f_j>| suffice.
    """
    even = sides % 2 == 0
    phase = np.angle(f_values)
    psi = phase[:, None] + np.pi * (2 * np.arange(sides // 2 if even else sides) + 1) / sides
    cos, sin = np.cos(psi)[:, :, None], np.sin(psi)[:, :, None]
    re, im = b_values.real[:, None, :], b_values.imag[:, None, :]
    rows = np.concatenate([cos * re + sin * im, sin * re - cos * im], axis=-1)
    rows = rows.reshape(-1, rows.shape[-1])
    projection = np.cos(psi) * f_values.real[:, None] + np.sin(psi) * f_values.imag[:, None]
    slack = (np.cos(np.pi / sides) - (np.abs(projection) if even else projection)).ravel()
    return np.vstack([rows, -rows]), np.concatenate([slack, slack])


def _max_pair(f_grid: np.ndarray, g_grid: np.ndarray, t: float) -> float:
    return float(max(np.abs(f_grid + t * g_grid).max(), np.abs(f_grid - t * g_grid).max()))


def linf_feasibility_oracle(
    f: TrigPoly,
    basis: Sequence[TrigPoly],
    q: int = 8,
    sides: int = 64,
    repetitions: int = 8,
    seed: int = 0,
    norm_tol: float = NORM_TOL,
) -> OracleResult:
    """Look for g in span(basis) with ‖f ± g‖∞ <= 1 by linear programming.

    Each modulus constraint becomes `sides` half-planes of an inscribed
    polygon. A solution is rescaled until it passes on the 2^16 grid.
    """
    if not basis:
        raise PreconditionError("the oracle needs a nonempty basis")
    logger.debug(f"linf_feasibility_oracle {f!r}, {len(basis)} basis elements, q={q}, K={sides}")
    _unit_sup(f, norm_tol, VERIFY_GRID_EXP)

    theta = _oracle_points(f, q)
    b_values = np.column_stack([b.evaluate(theta) for b in basis])
    a_ub, b_ub = _polygon_constraints(f.evaluate(theta), b_values, sides)

    verify_q = _grid_q(VERIFY_GRID_EXP, f, *basis)
    f_grid = to_grid(f, verify_q).samples
    b_grid = np.column_stack([to_grid(b, verify_q).samples for b in basis])

    m = len(basis)
    statuses = []
    for index, child in enumerate(np.random.SeedSequence(seed).spawn(repetitions)):
        objective = np.random.default_rng(child).standard_normal(2 * m)
        result = linprog(-objective, A_ub=a_ub, b_ub=b_ub, bounds=(-ORACLE_BOUND, ORACLE_BOUND), method="highs")
        statuses.append(result.message)
        if result.status != 0:
            continue
        coefficients = result.x[:m] + 1j * result.x[m:]
        g_grid = b_grid @ coefficients
        if np.abs(g_grid).max() < ORACLE_TOL:
            continue

        scale = 1.0
        if _max_pair(f_grid, g_grid, 1.0) > 1 + LINF_RESIDUAL_TOL:
            low, high = 0.0, 1.0
            for _ in range(60):
                mid = (low + high) / 2
                low, high = (mid, high) if _max_pair(f_grid, g_grid, mid) <= 1 + LINF_RESIDUAL_TOL else (low, mid)
            scale = low
        g_sup = float(np.abs(scale * g_grid).max())
        if g_sup < ORACLE_TOL:
            continue

        g = sum((b * complex(c * scale) for c, b in zip(coefficients, basis)), TrigPoly.zero())
        witness = OracleWitness(
            g=g,
            coefficients=[[c.real, c.imag] for c in coefficients.tolist()],
            scale=scale,
            g_sup=g_sup,
            sup_plus=float(np.abs(f_grid + scale * g_grid).max()),
            sup_minus=float(np.abs(f_grid - scale * g_grid).max()),
            objective_index=index,
            q=q,
            verify_q=verify_q,
        )
        return OracleResult(
            verdict="NonExtreme", witness=witness, attempts=index + 1, statuses=statuses, basis_size=m
        )
    return OracleResult(verdict="Inconclusive", attempts=repetitions, statuses=statuses, basis_size=m)


def l1_certificate(
    f: TrigPoly,
    spectral_set: SpectralSet,
    method: str = "auto",
    degree: int = 8,
    q: int = DEFAULT_GRID_EXP,
    norm_tol: float = NORM_TOL,
) -> ExtremalityCertificate:
    """Pick the periodic, cofinite or search witness and wrap the outcome.

    With method "auto" the periodic construction wins when Λ has a period,
    then the cofinite one, then the degree-bounded search.
    """
    chosen = method
    if chosen == "auto":
        if spectra.period_of(spectral_set, spectral_set.band_default).period is not None:
            chosen = "periodic"
        elif spectra.cofinite_excluded(spectral_set, "Z") is not None:
            chosen = "cofinite"
        else:
            chosen = "search"
    common = dict(p="1", set_descriptor=spectral_set.canonical(), f=f, scope="ball(L1_Λ)")
    if chosen == "periodic":
        witness = periodic_witness(f, spectral_set, q, norm_tol)
    elif chosen == "cofinite":
        witness = cofinite_l1_witness(f, spectral_set, q, norm_tol)
    elif chosen == "search":
        found = general_l1_witness_search(f, spectral_set, degree, q=q, norm_tol=norm_tol)
        if not isinstance(found, L1Witness):
            return ExtremalityCertificate(
                verdict="Inconclusive",
                criterion=f"no witness of degree <= {degree}",
                inconclusive=found,
                notes=["a degree-bounded search cannot prove extremality in L1_Λ"],
                **common,
            )
        witness = found
    else:
        raise PreconditionError(f"unknown witness method {method!r}")
    return ExtremalityCertificate(verdict="NonExtreme", criterion=f"{chosen} witness", l1_witness=witness, **common)
