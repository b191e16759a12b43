"""Sparse Laurent polynomials on the unit circle and their grid images.

TrigPoly is the exact carrier: a finite map frequency -> complex coefficient.
GridFunction holds samples on the 2^q roots of unity and is the only way
non-polynomial functions such as |f| or 1-|f| are represented.
"""

import logging
from dataclasses import dataclass
from typing import Annotated, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, PlainSerializer, PlainValidator, WithJsonSchema
from scipy.optimize import minimize_scalar

from .exceptions import AliasingError, PreconditionError, QuadratureNotConvergedError
from .lac_config import DEFAULT_GRID_EXP, DROP_TOL, MAX_GRID_EXP, MIN_GRID_EXP, QUADRATURE_TOL
from .spectra import SpectralSet

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


class TrigPoly:
    """Finite sum of c_k z^k over integer k, with z on the unit circle.

    Zero coefficients are never stored, so the key set is the spectrum.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, Number]] = None):
        self._coeffs = {}
        for k, c in (coeffs or {}).items():
            c = complex(c)
            if c != 0:
                self._coeffs[int(k)] = c

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "TrigPoly":
        return cls({k: c})

    @classmethod
    def constant(cls, c: Number) -> "TrigPoly":
        return cls({0: c})

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls()

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self._coeffs)

    def spectrum(self) -> list[int]:
        return sorted(self._coeffs)

    def coefficient(self, k: int) -> complex:
        return self._coeffs.get(k, 0j)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_analytic(self) -> bool:
        return all(k >= 0 for k in self._coeffs)

    def is_real(self, tol: float = 0.0) -> bool:
        """Real-valued on the circle iff c_{-k} = conj(c_k) for every k."""
        scale = max((abs(c) for c in self._coeffs.values()), default=0.0)
        return all(
            abs(self.coefficient(-k) - c.conjugate()) <= tol * scale for k, c in self._coeffs.items()
        )

    def bandwidth(self) -> int:
        return max((abs(k) for k in self._coeffs), default=0)

    def spread(self) -> int:
        """Width max(spectrum) - min(spectrum) of the spectrum."""
        if not self._coeffs:
            return 0
        return max(self._coeffs) - min(self._coeffs)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def conj(self) -> "TrigPoly":
        return TrigPoly({-k: c.conjugate() for k, c in self._coeffs.items()})

    def real_part(self) -> "TrigPoly":
        return (self + self.conj()) * 0.5

    def shift(self, n: int) -> "TrigPoly":
        """Multiplication by z^n."""
        return TrigPoly({k + n: c for k, c in self._coeffs.items()})

    def evaluate(self, theta):
        """Values at e^{i theta}; accepts a scalar or an array of angles."""
        theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
        if not self._coeffs:
            values = np.zeros(theta_arr.shape, dtype=complex)
        else:
            ks = np.fromiter(self._coeffs.keys(), dtype=float)
            cs = np.fromiter(self._coeffs.values(), dtype=complex)
            values = np.exp(1j * np.multiply.outer(theta_arr, ks)) @ cs
        return values if np.ndim(theta) else complex(values[0])

    def allclose(self, other: "TrigPoly", tol: float = 1e-12) -> bool:
        scale = max(self.max_abs_coefficient(), other.max_abs_coefficient(), 1.0)
        return (self - other).max_abs_coefficient() <= tol * scale

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TrigPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return multiply(self, other)
        return TrigPoly({k: c * other for k, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TrigPoly):
            if other.spectrum() != [0]:
                raise PreconditionError("division is only defined by nonzero constants")
            other = other.coefficient(0)
        if other == 0:
            raise PreconditionError("division by zero")
        return TrigPoly({k: c / other for k, c in self._coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    __hash__ = None

    def __repr__(self):
        if not self._coeffs:
            return "TrigPoly(0)"
        terms = ", ".join(f"{k}: {c:.6g}" for k, c in sorted(self._coeffs.items()))
        return f"TrigPoly({{{terms}}})"

    def to_triples(self) -> list[list]:
        return [[k, c.real, c.imag] for k, c in sorted(self._coeffs.items())]

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence]) -> "TrigPoly":
        out = {}
        for triple in triples:
            if len(triple) != 3:
                raise ValueError(f"expected [k, re, im], got {triple!r}")
            k, re, im = triple
            if int(k) != k:
                raise ValueError(f"frequency must be an integer, got {k!r}")
            if int(k) in out:
                raise ValueError(f"duplicate frequency {k}")
            out[int(k)] = complex(float(re), float(im))
        return cls(out)

    @classmethod
    def coerce(cls, value) -> "TrigPoly":
        if isinstance(value, TrigPoly):
            return value
        if isinstance(value, (list, tuple)):
            return cls.from_triples(value)
        raise ValueError("a TrigPoly is given as a list of [k, re, im] triples")


def _as_poly(value) -> TrigPoly:
    return value if isinstance(value, TrigPoly) else TrigPoly.constant(value)


TrigPolyField = Annotated[
    TrigPoly,
    PlainValidator(TrigPoly.coerce),
    PlainSerializer(lambda p: p.to_triples(), return_type=list),
    WithJsonSchema(
        {
            "type": "array",
            "description": "Coefficients as [k, re, im] triples sorted by k",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, {"type": "number"}, {"type": "number"}],
                "minItems": 3,
                "maxItems": 3,
            },
        }
    ),
]


@dataclass(frozen=True)
class GridFunction:
    """Samples on e^{2 pi i j / 2^q}, j = 0..2^q-1."""

    samples: np.ndarray
    q: int

    def __post_init__(self):
        if self.samples.ndim != 1 or self.samples.shape[0] != 1 << self.q:
            raise PreconditionError(
                f"grid of exponent {self.q} needs {1 << self.q} samples, got {self.samples.shape}"
            )

    @property
    def size(self) -> int:
        return 1 << self.q

    def angles(self) -> np.ndarray:
        return grid_angles(self.q)

    def modulus(self) -> np.ndarray:
        return np.abs(self.samples)

    def mean(self) -> complex:
        return complex(self.samples.mean())

    def fourier_coefficients(self) -> np.ndarray:
        """Full coefficient vector; entry k mod 2^q holds the k-th coefficient."""
        return np.fft.fft(self.samples) / self.size


class SpectrumCheck(BaseModel):
    ok: bool
    offenders: list[int]


class NormEstimate(BaseModel):
    value: float
    error: float
    q: int


class SupEnclosure(BaseModel):
    """Sup norm with a rigorous-in-exact-arithmetic bracket."""

    value: float
    lower: float
    upper: float
    argmax: float
    q: int


def grid_angles(q: int) -> np.ndarray:
    return 2 * np.pi * np.arange(1 << q) / (1 << q)


def _check_q(q: int):
    if not MIN_GRID_EXP <= q <= MAX_GRID_EXP:
        raise PreconditionError(f"grid exponent must lie in {MIN_GRID_EXP}..{MAX_GRID_EXP}, got {q}")


def sparse_product(f: TrigPoly, g: TrigPoly) -> tuple[TrigPoly, list[int]]:
    """Exact sparse convolution plus the frequencies dropped as cancellation."""
    if f.is_zero() or g.is_zero():
        return TrigPoly.zero(), []
    kf = np.fromiter(f.coeffs.keys(), dtype=np.int64)
    cf = np.fromiter(f.coeffs.values(), dtype=complex)
    kg = np.fromiter(g.coeffs.keys(), dtype=np.int64)
    cg = np.fromiter(g.coeffs.values(), dtype=complex)

    ks = np.add.outer(kf, kg).ravel()
    terms = np.multiply.outer(cf, cg).ravel()
    freqs, index = np.unique(ks, return_inverse=True)
    sums = np.bincount(index, weights=terms.real) + 1j * np.bincount(index, weights=terms.imag)
    largest = np.zeros(freqs.shape)
    np.maximum.at(largest, index, np.abs(terms))

    keep = np.abs(sums) > DROP_TOL * largest
    dropped = [int(k) for k in freqs[~keep]]
    if dropped:
        logger.debug(f"multiply dropped cancelled frequencies {dropped}")
    return TrigPoly(dict(zip(freqs[keep].tolist(), sums[keep].tolist()))), dropped


def multiply(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return sparse_product(f, g)[0]


def real_combination(alpha: Sequence[float], frequencies: Sequence[int]) -> TrigPoly:
    """Σ α_j Re(z^{n_j}); frequency 0 contributes the constant α_j."""
    if len(alpha) != len(frequencies):
        raise PreconditionError(
            f"{len(alpha)} coefficients for {len(frequencies)} frequencies"
        )
    if len(set(frequencies)) != len(frequencies):
        raise PreconditionError(f"frequencies must be distinct, got {list(frequencies)}")
    if any(n < 0 for n in frequencies):
        raise PreconditionError(f"frequencies must be nonnegative, got {list(frequencies)}")
    out: dict[int, complex] = {}
    for a, n in zip(alpha, frequencies):
        a = float(a)
        if n == 0:
            out[0] = a
        else:
            out[n] = a / 2
            out[-n] = a / 2
    return TrigPoly(out)


def to_grid(f: TrigPoly, q: int = DEFAULT_GRID_EXP) -> GridFunction:
    size = 1 << q
    if f.bandwidth() >= size // 2:
        raise AliasingError(f.bandwidth(), q)
    spectrum = np.zeros(size, dtype=complex)
    for k, c in f.coeffs.items():
        spectrum[k % size] += c
    return GridFunction(samples=size * np.fft.ifft(spectrum), q=q)


def from_grid(u: GridFunction, band: tuple[int, int], drop_tol: float = 1e-14) -> TrigPoly:
    """Coefficients of u with frequencies in band; tiny ones relative to the largest are dropped."""
    lo, hi = band
    if lo > hi:
        raise PreconditionError(f"empty band [{lo},{hi}]")
    if max(abs(lo), abs(hi)) >= u.size // 2:
        raise AliasingError(max(abs(lo), abs(hi)), u.q)
    coefficients = u.fourier_coefficients()
    ks = np.arange(lo, hi + 1)
    values = coefficients[ks % u.size]
    cutoff = drop_tol * np.abs(values).max() if values.size else 0.0
    keep = np.abs(values) > cutoff
    return TrigPoly(dict(zip(ks[keep].tolist(), values[keep].tolist())))


def _trapezoid_l1(f: TrigPoly, q: int) -> float:
    return float(np.abs(to_grid(f, q).samples).mean())


def l1_norm_estimate(f: TrigPoly, q: int = DEFAULT_GRID_EXP) -> NormEstimate:
    """Trapezoidal ‖f‖₁ certified by agreement between consecutive grids.

    Once q and q+1 agree to QUADRATURE_TOL the pair is Richardson corrected
    for the h² error of the kinks of |f| at its zeros.
    """
    _check_q(q)
    logger.debug(f"l1 norm of {f!r} from q={q}")
    coarse = _trapezoid_l1(f, q)
    while q < MAX_GRID_EXP:
        fine = _trapezoid_l1(f, q + 1)
        if abs(fine - coarse) <= QUADRATURE_TOL:
            return NormEstimate(value=fine + (fine - coarse) / 3, error=abs(fine - coarse), q=q + 1)
        coarse, q = fine, q + 1
    previous = _trapezoid_l1(f, MAX_GRID_EXP - 1)
    logger.error(f"l1 quadrature of {f!r} not converged at q={MAX_GRID_EXP}")
    raise QuadratureNotConvergedError(previous, coarse, MAX_GRID_EXP)


def norm_l1(f: TrigPoly, q: int = DEFAULT_GRID_EXP) -> float:
    return l1_norm_estimate(f, q).value


def _sup_upper_bound(grid_max: float, spread: int, q: int) -> float:
    # |f|² is a real trig polynomial of degree `spread`; Bernstein's inequality
    # bounds its dip between the maximizer and the nearest node.
    h = 2 * np.pi / (1 << q)
    slack = 1 - (spread * h) ** 2 / 8
    return grid_max / np.sqrt(slack) if slack > 0 else float("inf")


def refine_maxima(f: TrigPoly, q: int, count: int = 8) -> list[tuple[float, float]]:
    """Refined (theta, |f|) at the `count` largest local grid maxima of |f|."""
    modulus = np.abs(to_grid(f, q).samples)
    h = 2 * np.pi / (1 << q)
    peaks = np.flatnonzero((modulus >= np.roll(modulus, 1)) & (modulus >= np.roll(modulus, -1)))
    peaks = peaks[np.argsort(modulus[peaks])[::-1][:count]]
    out = []
    for j in peaks:
        theta = j * h
        result = minimize_scalar(
            lambda t: -abs(f.evaluate(t)),
            bounds=(theta - h, theta + h),
            method="bounded",
            options={"xatol": 1e-13},
        )
        best_theta, best = (theta, modulus[j]) if -result.fun < modulus[j] else (result.x, -result.fun)
        out.append((float(best_theta % (2 * np.pi)), float(best)))
    return sorted(out, key=lambda pair: -pair[1])


def linf_enclosure(f: TrigPoly, q: int = DEFAULT_GRID_EXP) -> SupEnclosure:
    _check_q(q)
    if f.is_zero():
        return SupEnclosure(value=0.0, lower=0.0, upper=0.0, argmax=0.0, q=q)
    grid_max = float(np.abs(to_grid(f, q).samples).max())
    theta, best = refine_maxima(f, q)[0]
    return SupEnclosure(
        value=best,
        lower=best,
        upper=max(best, _sup_upper_bound(grid_max, f.spread(), q)),
        argmax=theta,
        q=q,
    )


def norm_linf(f: TrigPoly, q: int = DEFAULT_GRID_EXP) -> float:
    return linf_enclosure(f, q).value


def spectrum_in(f: TrigPoly, spectral_set: SpectralSet) -> SpectrumCheck:
    offenders = [k for k in f.spectrum() if not spectral_set.contains(k)]
    return SpectrumCheck(ok=not offenders, offenders=offenders)
