"""Kernels of Toeplitz operators with trigonometric-polynomial symbols.

For analytic f of degree <= D, conj(zφf) ∈ H^p iff (φf)^(k) = 0 for all
k >= 0. These are finitely many linear conditions on f̂(0..D).
"""

import logging

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import null_space, svdvals, toeplitz

from .circle import TrigPoly, TrigPolyField, sparse_product
from .exceptions import PreconditionError
from .lac_config import KERNEL_TOL

logger = logging.getLogger(__name__)


class KernelBasis(BaseModel):
    symbol: TrigPolyField
    degree_cap: int
    dimension: int
    basis: list[TrigPolyField]
    residual: float
    singular_values: list[float]
    truncated: bool
    notes: list[str] = Field(default_factory=list)


class KernelMembership(BaseModel):
    member: bool
    residual: float


def constraint_matrix(phi: TrigPoly, degree_cap: int) -> np.ndarray:
    """Rows k >= 0 of the product band, columns j = 0..D, entries φ̂(k - j)."""
    spectrum = phi.spectrum()
    first = max(0, spectrum[0])
    last = spectrum[-1] + degree_cap
    if last < first:
        return np.zeros((0, degree_cap + 1), dtype=complex)
    column = [phi.coefficient(k) for k in range(first, last + 1)]
    row = [phi.coefficient(first - j) for j in range(degree_cap + 1)]
    return toeplitz(column, row)


def _nonnegative_residual(phi: TrigPoly, f: TrigPoly) -> float:
    product, _ = sparse_product(phi, f)
    return max((abs(c) for k, c in product.coeffs.items() if k >= 0), default=0.0)


def kernel_basis(phi: TrigPoly, degree_cap: int) -> KernelBasis:
    """Orthonormal (coefficient ℓ²) basis of the kernel truncated to degree <= D."""
    if phi.is_zero():
        raise PreconditionError("the zero symbol has no Toeplitz kernel")
    if degree_cap < 0:
        raise PreconditionError(f"degree cap must be >= 0, got {degree_cap}")
    logger.debug(f"kernel_basis φ={phi!r} D={degree_cap}")

    matrix = constraint_matrix(phi, degree_cap)
    if matrix.shape[0]:
        singular_values = svdvals(matrix).tolist()
        kernel = null_space(matrix, rcond=KERNEL_TOL)
    else:
        singular_values = []
        kernel = np.eye(degree_cap + 1, dtype=complex)
    kernel[np.abs(kernel) <= 1e-15] = 0

    basis = [TrigPoly(dict(enumerate(column.tolist()))) for column in kernel.T]
    residual = max((_nonnegative_residual(phi, b) for b in basis), default=0.0)
    truncated = bool(kernel.shape[1]) and bool(np.any(np.abs(kernel[-1]) > KERNEL_TOL))
    notes = [f"kernel computed among polynomials of degree <= {degree_cap} only"]
    if truncated:
        logger.warning(f"kernel of φ={phi!r} reaches the degree cap {degree_cap}; it may continue beyond it")
        notes.append("basis elements reach the degree cap; the full kernel may be larger")
    return KernelBasis(
        symbol=phi,
        degree_cap=degree_cap,
        dimension=len(basis),
        basis=basis,
        residual=residual,
        singular_values=singular_values,
        truncated=truncated,
        notes=notes,
    )


def kernel_membership(phi: TrigPoly, f: TrigPoly) -> KernelMembership:
    if not f.is_analytic():
        raise PreconditionError(f"f must be analytic, spectrum {f.spectrum()}")
    residual = _nonnegative_residual(phi, f)
    return KernelMembership(member=residual <= KERNEL_TOL, residual=residual)
