import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacunary import circle
from lacunary.circle import GridFunction, TrigPoly
from lacunary.exceptions import AliasingError, PreconditionError
from lacunary.expressions import parse_function
from lacunary.spectra import SpectralSet


def test_l1_norm_of_one_plus_z():
    """Tests the corrected trapezoidal L1 norm against 4/pi"""
    estimate = circle.l1_norm_estimate(parse_function("1+z"))
    assert estimate.value == pytest.approx(4 / math.pi, abs=1e-9)
    assert estimate.error <= 1e-10


def test_l1_norm_of_monomial():
    assert circle.norm_l1(parse_function("z^3")) == pytest.approx(1.0, abs=1e-12)
    assert circle.norm_l1(parse_function("(pi/4)*(1+z)")) == pytest.approx(1.0, abs=1e-9)


def test_l1_norm_rejects_grid_out_of_range():
    with pytest.raises(PreconditionError):
        circle.l1_norm_estimate(parse_function("z"), q=7)


def test_linf_enclosure():
    enclosure = circle.linf_enclosure(parse_function("(1+z)/2"))
    assert enclosure.value == pytest.approx(1.0, abs=1e-12)
    assert enclosure.lower <= enclosure.value <= enclosure.upper
    assert enclosure.upper - 1 <= 1e-6
    assert circle.norm_linf(TrigPoly.zero()) == 0.0


def test_multiply():
    """Tests exact sparse products"""
    re_z2 = parse_function("re(z^2)")
    assert circle.multiply(parse_function("z^2"), re_z2).allclose(parse_function("(z^4 + 1)/2"))
    assert circle.multiply(parse_function("z"), re_z2).allclose(parse_function("(z^3 + zbar)/2"))


def test_sparse_product_reports_cancellation():
    product, dropped = circle.sparse_product(parse_function("1+z"), parse_function("z-1"))
    assert product == parse_function("z^2 - 1")
    assert dropped == [1]


def test_real_combination():
    assert circle.real_combination([0, 1, 0], [1, 2, 3]).allclose(parse_function("re(z^2)"))
    assert circle.real_combination([2.0], [0]) == TrigPoly.constant(2.0)
    with pytest.raises(PreconditionError):
        circle.real_combination([1, 1], [2, 2])
    with pytest.raises(PreconditionError):
        circle.real_combination([1], [-1])
    with pytest.raises(PreconditionError):
        circle.real_combination([1, 2], [1])


def test_to_grid_aliasing():
    with pytest.raises(AliasingError) as excinfo:
        circle.to_grid(TrigPoly.monomial(128), 8)
    assert excinfo.value.required_q == 9


def test_grid_function_size_is_checked():
    with pytest.raises(PreconditionError):
        GridFunction(samples=np.ones(100, dtype=complex), q=8)


def test_spectrum_in():
    check = circle.spectrum_in(parse_function("z + zbar"), SpectralSet.parse("Zplus"))
    assert not check.ok
    assert check.offenders == [-1]
    assert circle.spectrum_in(parse_function("z^4"), SpectralSet.parse("2Z")).ok


def test_division_by_nonconstant_is_refused():
    with pytest.raises(PreconditionError):
        parse_function("z") / parse_function("z")


def test_triples():
    f = parse_function("z^2 + 0.5 zbar^3")
    assert f.to_triples() == [[-3, 0.5, 0.0], [2, 1.0, 0.0]]
    with pytest.raises(ValueError):
        TrigPoly.from_triples([[1, 1.0, 0.0], [1, 2.0, 0.0]])
    with pytest.raises(ValueError):
        TrigPoly.from_triples([[0.5, 1.0, 0.0]])


def test_evaluate_and_shift():
    f = parse_function("1 + z")
    assert f.evaluate(0.0) == pytest.approx(2.0)
    assert f.shift(2) == parse_function("z^2 + z^3")
    assert np.allclose(f.evaluate(np.array([0.0, math.pi])), [2.0, 0.0])


coefficients = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.integers(-20, 20), coefficients, max_size=6))
def test_grid_transform_recovers_coefficients(coeffs):
    """Tests that sampling on a grid and reading the band back loses nothing"""
    f = TrigPoly(coeffs)
    recovered = circle.from_grid(circle.to_grid(f, 8), (-20, 20), drop_tol=1e-12)
    assert recovered.allclose(f, tol=1e-10)


@settings(max_examples=50, deadline=None)
@given(
    st.dictionaries(st.integers(-8, 8), coefficients, min_size=1, max_size=5),
    st.dictionaries(st.integers(-8, 8), coefficients, min_size=1, max_size=5),
)
def test_sparse_product_matches_grid_product(f_coeffs, g_coeffs):
    f, g = TrigPoly(f_coeffs), TrigPoly(g_coeffs)
    product = circle.to_grid(circle.multiply(f, g), 8).samples
    expected = circle.to_grid(f, 8).samples * circle.to_grid(g, 8).samples
    scale = max(1.0, f.max_abs_coefficient() * g.max_abs_coefficient())
    assert np.abs(product - expected).max() <= 1e-9 * scale * 36


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.integers(-20, 20), coefficients, max_size=6))
def test_parseval_and_conjugate_symmetry(coeffs):
    f = TrigPoly(coeffs)
    samples = circle.to_grid(f, 8).samples
    energy = sum(abs(c) ** 2 for c in f.coeffs.values())
    assert np.mean(np.abs(samples) ** 2) == pytest.approx(energy, rel=1e-9, abs=1e-12)
    real = f.real_part()
    assert real.is_real(tol=1e-15)
    assert np.abs(circle.to_grid(real, 8).samples.imag).max() <= 1e-9 * max(1.0, f.max_abs_coefficient())


def test_from_grid_mean_of_one_minus_modulus():
    """Tests the constant coefficient of 1 - |(z+z^2)/2| read off a grid"""
    modulus = np.abs(circle.to_grid(parse_function("(z+z^2)/2"), 16).samples)
    u = GridFunction(samples=(1 - modulus).astype(complex), q=16)
    assert circle.from_grid(u, (-8, 8)).coefficient(0) == pytest.approx(1 - 2 / math.pi, abs=1e-8)
