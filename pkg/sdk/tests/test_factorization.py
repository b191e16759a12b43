import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacunary import factorization
from lacunary.circle import TrigPoly, multiply, norm_l1
from lacunary.exceptions import PreconditionError
from lacunary.expressions import parse_function
from lacunary.spectra import SpectralSet


def test_factorize_boundary_root():
    """Tests that a root on the circle keeps the polynomial outer"""
    report = factorization.factorize(parse_function("1+z"))
    assert report.degree == 1
    assert report.is_outer
    assert len(report.roots_on_boundary) == 1
    assert report.roots_on_boundary[0].re == pytest.approx(-1.0)
    assert report.blaschke_degree == 0


def test_factorize_root_at_origin():
    report = factorization.factorize(parse_function("z^2"))
    assert not report.is_outer
    assert report.blaschke_degree == 2
    assert report.roots_inside[0].multiplicity == 2
    assert report.roots_inside[0].modulus == 0.0


def test_factorize_inner_root():
    report = factorization.factorize(parse_function("z - 0.5"))
    assert report.blaschke_degree == 1
    assert report.roots_inside[0].re == pytest.approx(0.5)
    assert report.roots_inside[0].residual <= report.roots_inside[0].residual_bound


def test_factorize_double_root_outside():
    report = factorization.factorize(parse_function("(z - 2)^2"))
    assert report.is_outer
    assert report.roots_outside[0].multiplicity == 2
    assert report.roots_outside[0].re == pytest.approx(2.0, abs=1e-6)


def test_factorize_refuses_non_analytic():
    with pytest.raises(PreconditionError):
        factorization.factorize(parse_function("zbar"))
    with pytest.raises(PreconditionError):
        factorization.factorize(TrigPoly.zero())


def _normalized(text: str) -> TrigPoly:
    f = parse_function(text)
    return f / norm_l1(f)


@pytest.mark.parametrize(
    "text, verdict",
    [
        ("(pi/4)*(1+z)", "ExtremeByOuter"),
        ("z^2", "NonExtreme"),
        ("1+z", "NotUnitNorm"),
    ],
)
def test_classify_h1(text, verdict):
    """Tests the H1 corpus"""
    certificate = factorization.classify_h1_extreme(parse_function(text))
    assert certificate.verdict == verdict
    assert certificate.p == "1"


@pytest.mark.parametrize(
    "r, verdict",
    [(0.5, "NonExtreme"), (0.99, "NonExtreme"), (1.0, "ExtremeByOuter"), (1.01, "ExtremeByOuter")],
)
def test_classify_h1_root_sweep(r, verdict):
    certificate = factorization.classify_h1_extreme(_normalized(f"z - {r}"))
    assert certificate.verdict == verdict
    assert certificate.factorization is not None


def test_log_integral_of_scaled_monomials():
    """Tests the two thresholds of the unimodular test"""
    divergent = factorization.log_integral(TrigPoly.monomial(3, 1 - 0.5e-10))
    assert divergent.classification == "divergent"
    assert divergent.divergent

    near = factorization.log_integral(TrigPoly.monomial(3, 1 - 1e-8))
    assert near.classification == "finite"
    assert near.value == pytest.approx(math.log(1e-8), abs=1e-6)

    half = factorization.log_integral(TrigPoly.monomial(1, 0.5))
    assert half.value == pytest.approx(math.log(0.5), abs=1e-12)


@pytest.mark.parametrize("c, classification", [(1 - 1e-10, "divergent"), (1.0, "divergent"), (1 - 1.01e-10, "finite")])
def test_log_integral_unimodular_boundary(c, classification):
    """Tests that |c| = 1 - 1e-10 is still on the divergent side"""
    assert factorization.log_integral(TrigPoly.monomial(3, c)).classification == classification


def test_log_integral_with_vanishing_point():
    f = parse_function("(1+z)/2")
    report = factorization.log_integral(f)
    assert report.classification == "finite"
    assert len(report.vanishing_points) == 1
    assert report.vanishing_points[0].order == 2
    assert report.vanishing_points[0].angle == pytest.approx(0.0, abs=1e-6) or report.vanishing_points[
        0
    ].angle == pytest.approx(2 * math.pi, abs=1e-6)
    finer = factorization.log_integral(f, q=18)
    assert finer.value == pytest.approx(report.value, abs=1e-6)


def test_log_integral_preconditions():
    with pytest.raises(PreconditionError):
        factorization.log_integral(parse_function("z"), q=20)
    with pytest.raises(PreconditionError):
        factorization.log_integral(parse_function("2z"))


def test_classify_hinf():
    certificate = factorization.classify_hinf_extreme(parse_function("z^2"), SpectralSet.parse("2Zplus"))
    assert certificate.verdict == "ExtremeByLogIntegral"
    assert certificate.scope == "Λ = 2Zplus"

    certificate = factorization.classify_hinf_extreme(parse_function("z^2"), SpectralSet.parse("Zplus \\ {1}"))
    assert certificate.verdict == "ExtremeByLogIntegral"

    certificate = factorization.classify_hinf_extreme(parse_function("(1+z)/2"), SpectralSet.parse("Zplus"))
    assert certificate.verdict == "NonExtreme"
    assert certificate.log_integral.classification == "finite"

    certificate = factorization.classify_hinf_extreme(parse_function("z/2"), SpectralSet.parse("Zplus"))
    assert certificate.verdict == "NotUnitNorm"


def test_classify_hinf_out_of_scope():
    with pytest.raises(PreconditionError):
        factorization.classify_hinf_extreme(parse_function("z"), SpectralSet.parse("Z \\ {0}"))
    with pytest.raises(PreconditionError):
        factorization.classify_hinf_extreme(parse_function("z"), SpectralSet.parse("Zplus \\ {1}"))


def _from_roots(roots) -> TrigPoly:
    return TrigPoly(dict(enumerate(np.polynomial.polynomial.polyfromroots(roots).tolist())))


def _root_multiset(report) -> list[complex]:
    entries = report.roots_inside + report.roots_on_boundary + report.roots_outside
    roots = [complex(e.re, e.im) for e in entries for _ in range(e.multiplicity)]
    return sorted(roots, key=lambda w: (w.real, w.imag))


@pytest.mark.parametrize(
    "f_roots, g_roots",
    [
        ([0.5, -2.0, 1.5j], [0.3 + 0.3j, 3.0]),
        ([0.5], [0.5, -0.25 + 0.8j]),
        ([-1.0], [2j, 0.1]),
    ],
)
def test_factorize_product_roots_are_the_union(f_roots, g_roots):
    """Tests that the roots of f·g are the roots of f together with those of g"""
    f, g = _from_roots(f_roots), _from_roots(g_roots)
    product = factorization.factorize(multiply(f, g))
    expected = _root_multiset(factorization.factorize(f)) + _root_multiset(factorization.factorize(g))
    expected.sort(key=lambda w: (w.real, w.imag))
    assert np.allclose(_root_multiset(product), expected, atol=1e-6)
    assert product.blaschke_degree == sum(1 for w in list(f_roots) + list(g_roots) if abs(w) < 1)


@pytest.mark.parametrize(
    "text, verdict",
    [("z - 2", "ExtremeByOuter"), ("1 + z/3", "ExtremeByOuter"), ("z - 0.5", "NonExtreme"), ("z^2 + 0.3", "NonExtreme")],
)
@settings(max_examples=20, deadline=None)
@given(phi=st.floats(min_value=0.0, max_value=2 * math.pi))
def test_classify_h1_is_rotation_invariant(text, verdict, phi):
    f = _normalized(text)
    rotated = TrigPoly({k: c * cmath.exp(1j * k * phi) for k, c in f.coeffs.items()})
    assert factorization.classify_h1_extreme(rotated).verdict == verdict
