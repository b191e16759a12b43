import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacunary import extremality, scan
from lacunary.certificates import InconclusiveDetail, L1Witness
from lacunary.circle import GridFunction, TrigPoly, norm_l1, spectrum_in, to_grid
from lacunary.exceptions import PreconditionError
from lacunary.expressions import parse_function
from lacunary.spectra import SpectralSet


# L1 witnesses
def test_periodic_witness():
    """Tests the periodic witness h = Re(z^2) over 2Z"""
    f = parse_function("z^2")
    witness = extremality.periodic_witness(f, SpectralSet.parse("2Z"))
    assert witness.method == "periodic"
    assert witness.h.allclose(parse_function("re(z^2)"))
    assert witness.c == pytest.approx(0.0, abs=1e-12)
    assert witness.epsilon == pytest.approx(1.0, abs=1e-7)
    assert witness.epsilon <= 1.0
    assert witness.u.allclose(f + parse_function("(z^4 + 1)/2") * witness.epsilon, tol=1e-12)
    assert (witness.u + witness.v).allclose(f * 2, tol=1e-12)
    assert witness.norm_u == pytest.approx(1.0, abs=1e-9)
    assert witness.norm_v == pytest.approx(1.0, abs=1e-9)


def test_periodic_witness_weighted_constant():
    witness = extremality.periodic_witness(parse_function("(pi/4)*(z^2+z^4)"), SpectralSet.parse("2Z"))
    assert witness.c == pytest.approx(1 / 3, abs=1e-8)


def test_periodic_witness_needs_a_period():
    with pytest.raises(PreconditionError):
        extremality.periodic_witness(parse_function("z"), SpectralSet.parse("Z \\ {0}"))


def test_cofinite_l1_witness():
    """Tests the lowest-degree null vector over Z minus one point"""
    witness = extremality.cofinite_l1_witness(parse_function("z"), SpectralSet.parse("Z \\ {0}"))
    assert witness.method == "cofinite"
    assert witness.frequencies == [1, 2, 3]
    assert witness.alpha == pytest.approx([0.0, 1.0, 0.0], abs=1e-12)
    assert witness.h.allclose(parse_function("re(z^2)"), tol=1e-12)
    assert witness.residual <= 1e-9


def test_cofinite_l1_witness_two_excluded():
    witness = extremality.cofinite_l1_witness(parse_function("z"), SpectralSet.parse("Z \\ {0,4}"))
    assert witness.h.allclose(parse_function("re(z^2)"), tol=1e-12)
    assert witness.frequencies == [1, 2, 3, 4, 5]


def test_cofinite_l1_witness_refusals():
    with pytest.raises(PreconditionError):
        extremality.cofinite_l1_witness(parse_function("0.5 z"), SpectralSet.parse("Z \\ {0}"))
    with pytest.raises(PreconditionError):
        extremality.cofinite_l1_witness(parse_function("1"), SpectralSet.parse("Z \\ {0}"))
    with pytest.raises(PreconditionError):
        extremality.cofinite_l1_witness(parse_function("z"), SpectralSet.parse("Zplus"))


def test_general_search_finds_witness():
    witness = extremality.general_l1_witness_search(parse_function("z^2"), SpectralSet.parse("Zplus \\ {1}"), 2)
    assert isinstance(witness, L1Witness)
    assert witness.h.allclose(parse_function("re(z^2)"), tol=1e-9)

    witness = extremality.general_l1_witness_search(parse_function("z"), SpectralSet.parse("Z"), 1)
    assert isinstance(witness, L1Witness)
    assert witness.h.allclose(parse_function("re(z)"), tol=1e-9)


def test_general_search_inconclusive_for_outer_function():
    """An outer function of H1 admits no witness of any degree"""
    found = extremality.general_l1_witness_search(parse_function("(pi/4)*(1+z)"), SpectralSet.parse("Zplus"), 8)
    assert isinstance(found, InconclusiveDetail)
    assert found.nullity == 0
    assert found.unknowns == 16
    assert found.constraints == 16


def test_general_search_rejects_degree():
    with pytest.raises(PreconditionError):
        extremality.general_l1_witness_search(parse_function("z"), SpectralSet.parse("Z"), 0)


def test_l1_certificate_dispatch():
    certificate = extremality.l1_certificate(parse_function("z^2"), SpectralSet.parse("2Z"))
    assert certificate.criterion == "periodic witness"
    certificate = extremality.l1_certificate(parse_function("z"), SpectralSet.parse("Z \\ {0}"))
    assert certificate.criterion == "cofinite witness"
    certificate = extremality.l1_certificate(parse_function("(pi/4)*(1+z)"), SpectralSet.parse("Zplus"))
    assert certificate.verdict == "Inconclusive"
    assert certificate.inconclusive is not None
    with pytest.raises(PreconditionError):
        extremality.l1_certificate(parse_function("z"), SpectralSet.parse("Z"), method="bogus")


# L-infinity witnesses and certificates
def test_cofinite_linf_witness():
    """Tests the coefficient ratio of the witness p for (z+z^2)/2"""
    witness = extremality.cofinite_linf_witness(parse_function("(z+z^2)/2"), SpectralSet.parse("Z \\ {0}"))
    assert witness.excluded == [0]
    assert witness.beta[1][0] / witness.beta[0][0] == pytest.approx((3 * math.pi - 6) / 2, abs=1e-6)
    assert max(witness.residuals) <= 1e-8
    assert max(witness.sup_plus, witness.sup_minus) <= 1 + 1e-8
    assert witness.gp_sup > 0


def test_cofinite_linf_witness_two_excluded():
    witness = extremality.cofinite_linf_witness(parse_function("(z+z^3)/2"), SpectralSet.parse("Z \\ {0,2}"))
    assert witness.excluded == [0, 2]
    assert len(witness.beta) == 3
    assert max(witness.sup_plus, witness.sup_minus) <= 1 + 1e-8


def test_cofinite_linf_witness_refuses_unimodular():
    with pytest.raises(PreconditionError):
        extremality.cofinite_linf_witness(parse_function("z"), SpectralSet.parse("Z \\ {0}"))


def test_classify_linf_cofinite():
    certificate = extremality.classify_linf_cofinite(parse_function("z^5"), SpectralSet.parse("Z \\ {0}"))
    assert certificate.verdict == "ExtremeByUnimodular"
    assert certificate.is_extreme

    certificate = extremality.classify_linf_cofinite(parse_function("(z+z^2)/2"), SpectralSet.parse("Z \\ {0}"))
    assert certificate.verdict == "NonExtreme"
    assert certificate.linf_witness is not None


def test_dset_certificate_polynomials():
    certificate = extremality.dset_extreme_certificate(parse_function("z"), SpectralSet.parse("negpow(2) | Zplus"))
    assert certificate.verdict == "ExtremeByDSet"
    assert certificate.measure.lower == 1.0

    certificate = extremality.dset_extreme_certificate(parse_function("(1+z)/2"), SpectralSet.parse("Zplus"))
    assert certificate.verdict == "Inconclusive"
    assert certificate.measure.upper == 0.0

    with pytest.raises(PreconditionError):
        extremality.dset_extreme_certificate(parse_function("z"), SpectralSet.parse("Z"))


def _half_unimodular_grid() -> GridFunction:
    samples = np.full(1 << 10, 0.5, dtype=complex)
    samples[: 1 << 9] = 1.0
    return GridFunction(samples=samples, q=10)


def test_dset_certificate_grid_function():
    """Tests the measure enclosure for |f| = 1 on half the circle"""
    grid = _half_unimodular_grid()
    certificate = extremality.dset_extreme_certificate(grid, SpectralSet.parse("Zplus"), spectral_band=(0, 5))
    assert certificate.verdict == "ExtremeByDSet"
    assert certificate.f is None
    assert certificate.measure.runs == 1
    assert certificate.measure.lower <= 0.5 <= certificate.measure.upper

    with pytest.raises(PreconditionError):
        extremality.dset_extreme_certificate(grid, SpectralSet.parse("Zplus"), spectral_band=(-1, 5))
    with pytest.raises(PreconditionError):
        extremality.dset_extreme_certificate(grid, SpectralSet.parse("Zplus"))


def test_parallelogram_bound():
    f = to_grid(parse_function("(1+z)/2"), 8)
    g = to_grid(parse_function("(1-z)/2"), 8)
    check = extremality.parallelogram_bound(f, g)
    assert check.hypothesis_holds
    assert check.bound_holds

    z = to_grid(parse_function("z"), 8)
    check = extremality.parallelogram_bound(z, z)
    assert not check.hypothesis_holds
    assert check.bound_holds is None

    with pytest.raises(PreconditionError):
        extremality.parallelogram_bound(f, to_grid(parse_function("z"), 9))


disk_points = st.lists(
    st.tuples(st.floats(0, 1), st.floats(0, 2 * math.pi)),
    min_size=16,
    max_size=16,
)


@settings(max_examples=100, deadline=None)
@given(disk_points, disk_points)
def test_parallelogram_bound_holds_for_midpoints(a_points, b_points):
    """Tests |g|^2 <= 1 - |f|^2 whenever f +- g lie in the unit disk"""
    a = np.array([r * np.exp(1j * t) for r, t in a_points])
    b = np.array([r * np.exp(1j * t) for r, t in b_points])
    check = extremality.parallelogram_bound(GridFunction(samples=(a + b) / 2, q=4), GridFunction(samples=(a - b) / 2, q=4))
    assert check.hypothesis_holds
    assert check.max_violation <= 1e-12


# Feasibility oracle
def test_oracle_inconclusive_for_unimodular():
    result = extremality.linf_feasibility_oracle(parse_function("z"), [TrigPoly.constant(1.0), TrigPoly.monomial(1)])
    assert result.verdict == "Inconclusive"
    assert result.attempts == 8
    assert result.basis_size == 2


def test_oracle_finds_perturbation():
    result = extremality.linf_feasibility_oracle(
        parse_function("(z+z^2)/2"), [TrigPoly.constant(1.0), TrigPoly.monomial(1)]
    )
    assert result.verdict == "NonExtreme"
    assert max(result.witness.sup_plus, result.witness.sup_minus) <= 1 + 1e-8
    assert result.witness.g_sup > 0


def test_oracle_is_deterministic():
    basis = [TrigPoly.constant(1.0), TrigPoly.monomial(1)]
    first = extremality.linf_feasibility_oracle(parse_function("(z+z^2)/2"), basis, seed=3)
    second = extremality.linf_feasibility_oracle(parse_function("(z+z^2)/2"), basis, seed=3)
    assert first.model_dump() == second.model_dump()


def test_oracle_needs_basis():
    with pytest.raises(PreconditionError):
        extremality.linf_feasibility_oracle(parse_function("z"), [])


def test_lowest_degree_vector():
    basis = np.linalg.qr(np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))[0]
    vector = extremality.lowest_degree_vector(basis)
    assert vector[2] == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(vector) == pytest.approx(1.0)
    assert vector[np.argmax(np.abs(vector))].real > 0


def _cofinite_set(excluded) -> SpectralSet:
    return SpectralSet.parse("Z \\ {" + ",".join(str(k) for k in sorted(excluded)) + "}")


def _assert_midpoint(witness: L1Witness, f: TrigPoly, spectral_set: SpectralSet):
    assert spectrum_in(witness.u, spectral_set).ok
    assert spectrum_in(witness.v, spectral_set).ok
    assert (witness.u + witness.v).allclose(f * 2, tol=1e-12)
    assert not witness.u.allclose(witness.v, tol=1e-6)
    assert abs(witness.norm_u - 1) <= 1e-9
    assert abs(witness.norm_v - 1) <= 1e-9
    assert witness.mean_shift <= 1e-10
    assert witness.residual <= 1e-9


def test_periodic_witness_with_a_near_zero_of_f():
    """Tests a shift constant that needs a grid finer than the default"""
    f = TrigPoly(
        {
            -16: 0.1917 - 0.3012j,
            -10: 0.4034 - 0.5655j,
            16: -0.1277 - 0.6985j,
            24: 0.2325 - 0.2274j,
        }
    )
    f = f / norm_l1(f)
    spectral_set = SpectralSet.parse("2Z")
    _assert_midpoint(extremality.periodic_witness(f, spectral_set), f, spectral_set)


@pytest.mark.parametrize("sides", [8, 9])
def test_polygon_constraints_match_the_polygon(sides):
    """Tests A x <= b against f ± g lying in the vertex-aligned K-gon"""
    rng = np.random.default_rng(sides)
    apothem = math.cos(math.pi / sides)
    for _ in range(200):
        f = 0.9 * rng.uniform() * complex(*rng.standard_normal(2)) / 2
        f = f if abs(f) <= 0.95 else 0.95 * f / abs(f)
        g = complex(*rng.uniform(-0.6, 0.6, 2))
        a_ub, b_ub = extremality._polygon_constraints(np.array([f]), np.array([[1.0 + 0j]]), sides)
        margins = b_ub - a_ub @ np.array([g.real, g.imag])

        normals = np.exp(1j * (cmath.phase(f) + math.pi * (2 * np.arange(sides) + 1) / sides))
        reach = max(((w * normals.conj()).real.max() for w in (f + g, f - g)))
        if abs(reach - apothem) < 1e-9:
            continue
        assert (margins.min() >= 0) == (reach <= apothem)


@pytest.mark.slow
@pytest.mark.parametrize("descriptor", ["2Z", "3Z", "AP(3,0)|AP(3,1)"])
def test_periodic_witness_on_random_functions(descriptor):
    """Tests 100 seeded unit-norm f per periodic set"""
    spectral_set = SpectralSet.parse(descriptor)
    rng = np.random.default_rng(2024)
    for _ in range(100):
        f = scan.random_function(rng, spectral_set, 4, 24)
        _assert_midpoint(extremality.periodic_witness(f, spectral_set), f, spectral_set)


@pytest.mark.slow
@pytest.mark.parametrize("count", range(1, 9))
def test_cofinite_witness_on_random_functions(count):
    """Tests 50 seeded unit-norm f for each number of excluded points"""
    rng = np.random.default_rng(100 + count)
    for _ in range(50):
        spectral_set = _cofinite_set(rng.choice(np.arange(-12, 13), count, replace=False).tolist())
        f = scan.random_function(rng, spectral_set, 4, 12)
        _assert_midpoint(extremality.cofinite_l1_witness(f, spectral_set), f, spectral_set)


@pytest.mark.slow
def test_linf_witness_and_oracle_on_random_functions():
    """Tests 50 seeded non-unimodular f: a verified pair and an agreeing oracle"""
    rng = np.random.default_rng(7)
    for trial in range(50):
        spectral_set = _cofinite_set(rng.choice(np.arange(-4, 5), 1 + trial % 3, replace=False).tolist())
        f = scan.random_function(rng, spectral_set, 3, 4, norm="inf")
        witness = extremality.cofinite_linf_witness(f, spectral_set)
        assert max(witness.sup_plus, witness.sup_minus) <= 1 + 1e-8
        assert max(witness.residuals, default=0.0) <= 1e-8
        assert extremality.classify_linf_cofinite(f, spectral_set).verdict == "NonExtreme"
        oracle = extremality.linf_feasibility_oracle(f, scan.monomial_basis(spectral_set, 6))
        assert oracle.verdict == "NonExtreme"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_unimodular_monomials_agree_with_the_oracle(k):
    spectral_set = SpectralSet.parse("Z \\ {0}")
    f = TrigPoly.monomial(k)
    assert extremality.classify_linf_cofinite(f, spectral_set).verdict == "ExtremeByUnimodular"
    oracle = extremality.linf_feasibility_oracle(f, scan.monomial_basis(spectral_set, 6))
    assert oracle.verdict == "Inconclusive"


@pytest.mark.slow
def test_search_succeeds_wherever_the_cofinite_witness_fits_the_degree():
    """Tests the degree-8 search on instances whose cofinite witness has degree <= 8"""
    rng = np.random.default_rng(11)
    for trial in range(30):
        spectral_set = _cofinite_set(rng.choice(np.arange(-6, 7), 1 + trial % 3, replace=False).tolist())
        f = scan.random_function(rng, spectral_set, 3, 6)
        assert max(extremality.cofinite_l1_witness(f, spectral_set).frequencies) <= 8
        found = extremality.general_l1_witness_search(f, spectral_set, 8)
        assert isinstance(found, L1Witness)
        _assert_midpoint(found, f, spectral_set)
        assert norm_l1(found.u) == pytest.approx(1.0, abs=1e-9)
        assert norm_l1(found.v) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_search_is_inconclusive_on_outer_polynomials():
    """Tests 50 seeded outer polynomials over Zplus, which are extreme"""
    rng = np.random.default_rng(5)
    zplus = SpectralSet.parse("Zplus")
    for _ in range(50):
        degree = int(rng.integers(1, 5))
        roots = rng.uniform(1.5, 3.0, degree) * np.exp(2j * np.pi * rng.uniform(size=degree))
        f = TrigPoly(dict(enumerate(np.polynomial.polynomial.polyfromroots(roots).tolist())))
        f = f / norm_l1(f)
        found = extremality.general_l1_witness_search(f, zplus, 8)
        assert isinstance(found, InconclusiveDetail)
        assert found.nullity == 0
