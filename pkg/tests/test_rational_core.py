import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fft_coeffs, random_rational
from toeplitz_lab.errors import PoleAtEvaluationPoint, PoleOnCircle
from toeplitz_lab.rational_core import (
    Polynomial,
    RationalFunction,
    analytic_split,
    circle_conjugate,
    fourier_coeff,
    fourier_coeffs,
    h2_inner,
    partial_fractions,
    poles_and_zeros,
    rat_eval,
    rational_from_json,
    rational_to_json,
    sup_norm_grid,
    tilde_transform,
)

Z = RationalFunction.polynomial([0, 1])
ONE_OVER = RationalFunction(1, [1, -0.5])  # 1 / (1 - 0.5 z)


def _circle(n=16, seed=1):
    return np.exp(2j * np.pi * np.random.default_rng(seed).uniform(size=n))


# -- Polynomial / construction ------------------------------------------------


def test_polynomial_trims_and_degree():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert Polynomial([0]).is_zero()
    assert Polynomial([]).is_zero()


def test_reduced_form_cancels_common_roots():
    f = RationalFunction(Polynomial.from_roots([0.5, 2.0]), Polynomial.from_roots([0.5, 0.3]))
    assert f.den.degree == 1
    assert f.poles[0][0] == pytest.approx(0.3)
    assert abs(f.den.lead - 1) < 1e-15


def test_den_is_monic():
    f = RationalFunction([1], [3, 2])
    assert f.den.lead == pytest.approx(1)
    assert f(0) == pytest.approx(1 / 3)


# -- rat_eval ---------------------------------------------------------------------


def test_rat_eval_examples():
    assert rat_eval(ONE_OVER, 0) == pytest.approx(1)
    assert rat_eval(Z, 1j) == pytest.approx(1j)
    assert rat_eval(ONE_OVER, 1) == pytest.approx(2)


def test_rat_eval_at_pole_raises():
    with pytest.raises(PoleAtEvaluationPoint):
        rat_eval(ONE_OVER, 2.0)


# -- poles and zeros -----------------------------------------------------------------


def test_poles_and_zeros_examples():
    zeros, poles = poles_and_zeros(Z * Z)
    assert zeros == ((0j, 2),) and poles == ()
    zeros, poles = poles_and_zeros(RationalFunction([-0.5, 1], [1, -0.5]))
    assert zeros[0][0] == pytest.approx(0.5) and poles[0][0] == pytest.approx(2)
    _, poles = poles_and_zeros(RationalFunction(1, Polynomial([1, -0.3]) * Polynomial([1, -0.3])))
    assert len(poles) == 1
    assert poles[0][0] == pytest.approx(10 / 3) and poles[0][1] == 2


@pytest.mark.parametrize("m", [2, 3, 4])
def test_repeated_roots_cluster(m):
    p = Polynomial.from_roots([((0.3 + 0.2j), m), (-0.7, 1)])
    roots = dict((complex(np.round(r, 6)), k) for r, k in p.roots())
    assert roots == {complex(0.3, 0.2): m, complex(-0.7, 0): 1}


# -- partial fractions -------------------------------------------------------------------


def test_partial_fractions_examples():
    pf = partial_fractions(ONE_OVER)
    assert len(pf.terms) == 1
    t = pf.terms[0]
    assert t.pole == pytest.approx(2) and t.order == 1 and t.coefficients[0] == pytest.approx(-2)

    pf = partial_fractions(Z**3)
    assert pf.terms == () or len(pf.terms) == 0
    assert np.allclose(pf.polynomial_part.coeffs, [0, 0, 0, 1])

    f = RationalFunction(1, Polynomial.from_roots([0, 2]))
    coeffs = {complex(np.round(t.pole, 12)): t.coefficients[0] for t in partial_fractions(f).terms}
    assert coeffs[0j] == pytest.approx(-0.5) and coeffs[2 + 0j] == pytest.approx(0.5)


@given(st.integers(0, 10_000))
@settings(max_examples=60)
def test_reassembly(seed):
    f = random_rational(np.random.default_rng(seed))
    pf = partial_fractions(f)
    z = 0.6 * np.exp(2j * np.pi * np.random.default_rng(seed + 1).uniform(size=16)) + 0.05
    try:
        direct = f(z)
    except PoleAtEvaluationPoint:
        return
    assert np.allclose(pf(z), direct, rtol=1e-9, atol=1e-9 * np.max(np.abs(direct)))
    assert pf.reassemble().allclose(f)


# -- Fourier coefficients ---------------------------------------------------------------


def test_fourier_examples():
    assert fourier_coeff(ONE_OVER, 3) == pytest.approx(0.125)
    assert fourier_coeff(Z, 1) == pytest.approx(1)
    assert fourier_coeff(Z, 0) == pytest.approx(0)
    assert fourier_coeff(ONE_OVER, -2) == 0


def test_fourier_inside_pole_laurent():
    # 1/(z - 0.5) = sum_{n >= 0} 0.5^n z^{-n-1} on the circle
    f = RationalFunction(1, [-0.5, 1])
    for n in range(6):
        assert fourier_coeff(f, -n - 1) == pytest.approx(0.5**n)
    assert fourier_coeff(f, -2) == pytest.approx(0.5)
    assert fourier_coeff(f, 0) == 0


def test_pole_on_circle_rejected():
    with pytest.raises(PoleOnCircle):
        fourier_coeff(RationalFunction(1, [-(1 + 1e-8), 1]), 0)


@given(st.integers(0, 10_000))
@settings(max_examples=40)
def test_fourier_matches_fft(seed):
    f = random_rational(np.random.default_rng(seed), inside=3, outside=3, poly_degree=2)
    ks = np.arange(-32, 33)
    ref = fft_coeffs(f, ks)
    assert np.max(np.abs(fourier_coeffs(f, ks) - ref)) <= 1e-8 * max(1, np.max(np.abs(ref)))


def test_fourier_multiple_poles_match_fft():
    f = RationalFunction.from_roots([0.2], [(0.6j, 3), (-1.8, 2)], 0.7)
    ks = np.arange(-32, 33)
    assert np.allclose(fourier_coeffs(f, ks), fft_coeffs(f, ks), atol=1e-10)


# -- split, conjugate, tilde --------------------------------------------------------------


def test_split_trigonometric_polynomial():
    f = RationalFunction.laurent({-1: 1, 0: 2, 1: 3})
    fp, fm = analytic_split(f)
    assert fp.allclose(RationalFunction.polynomial([2, 3]))
    assert fm.allclose(Z)


def test_split_analytic_is_identity():
    fp, fm = analytic_split(ONE_OVER)
    assert fm.is_zero()
    assert fp.allclose(ONE_OVER)


def test_split_inside_pole():
    f = RationalFunction(1, [-0.5, 1])
    fp, fm = analytic_split(f)
    assert fp.is_zero()
    z = _circle()
    assert np.allclose(np.conj(fm(z)) + fp(z), f(z), atol=1e-12)
    assert abs(fm(0)) < 1e-14


@given(st.integers(0, 10_000))
@settings(max_examples=40)
def test_split_consistency(seed):
    f = random_rational(np.random.default_rng(seed))
    fp, fm = analytic_split(f)
    z = _circle(16, seed)
    assert np.allclose(np.conj(fm(z)) + fp(z), f(z), atol=1e-9 * max(1, np.max(np.abs(f(z)))))
    assert abs(fm(0)) < 1e-9
    ks = np.arange(0, 20)
    assert np.allclose(fourier_coeffs(fp, ks), fourier_coeffs(f, ks), atol=1e-10)
    assert all(abs(p) > 1 for p, _ in fp.poles) and all(abs(p) > 1 for p, _ in fm.poles)


def test_circle_conjugate_matches_boundary():
    f = random_rational(np.random.default_rng(3))
    z = _circle()
    assert np.allclose(circle_conjugate(f)(z), np.conj(f(z)))


def test_tilde_examples():
    assert tilde_transform(Z).allclose(Z)
    assert tilde_transform(1j * Z).allclose(-1j * Z)
    a = 0.3 + 0.4j
    f = RationalFunction(1, [1, -a])
    assert tilde_transform(f).allclose(RationalFunction(1, [1, -np.conj(a)]))
    z = _circle()
    assert np.allclose(tilde_transform(f)(z), np.conj(f(np.conj(z))))


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_tilde_isometric_involution(seed):
    f = random_rational(np.random.default_rng(seed))
    t = tilde_transform(f)
    assert tilde_transform(t).allclose(f)
    assert abs(sup_norm_grid(f).value - sup_norm_grid(t).value) <= 1e-9 * max(1, sup_norm_grid(f).value)


# -- sup norm -------------------------------------------------------------------------


def test_sup_norm_examples():
    assert sup_norm_grid(Z).value == pytest.approx(1)
    assert abs(sup_norm_grid(2 + Z, 256).value - 3) < 1e-3
    b = RationalFunction([-0.5, 1], [1, -0.5])
    assert abs(sup_norm_grid(b).value - 1) < 1e-6
    with pytest.raises(ValueError):
        sup_norm_grid(Z, 32)


def test_sup_norm_refinement_is_an_upper_bound():
    f = RationalFunction(1, [1, -0.8])
    est = sup_norm_grid(f, 64)
    assert est.upper >= 5.0 - 1e-12 >= est.value - 1e-12


# -- inner product and JSON ------------------------------------------------------------


def test_h2_inner_geometric_series():
    # ||1/(1 - a z)||^2 = 1 / (1 - |a|^2)
    assert h2_inner(ONE_OVER, ONE_OVER) == pytest.approx(1 / 0.75)
    assert abs(h2_inner(Z, RationalFunction.constant(1))) < 1e-15


def test_json_roundtrip():
    f = random_rational(np.random.default_rng(5))
    g = rational_from_json(rational_to_json(f))
    assert g.allclose(f)
    h = rational_from_json({"laurent": {"-1": [1, 0], "2": [0, 3]}})
    assert h.allclose(RationalFunction.laurent({-1: 1, 2: 3j}))
