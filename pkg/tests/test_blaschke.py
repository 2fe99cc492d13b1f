import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import blaschke_direct, fft_coeffs, hankel_kernel_oracle, random_coprimality_pair
from toeplitz_lab.blaschke import (
    BlaschkePotapov,
    FiniteBlaschke,
    blaschke_lcm,
    blaschke_to_rational,
    hermite_witness,
    inner_multiple_basis,
    lemma312_test,
    model_space_basis,
    potapov_inner_check,
    scalar_coprime,
)
from toeplitz_lab.errors import DegreeZero, InputError, NotAnalytic, WitnessNotNeeded
from toeplitz_lab.rational_core import RationalFunction, circle_conjugate, circle_grid, h2_inner
from toeplitz_lab.symbol import MatrixSymbol

Z = RationalFunction.polynomial([0, 1])
Bz = FiniteBlaschke.z_power(1)
B05 = FiniteBlaschke.factor(0.5)
B03 = FiniteBlaschke.factor(0.3)


def blaschke_strategy(max_deg=5, max_mod=0.9):
    zero = st.tuples(st.floats(0, max_mod), st.floats(0, 2 * np.pi), st.integers(1, 2))
    return st.lists(zero, max_size=max_deg).map(
        lambda zs: FiniteBlaschke(tuple((complex(r * np.exp(1j * t)), m) for r, t, m in zs))
    )


# -- FiniteBlaschke ---------------------------------------------------------------------


def test_to_rational_examples():
    assert blaschke_to_rational(Bz).allclose(Z)
    assert blaschke_to_rational(B05).allclose(RationalFunction([-0.5, 1], [1, -0.5]))
    theta = Bz * B05
    assert abs(theta(0.5)) < 1e-15
    assert abs(abs(theta(np.exp(1j))) - 1) < 1e-12
    assert blaschke_to_rational(theta).num.degree == 2


def test_zero_outside_disk_rejected():
    with pytest.raises(InputError):
        FiniteBlaschke.factor(1.0)
    with pytest.raises(InputError):
        FiniteBlaschke((), 2.0)


@given(blaschke_strategy())
@settings(max_examples=40)
def test_unimodular_on_circle_and_matches_formula(theta):
    z = circle_grid(64)
    vals = theta(z)
    assert np.max(np.abs(np.abs(vals) - 1)) <= 1e-9
    assert np.allclose(vals, blaschke_direct(theta.zero_list(), theta.phase, z), atol=1e-9)


def test_json_roundtrip():
    theta = FiniteBlaschke(((0.5j, 2), (0.1, 1)), np.exp(0.3j))
    again = FiniteBlaschke.from_json(theta.to_json())
    assert again == theta
    assert FiniteBlaschke.from_json({"zeros": [{"alpha": [0, 0], "mult": 1}]}).phase == 1


# -- lcm and coprimality ---------------------------------------------------------------


def test_lcm_examples():
    assert blaschke_lcm(Bz, FiniteBlaschke.z_power(2)).zeros == ((0j, 2),)
    l2 = blaschke_lcm(B05, B03)
    assert l2.degree == 2
    l3 = blaschke_lcm(Bz * B05, FiniteBlaschke.z_power(2))
    assert l3.degree == 3
    assert dict(l3.zeros) == {0j: 2, 0.5 + 0j: 1}


def test_scalar_coprime_examples():
    assert scalar_coprime(Bz, B05)
    assert not scalar_coprime(FiniteBlaschke.z_power(2), Bz)
    assert not scalar_coprime(B05 * B03, B03)


@given(blaschke_strategy(), blaschke_strategy(), blaschke_strategy())
@settings(max_examples=100)
def test_lcm_lattice(a, b, c):
    def same(x, y):
        return x.divides(y) and y.divides(x)

    assert same(blaschke_lcm(a, b), blaschke_lcm(b, a))
    assert same(blaschke_lcm(blaschke_lcm(a, b), c), blaschke_lcm(a, blaschke_lcm(b, c)))
    assert same(blaschke_lcm(a, a), a)
    l = blaschke_lcm(a, b)
    assert a.divides(l) and b.divides(l)


# -- Blaschke-Potapov ---------------------------------------------------------------------


def test_potapov_examples():
    assert potapov_inner_check(BlaschkePotapov(np.eye(2)), 16).defect == 0
    e = np.eye(2)
    d = BlaschkePotapov(np.eye(2), ((Bz, np.outer(e[0], e[0])), (Bz, np.outer(e[1], e[1]))))
    chk = potapov_inner_check(d, 64)
    assert chk.ok and chk.defect <= 1e-10
    assert np.allclose(d(0.3), 0.3 * np.eye(2))


def test_potapov_common_inner_factor():
    # (1/sqrt 2) [[1, z], [-1, z]] = nu (z P + I - P) with P the projection onto e_1
    nu = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
    d = BlaschkePotapov(nu, ((Bz, np.diag([0.0, 1.0])),))
    z = circle_grid(32)
    expected = np.stack([np.array([[1, w], [-1, w]]) / np.sqrt(2) for w in z])
    assert np.allclose(d(z), expected)
    chk = potapov_inner_check(d, 64)
    assert chk.ok and chk.defect <= 1e-8


def test_potapov_validation():
    with pytest.raises(InputError):
        BlaschkePotapov(2 * np.eye(2))
    with pytest.raises(InputError):
        BlaschkePotapov(np.eye(2), ((Bz, np.array([[1, 1], [0, 0]])),))
    with pytest.raises(InputError):
        potapov_inner_check(BlaschkePotapov(np.eye(2)), 8)


@given(st.integers(0, 10_000))
@settings(max_examples=10)
def test_random_potapov_products_are_inner(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    factors = []
    for _ in range(rng.integers(1, 4)):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v /= np.linalg.norm(v)
        a = 0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        factors.append((FiniteBlaschke.factor(a), np.outer(v, v.conj())))
    d = BlaschkePotapov(q, tuple(factors))
    assert potapov_inner_check(d, 32).ok
    sym = d.to_symbol()
    z = np.array([0.2 + 0.1j, -0.5j])
    assert np.allclose(sym(z), d(z))


# -- model spaces ----------------------------------------------------------------------


def test_model_space_examples():
    b = model_space_basis(Bz).basis
    assert len(b) == 1 and b[0].allclose(RationalFunction.constant(1))
    b = model_space_basis(FiniteBlaschke.z_power(2)).basis
    assert b[0].allclose(RationalFunction.constant(1)) and b[1].allclose(Z)
    b = model_space_basis(B05).basis
    assert b[0].allclose(RationalFunction(np.sqrt(0.75), [1, -0.5]))
    assert h2_inner(b[0], b[0]) == pytest.approx(1)
    with pytest.raises(DegreeZero):
        model_space_basis(FiniteBlaschke())


@given(blaschke_strategy(max_deg=4, max_mod=0.85).filter(lambda t: t.degree > 0))
@settings(max_examples=30)
def test_model_space_orthonormal_and_orthogonal_to_theta_h2(theta):
    ms = model_space_basis(theta)
    assert len(ms.basis) == theta.degree
    assert np.allclose(ms.gram(), np.eye(theta.degree), atol=1e-8)
    t = theta.rational
    for g in ms.basis:
        for k in range(3):
            assert abs(h2_inner(g, t * Z**k)) <= 1e-8
        # conj(theta) g has no non-negative frequencies
        c = fft_coeffs(lambda z: np.conj(t(z)) * g(z), np.arange(0, 12))
        assert np.max(np.abs(c)) <= 1e-8


# -- coprimality of B and theta I ------------------------------------------------------------


def test_coprimality_examples():
    assert lemma312_test(MatrixSymbol.constant(np.eye(2)), Bz).coprime
    v = lemma312_test(MatrixSymbol.constant(np.ones((2, 2))), Bz)
    assert not v.coprime and v.failing_zeros == (0j,)
    assert lemma312_test(MatrixSymbol([[1, Z], [0, 1]]), B05).coprime


def test_coprimality_rejects_nonanalytic():
    with pytest.raises(NotAnalytic):
        lemma312_test(MatrixSymbol.scalar(RationalFunction(1, [-0.5, 1])), Bz)


def test_hermite_witness_examples():
    w = hermite_witness(MatrixSymbol.constant(np.ones((2, 2))), Bz, 0)
    assert np.allclose(w.coeffs, [[1, -1]])
    assert w.residual <= 1e-12

    w = hermite_witness(MatrixSymbol.diagonal([Z - 0.5, 1]), B05, 0.5)
    assert w.coeffs.shape == (1, 2)
    assert np.allclose(w.coeffs, [[1, 0]])

    with pytest.raises(WitnessNotNeeded):
        hermite_witness(MatrixSymbol.constant(np.eye(2)), Bz, 0)


def test_hermite_witness_repeated_zero():
    theta = FiniteBlaschke(((0.5, 2), (0.1, 1)))
    b = MatrixSymbol.diagonal([Z - 0.5, 1])
    w = hermite_witness(b, theta, 0.5)
    # B h vanishes to second order at 0.5 and at 0.1, so B h is divisible by theta's numerator
    h = np.polynomial.polynomial.Polynomial(w.coeffs[:, 0])
    assert abs(h(0.5)) < 1e-12 and abs(h(0.1)) < 1e-12 and abs(h.deriv()(0.5)) > 0.1
    assert w.residual <= 1e-8


@pytest.mark.parametrize("seed", range(50))
def test_coprimality_matches_hankel_kernel_oracle(seed):
    rng = np.random.default_rng(seed)
    b, theta = random_coprimality_pair(rng)
    length = theta.degree + 8
    verdict = lemma312_test(b, theta)
    assert verdict.coprime == hankel_kernel_oracle(b, theta, length)
    if not verdict.coprime:
        w = hermite_witness(b, theta, verdict.failing_zeros[0])
        assert w.residual <= 1e-8
        v = w.vector(length)
        v = v / np.linalg.norm(v)
        angle = scipy.linalg.subspace_angles(v[:, None], inner_multiple_basis(theta, length, 2))
        assert np.min(angle) > 1e-3
