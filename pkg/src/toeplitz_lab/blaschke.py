"""Finite Blaschke products, Blaschke-Potapov products and model spaces.

Also hosts the coprimality test for ``B`` against ``Theta = theta I_n``:
``B`` and ``Theta`` are coprime exactly when ``B(alpha)`` is invertible at
every zero ``alpha`` of ``theta``.  When that fails, :func:`hermite_witness`
builds a polynomial vector in ``ker H_{B Theta^*}`` outside ``Theta H^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegreeZero, InputError, NotAnalytic, WitnessNotNeeded
from .rational_core import (
    Polynomial,
    RationalFunction,
    RootMultiset,
    as_multiset,
    circle_conjugate,
    circle_grid,
    complex_from_json,
    complex_to_json,
    fourier_coeffs,
    h2_inner,
    merge_multisets,
    multiset_contains,
    roots_close,
)
from .symbol import MatrixSymbol
from .tolerances import CIRCLE_BAND

_ZERO_MARGIN = 1e-8
_SNAP_TO_ORIGIN = 1e-12


@dataclass(frozen=True)
class FiniteBlaschke:
    """``phase * prod ((z - a) / (1 - conj(a) z))**m`` over ``zeros = ((a, m), ...)``."""

    zeros: RootMultiset = ()
    phase: complex = 1.0

    def __post_init__(self):
        # a zero this close to the origin would put the reflected pole at overflow scale
        zeros = as_multiset(tuple((0j if abs(a) < _SNAP_TO_ORIGIN else a, m) for a, m in as_multiset(self.zeros)))
        zeros = merge_multisets(zeros, (), "sum")
        for a, m in zeros:
            if not abs(a) < 1 - _ZERO_MARGIN:
                raise InputError(f"Blaschke zero {a} is not inside the disk")
            if m < 1:
                raise InputError("multiplicities must be positive")
        phase = complex(self.phase)
        if abs(abs(phase) - 1) > 1e-10:
            raise InputError(f"phase {phase} is not unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "phase", phase)

    @classmethod
    def factor(cls, alpha: complex, mult: int = 1) -> "FiniteBlaschke":
        return cls(((complex(alpha), mult),))

    @classmethod
    def z_power(cls, k: int) -> "FiniteBlaschke":
        return cls(((0j, k),) if k else ())

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def zero_list(self) -> list[complex]:
        return [a for a, m in self.zeros for _ in range(m)]

    @cached_property
    def rational(self) -> RationalFunction:
        gain = self.phase
        poles = []
        for a, m in self.zeros:
            if a != 0:
                gain /= (-np.conj(a)) ** m
                poles.append((1 / np.conj(a), m))
        return RationalFunction.from_roots(self.zeros, tuple(poles), gain)

    def __call__(self, z):
        return self.rational(z)

    def __mul__(self, other: "FiniteBlaschke") -> "FiniteBlaschke":
        return FiniteBlaschke(merge_multisets(self.zeros, other.zeros, "sum"), self.phase * other.phase)

    def divides(self, other: "FiniteBlaschke") -> bool:
        """True if ``self`` divides ``other`` (zero multiset containment)."""
        return multiset_contains(other.zeros, self.zeros)

    def to_json(self) -> dict:
        return {
            "phase": complex_to_json(self.phase),
            "zeros": [{"alpha": complex_to_json(a), "mult": m} for a, m in self.zeros],
        }

    @classmethod
    def from_json(cls, data) -> "FiniteBlaschke":
        zeros = tuple((complex_from_json(z["alpha"]), int(z.get("mult", 1))) for z in data.get("zeros", []))
        return cls(zeros, complex_from_json(data.get("phase", [1.0, 0.0])))


def blaschke_to_rational(theta: FiniteBlaschke) -> RationalFunction:
    return theta.rational


def blaschke_lcm(theta1: FiniteBlaschke, theta2: FiniteBlaschke) -> FiniteBlaschke:
    return FiniteBlaschke(merge_multisets(theta1.zeros, theta2.zeros, "max"))


def scalar_coprime(theta1: FiniteBlaschke, theta2: FiniteBlaschke) -> bool:
    return not any(roots_close(a, b) for a, _ in theta1.zeros for b, _ in theta2.zeros)


def inner_part(f: RationalFunction) -> FiniteBlaschke:
    """Inner factor ``theta`` of ``f = theta * conj(b)`` for analytic rational ``f``.

    Its zeros are the poles of ``conj(f)`` inside the disk, i.e. the
    reflections of the poles of ``f`` plus ``0`` for the polynomial growth.
    """
    g = circle_conjugate(f)
    return FiniteBlaschke(tuple((p, m) for p, m in g.poles if abs(p) < 1))


def coanalytic_inner(f: RationalFunction) -> FiniteBlaschke:
    """Blaschke product over the poles of ``f`` inside the disk."""
    return FiniteBlaschke(tuple((p, m) for p, m in f.poles if abs(p) < 1))


def lcm_all(thetas: Sequence[FiniteBlaschke]) -> FiniteBlaschke:
    out = FiniteBlaschke()
    for t in thetas:
        out = blaschke_lcm(out, t)
    return out


# ---------------------------------------------------------------------------
# Blaschke-Potapov products


def _is_projection(p: np.ndarray, tol: float = 1e-10) -> bool:
    return np.allclose(p, p.conj().T, atol=tol) and np.allclose(p @ p, p, atol=tol)


@dataclass(frozen=True)
class BlaschkePotapov:
    """``nu * prod (b_m(z) P_m + I - P_m)`` with degree-one Blaschke factors ``b_m``."""

    nu: np.ndarray
    factors: tuple = field(default=())

    def __post_init__(self):
        nu = np.atleast_2d(np.asarray(self.nu, dtype=complex))
        n = nu.shape[0]
        if nu.shape != (n, n) or not np.allclose(nu.conj().T @ nu, np.eye(n), atol=1e-10):
            raise InputError("nu must be a unitary matrix")
        facs = []
        for b, p in self.factors:
            p = np.asarray(p, dtype=complex)
            if b.degree != 1:
                raise InputError("Potapov factors need degree-one Blaschke factors")
            if p.shape != (n, n) or not _is_projection(p):
                raise InputError("Potapov factors need orthogonal projections")
            facs.append((b, p))
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "factors", tuple(facs))

    @property
    def n(self) -> int:
        return self.nu.shape[0]

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        eye = np.eye(self.n)
        out = np.broadcast_to(self.nu, z.shape + (self.n, self.n)).copy()
        for b, p in self.factors:
            bz = np.asarray(b(z))[..., None, None]
            out = out @ (bz * p + (eye - p))
        return out

    def to_symbol(self) -> MatrixSymbol:
        out = MatrixSymbol.constant(self.nu)
        eye = np.eye(self.n)
        for b, p in self.factors:
            fac = MatrixSymbol([[b.rational * p[i, j] + (eye - p)[i, j] for j in range(self.n)] for i in range(self.n)])
            out = out @ fac
        return out


@dataclass(frozen=True)
class InnerCheck:
    ok: bool
    defect: float


def potapov_inner_check(d: BlaschkePotapov, samples: int = 64, tol: float = 1e-8) -> InnerCheck:
    """Max of ``||D(z)^* D(z) - I||`` over equispaced circle points."""
    if samples < 16:
        raise InputError("need at least 16 samples")
    vals = d(circle_grid(samples))
    gram = np.conj(np.swapaxes(vals, -1, -2)) @ vals - np.eye(d.n)
    defect = float(np.max(np.linalg.norm(gram, ord=2, axis=(-2, -1))))
    return InnerCheck(defect <= tol, defect)


# ---------------------------------------------------------------------------
# Model spaces


@dataclass(frozen=True)
class ModelSpaceBasis:
    theta: FiniteBlaschke
    basis: tuple[RationalFunction, ...]

    def gram(self) -> np.ndarray:
        d = len(self.basis)
        g = np.empty((d, d), dtype=complex)
        for i, f in enumerate(self.basis):
            for j, h in enumerate(self.basis):
                g[i, j] = h2_inner(f, h)
        return g

    def coefficients(self, length: int) -> np.ndarray:
        """Taylor coefficients of the basis, shape ``(length, d)``."""
        ks = np.arange(length)
        return np.stack([fourier_coeffs(g, ks) for g in self.basis], axis=1)

    def projection_section(self, length: int) -> np.ndarray:
        """Compression of the orthogonal projection onto the model space to the first ``length`` coefficients."""
        c = self.coefficients(length)
        return c @ c.conj().T


def model_space_basis(theta: FiniteBlaschke) -> ModelSpaceBasis:
    """Takenaka-Malmquist orthonormal basis of ``H^2 minus theta H^2``."""
    if theta.degree == 0:
        raise DegreeZero("model space of a constant inner function is trivial")
    basis = []
    prefix = RationalFunction.constant(1)
    for a in theta.zero_list():
        kernel = RationalFunction.from_roots((), ((1 / np.conj(a), 1),), -1 / np.conj(a)) if a != 0 else RationalFunction.constant(1)
        basis.append(prefix * kernel * math.sqrt(1 - abs(a) ** 2))
        prefix = prefix * FiniteBlaschke.factor(a).rational
    return ModelSpaceBasis(theta, tuple(basis))


# ---------------------------------------------------------------------------
# Coprimality of B and theta * I


@dataclass(frozen=True)
class CoprimeVerdict:
    coprime: bool
    failing_zeros: tuple[complex, ...]
    determinants: tuple[tuple[complex, complex], ...]


def _singular(m: np.ndarray) -> bool:
    return abs(np.linalg.det(m)) <= 1e-8 * (1 + np.linalg.norm(m, 2))


def _require_analytic(b: MatrixSymbol) -> None:
    for row in b.entries:
        for e in row:
            for p, _ in e.poles:
                if abs(p) < 1 + CIRCLE_BAND:
                    raise NotAnalytic(f"entry has a pole at {p} in the closed disk")


def lemma312_test(b: MatrixSymbol, theta: FiniteBlaschke) -> CoprimeVerdict:
    """``B`` and ``theta I_n`` are coprime iff ``B(alpha)`` is invertible at each zero."""
    _require_analytic(b)
    failing = []
    dets = []
    for a, _ in theta.zeros:
        m = b(a)
        dets.append((a, complex(np.linalg.det(m))))
        if _singular(m):
            failing.append(a)
    return CoprimeVerdict(not failing, tuple(failing), tuple(dets))


@dataclass(frozen=True)
class HermiteWitness:
    coeffs: np.ndarray  # (degree < d, n): ascending coefficients of each component
    jets: np.ndarray  # (m0, n): normalized null jets at alpha0
    alpha0: complex
    residual: float  # ||H h|| / ||h|| on the section
    section_length: int

    def vector(self, length: int) -> np.ndarray:
        """Frequency-major coefficient vector of length ``length * n``."""
        d, n = self.coeffs.shape
        out = np.zeros((length, n), dtype=complex)
        out[:d] = self.coeffs
        return out.ravel()


def _block_jet_matrix(b: MatrixSymbol, alpha: complex, m: int) -> np.ndarray:
    n = b.n
    taylor = np.empty((m, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            taylor[:, i, j] = b[i, j].taylor(alpha, m)
    big = np.zeros((m * n, m * n), dtype=complex)
    for r in range(m):
        for c in range(r + 1):
            big[r * n:(r + 1) * n, c * n:(c + 1) * n] = taylor[r - c]
    return big


def _hermite_interpolate(theta: FiniteBlaschke, alpha0: complex, jets: np.ndarray) -> np.ndarray:
    d = theta.degree
    n = jets.shape[1]
    rows = []
    rhs = []
    for a, m in theta.zeros:
        for j in range(m):
            rows.append([math.comb(k, j) * a ** (k - j) if k >= j else 0 for k in range(d)])
            rhs.append(jets[j] if roots_close(a, alpha0) else np.zeros(n))
    return np.linalg.solve(np.asarray(rows, dtype=complex), np.asarray(rhs, dtype=complex))


def hermite_witness(b: MatrixSymbol, theta: FiniteBlaschke, alpha0: complex) -> HermiteWitness:
    """Polynomial vector in ``ker H_{B theta^*}`` that is not in ``theta H^2``."""
    from .hardy_ops import hankel_matrix

    _require_analytic(b)
    match = [(a, m) for a, m in theta.zeros if roots_close(a, alpha0)]
    if not match:
        raise InputError(f"{alpha0} is not a zero of theta")
    alpha0, m0 = match[0]
    if not _singular(b(alpha0)):
        raise WitnessNotNeeded(f"B({alpha0}) is invertible")
    big = _block_jet_matrix(b, alpha0, m0)
    _, _, vh = np.linalg.svd(big)
    g = vh[-1].conj().reshape(m0, b.n)
    mags = np.abs(g).ravel()
    g = g / g.flat[int(np.argmax(mags > (1 - 1e-8) * mags.max()))]
    coeffs = _hermite_interpolate(theta, alpha0, g)
    length = theta.degree + 8
    symbol = b * circle_conjugate(theta.rational)
    h = hankel_matrix(symbol, length)
    vec = np.zeros((length, b.n), dtype=complex)
    vec[: len(coeffs)] = coeffs
    vec = vec.ravel()
    residual = float(np.linalg.norm(h @ vec) / np.linalg.norm(vec))
    return HermiteWitness(coeffs, g, alpha0, residual, length)


def inner_multiple_basis(theta: FiniteBlaschke, length: int, n: int = 1) -> np.ndarray:
    """Orthonormal basis of ``theta H^2_{C^n}`` intersected with vectors of length ``length``.

    These are the polynomials divisible by ``prod (z - a)^m``; frequency-major layout.
    """
    w = Polynomial.from_roots(theta.zeros).coeffs
    d = len(w) - 1
    cols = []
    for k in range(length - d):
        for i in range(n):
            v = np.zeros((length, n), dtype=complex)
            v[k:k + d + 1, i] = w
            cols.append(v.ravel())
    if not cols:
        return np.zeros((length * n, 0), dtype=complex)
    q, _ = np.linalg.qr(np.stack(cols, axis=1))
    return q
