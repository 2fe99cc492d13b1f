"""Finite sections of block Toeplitz and Hankel operators on vector-valued H^2.

Sections use frequency-major ordering: index ``k * n + i`` is the ``z^k``
coefficient of component ``i``.  Every section carries a rigorous bound on
the operator-norm error made by truncating to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .blaschke import FiniteBlaschke, coanalytic_inner, inner_multiple_basis
from .errors import GuardTooSmall, InputError, NotReducible, NumericalError, ToleranceBelowTailBound
from .rational_core import RationalFunction, partial_fractions
from .symbol import MatrixSymbol
from .tolerances import SECTION_EPS

__all__ = [
    "MatrixSymbol",
    "OperatorSection",
    "toeplitz_section",
    "hankel_section",
    "hankel_matrix",
    "self_commutator_section",
    "certified_length",
    "numerical_rank_and_kernel",
    "hankel_kernel_inner",
    "hankel_kernel_inners",
    "invariance_residual",
    "kernel_invariance",
]

_MAX_LENGTH = 512
_ROW_PAD_TARGET = 1e-9


@dataclass(frozen=True)
class OperatorSection:
    kind: str
    n: int
    N: int
    matrix: np.ndarray
    tail_bound: float
    decay_rate: float
    scale: float = 0.0  # bound on the norm of the full operator
    bandwidth: int = 0  # forward bandwidth of a Toeplitz symbol

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "kind": self.kind,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
            "tail_bound": self.tail_bound,
        }


# ---------------------------------------------------------------------------
# Coefficient tails


def _binomial_geometric_tail(j: int, r: float, start: int) -> float:
    """Upper bound for ``sum_{n >= start} C(n + j - 1, j - 1) r^n``."""
    start = max(start, 0)
    if r == 0:
        return 1.0 if start == 0 else 0.0
    total = 0.0
    n = start
    term = math.comb(n + j - 1, j - 1) * r**n
    while True:
        ratio = r * (n + j) / (n + 1)  # term(n + 1) / term(n), decreasing in n
        if ratio < 1 and (term <= 1e-3 * total or n - start > 64 or term == 0):
            return total + term / (1 - ratio)
        total += term
        term *= ratio
        n += 1


def _entry_tail(f: RationalFunction, start: int, side: int) -> tuple[float, float]:
    """Bound for ``sum_{m >= start} |f^(side * m)|`` and the geometric decay rate."""
    pf = partial_fractions(f)
    total = 0.0
    rate = 0.0
    for term in pf.terms:
        p = term.pole
        inside = abs(p) < 1
        if (side < 0) != inside:
            continue
        r = abs(p) if inside else 1 / abs(p)
        rate = max(rate, r)
        for j, c in enumerate(term.coefficients, start=1):
            if c == 0:
                continue
            if inside:
                # |coef at -m| = |c| C(m-1, j-1) |p|^(m-j)
                total += abs(c) * _binomial_geometric_tail(j, r, start - j)
            else:
                total += abs(c) * abs(p) ** (-j) * _binomial_geometric_tail(j, r, start)
    if side > 0:
        coeffs = pf.polynomial_part.coeffs
        total += float(np.sum(np.abs(coeffs[max(start, 0):])))
    return total, rate


def _symbol_tail(phi: MatrixSymbol, start: int, side: int) -> tuple[float, float]:
    """Bound for ``sum_{m >= start} ||Phi^(side * m)||`` (entrywise sums dominate norms)."""
    total = 0.0
    rate = 0.0
    for row in phi.entries:
        for e in row:
            t, r = _entry_tail(e, start, side)
            total += t
            rate = max(rate, r)
    return total, rate


def _bandwidth(phi: MatrixSymbol) -> int:
    """Largest degree of a polynomial part, i.e. how far the symbol shifts forward."""
    return max(max(partial_fractions(e).polynomial_part.degree, 0) for row in phi.entries for e in row)


# ---------------------------------------------------------------------------
# Sections


def _block_matrix(blocks: np.ndarray) -> np.ndarray:
    rows, cols, n, _ = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(rows * n, cols * n)


def _hankel_from_coeffs(c: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Block Hankel matrix with block (j, k) = ``c[j + k + 1]``."""
    idx = np.arange(rows)[:, None] + np.arange(cols)[None, :] + 1
    return _block_matrix(c[idx])


def hankel_matrix(phi: MatrixSymbol, cols: int, rows: int | None = None) -> np.ndarray:
    """Block Hankel matrix of ``phi`` with block (j, k) = ``Phi^(-j-k-1)``."""
    rows = cols if rows is None else rows
    c = phi.fourier(-np.arange(rows + cols))
    return _hankel_from_coeffs(c, rows, cols)


def toeplitz_section(phi: MatrixSymbol, N: int) -> OperatorSection:
    if N < 1:
        raise InputError("section length must be positive")
    c = phi.fourier(np.arange(-(N - 1), N))
    idx = np.arange(N)[:, None] - np.arange(N)[None, :] + (N - 1)
    pos, rp = _symbol_tail(phi, N, 1)
    neg, rn = _symbol_tail(phi, N, -1)
    scale = _symbol_tail(phi, 0, 1)[0] + _symbol_tail(phi, 1, -1)[0]
    return OperatorSection("toeplitz", phi.n, N, _block_matrix(c[idx]), pos + neg, max(rp, rn), scale, _bandwidth(phi))


def hankel_section(phi: MatrixSymbol, N: int) -> OperatorSection:
    if N < 1:
        raise InputError("section length must be positive")
    tail, rate = _symbol_tail(phi, N + 1, -1)
    scale = _symbol_tail(phi, 1, -1)[0]
    return OperatorSection("hankel", phi.n, N, hankel_matrix(phi, N), tail, rate, scale)


def _row_padding(tail_fn: Callable[[int], float], N: int) -> int:
    rows = N
    while tail_fn(rows + 1) > _ROW_PAD_TARGET and rows < N + _MAX_LENGTH:
        rows += max(8, rows // 2)
    return rows


def self_commutator_section(phi: MatrixSymbol, N: int) -> OperatorSection:
    """Section of ``T_Phi^* T_Phi - T_Phi T_Phi^*`` via the Hankel identity.

    ``[T^*, T] = H_{A}^* H_{A} - H_{B}^* H_{B} + T_{Phi^* Phi - Phi Phi^*}``
    with ``A = Phi_plus^*`` and ``B = Phi_minus^*``; the Toeplitz term
    vanishes for normal symbols (always for scalars).  Hankel rows are padded
    so that dropping the rest costs less than the square of ``1e-9``.
    """
    if N < 1:
        raise InputError("section length must be positive")
    n = phi.n
    plus_tail = lambda s: _symbol_tail(phi, s, 1)[0]
    minus_tail = lambda s: _symbol_tail(phi, s, -1)[0]
    rows = max(_row_padding(plus_tail, N), _row_padding(minus_tail, N))
    m = np.arange(rows + N)
    c_plus = np.conj(np.swapaxes(phi.fourier(m), -1, -2))  # (Phi_plus^*)^(-m) = Phi^(m)^*
    c_minus = phi.fourier(-m)
    h_plus = _hankel_from_coeffs(c_plus, rows, N)
    h_minus = _hankel_from_coeffs(c_minus, rows, N)
    s = h_plus.conj().T @ h_plus - h_minus.conj().T @ h_minus
    s = (s + s.conj().T) / 2
    norm_plus, rate_plus = _symbol_tail(phi, 1, 1)
    norm_minus, rate_minus = _symbol_tail(phi, 1, -1)
    tail = 2 * (norm_plus * plus_tail(N + 1) + norm_minus * minus_tail(N + 1))
    tail += plus_tail(rows + 1) ** 2 + minus_tail(rows + 1) ** 2
    scale = norm_plus**2 + norm_minus**2
    rate = max(rate_plus, rate_minus)
    if n > 1:
        star = phi.adjoint()
        defect = star @ phi - phi @ star
        if not all(e.is_zero() for row in defect.entries for e in row):
            t = toeplitz_section(defect, N)
            s = s + (t.matrix + t.matrix.conj().T) / 2
            # a Toeplitz operator is not compact: its compressions do not converge
            # in norm, so only its full norm bounds the discarded part
            tail += t.scale
            scale += t.scale
            rate = max(rate, t.decay_rate)
    return OperatorSection("self_commutator", n, N, s, tail, rate, scale)


def _structural_length(phi: MatrixSymbol) -> int:
    d = 0
    for row in phi.entries:
        for e in row:
            pf = partial_fractions(e)
            d = max(d, sum(t.order for t in pf.terms) + max(pf.polynomial_part.degree, 0))
    return max(2, d + 2)


def certified_length(phi: MatrixSymbol, eps: float = SECTION_EPS) -> int:
    """Smallest section length whose self-commutator tail bound is at most ``eps``."""

    def tail(N):
        norm_plus = _symbol_tail(phi, 1, 1)[0]
        norm_minus = _symbol_tail(phi, 1, -1)[0]
        return 2 * (norm_plus * _symbol_tail(phi, N + 1, 1)[0] + norm_minus * _symbol_tail(phi, N + 1, -1)[0])

    lo = _structural_length(phi)
    if tail(lo) <= eps:
        return lo
    hi = lo
    while tail(hi) > eps:
        if hi >= _MAX_LENGTH:
            return _MAX_LENGTH
        lo, hi = hi, min(2 * hi, _MAX_LENGTH)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Rank and kernels


@dataclass(frozen=True)
class RankKernel:
    rank: int
    kernel: np.ndarray  # orthonormal columns
    singular_values: np.ndarray
    threshold: float


def numerical_rank_and_kernel(S, tol: float = 1e-8, certify: bool = True, atol: float | None = None) -> RankKernel:
    """Rank and kernel from the SVD.

    Singular values above ``max(tol * sigma_max, atol)`` count toward the
    rank; ``atol`` defaults to a round-off floor tied to the operator scale.
    With ``certify`` the tolerance must exceed the tail bound and singular
    values below the tail bound are treated as zero.
    """
    if isinstance(S, OperatorSection):
        mat, tail, scale = S.matrix, S.tail_bound, S.scale
    else:
        mat, tail, scale = np.asarray(S), 0.0, 0.0
    _, sv, vh = np.linalg.svd(mat)
    smax = float(sv[0]) if sv.size else 0.0
    if certify and tail > 0 and tol <= tail:
        raise ToleranceBelowTailBound(f"tolerance {tol:.3g} does not exceed tail bound {tail:.3g}")
    floor = 64 * np.finfo(float).eps * max(scale, smax) if atol is None else atol
    # with certification, singular values inside the truncation error count as zero
    threshold = max(tol * smax, floor, tail if certify else 0.0)
    rank = int(np.sum(sv > threshold))
    return RankKernel(rank, vh[rank:].conj().T, sv, threshold)


def _hankel_kernel_numeric(f_symbol: MatrixSymbol, length: int) -> np.ndarray:
    rows = length + 64
    h = hankel_matrix(f_symbol, length, rows)
    return numerical_rank_and_kernel(h, 1e-9, certify=False, atol=1e-12 * max(1.0, np.linalg.norm(h, 2))).kernel


def _max_angle(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape[1] != b.shape[1]:
        return math.inf
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(scipy.linalg.subspace_angles(a, b)))


def _validated_inner(phi: MatrixSymbol, theta: FiniteBlaschke) -> FiniteBlaschke:
    length = theta.degree + 8
    numeric = _hankel_kernel_numeric(phi, length)
    exact = inner_multiple_basis(theta, length, phi.n)
    angle = _max_angle(numeric, exact)
    if angle > 1e-6:
        raise NumericalError(f"numerical kernel disagrees with theta H^2 (angle {angle:.3g})")
    return theta


def hankel_kernel_inner(phi: MatrixSymbol) -> FiniteBlaschke:
    """Inner ``theta`` with ``ker H_Phi = theta H^2_{C^n}``.

    Scalar symbols and diagonal symbols whose entries share one inner part.
    """
    if phi.n == 1:
        return _validated_inner(phi, coanalytic_inner(phi[0, 0]))
    thetas = hankel_kernel_inners(phi)
    first = thetas[0]
    if any(t.zeros != first.zeros and not (t.divides(first) and first.divides(t)) for t in thetas[1:]):
        raise NotReducible("diagonal entries have different inner parts; use hankel_kernel_inners")
    return _validated_inner(phi, first)


def hankel_kernel_inners(phi: MatrixSymbol) -> tuple[FiniteBlaschke, ...]:
    """Per-entry inner functions when ``H_Phi`` is block diagonal."""
    co = phi.coanalytic
    if not co.is_diagonal():
        raise NotReducible("Hankel operator is not diagonal")
    out = []
    for i in range(phi.n):
        theta = coanalytic_inner(phi[i, i])
        out.append(_validated_inner(MatrixSymbol.scalar(phi[i, i]), theta))
    return tuple(out)


def invariance_residual(V: np.ndarray, T: OperatorSection, guard: int, kernel: np.ndarray) -> float:
    """``max ||(I - P_K) T v||`` over the orthonormal columns of ``V``.

    ``V`` must vanish on its last ``guard`` blocks so that ``T v`` is not
    affected by truncation; ``kernel`` is an orthonormal basis at full length.
    """
    if guard < T.bandwidth:
        raise GuardTooSmall(f"guard {guard} below symbol bandwidth {T.bandwidth}")
    V = np.asarray(V)
    if V.shape[1] == 0:
        return 0.0
    n = T.n
    if guard and np.max(np.abs(V[(T.N - guard) * n:])) > 1e-12:
        raise InputError("kernel basis is not supported away from the guard band")
    tv = T.matrix @ V
    proj = kernel @ (kernel.conj().T @ tv)
    return float(np.max(np.linalg.norm(tv - proj, axis=0)))


@dataclass(frozen=True)
class InvarianceReport:
    residual: float
    N: int
    guard: int
    small_kernel_dim: int
    full_kernel_dim: int


def kernel_invariance(phi: MatrixSymbol, N: int, guard: int | None = None, tol: float = 1e-8) -> InvarianceReport:
    """Invariance of ``ker [T^*, T]`` under ``T_Phi`` tested on sections."""
    bw = _bandwidth(phi)
    guard = max(bw, 1) if guard is None else guard
    if guard < bw:
        raise GuardTooSmall(f"guard {guard} below symbol bandwidth {bw}")
    small = numerical_rank_and_kernel(self_commutator_section(phi, N - guard), tol, certify=False)
    full = numerical_rank_and_kernel(self_commutator_section(phi, N), tol, certify=False)
    V = np.zeros((N * phi.n, small.kernel.shape[1]), dtype=complex)
    V[: small.kernel.shape[0]] = small.kernel
    T = toeplitz_section(phi, N)
    res = invariance_residual(V, T, guard, full.kernel)
    return InvarianceReport(res, N, guard, small.kernel.shape[1], full.kernel.shape[1])
