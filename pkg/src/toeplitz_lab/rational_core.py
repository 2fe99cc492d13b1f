"""Complex rational functions on the unit circle.

A :class:`RationalFunction` is stored as a numerator polynomial over a monic
denominator together with the multiset of its poles.  Arithmetic keeps the
pole multiset exact (poles are merged by matching, never re-solved from the
product denominator), and reduction divides the numerator by ``z - p`` while
it vanishes at a known pole ``p``.  Roots of user-supplied polynomials come
from companion-matrix eigenvalues followed by multiplicity-aware clustering.

Fourier coefficients of boundary values are computed from the partial
fraction decomposition by residues: a pole ``p`` inside the disk contributes
only to negative frequencies, a pole outside only to non-negative ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PoleAtEvaluationPoint, PoleOnCircle, RootFindingFailure
from .tolerances import CIRCLE_BAND, ROOT_TOL

# coefficients below this fraction of the largest one are treated as zero
_COEFF_RTOL = 1e-14
# multiplicity validation: |p^(j)(c)/j!| relative to its magnitude scale
_JET_RTOL = 1e-9
# candidate grouping radii for eigenvalue roots, coarse to fine
_CLUSTER_RADII = (1e-3, 1e-5, 1e-7, ROOT_TOL)

RootMultiset = tuple[tuple[complex, int], ...]


# ---------------------------------------------------------------------------
# Polynomials


class Polynomial:
    """Polynomial with complex coefficients in ascending degree order."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | complex = (0,)):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel().copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        scale = np.max(np.abs(c))
        if scale > 0:
            keep = np.nonzero(np.abs(c) > _COEFF_RTOL * scale)[0]
            c = c[: keep[-1] + 1]
        else:
            c = np.zeros(1, dtype=complex)
        c.flags.writeable = False
        self._c = c

    @classmethod
    def from_roots(cls, roots: RootMultiset | Sequence[complex], lead: complex = 1.0) -> "Polynomial":
        flat = [r for r, m in roots for _ in range(m)] if roots and isinstance(roots[0], tuple) else list(roots)
        if not flat:
            return cls([lead])
        return cls(lead * npoly.polyfromroots(np.asarray(flat, dtype=complex)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self._c) - 1

    @property
    def lead(self) -> complex:
        return complex(self._c[-1])

    def is_zero(self) -> bool:
        return len(self._c) == 1 and self._c[0] == 0

    def __call__(self, z):
        return npoly.polyval(z, self._c)

    def __add__(self, other):
        other = _as_poly(other)
        return Polynomial(npoly.polyadd(self._c, other._c))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return Polynomial(npoly.polymul(self._c, other._c))

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        if len(self._c) == 1:
            return Polynomial([0])
        return Polynomial(npoly.polyder(self._c))

    def conj_coeffs(self) -> "Polynomial":
        return Polynomial(np.conj(self._c))

    def deflate(self, root: complex) -> "Polynomial":
        """Quotient of division by ``z - root``; the remainder is discarded."""
        c = self._c
        n = len(c) - 1
        if n <= 0:
            return Polynomial([0])
        q = np.empty(n, dtype=complex)
        acc = c[-1]
        q[-1] = acc
        for k in range(n - 1, 0, -1):
            acc = c[k] + root * acc
            q[k - 1] = acc
        return Polynomial(q)

    def magnitude(self, z) -> np.ndarray:
        """Sum of |c_k| |z|^k, the natural scale of ``self(z)``."""
        return npoly.polyval(np.abs(z), np.abs(self._c))

    def taylor(self, a: complex, count: int) -> np.ndarray:
        """First ``count`` coefficients of the expansion around ``a``."""
        out = np.zeros(count, dtype=complex)
        c = self._c.copy()
        for j in range(count):
            if len(c) == 0:
                break
            out[j] = npoly.polyval(a, c)
            c = npoly.polyder(c) / (j + 1) if len(c) > 1 else np.zeros(0)
        return out

    def roots(self) -> RootMultiset:
        """Roots with multiplicity, clustered to :data:`ROOT_TOL`."""
        return _clustered_roots(self._c)

    def allclose(self, other, rtol: float = 1e-10) -> bool:
        other = _as_poly(other)
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.max(np.abs(a - b)) <= rtol * scale)

    def __repr__(self):
        return f"Polynomial({np.array2string(self._c, precision=6)})"


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def as_multiset(roots) -> RootMultiset:
    """Normalize a flat root list or a (root, multiplicity) sequence."""
    items = [r if isinstance(r, tuple) else (r, 1) for r in roots]
    return merge_multisets((), tuple((complex(r), int(m)) for r, m in items))


def roots_close(a: complex, b: complex, tol: float = ROOT_TOL) -> bool:
    return abs(a - b) <= tol * (1.0 + max(abs(a), abs(b)))


def merge_multisets(a: RootMultiset, b: RootMultiset, how: str = "sum") -> RootMultiset:
    """Combine two root multisets; ``how`` is ``"sum"`` or ``"max"``."""
    out = [list(x) for x in a]
    for r, m in b:
        for item in out:
            if roots_close(item[0], r):
                item[1] = item[1] + m if how == "sum" else max(item[1], m)
                break
        else:
            out.append([r, m])
    return tuple((complex(r), int(m)) for r, m in out)


def subtract_multiset(a: RootMultiset, b: RootMultiset) -> RootMultiset:
    """``a - b`` as multisets (``b`` must be contained in ``a``)."""
    out = [list(x) for x in a]
    for r, m in b:
        for item in out:
            if roots_close(item[0], r):
                if item[1] < m:
                    raise ValueError("multiset difference is not contained")
                item[1] -= m
                break
        else:
            raise ValueError("multiset difference is not contained")
    return tuple((complex(r), int(m)) for r, m in out if m > 0)


def multiset_contains(big: RootMultiset, small: RootMultiset) -> bool:
    try:
        subtract_multiset(big, small)
    except ValueError:
        return False
    return True


def _clustered_roots(c: np.ndarray) -> RootMultiset:
    c = np.asarray(c, dtype=complex)
    if len(c) <= 1:
        return ()
    scale = np.max(np.abs(c))
    nz = 0
    while nz < len(c) - 1 and abs(c[nz]) <= _COEFF_RTOL * scale:
        nz += 1
    out: list[tuple[complex, int]] = [(0j, nz)] if nz else []
    rest = c[nz:]
    if len(rest) > 1:
        raw = npoly.polyroots(rest)
        if not np.all(np.isfinite(raw)):
            raise RootFindingFailure("companion eigenvalue solve returned non-finite roots")
        out.extend(_group(rest, list(raw), 0))
    return merge_multisets((), tuple(out))


def _group(c: np.ndarray, raw: list[complex], level: int) -> list[tuple[complex, int]]:
    if len(raw) == 1:
        return [(_polish(c, raw[0], 1), 1)]
    radius = _CLUSTER_RADII[level]
    # single-linkage components at this radius
    n = len(raw)
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(raw[i] - raw[j]) <= radius * (1.0 + abs(raw[i])):
                label[find(i)] = find(j)
    comps: dict[int, list[complex]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(raw[i])
    out = []
    for members in comps.values():
        m = len(members)
        if m == 1:
            out.append((_polish(c, members[0], 1), 1))
            continue
        center = complex(np.mean(members))
        if _is_multiple_root(c, center, m):
            out.append((_polish(c, center, m), m))
        elif level + 1 < len(_CLUSTER_RADII):
            out.extend(_group(c, members, level + 1))
        else:
            out.extend((_polish(c, r, 1), 1) for r in members)
    return out


def _jets(c: np.ndarray, z: complex, count: int) -> tuple[np.ndarray, np.ndarray]:
    vals = np.zeros(count, dtype=complex)
    mags = np.zeros(count)
    d = c.copy()
    dm = np.abs(c)
    for j in range(count):
        vals[j] = npoly.polyval(z, d)
        mags[j] = npoly.polyval(abs(z), dm)
        if len(d) > 1:
            d = npoly.polyder(d) / (j + 1)
            dm = npoly.polyder(dm) / (j + 1)
        else:
            d = np.zeros(1, dtype=complex)
            dm = np.zeros(1)
    return vals, mags


def _is_multiple_root(c: np.ndarray, center: complex, m: int) -> bool:
    vals, mags = _jets(c, center, m)
    return bool(np.all(np.abs(vals) <= _JET_RTOL * np.maximum(mags, 1e-300)))


def _polish(c: np.ndarray, z: complex, m: int) -> complex:
    """One guarded Newton step on the (m-1)-th derivative."""
    vals, mags = _jets(c, z, m + 1)
    f, fp = vals[m - 1], vals[m] * m
    if fp == 0:
        return complex(z)
    z_new = z - f / fp
    new_vals, _ = _jets(c, z_new, m)
    if abs(new_vals[m - 1]) < abs(f):
        return complex(z_new)
    return complex(z)


# ---------------------------------------------------------------------------
# Rational functions


@dataclass(frozen=True)
class PoleTerm:
    """Principal part ``sum_j coefficients[j-1] / (z - pole)**j``."""

    pole: complex
    order: int
    coefficients: tuple[complex, ...]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        total = np.zeros_like(z)
        for j, c in enumerate(self.coefficients, start=1):
            total = total + c / (z - self.pole) ** j
        return total


@dataclass(frozen=True)
class PrincipalPartDecomposition:
    polynomial_part: Polynomial
    terms: tuple[PoleTerm, ...]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        total = self.polynomial_part(z) + np.zeros_like(z)
        for t in self.terms:
            total = total + t(z)
        return total

    def reassemble(self) -> "RationalFunction":
        return _from_terms(self.polynomial_part, self.terms)


class RationalFunction:
    """Reduced ratio ``num / den`` with monic ``den`` and known poles.

    ``poles`` may be supplied when the denominator's roots are already known
    (e.g. from arithmetic on other rational functions); ``den`` is then
    rebuilt from them.  Otherwise they are computed from ``den``.
    """

    __slots__ = ("_num", "_den", "_poles", "__dict__")

    def __init__(self, num, den=1.0, *, poles: RootMultiset | None = None, reduce: bool = True):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if poles is None:
            poles = den.roots()
            lead = den.lead
        else:
            poles = tuple((complex(p), int(m)) for p, m in poles if m > 0)
            lead = den.lead if den.degree == sum(m for _, m in poles) else 1.0
        num = Polynomial(num.coeffs / lead)
        if num.is_zero():
            poles = ()
        elif reduce:
            num, poles = _cancel(num, poles)
        self._num = num
        self._poles = poles
        self._den = Polynomial.from_roots(poles)

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, c: complex) -> "RationalFunction":
        return cls(Polynomial([c]), poles=())

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFunction":
        return cls(Polynomial(coeffs), poles=())

    @classmethod
    def laurent(cls, coeffs: dict[int, complex]) -> "RationalFunction":
        """Trigonometric polynomial ``sum_k coeffs[k] z**k`` (negative k allowed)."""
        if not coeffs:
            return cls.constant(0)
        lo = min(0, min(coeffs))
        hi = max(0, max(coeffs))
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in coeffs.items():
            c[k - lo] += v
        return cls(Polynomial(c), poles=((0j, -lo),) if lo < 0 else ())

    @classmethod
    def from_roots(cls, zeros, poles, gain: complex = 1.0) -> "RationalFunction":
        return cls(Polynomial.from_roots(as_multiset(zeros), gain), poles=as_multiset(poles))

    # accessors -------------------------------------------------------------

    @property
    def num(self) -> Polynomial:
        return self._num

    @property
    def den(self) -> Polynomial:
        return self._den

    @property
    def poles(self) -> RootMultiset:
        return self._poles

    @cached_property
    def zeros(self) -> RootMultiset:
        return self._num.roots()

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_polynomial(self) -> bool:
        return not self._poles

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        d = self._den(z_arr)
        scale = self._den.magnitude(z_arr)
        if np.any(np.abs(d) <= 1e-13 * np.maximum(scale, 1e-300)):
            raise PoleAtEvaluationPoint(f"denominator vanishes at evaluation point(s) {z!r}")
        out = self._num(z_arr) / d
        return complex(out) if np.ndim(out) == 0 else out

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = as_rational(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lcm = merge_multisets(self._poles, other._poles, "max")
        fa = Polynomial.from_roots(subtract_multiset(lcm, self._poles))
        fb = Polynomial.from_roots(subtract_multiset(lcm, other._poles))
        return RationalFunction(self._num * fa + other._num * fb, poles=lcm)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self._num, poles=self._poles, reduce=False)

    def __sub__(self, other):
        return self + (-as_rational(other))

    def __rsub__(self, other):
        return as_rational(other) - self

    def __mul__(self, other):
        other = as_rational(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.constant(0)
        poles = merge_multisets(self._poles, other._poles, "sum")
        return RationalFunction(self._num * other._num, poles=poles)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of the zero function")
        lead = self._num.lead
        return RationalFunction(Polynomial(self._den.coeffs / lead), poles=self.zeros)

    def __truediv__(self, other):
        return self * as_rational(other).reciprocal()

    def __rtruediv__(self, other):
        return as_rational(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = RationalFunction.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "RationalFunction":
        n, d = self._num, self._den
        top = n.derivative() * d - n * d.derivative()
        return RationalFunction(top, poles=tuple((p, 2 * m) for p, m in self._poles))

    def allclose(self, other, rtol: float = 1e-9, samples: int = 16, seed: int = 0) -> bool:
        """Compare values at random points of the annulus 0.3 < |z| < 0.9."""
        other = as_rational(other)
        rng = np.random.default_rng(seed)
        z = rng.uniform(0.3, 0.9, samples) * np.exp(2j * np.pi * rng.uniform(size=samples))
        a, b = self(z), other(z)
        scale = np.maximum(np.abs(a), np.abs(b)) + 1.0
        return bool(np.all(np.abs(a - b) <= rtol * scale))

    # analysis ----------------------------------------------------------------

    @cached_property
    def partial_fractions(self) -> PrincipalPartDecomposition:
        if not self._poles:
            return PrincipalPartDecomposition(self._num, ())
        quotient, _ = npoly.polydiv(self._num.coeffs, self._den.coeffs)
        terms = []
        for i, (p, m) in enumerate(self._poles):
            others = self._poles[:i] + self._poles[i + 1:]
            q = Polynomial.from_roots(others)
            t = _series_divide(self._num.taylor(p, m), q.taylor(p, m))
            coeffs = tuple(complex(t[m - j]) for j in range(1, m + 1))
            terms.append(PoleTerm(p, m, coeffs))
        return PrincipalPartDecomposition(Polynomial(quotient), tuple(terms))

    def check_circle(self) -> None:
        for p, _ in self._poles:
            if abs(1.0 - abs(p)) < CIRCLE_BAND:
                raise PoleOnCircle(f"pole {p} lies within {CIRCLE_BAND:g} of the unit circle")

    def taylor(self, a: complex, count: int) -> np.ndarray:
        """Taylor coefficients f^(j)(a)/j! for j < count."""
        if abs(self._den(a)) <= 1e-13 * self._den.magnitude(a):
            raise PoleAtEvaluationPoint(f"pole at expansion point {a}")
        return _series_divide(self._num.taylor(a, count), self._den.taylor(a, count))

    def __repr__(self):
        return f"RationalFunction(num={self._num.coeffs!r}, den={self._den.coeffs!r})"


def as_rational(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x, poles=())
    return RationalFunction.constant(complex(x))


def _cancel(num: Polynomial, poles: RootMultiset) -> tuple[Polynomial, RootMultiset]:
    kept = []
    for p, m in poles:
        while m > 0 and num.degree > 0 and abs(num(p)) <= ROOT_TOL * num.magnitude(p):
            num = num.deflate(p)
            m -= 1
        if m:
            kept.append((p, m))
    return num, tuple(kept)


def _series_divide(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = a[k] - np.dot(out[:k], b[k:0:-1]) if k else a[0]
        out[k] = acc / b[0]
    return out


def _from_terms(poly: Polynomial, terms: Sequence[PoleTerm]) -> RationalFunction:
    poles = tuple((t.pole, t.order) for t in terms)
    den = Polynomial.from_roots(poles)
    num = poly * den
    for i, t in enumerate(terms):
        others = Polynomial.from_roots(poles[:i] + poles[i + 1:])
        for j, c in enumerate(t.coefficients, start=1):
            num = num + c * Polynomial.from_roots(((t.pole, t.order - j),)) * others
    return RationalFunction(num, poles=poles)


# ---------------------------------------------------------------------------
# Public operations


def rat_eval(f: RationalFunction, z):
    return f(z)


def poles_and_zeros(f: RationalFunction) -> tuple[RootMultiset, RootMultiset]:
    return f.zeros, f.poles


def partial_fractions(f: RationalFunction) -> PrincipalPartDecomposition:
    return f.partial_fractions


def fourier_coeffs(f: RationalFunction, ks) -> np.ndarray:
    """Fourier coefficients of ``t -> f(e^{it})`` at the integer frequencies ``ks``."""
    f.check_circle()
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    out = np.zeros(ks.shape, dtype=complex)
    pf = f.partial_fractions
    pc = pf.polynomial_part.coeffs
    mask = (ks >= 0) & (ks < len(pc))
    out[mask] += pc[ks[mask]]
    for t in pf.terms:
        p = t.pole
        for j, c in enumerate(t.coefficients, start=1):
            if c == 0:
                continue
            if abs(p) < 1:
                sel = ks <= -j
                n = -ks[sel] - j
                out[sel] += c * _binom(n + j - 1, j - 1) * np.power(complex(p), n)
            else:
                sel = ks >= 0
                n = ks[sel]
                out[sel] += c * (-1) ** j * p ** (-j) * _binom(n + j - 1, j - 1) * np.power(1 / complex(p), n)
    if pf.terms and all(abs(t.pole) > 1 for t in pf.terms):
        # Large poles make the polynomial part cancel against the principal
        # parts at low frequencies; Taylor division at 0 is stable there.
        # Beyond the window the residue errors are damped by |p|^-k.
        span = len(pc) + sum(t.order for t in pf.terms) + 32
        low = (ks >= 0) & (ks < span)
        if np.any(low):
            count = int(ks[low].max()) + 1
            out[low] = f.taylor(0, count)[ks[low]]
    return out


def _binom(n: np.ndarray, k: int) -> np.ndarray:
    out = np.ones(n.shape, dtype=float)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


def fourier_coeff(f: RationalFunction, k: int) -> complex:
    return complex(fourier_coeffs(f, [k])[0])


def coanalytic_part(f: RationalFunction) -> RationalFunction:
    """The part of ``f`` with negative frequencies (principal parts at poles inside the disk)."""
    f.check_circle()
    inside = [t for t in f.partial_fractions.terms if abs(t.pole) < 1]
    if not inside:
        return RationalFunction.constant(0)
    return _from_terms(Polynomial([0]), inside)


def analytic_part(f: RationalFunction) -> RationalFunction:
    f.check_circle()
    pf = f.partial_fractions
    outside = [t for t in pf.terms if abs(t.pole) > 1]
    return _from_terms(pf.polynomial_part, outside)


def circle_conjugate(f: RationalFunction) -> RationalFunction:
    """Rational ``g`` with ``g(z) = conj(f(z))`` for ``|z| = 1``, i.e. ``g(z) = conj(f(1/conj z))``."""
    if f.is_zero():
        return f
    a = f.num.degree
    b = sum(m for _, m in f.poles)
    rev = Polynomial(np.conj(f.num.coeffs)[::-1])
    scale = 1.0 + 0j
    poles: list[tuple[complex, int]] = []
    for p, m in f.poles:
        if p == 0:
            continue
        scale *= (-np.conj(p)) ** m
        poles.append((1 / np.conj(p), m))
    if b >= a:
        num = rev * Polynomial([0] * (b - a) + [1])
    else:
        num = rev
        poles.append((0j, a - b))
    return RationalFunction(Polynomial(num.coeffs / scale), poles=tuple(poles))


def analytic_split(f: RationalFunction) -> tuple[RationalFunction, RationalFunction]:
    """Return ``(f_plus, f_minus)`` with ``f = conj(f_minus) + f_plus`` on the circle.

    ``f_plus`` carries the non-negative frequencies (constant included) and
    ``f_minus`` is analytic in the disk with ``f_minus(0) = 0``.
    """
    return analytic_part(f), circle_conjugate(coanalytic_part(f))


def tilde_transform(f: RationalFunction) -> RationalFunction:
    """``z -> conj(f(conj z))``: conjugate every coefficient."""
    return RationalFunction(
        f.num.conj_coeffs(), poles=tuple((complex(np.conj(p)), m) for p, m in f.poles), reduce=False
    )


class SupNormEstimate(NamedTuple):
    value: float
    refinement_bound: float

    @property
    def upper(self) -> float:
        return self.value + self.refinement_bound


def circle_grid(size: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(size) / size)


def sup_norm_grid(f: RationalFunction, grid_size: int = 256) -> SupNormEstimate:
    """Grid maximum of |f| on the circle plus a derivative-based gap bound.

    Every circle point lies within arc length ``pi / grid_size`` of the grid,
    so ``value + refinement_bound`` bounds the true sup-norm whenever the grid
    maximum of |f'| bounds its true maximum.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    f.check_circle()
    z = circle_grid(grid_size)
    value = float(np.max(np.abs(f(z))))
    slope = float(np.max(np.abs(f.derivative()(z))))
    return SupNormEstimate(value, slope * math.pi / grid_size)


def _coefficient_span(f: RationalFunction, eps: float = 1e-18) -> tuple[int, int]:
    """Frequency window outside which the coefficients of ``f`` are below ``eps`` relative."""
    lo = hi = 0
    pf = partial_fractions(f)
    hi = max(pf.polynomial_part.degree, 0)
    for t in pf.terms:
        r = abs(t.pole) if abs(t.pole) < 1 else 1 / abs(t.pole)
        # geometric decay, padded for the polynomial growth of higher-order terms
        k = (t.order + 1) * 8 + (int(math.ceil(math.log(eps) / math.log(r))) if r > 0 else 0)
        if abs(t.pole) < 1:
            lo = max(lo, k + t.order)
        else:
            hi = max(hi, k)
    return lo, hi


def h2_inner(f: RationalFunction, g: RationalFunction) -> complex:
    """``<f, g>`` in L^2 of the circle as ``sum_k f^(k) conj(g^(k))``.

    Summing coefficients avoids forming ``f * conj(g)``, whose partial
    fractions are ill conditioned when poles of ``f`` and reflected poles of
    ``g`` nearly collide.
    """
    lo_f, hi_f = _coefficient_span(f)
    lo_g, hi_g = _coefficient_span(g)
    ks = np.arange(-min(lo_f, lo_g), min(hi_f, hi_g) + 1)
    return complex(np.sum(fourier_coeffs(f, ks) * np.conj(fourier_coeffs(g, ks))))


# ---------------------------------------------------------------------------
# JSON


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    re, im = x
    return complex(float(re), float(im))


def polynomial_to_json(p: Polynomial) -> list[list[float]]:
    return [complex_to_json(c) for c in p.coeffs]


def polynomial_from_json(data) -> Polynomial:
    return Polynomial([complex_from_json(c) for c in data])


def rational_to_json(f: RationalFunction) -> dict:
    return {"num": polynomial_to_json(f.num), "den": polynomial_to_json(f.den)}


def rational_from_json(data) -> RationalFunction:
    if "laurent" in data:
        return RationalFunction.laurent({int(k): complex_from_json(v) for k, v in data["laurent"].items()})
    return RationalFunction(polynomial_from_json(data["num"]), polynomial_from_json(data.get("den", [[1, 0]])))
