"""Matrix-valued rational symbols on the circle."""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InputError
from .rational_core import (
    RationalFunction,
    analytic_part,
    as_rational,
    circle_conjugate,
    coanalytic_part,
    fourier_coeffs,
    rational_from_json,
    rational_to_json,
    tilde_transform,
)


class MatrixSymbol:
    """n x n grid of rational functions with no pole near the circle.

    The split follows ``Phi = Phi_minus^* + Phi_plus``: :attr:`plus` keeps the
    non-negative frequencies, :attr:`minus` is analytic with ``minus(0) = 0``.
    """

    def __init__(self, entries: Sequence[Sequence]):
        rows = [[as_rational(e) for e in row] for row in entries]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InputError("symbol entries must form a non-empty square grid")
        for row in rows:
            for e in row:
                e.check_circle()
        self._entries = tuple(tuple(r) for r in rows)
        self.n = n

    @classmethod
    def scalar(cls, f) -> "MatrixSymbol":
        return cls([[f]])

    @classmethod
    def constant(cls, matrix) -> "MatrixSymbol":
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls([[complex(v) for v in row] for row in m])

    @classmethod
    def diagonal(cls, fs: Sequence) -> "MatrixSymbol":
        n = len(fs)
        return cls([[fs[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def entries(self) -> tuple[tuple[RationalFunction, ...], ...]:
        return self._entries

    def __getitem__(self, ij) -> RationalFunction:
        i, j = ij
        return self._entries[i][j]

    def _map(self, fn, transpose: bool = False) -> "MatrixSymbol":
        n = self.n
        if transpose:
            return MatrixSymbol([[fn(self._entries[j][i]) for j in range(n)] for i in range(n)])
        return MatrixSymbol([[fn(self._entries[i][j]) for j in range(n)] for i in range(n)])

    def __call__(self, z) -> np.ndarray:
        """Values at ``z``; shape ``z.shape + (n, n)``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + (self.n, self.n), dtype=complex)
        for i, row in enumerate(self._entries):
            for j, e in enumerate(row):
                out[..., i, j] = e(z)
        return out

    def fourier(self, ks) -> np.ndarray:
        """Fourier coefficient matrices; shape ``(len(ks), n, n)``."""
        ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
        out = np.empty((len(ks), self.n, self.n), dtype=complex)
        for i, row in enumerate(self._entries):
            for j, e in enumerate(row):
                out[:, i, j] = fourier_coeffs(e, ks)
        return out

    @cached_property
    def plus(self) -> "MatrixSymbol":
        return self._map(analytic_part)

    @cached_property
    def coanalytic(self) -> "MatrixSymbol":
        """Negative-frequency part ``Phi - Phi_plus = Phi_minus^*``."""
        return self._map(coanalytic_part)

    @cached_property
    def minus(self) -> "MatrixSymbol":
        return self.coanalytic.adjoint()

    def adjoint(self) -> "MatrixSymbol":
        """Pointwise conjugate transpose on the circle."""
        return self._map(circle_conjugate, transpose=True)

    def tilde(self) -> "MatrixSymbol":
        """``z -> Phi(conj z)^*``."""
        return self._map(tilde_transform, transpose=True)

    def is_analytic(self) -> bool:
        return all(e.is_zero() for row in self.coanalytic.entries for e in row)

    def is_diagonal(self) -> bool:
        return all(self._entries[i][j].is_zero() for i in range(self.n) for j in range(self.n) if i != j)

    def __add__(self, other):
        other = _as_symbol(other, self.n)
        return MatrixSymbol([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)])

    __radd__ = __add__

    def __neg__(self):
        return self._map(lambda e: -e)

    def __sub__(self, other):
        return self + (-_as_symbol(other, self.n))

    def __rsub__(self, other):
        return _as_symbol(other, self.n) - self

    def __matmul__(self, other):
        other = _as_symbol(other, self.n)
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = RationalFunction.constant(0)
                for k in range(n):
                    acc = acc + self._entries[i][k] * other._entries[k][j]
                row.append(acc)
            out.append(row)
        return MatrixSymbol(out)

    def __mul__(self, f):
        """Entrywise product with a scalar function or number."""
        f = as_rational(f)
        return self._map(lambda e: e * f)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[rational_to_json(e) for e in row] for row in self._entries]}

    @classmethod
    def from_json(cls, data) -> "MatrixSymbol":
        entries = [[rational_from_json(e) for e in row] for row in data["entries"]]
        if "n" in data and data["n"] != len(entries):
            raise InputError(f"declared n={data['n']} but got {len(entries)} rows")
        return cls(entries)

    def __repr__(self):
        return f"MatrixSymbol(n={self.n})"


def _as_symbol(x, n: int) -> MatrixSymbol:
    if isinstance(x, MatrixSymbol):
        if x.n != n:
            raise InputError(f"size mismatch: {x.n} vs {n}")
        return x
    if np.ndim(x) == 0 and not isinstance(x, RationalFunction):
        return MatrixSymbol.constant(np.asarray(x, dtype=complex) * np.eye(n))
    if isinstance(x, RationalFunction):
        return MatrixSymbol.diagonal([x] * n)
    return MatrixSymbol.constant(x)
