"""Weighted shifts: Cowen-Long weights, moments and the Hankel moment test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, InputError, InsufficientMoments

_PSD_TOL = -1e-10
_SPLIT = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class WeightSequence:
    weights: np.ndarray
    generator: str = "explicit"
    # squared weights kept separately so moments avoid a sqrt round trip
    squares: np.ndarray | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w <= 0) or np.any(w > 1):
            raise InputError("weights must lie in (0, 1]")
        object.__setattr__(self, "weights", w)
        sq = w * w if self.squares is None else np.asarray(self.squares, dtype=float)
        object.__setattr__(self, "squares", sq)

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class MomentSequence:
    moments: np.ndarray

    def __len__(self):
        return len(self.moments)

    def hankel(self, k: int, shift: int = 0) -> np.ndarray:
        i = np.arange(k)
        return self.moments[i[:, None] + i[None, :] + shift]


def cowen_long_weights(alpha: float, m: int) -> WeightSequence:
    """``beta_n = sqrt(1 - alpha^(2n + 2))`` for ``n < m``."""
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise InputError("need at least one weight")
    n = np.arange(m)
    squares = -np.expm1((2 * n + 2) * np.log(alpha))
    return WeightSequence(np.sqrt(squares), f"cowen_long(alpha={alpha})", squares)


# Error-free transformations for double-double products.


def _split(a: float) -> tuple[float, float]:
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _dd_mul(hi: float, lo: float, b: float) -> tuple[float, float]:
    p, e = _two_prod(hi, b)
    e += lo * b
    s = p + e
    return s, e - (s - p)


def moment_sequence(beta: WeightSequence) -> MomentSequence:
    """``gamma_0 = 1``, ``gamma_(n+1) = gamma_n beta_n^2``, accumulated in double-double."""
    out = np.empty(len(beta) + 1)
    hi, lo = 1.0, 0.0
    out[0] = 1.0
    for i, w2 in enumerate(beta.squares):
        hi, lo = _dd_mul(hi, lo, float(w2))
        out[i + 1] = hi + lo
    return MomentSequence(out)


@dataclass(frozen=True)
class BergerVerdict:
    subnormal_consistent: bool
    min_eig_h0: float
    min_eig_h1: float
    k: int


def berger_psd_test(gamma: MomentSequence, k: int) -> BergerVerdict:
    """Both ``[gamma_(i+j)]`` and ``[gamma_(i+j+1)]`` must be positive semidefinite."""
    if k < 1 or 2 * k > len(gamma):
        raise InsufficientMoments(f"size {k} needs {2 * k} moments, have {len(gamma)}")
    m0 = float(np.linalg.eigvalsh(gamma.hankel(k))[0])
    m1 = float(np.linalg.eigvalsh(gamma.hankel(k, 1))[0])
    return BergerVerdict(m0 >= _PSD_TOL and m1 >= _PSD_TOL, m0, m1, k)


def cowen_long_report(alpha: float, k: int) -> dict:
    beta = cowen_long_weights(alpha, 2 * k)
    v = berger_psd_test(moment_sequence(beta), k)
    return {
        "alpha": alpha,
        "k": k,
        "min_eig_H0": v.min_eig_h0,
        "min_eig_H1": v.min_eig_h1,
        "verdict": "subnormal_consistent" if v.subnormal_consistent else "not_subnormal",
    }
