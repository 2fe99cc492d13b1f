"""Decision procedures for normality, hyponormality and the normal-or-analytic dichotomy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.optimize

from .blaschke import (
    CoprimeVerdict,
    FiniteBlaschke,
    coanalytic_inner,
    inner_multiple_basis,
    inner_part,
    lcm_all,
    lemma312_test,
    model_space_basis,
)
from .errors import DegreeZero, InputError, WitnessRejected
from .hardy_ops import (
    _bandwidth,
    certified_length,
    kernel_invariance,
    numerical_rank_and_kernel,
    self_commutator_section,
)
from .rational_core import RationalFunction, circle_conjugate, circle_grid, fourier_coeffs, partial_fractions
from .symbol import MatrixSymbol
from .tolerances import INVARIANCE_TOL, verdict_tol

_COEFF_TOL = 1e-9
_NORM_SLACK = 1e-9


def _as_symbol(x) -> MatrixSymbol:
    if isinstance(x, MatrixSymbol):
        return x
    if isinstance(x, FiniteBlaschke):
        return MatrixSymbol.scalar(x.rational)
    return MatrixSymbol.scalar(x)


def _opnorm(m: np.ndarray) -> np.ndarray:
    return np.linalg.norm(m, ord=2, axis=(-2, -1))


# ---------------------------------------------------------------------------
# Normality


@dataclass(frozen=True)
class NormalityCheck:
    normal: bool
    defect: float
    exact_agree: bool


def symbol_normality_check(phi: MatrixSymbol, samples: int = 64, tol: float = 1e-8) -> NormalityCheck:
    """``Phi^* Phi = Phi Phi^*`` on the circle, sampled and as rational identities."""
    z = circle_grid(samples)
    vals = phi(z)
    adj = np.conj(np.swapaxes(vals, -1, -2))
    defect = float(np.max(_opnorm(adj @ vals - vals @ adj)))
    star = phi.adjoint()
    left, right = star @ phi, phi @ star
    exact = all(
        left[i, j].allclose(right[i, j], rtol=1e-9) for i in range(phi.n) for j in range(phi.n)
    )
    return NormalityCheck(defect <= tol and exact, defect, exact)


def operator_normality_test(phi: MatrixSymbol, N: int | None = None, tol: float | None = None) -> bool:
    tol = verdict_tol() if tol is None else tol
    N = certified_length(phi) if N is None else N
    s = self_commutator_section(phi, N)
    return float(np.linalg.norm(s.matrix, 2)) <= tol + s.tail_bound


# ---------------------------------------------------------------------------
# Hyponormality


@dataclass(frozen=True)
class HyponormalityVerdict:
    verdict: str  # hyponormal | not_hyponormal | inconclusive
    min_eigenvalue: float
    tail_bound: float
    witness: MatrixSymbol | None = None
    max_eigenvalue: float = 0.0
    N: int = 0

    @property
    def extreme_eigenvalue(self) -> float:
        """Eigenvalue of largest modulus, keeping its sign."""
        return self.min_eigenvalue if abs(self.min_eigenvalue) > abs(self.max_eigenvalue) else self.max_eigenvalue


def hyponormal_psd_test(
    phi: MatrixSymbol, N: int | None = None, tol: float | None = None, witness: MatrixSymbol | None = None
) -> HyponormalityVerdict:
    """Three-valued PSD verdict for the self-commutator section.

    A certified witness ``K`` upgrades an inconclusive outcome to hyponormal.
    """
    tol = verdict_tol() if tol is None else tol
    N = certified_length(phi) if N is None else N
    s = self_commutator_section(phi, N)
    eig = np.linalg.eigvalsh(s.matrix)
    lo, hi = float(eig[0]), float(eig[-1])
    tail = s.tail_bound
    if lo < -(tol + tail):
        verdict = "not_hyponormal"
    elif tol > tail and lo >= -tol + tail:
        verdict = "hyponormal"
    else:
        verdict = "inconclusive"
    if verdict == "inconclusive" and witness is not None and witness_certify(phi, witness).certified:
        verdict = "hyponormal"
    return HyponormalityVerdict(verdict, lo, tail, witness, hi, N)


@dataclass(frozen=True)
class WitnessCertificate:
    certified: bool
    norm_ok: bool
    analytic_ok: bool
    max_norm: float  # largest sampled ||K(z)||
    norm_upper: float  # sampled max plus the derivative refinement bound
    refined_max: float  # after local maximization in the flagged sample intervals
    residue_max: float
    coefficient_max: float


def _matrix_norm_on_circle(k: MatrixSymbol, t: np.ndarray) -> np.ndarray:
    return _opnorm(k(np.exp(1j * np.asarray(t))))


def _norm_bound(k: MatrixSymbol, samples: int) -> tuple[float, float, float]:
    """Sampled sup of ``||K||``, its Lipschitz upper bound, and a locally refined max."""
    t = 2 * np.pi * np.arange(samples) / samples
    vals = _matrix_norm_on_circle(k, t)
    dk = MatrixSymbol([[e.derivative() for e in row] for row in k.entries])
    lip = float(np.max(_opnorm(dk(np.exp(1j * t))))) * 1.01  # d/dt K(e^{it}) = i z K'(z)
    half = np.pi / samples
    sampled = float(np.max(vals))
    upper = sampled + lip * half
    refined = sampled
    if upper > 1 + _NORM_SLACK:
        for i in np.flatnonzero(vals + lip * half > 1 + _NORM_SLACK):
            res = scipy.optimize.minimize_scalar(
                lambda s: -float(_matrix_norm_on_circle(k, np.array([s]))[0]),
                bounds=(t[i] - half, t[i] + half),
                method="bounded",
                options={"xatol": 1e-10},
            )
            refined = max(refined, -float(res.fun))
    return sampled, upper, refined


def witness_certify(phi: MatrixSymbol, k, samples: int = 256) -> WitnessCertificate:
    """Check ``K`` is contractive and ``Phi - K Phi^*`` is analytic."""
    k = _as_symbol(k)
    if k.n != phi.n:
        raise InputError(f"witness size {k.n} does not match symbol size {phi.n}")
    for row in k.entries:
        for e in row:
            if any(abs(p) < 1 for p, _ in e.poles):
                return WitnessCertificate(False, False, False, math.inf, math.inf, math.inf, math.inf, math.inf)
    sampled, upper, refined = _norm_bound(k, samples)
    norm_ok = sampled <= 1 + _NORM_SLACK and min(upper, refined) <= 1 + _NORM_SLACK

    diff = phi - k @ phi.adjoint()
    residue_max = 0.0
    coeff_max = 0.0
    for row in diff.entries:
        for e in row:
            pf = partial_fractions(e)
            for term in pf.terms:
                if abs(term.pole) < 1:
                    residue_max = max(residue_max, float(np.max(np.abs(term.coefficients))))
            depth = e.den.degree + 8
            coeffs = fourier_coeffs(e, -np.arange(1, depth + 1))
            coeff_max = max(coeff_max, float(np.max(np.abs(coeffs))))
    analytic_ok = residue_max < _COEFF_TOL and coeff_max < _COEFF_TOL
    return WitnessCertificate(norm_ok and analytic_ok, norm_ok, analytic_ok, sampled, upper, refined, residue_max, coeff_max)


# ---------------------------------------------------------------------------
# Inner-function bookkeeping


def minus_inner(phi: MatrixSymbol) -> FiniteBlaschke:
    """``theta`` with ``Phi_minus = B^* (theta I)``: LCM over the anti-analytic entries."""
    return lcm_all([coanalytic_inner(e) for row in phi.coanalytic.entries for e in row])


def plus_inner(phi: MatrixSymbol) -> FiniteBlaschke:
    return lcm_all([inner_part(e) for row in phi.plus.entries for e in row])


def cofactor(phi: MatrixSymbol, theta: FiniteBlaschke | None = None) -> MatrixSymbol:
    """Analytic ``B`` with ``P^perp Phi = conj(theta) B`` on the circle."""
    theta = minus_inner(phi) if theta is None else theta
    return phi.coanalytic * theta.rational


@dataclass(frozen=True)
class DivisibilityCheck:
    holds: bool
    theta_plus: FiniteBlaschke
    theta_minus: FiniteBlaschke


def lemma31_divisibility_check(phi: MatrixSymbol) -> DivisibilityCheck:
    """The inner part of ``Phi_minus`` must divide that of ``Phi_plus`` for hyponormality."""
    t_plus = plus_inner(phi)
    t_minus = minus_inner(phi)
    return DivisibilityCheck(t_minus.divides(t_plus), t_plus, t_minus)


# ---------------------------------------------------------------------------
# Classification


@dataclass
class ClassificationReport:
    hypotheses: dict[str, dict[str, Any]]
    conclusion: str  # normal | analytic | hypotheses_violated | contradiction
    evidence: dict[str, Any] = field(default_factory=dict)
    symbol_id: str | None = None

    def to_json(self) -> dict:
        return {
            "symbol_id": self.symbol_id,
            "checks": self.hypotheses,
            "conclusion": self.conclusion,
            "evidence": self.evidence,
        }


def classify(phi: MatrixSymbol, N: int | None = None, tol: float | None = None, symbol_id: str | None = None) -> ClassificationReport:
    """Run the hypotheses of the normal-or-analytic theorem and report which branch holds."""
    tol = verdict_tol() if tol is None else tol
    N = certified_length(phi) if N is None else N
    checks: dict[str, dict[str, Any]] = {}
    checks["rationality"] = {"pass": True, "n": phi.n}

    theta = minus_inner(phi)
    b = cofactor(phi, theta)
    cop: CoprimeVerdict = lemma312_test(b, theta)
    checks["coprimality"] = {
        "pass": cop.coprime,
        "theta_degree": theta.degree,
        "failing_zeros": [[z.real, z.imag] for z in cop.failing_zeros],
    }

    div = lemma31_divisibility_check(phi)
    checks["divisibility"] = {"pass": div.holds, "theta_plus_degree": div.theta_plus.degree, "theta_minus_degree": div.theta_minus.degree}

    hyp = hyponormal_psd_test(phi, N, tol)
    checks["hyponormality"] = {"pass": hyp.verdict == "hyponormal", "verdict": hyp.verdict}

    guard = max(_bandwidth(phi), 1)
    inv = kernel_invariance(phi, N, guard, tol)
    checks["kernel_invariance"] = {"pass": inv.residual <= INVARIANCE_TOL, "guard": guard}

    s = self_commutator_section(phi, N)
    rank = numerical_rank_and_kernel(s, tol, certify=False).rank
    evidence = {"min_eig": hyp.min_eigenvalue, "tail": hyp.tail_bound, "rank": rank, "residual": inv.residual, "N": N}

    is_normal = float(np.linalg.norm(s.matrix, 2)) <= tol + s.tail_bound
    is_analytic = phi.is_analytic()
    if is_normal:
        conclusion = "normal"
    elif is_analytic:
        conclusion = "analytic"
    elif not all(c["pass"] for c in checks.values()):
        conclusion = "hypotheses_violated"
    else:
        conclusion = "contradiction"
    return ClassificationReport(checks, conclusion, evidence, symbol_id)


# ---------------------------------------------------------------------------
# Counterexample family with a singular cofactor


@dataclass(frozen=True)
class CounterexampleBundle:
    symbol: MatrixSymbol
    theta: FiniteBlaschke
    witness: MatrixSymbol
    predicted_verdicts: dict[str, bool]

    @property
    def predicted_rank(self) -> int:
        return self.theta.degree

    @property
    def predicted_top_eigenvalue(self) -> float:
        return 4.0

    def predicted_commutator(self, N: int) -> np.ndarray:
        """``2 [[P, -P], [-P, P]]`` with ``P`` the model-space projection, frequency-major."""
        q = model_space_basis(self.theta).projection_section(N)
        return np.kron(q, 2 * np.array([[1.0, -1.0], [-1.0, 1.0]]))

    def predicted_kernel(self, N: int) -> np.ndarray:
        """Orthonormal basis of ``theta H^2 (+) theta H^2`` plus ``{f (+) f : f in H_theta}``, truncated."""
        outer = inner_multiple_basis(self.theta, N, 2)
        coeffs = model_space_basis(self.theta).coefficients(N)
        diag = np.zeros((2 * N, coeffs.shape[1]), dtype=complex)
        diag[0::2] = coeffs
        diag[1::2] = coeffs
        q, _ = np.linalg.qr(np.hstack([outer, diag]))
        return q


def remark311_family(theta: FiniteBlaschke) -> CounterexampleBundle:
    """``Phi = [[2 theta + conj theta, conj theta], [conj theta, 2 theta + conj theta]]``."""
    if theta.degree == 0:
        raise DegreeZero("the family needs a nonconstant theta")
    t = theta.rational
    tb = circle_conjugate(t)
    diag = 2 * t + tb
    phi = MatrixSymbol([[diag, tb], [tb, diag]])
    k = MatrixSymbol.constant(0.5 * np.ones((2, 2)))
    verdicts = {"hyponormal": True, "kernel_invariant": True, "normal": False, "analytic": False}
    return CounterexampleBundle(phi, theta, k, verdicts)


# ---------------------------------------------------------------------------
# Scalar witnesses and the rank-equals-degree check


def _disk_point(u: np.ndarray) -> np.ndarray:
    """Map pairs of reals onto the open disk."""
    w = u[0::2] + 1j * u[1::2]
    r = np.abs(w)
    scale = np.where(r > 0, np.tanh(r) / np.where(r > 0, r, 1), 1.0)
    return w * scale


def _blaschke_values(zeros: np.ndarray, phase: float, z: np.ndarray) -> np.ndarray:
    out = np.exp(1j * phase) * np.ones_like(z)
    for a in zeros:
        out = out * (z - a) / (1 - np.conj(a) * z)
    return out


def find_blaschke_witness(phi: MatrixSymbol, max_degree: int = 2, seed: int = 0) -> FiniteBlaschke | None:
    """Search for a finite Blaschke ``b`` of degree at most ``max_degree`` in ``E(phi)``.

    Least squares on the anti-analytic Fourier coefficients of ``phi - b conj(phi)``
    from a Moebius-parameter grid, then exact certification.
    """
    if phi.n != 1:
        raise InputError("witness search is scalar-only")
    f = phi[0, 0]
    fb = circle_conjugate(f)
    M = 512
    z = circle_grid(M)
    fv, fbv = f(z), fb(z)
    depth = max(f.den.degree, 1) + 8
    rng = np.random.default_rng(seed)

    def residual(params, degree):
        zeros = _disk_point(params[1:]) if degree else np.array([])
        coeff = np.fft.fft(fv - _blaschke_values(zeros, params[0], z) * fbv) / M
        neg = coeff[M - depth:]
        return np.concatenate([neg.real, neg.imag])

    for degree in range(max_degree + 1):
        starts = []
        phases = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        if degree == 0:
            starts = [np.array([p]) for p in phases]
        else:
            radii = np.array([0.0, 0.3, 0.6, 0.9])
            for _ in range(48 if degree == 1 else 96):
                r = np.arctanh(rng.choice(radii, degree))
                ang = rng.uniform(0, 2 * np.pi, degree)
                u = np.empty(2 * degree)
                u[0::2], u[1::2] = r * np.cos(ang), r * np.sin(ang)
                starts.append(np.concatenate([[rng.choice(phases)], u]))
        best = None
        for x0 in starts:
            sol = scipy.optimize.least_squares(residual, x0, args=(degree,), xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if best is None or sol.cost < best.cost:
                best = sol
            if sol.cost < 1e-24:
                break
        if best is None or best.cost > 1e-16:
            continue
        zeros = _disk_point(best.x[1:]) if degree else np.array([])
        if np.any(np.abs(zeros) >= 1 - 1e-6):
            continue
        cand = FiniteBlaschke(tuple((complex(a), 1) for a in zeros), np.exp(1j * best.x[0]))
        if witness_certify(phi, cand).certified:
            return cand
    return None


@dataclass(frozen=True)
class RankDegreeCheck:
    holds: bool
    rank: int
    degree: int
    N: int


def nakazi_takahashi_check(phi: MatrixSymbol, b: FiniteBlaschke, tol: float | None = None) -> RankDegreeCheck:
    """Rank of the self-commutator against the degree of a Blaschke witness."""
    tol = verdict_tol() if tol is None else tol
    if phi.n != 1:
        raise InputError("rank-degree check is scalar-only")
    if not witness_certify(phi, b).certified:
        raise WitnessRejected("b is not a certified witness for phi")
    N = max(certified_length(phi), b.degree + 8)
    s = self_commutator_section(phi, N)
    rank = numerical_rank_and_kernel(s, tol).rank
    return RankDegreeCheck(rank == b.degree, rank, b.degree, N)
