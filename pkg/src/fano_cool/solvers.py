"""Small dense linear-algebra kernels: Lyapunov solves, covariance integration, stability tests."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, IllConditioned, StepTooLarge, UnstableDrift

LYAPUNOV_RTOL = 1e-9
MARGINAL_BAND = 1e-9
MAX_EIG_SIZE = 8


class StabilityMethod(str, enum.Enum):
    ROUTH_HURWITZ = "routh-hurwitz"
    EIGENVALUE = "eigenvalue"
    BOTH = "both"


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_real_eigenvalue: float
    method: StabilityMethod
    marginal: bool = False

    @property
    def reliable(self) -> bool:
        return not self.marginal

    def as_dict(self) -> dict:
        return {
            "stable": bool(self.stable),
            "max_real_eigenvalue": float(self.max_real_eigenvalue),
            "method": self.method.value,
            "marginal": bool(self.marginal),
        }


def balance(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal similarity D^-1 M D with power-of-two scalings; returns (balanced, diag(D))."""
    B, (scale, _) = scipy.linalg.matrix_balance(np.asarray(M, dtype=float), permute=False, separate=True)
    return B, scale


def eigenvalues(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_EIG_SIZE:
        raise ValueError(f"matrix size {M.shape[0]} exceeds {MAX_EIG_SIZE}")
    if not np.all(np.isfinite(M)):
        raise ConvergenceFailure("non-finite entries in matrix")
    B, _ = balance(M)
    try:
        return np.linalg.eigvals(B)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigenvalue iteration failed: {exc}") from exc


def marginal_band(M) -> float:
    return MARGINAL_BAND * max(1.0, float(np.linalg.norm(np.asarray(M, dtype=float))))


def stability(M, method: StabilityMethod | str = StabilityMethod.EIGENVALUE) -> StabilityVerdict:
    """Stability verdict for the drift matrix ``M``.

    The eigenvalue test is the production path.  ``routh-hurwitz`` runs the
    Routh array on the characteristic polynomial computed in exact rational
    arithmetic from the floating-point entries, so the verdict is exact for
    the matrix as stored.  ``both`` reports the eigenvalue verdict and flags
    any disagreement as marginal.
    """
    method = StabilityMethod(method)
    M = np.asarray(M, dtype=float)
    ev = eigenvalues(M)
    max_re = float(np.max(ev.real))
    band = marginal_band(M)
    eig_verdict = StabilityVerdict(max_re < 0, max_re, StabilityMethod.EIGENVALUE, abs(max_re) < band)
    if method is StabilityMethod.EIGENVALUE:
        return eig_verdict

    rh = routh_hurwitz(char_poly(M, exact=True), fallback_eigs=ev)
    rh = StabilityVerdict(rh.stable, max_re, rh.method, rh.marginal or abs(max_re) < band)
    if method is StabilityMethod.ROUTH_HURWITZ:
        return rh
    disagree = rh.stable != eig_verdict.stable
    return StabilityVerdict(eig_verdict.stable, max_re, StabilityMethod.BOTH, eig_verdict.marginal or rh.marginal or disagree)


def char_poly(M, exact: bool = False) -> list:
    """Coefficients of det(sI - M), leading 1 first, by the Faddeev-LeVerrier recurrence.

    With ``exact=True`` (or rational input) the recurrence runs on
    :class:`fractions.Fraction` and the result is exact.
    """
    rows = [list(r) for r in (M.tolist() if isinstance(M, np.ndarray) else M)]
    n = len(rows)
    if exact or any(isinstance(x, Rational) and not isinstance(x, (int, bool)) for r in rows for x in r):
        A = np.array([[Fraction(x) for x in r] for r in rows], dtype=object)
        eye = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
        Mk = np.array([[Fraction(0)] * n for _ in range(n)], dtype=object)
        one = Fraction(1)
    else:
        A = np.asarray(rows, dtype=float)
        eye = np.eye(n)
        Mk = np.zeros((n, n))
        one = 1.0

    coeffs = [one]
    for k in range(1, n + 1):
        Mk = A.dot(Mk) + coeffs[-1] * eye
        AM = A.dot(Mk)
        trace = sum(AM[i, i] for i in range(n))
        coeffs.append(-trace / k)
    return coeffs


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


def routh_hurwitz(coeffs, rtol: float = 1e-12, fallback_eigs=None) -> StabilityVerdict:
    """Routh-Hurwitz test on monic polynomial coefficients (highest degree first).

    Each entry of the Routh array carries a magnitude estimate so that a pivot
    lost to cancellation (|pivot| <= rtol * magnitude) is treated as zero.
    Exact (rational) coefficients are compared against zero exactly, and an
    exact zero pivot means "not stable".  Any zero pivot sets ``marginal``; a
    floating-point one makes the verdict fall back to eigenvalues:
    ``fallback_eigs`` if given, else the polynomial roots.
    """
    coeffs = list(coeffs)
    if not coeffs or coeffs[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    lead = coeffs[0]
    coeffs = [c / lead for c in coeffs]
    exact = all(_is_exact(c) for c in coeffs)
    degree = len(coeffs) - 1

    def roots_max_re():
        if fallback_eigs is not None:
            return float(np.max(np.real(fallback_eigs)))
        r = np.roots(np.array([float(c) for c in coeffs]))
        return float(np.max(r.real)) if r.size else -math.inf

    def is_zero(v, mag):
        if exact:
            return v == 0
        return abs(v) <= rtol * mag

    width = degree // 2 + 1
    zero = Fraction(0) if exact else 0.0

    def pad(row):
        return row + [zero] * (width - len(row))

    r0 = pad(coeffs[0::2])
    r1 = pad(coeffs[1::2])
    m0 = [0.0 if exact else abs(c) for c in r0]
    m1 = [0.0 if exact else abs(c) for c in r1]
    first_column = [r0[0]]
    marginal = False

    for _ in range(degree):
        if is_zero(r1[0], m1[0]):
            marginal = True
            break
        first_column.append(r1[0])
        new = []
        mag = []
        for i in range(width - 1):
            new.append((r1[0] * r0[i + 1] - r0[0] * r1[i + 1]) / r1[0])
            # magnitudes only gate float pivots; exact pivots may underflow float()
            mag.append(0.0 if exact else (m1[0] * m0[i + 1] + m0[0] * m1[i + 1]) / abs(r1[0]))
        new.append(zero)
        mag.append(0.0)
        r0, m0, r1, m1 = r1, m1, new, mag
        if len(first_column) == degree + 1:
            break

    max_re = roots_max_re()
    if marginal:
        if exact:
            # an exact zero in the first column rules out Hurwitz stability
            return StabilityVerdict(False, max_re, StabilityMethod.ROUTH_HURWITZ, True)
        return StabilityVerdict(max_re < 0, max_re, StabilityMethod.EIGENVALUE, True)
    sign_changes = sum(1 for a, b in zip(first_column, first_column[1:]) if (a > 0) != (b > 0))
    return StabilityVerdict(sign_changes == 0, max_re, StabilityMethod.ROUTH_HURWITZ, False)


def lyapunov_residual(M, V, N) -> float:
    """||M V + V M^T + N||_F / ||N||_F (absolute when N = 0)."""
    R = M @ V + V @ M.T + N
    nn = np.linalg.norm(N)
    return float(np.linalg.norm(R) / (nn if nn > 0 else 1.0))


def _bartels_stewart(M, N):
    B, d = balance(M)
    Nb = N / np.outer(d, d)
    W = scipy.linalg.solve_continuous_lyapunov(B, -Nb)
    return W * np.outer(d, d)


def solve_lyapunov(M, N, check_stability: bool = True, rtol: float = LYAPUNOV_RTOL) -> np.ndarray:
    """Steady-state covariance V with M V + V M^T = -N.

    Schur-based (Bartels-Stewart) solve on the balanced drift matrix, followed
    by one step of residual correction if the relative residual exceeds
    ``rtol``.  The result is exactly symmetric.
    """
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    if check_stability:
        ev = eigenvalues(M)
        if np.max(ev.real) >= 0:
            raise UnstableDrift(f"drift matrix has eigenvalue with Re = {np.max(ev.real):.3e} >= 0")
    V = _bartels_stewart(M, N)
    V = 0.5 * (V + V.T)
    res = lyapunov_residual(M, V, N)
    if res > rtol:
        R = M @ V + V @ M.T + N
        V = V + _bartels_stewart(M, 0.5 * (R + R.T))
        V = 0.5 * (V + V.T)
        res = lyapunov_residual(M, V, N)
        if res > rtol:
            raise IllConditioned(f"Lyapunov residual {res:.3e} exceeds {rtol:.1e}", V=V, residual=res)
    return V


def solve_lyapunov_kron(M, N) -> np.ndarray:
    """Reference solve through the n^2 x n^2 Kronecker-vectorized system."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    eye = np.eye(n)
    K = np.kron(M, eye) + np.kron(eye, M)
    V = np.linalg.solve(K, -np.asarray(N, dtype=float).reshape(-1)).reshape(n, n)
    return 0.5 * (V + V.T)


def integrate_covariance(M, N, V0, t_final: float, dt: float) -> np.ndarray:
    """Classical RK4 integration of dV/dt = M V + V M^T + N up to ``t_final``.

    Requires dt * ||M||_2 <= 0.1.  The step is shrunk so that an integer number
    of steps lands exactly on ``t_final``.
    """
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    V = np.array(V0, dtype=float)
    if dt <= 0:
        raise StepTooLarge("dt must be positive")
    norm = np.linalg.norm(M, 2)
    if dt * norm > 0.1 * (1.0 + 1e-12):  # dt = 0.1/||M|| itself may round up
        raise StepTooLarge(f"dt * ||M|| = {dt * norm:.3g} exceeds 0.1")
    if t_final <= 0:
        return 0.5 * (V + V.T)
    steps = max(1, math.ceil(t_final / dt - 1e-12))
    h = t_final / steps
    def f(X):
        MX = M @ X
        return MX + MX.T + N

    V = 0.5 * (V + V.T)
    for _ in range(steps):
        k1 = f(V)
        k2 = f(V + 0.5 * h * k1)
        k3 = f(V + 0.5 * h * k2)
        k4 = f(V + h * k3)
        V = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        V = 0.5 * (V + V.T)
    return V
