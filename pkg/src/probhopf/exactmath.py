"""Numeric kernel: Perron roots, common eigenbases, rational snapping.

Exact quantities are carried as :class:`fractions.Fraction`; everything that
has to go through an eigen-decomposition is complex ``float64`` and gets
snapped back to small rationals where possible.
"""
from __future__ import annotations

import contextlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DefectiveError, MalformedError, NonCommutingError

__all__ = [
    "DEFAULTS",
    "override_defaults",
    "perron_root",
    "common_eigenbasis",
    "snap_rational",
    "snap_int",
    "snap_real",
    "format_number",
]


@dataclass
class Defaults:
    tol: float = 1e-9
    max_den: int = 10**6
    seed: int = 0


DEFAULTS = Defaults()

PERRON_MAX_ITER = 100_000
SEPARATION_RETRIES = 8


@contextlib.contextmanager
def override_defaults(**kw):
    """Temporarily change the module-wide ``tol``/``max_den``/``seed``."""
    old = {k: getattr(DEFAULTS, k) for k in kw}
    for k, v in kw.items():
        if not hasattr(DEFAULTS, k):
            raise AttributeError(k)
        setattr(DEFAULTS, k, v)
    try:
        yield DEFAULTS
    finally:
        for k, v in old.items():
            setattr(DEFAULTS, k, v)


def _tol(tol):
    return DEFAULTS.tol if tol is None else tol


def as_float_matrix(M) -> np.ndarray:
    A = np.array([[float(x) for x in row] for row in M], dtype=float) if not isinstance(
        M, np.ndarray) else np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise MalformedError("expected a 2-d matrix")
    return A


def perron_root(M, tol: Optional[float] = None, max_iter: int = PERRON_MAX_ITER) -> float:
    """Largest real eigenvalue of a nonnegative square matrix.

    Power iteration on ``M + I`` from the all-ones vector. The shift makes the
    Perron root strictly dominant in modulus, so periodic matrices (permutation
    matrices of group elements, say) converge too. Stops once the
    Rayleigh-quotient residual ``|Mx - lam x|`` drops below ``tol * |x|``.
    """
    tol = _tol(tol)
    A = as_float_matrix(M)
    n, m = A.shape
    if n != m:
        raise MalformedError(f"perron_root needs a square matrix, got {n}x{m}")
    if n == 0:
        raise MalformedError("empty matrix")
    if (A < 0).any():
        raise MalformedError("perron_root needs a nonnegative matrix")
    shifted = A + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    residual = math.inf
    for _ in range(max_iter):
        Ax = A @ x
        lam = float(x @ Ax)
        residual = float(np.linalg.norm(Ax - lam * x))
        if residual <= tol:
            return lam
        y = shifted @ x
        x = y / np.linalg.norm(y)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (residual {residual:.3e})",
        residual=residual,
    )


def _separation(w: np.ndarray) -> float:
    if len(w) < 2:
        return math.inf
    d = np.abs(w[:, None] - w[None, :])
    d[np.diag_indices(len(w))] = math.inf
    return float(d.min())


def _random_coefficients(k: int, seed: int) -> list[Fraction]:
    rng = random.Random(seed)
    return [Fraction(rng.randint(-10**6, 10**6), 10**6) for _ in range(k)]


def common_eigenbasis(Ms: Sequence, tol: Optional[float] = None, seed: Optional[int] = None):
    """Simultaneous eigenvectors of pairwise-commuting diagonalizable matrices.

    Returns ``(V, lam)`` where column ``j`` of ``V`` is a unit common eigenvector
    and ``lam[i, j]`` is the eigenvalue of ``Ms[i]`` on it.

    A single random rational combination of the inputs is diagonalized. If
    its spectrum is (numerically) degenerate, the seed is bumped and we try
    again, up to 8 times. A degeneracy that survives every retry is accepted
    only when the resulting vectors still pass the residual check, which is
    the case exactly when all inputs act as scalars on that eigenspace.
    """
    tol = _tol(tol)
    seed = DEFAULTS.seed if seed is None else seed
    mats = [np.asarray(M, dtype=complex) for M in Ms]
    if not mats:
        raise MalformedError("need at least one matrix")
    n = mats[0].shape[0]
    for M in mats:
        if M.shape != (n, n):
            raise MalformedError("all matrices must be square and of equal size")
    norms = [float(np.linalg.norm(M)) for M in mats]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i]))
            if c > tol * max(1.0, norms[i] * norms[j]):
                raise NonCommutingError(
                    f"matrices {i} and {j} do not commute (|[Mi,Mj]| = {c:.3e})")

    best = None
    for attempt in range(SEPARATION_RETRIES + 1):
        coeffs = _random_coefficients(len(mats), seed + attempt)
        C = sum(float(c) * M for c, M in zip(coeffs, mats))
        w, V = np.linalg.eig(C)
        gap = _separation(w) / max(1.0, float(np.linalg.norm(C)))
        if best is None or gap > best[0]:
            best = (gap, V)
        if gap > 1e-6:
            break
    V = best[1]

    for j in range(n):
        v = V[:, j]
        k = int(np.argmax(np.abs(v)))
        v = v * (abs(v[k]) / v[k])
        V[:, j] = v / np.linalg.norm(v)

    if n and np.linalg.matrix_rank(V, tol=1e-8) < n:
        raise DefectiveError("combination is defective; no common eigenbasis")

    lam = np.empty((len(mats), n), dtype=complex)
    for i, M in enumerate(mats):
        MV = M @ V
        lam[i] = np.einsum("kj,kj->j", V.conj(), MV)
        res = np.linalg.norm(MV - V * lam[i], axis=0)
        if (res > tol).any():
            j = int(np.argmax(res))
            raise DefectiveError(
                f"vector {j} is not an eigenvector of matrix {i} (residual {res[j]:.3e})")
    return V, lam


def snap_rational(x, tol: Optional[float] = None, max_den: Optional[int] = None) -> Optional[Fraction]:
    """First continued-fraction convergent of ``x`` within ``tol``, or None.

    Convergents with denominator above ``max_den`` are not considered.
    """
    tol = _tol(tol)
    max_den = DEFAULTS.max_den if max_den is None else max_den
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x.denominator <= max_den:
            return x
    elif isinstance(x, complex):
        if abs(x.imag) > tol:
            return None
        x = x.real
    if isinstance(x, float) and not math.isfinite(x):
        return None
    target = Fraction(x)
    r = target
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(r)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_den:
            return None
        cand = Fraction(h1, k1)
        if abs(cand - target) < tol:
            return cand
        frac = r - a
        if frac == 0:
            return None
        r = 1 / frac


def snap_int(x, tol: Optional[float] = None) -> Optional[int]:
    tol = _tol(tol)
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        if abs(x.imag) > tol:
            return None
        x = x.real
    k = round(float(x))
    return k if abs(float(x) - k) <= tol else None


def snap_real(z, tol: Optional[float] = None, max_den: Optional[int] = None):
    """Fraction if ``z`` is (numerically) a small rational, else ``z`` unchanged."""
    q = snap_rational(complex(z) if isinstance(z, (complex, np.complexfloating)) else z,
                      tol, max_den)
    return z if q is None else q


def _fmt_real(x, tol, max_den) -> str:
    if isinstance(x, Fraction):
        q = x
    else:
        q = snap_rational(float(x), tol, max_den)
    if q is not None:
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return f"{float(x):.12g}"


def format_number(z, tol: Optional[float] = None, max_den: Optional[int] = None) -> str:
    """``p/q`` for rationals, ``a+bi`` for complex values, 12 significant digits otherwise."""
    tol = _tol(tol)
    if isinstance(z, (complex, np.complexfloating)):
        re, im = float(z.real), float(z.imag)
        if abs(im) <= tol:
            return _fmt_real(re, tol, max_den)
        im_s = _fmt_real(abs(im), tol, max_den)
        if abs(re) <= tol:
            return f"{'-' if im < 0 else ''}{im_s}i"
        return f"{_fmt_real(re, tol, max_den)}{'-' if im < 0 else '+'}{im_s}i"
    if isinstance(z, (int, np.integer)):
        return str(int(z))
    return _fmt_real(z, tol, max_den)
