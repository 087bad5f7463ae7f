"""Functionals, the dual of an abelian probability group, subgroups and quotients.

A functional is a map ``f`` on the elements with ``f(1) = 1`` and
``f(a) f(b) = sum_c p(a.b=c) f(c)``. Writing ``M_a[b, c] = p(a.b=c)``, the
identity says ``M_a f = f(a) f``, so the functionals are exactly the common
eigenvectors of the ``M_a`` scaled to ``f(1) = 1``, and ``f(a)`` is the
eigenvalue of ``M_a``.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (DefectiveError, DualRankError, InconsistentInputError, NotAbelianError,
                     QuotientError)
from .exactmath import DEFAULTS, common_eigenbasis, snap_rational
from .probgroup import ProbabilityGroup, check_axioms, is_abelian, order, sizes


@dataclass(frozen=True, eq=False)
class Functional:
    """Values ``f(a)`` in element order; ``exact`` values are Fractions."""

    values: Tuple[object, ...]
    exact: bool = False

    def __call__(self, a: int):
        return self.values[a]

    def __len__(self):
        return len(self.values)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def residual(self, A: ProbabilityGroup) -> float:
        """Largest ``|f(a)f(b) - sum_c p(a.b=c) f(c)|``."""
        f = self.array
        lhs = np.outer(f, f)
        rhs = np.einsum("abc,c->ab", A.dense, f)
        return float(np.abs(lhs - rhs).max())


def _snap_values(vals: np.ndarray, tol: float) -> Optional[List[Fraction]]:
    out = []
    for z in vals:
        q = snap_rational(complex(z), tol)
        if q is None:
            return None
        out.append(q)
    return out


def _exactly_multiplicative(A: ProbabilityGroup, f: Sequence[Fraction]) -> bool:
    if not A.exact:
        return False
    n = A.n
    for a, b in itertools.product(range(n), repeat=2):
        rhs = sum((A.prob(a, b, c) * f[c] for c in range(n)), Fraction(0))
        if f[a] * f[b] != rhs:
            return False
    return True


def functionals(A: ProbabilityGroup, tol: Optional[float] = None,
                seed: Optional[int] = None) -> List[Functional]:
    """All functionals of an abelian ``A``: ``aug`` first, then ascending by value vector."""
    tol = DEFAULTS.tol if tol is None else tol
    if not is_abelian(A, tol):
        raise NotAbelianError("the dual is only defined here for abelian probability groups")
    P = A.dense
    try:
        _, lam = common_eigenbasis([P[a] for a in range(A.n)], tol=tol, seed=seed)
    except DefectiveError as exc:
        raise DualRankError(f"dual smaller than |A| = {A.n}: {exc}") from None
    out = []
    for j in range(A.n):
        f = lam[:, j] / lam[A.unit, j]
        f = np.where(np.abs(f.imag) <= tol, f.real + 0j, f)
        q = _snap_values(f, tol)
        # snapping proposes Fractions; keep them only if they are exactly multiplicative
        if q is not None and _exactly_multiplicative(A, q):
            out.append(Functional(tuple(q), True))
        else:
            out.append(Functional(tuple(complex(z) for z in f), False))
    for F in out:
        r = F.residual(A)
        if r > tol * max(1.0, A.n):
            raise DefectiveError(f"functional fails multiplicativity (residual {r:.3e})")

    def key(F):
        is_aug = all(abs(z - 1) <= tol for z in F.array)
        return (not is_aug,) + tuple(v for z in F.array for v in (round(z.real, 9), round(z.imag, 9)))

    return sorted(out, key=key)


@dataclass(frozen=True, eq=False)
class DualProbabilityGroup:
    """The functionals of ``A`` with the structure constants of their pointwise products.

    ``phat[chi, psi, theta]`` is the coefficient of ``theta`` in ``chi * psi``.
    ``phat_exact`` holds the same numbers as Fractions when they are certified
    exactly, else ``None``.
    """

    base: ProbabilityGroup
    functionals: Tuple[Functional, ...]
    phat: np.ndarray
    phat_exact: Optional[np.ndarray]
    inverse: Tuple[int, ...]
    tol: float

    @property
    def n(self) -> int:
        return len(self.functionals)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(f"f{i + 1}" for i in range(self.n))

    @cached_property
    def values(self) -> np.ndarray:
        """``values[chi, a] = chi(a)``."""
        return np.array([F.array for F in self.functionals])

    @property
    def dualizable(self) -> bool:
        ph = self.phat
        return bool(np.abs(ph.imag).max() <= self.tol and ph.real.min() >= -self.tol)

    @property
    def exact(self) -> bool:
        return self.phat_exact is not None


def dual(A: ProbabilityGroup, tol: Optional[float] = None, seed: Optional[int] = None) -> DualProbabilityGroup:
    """Dual of a finite abelian probability group.

    ``phat`` solves ``chi(a) psi(a) = sum_theta phat[chi, psi, theta] theta(a)``.
    """
    tol = DEFAULTS.tol if tol is None else tol
    fs = functionals(A, tol, seed)
    if len(fs) < A.n:
        raise DualRankError(f"dual smaller than |A|: {len(fs)} < {A.n}")
    F = np.array([f.array for f in fs])                       # F[theta, a]
    prods = np.einsum("ia,ja->ija", F, F)
    phat = np.einsum("ija,at->ijt", prods, np.linalg.inv(F))
    phat = np.where(np.abs(phat.imag) <= tol, phat.real + 0j, phat)
    res = float(np.abs(np.einsum("ijt,ta->ija", phat, F) - prods).max())
    if res > tol * max(1.0, A.n):
        raise DualRankError(f"functionals do not form a basis (residual {res:.3e})")

    phat_exact = None
    if all(f.exact for f in fs):
        q = [snap_rational(complex(z), tol) for z in phat.flat]
        if all(x is not None for x in q):
            Q = np.array(q, dtype=object).reshape(phat.shape)
            Fx = [f.values for f in fs]
            n = len(fs)
            ok = all(Fx[i][a] * Fx[j][a] == sum((Q[i, j, t] * Fx[t][a] for t in range(n)), Fraction(0))
                     for i, j, a in itertools.product(range(n), range(n), range(A.n)))
            if ok:
                phat_exact = Q

    inv = []
    for f in fs:
        target = np.array([f.array[A.inverse[a]] for a in range(A.n)])
        d = np.abs(F - target[None, :]).max(axis=1)
        k = int(np.argmin(d))
        if d[k] > tol * 10:
            raise DefectiveError("the inverse of a functional is not a functional")
        inv.append(k)
    return DualProbabilityGroup(A, tuple(fs), phat, phat_exact, tuple(inv), tol)


def dual_sizes(D: DualProbabilityGroup) -> list:
    """``s_hat(chi) = 1 / phat_aug(chi, chi^-1)``."""
    out = []
    for chi in range(D.n):
        chi_inv = D.inverse[chi]
        if D.exact:
            v = D.phat_exact[chi, chi_inv, 0]
        else:
            v = D.phat[chi, chi_inv, 0]
            v = v.real if abs(v.imag) <= D.tol else v
        if abs(v) <= D.tol:
            raise InconsistentInputError(f"phat_aug(f{chi + 1}, f{chi_inv + 1}^-1) vanishes")
        out.append(1 / v)
    return out


def as_probgroup(D: DualProbabilityGroup) -> ProbabilityGroup:
    """The dual as a probability group on ``f1..fn`` (unit ``aug``); requires dualizability."""
    if not D.dualizable:
        raise InconsistentInputError("dual has negative or non-real structure constants")
    n = D.n
    if D.exact:
        p = {(i, j, k): D.phat_exact[i, j, k] for i, j, k in itertools.product(range(n), repeat=3)
             if D.phat_exact[i, j, k] != 0}
        return ProbabilityGroup(D.names, p, 0, D.inverse, True)
    p = {(i, j, k): float(D.phat[i, j, k].real) for i, j, k in itertools.product(range(n), repeat=3)
         if abs(D.phat[i, j, k]) > D.tol}
    return ProbabilityGroup(D.names, p, 0, D.inverse, False)


def orthogonality(A: ProbabilityGroup, D: DualProbabilityGroup) -> Tuple[float, float]:
    """Max residuals of the two orthogonality relations between ``A`` and its dual.

    first:  ``sum_a s(a) s_hat(chi) chi(a) psi^-1(a) = n(A) [chi == psi]``
    second: ``sum_chi s_hat(chi) s(b) chi(a) chi^-1(b) = n(A) [a == b]``
    """
    s = np.array([complex(x) for x in sizes(A)])
    sh = np.array([complex(x) for x in dual_sizes(D)])
    nA = complex(order(A))
    V = D.values                                               # V[chi, a]
    Vinv = V[list(D.inverse)]                                  # chi^-1(a)
    first = np.einsum("a,i,ia,ja->ij", s, sh, V, Vinv) - nA * np.eye(D.n)
    second = np.einsum("i,b,ia,ib->ab", sh, s, V, Vinv) - nA * np.eye(A.n)
    return float(np.abs(first).max()), float(np.abs(second).max())


# --- subgroups and quotients ----------------------------------------------

@dataclass(frozen=True)
class ProbabilitySubgroup:
    elements: Tuple[int, ...]

    def __contains__(self, a) -> bool:
        return a in self.elements

    def __len__(self):
        return len(self.elements)

    def names(self, A: ProbabilityGroup) -> Tuple[str, ...]:
        return tuple(A.names[a] for a in self.elements)


def _support(A: ProbabilityGroup) -> np.ndarray:
    S = np.zeros((A.n,) * 3, dtype=bool)
    for key in A.p:
        S[key] = True
    return S


def _closure(A: ProbabilityGroup, supp: np.ndarray, seed_mask: np.ndarray) -> np.ndarray:
    mask = seed_mask.copy()
    mask[A.unit] = True
    inv = np.array([A.inverse[a] for a in range(A.n)])
    while True:
        idx = np.flatnonzero(mask)
        new = mask.copy()
        new[inv[idx]] = True
        new |= supp[np.ix_(idx, idx)].any(axis=(0, 1))
        if (new == mask).all():
            return mask
        mask = new


def is_subgroup(A: ProbabilityGroup, elements: Sequence[int]) -> bool:
    mask = np.zeros(A.n, dtype=bool)
    mask[list(elements)] = True
    return bool(mask[A.unit]) and bool((_closure(A, _support(A), mask) == mask).all())


def closure(A: ProbabilityGroup, elements: Sequence[int]) -> ProbabilitySubgroup:
    """Smallest probability subgroup containing ``elements``."""
    if any(A.inverse[a] is None for a in range(A.n)):
        raise InconsistentInputError("every element needs an inverse")
    mask = np.zeros(A.n, dtype=bool)
    mask[list(elements)] = True
    return ProbabilitySubgroup(tuple(int(a) for a in np.flatnonzero(_closure(A, _support(A), mask))))


def find_subgroups(A: ProbabilityGroup, limit: Optional[int] = None) -> List[ProbabilitySubgroup]:
    """Every probability subgroup, ordered by size then element ids.

    Walks the subgroup lattice upward: each found subgroup ``H`` is extended
    by ``closure(H + {a})`` for every ``a`` outside it. Every subgroup is the
    top of such a chain, so the walk is exhaustive. With ``limit`` set the
    walk stops after that many subgroups and issues a warning.
    """
    if any(A.inverse[a] is None for a in range(A.n)):
        raise InconsistentInputError("every element needs an inverse")
    supp = _support(A)
    start = _closure(A, supp, np.zeros(A.n, dtype=bool))
    seen = {tuple(np.flatnonzero(start))}
    queue = [start]
    truncated = False
    while queue and not truncated:
        H = queue.pop()
        for a in np.flatnonzero(~H):
            seed_mask = H.copy()
            seed_mask[a] = True
            K = _closure(A, supp, seed_mask)
            key = tuple(np.flatnonzero(K))
            if key not in seen:
                seen.add(key)
                queue.append(K)
                if limit is not None and len(seen) >= limit:
                    truncated = True
                    break
    if truncated:
        warnings.warn(f"subgroup search stopped at the limit of {limit} subgroups", RuntimeWarning)
    found = sorted(seen, key=lambda k: (len(k), k))
    return [ProbabilitySubgroup(tuple(int(a) for a in k)) for k in found]


def annihilator(S: Sequence[int], D: DualProbabilityGroup) -> List[int]:
    """Indices of functionals equal to 1 on every element of ``S``."""
    elems = list(S.elements if isinstance(S, ProbabilitySubgroup) else S)
    V = D.values
    return [i for i in range(D.n) if np.abs(V[i, elems] - 1).max(initial=0.0) <= D.tol]


@dataclass(frozen=True, eq=False)
class Quotient:
    """``A//S``: the cosets (``classes[0]`` is ``S``) and the induced probability group."""

    classes: Tuple[Tuple[int, ...], ...]
    group: ProbabilityGroup

    def class_of(self, a: int) -> int:
        return next(i for i, c in enumerate(self.classes) if a in c)


def quotient(A: ProbabilityGroup, S, tol: Optional[float] = None) -> Quotient:
    """Quotient by a probability subgroup.

    ``a ~ b`` iff ``p(a.s1=x) > 0`` and ``p(x.b^-1=s2) > 0`` for some
    ``s1, s2`` in ``S`` and ``x`` in ``A``; ``P(X.Y=Z) = sum_{c in Z} p(a.b=c)``
    for representatives ``a, b``. Every choice of representatives is checked.
    """
    tol = DEFAULTS.tol if tol is None else tol
    if not is_abelian(A, tol):
        raise NotAbelianError("quotients are only defined here for abelian probability groups")
    elems = sorted(S.elements if isinstance(S, ProbabilitySubgroup) else S)
    if not is_subgroup(A, elems):
        raise InconsistentInputError(f"{[A.names[a] for a in elems]} is not a probability subgroup")
    supp = _support(A)
    inv = [A.inverse[a] for a in range(A.n)]
    R1 = supp[:, elems, :].any(axis=1)                          # R1[a, x]: p(a.s1=x) > 0
    R2 = supp[:, :, elems].any(axis=2)[:, inv]                  # R2[x, b]: p(x.b^-1=s2) > 0
    rel = (R1.astype(np.int64) @ R2.astype(np.int64)) > 0
    if not (np.diag(rel).all() and (rel == rel.T).all()
            and ((rel.astype(np.int64) @ rel.astype(np.int64) > 0) == rel).all()):
        raise QuotientError("the coset relation is not an equivalence relation")
    classes, seen = [], set()
    for a in [A.unit] + [x for x in range(A.n) if x != A.unit]:
        if a in seen:
            continue
        c = tuple(int(b) for b in np.flatnonzero(rel[a]))
        seen.update(c)
        classes.append(c)
    if set(classes[0]) != set(elems):
        raise QuotientError("the coset of the unit differs from the subgroup")

    m = len(classes)
    zero = Fraction(0) if A.exact else 0.0
    p = {}
    for X, Y in itertools.product(range(m), repeat=2):
        ref = None
        for a, b in itertools.product(classes[X], classes[Y]):
            row = [sum((A.prob(a, b, c) for c in classes[Z]), zero) for Z in range(m)]
            if ref is None:
                ref = row
            elif any(abs(float(u - v)) > (0 if A.exact else tol) for u, v in zip(row, ref)):
                raise QuotientError(
                    f"P({X + 1}.{Y + 1}) depends on the representatives ({A.names[a]}, {A.names[b]})")
        for Z, v in enumerate(ref):
            if v != 0:
                p[(X, Y, Z)] = v
    names = tuple("[" + A.names[c[0]] + "]" for c in classes)
    Q = ProbabilityGroup(names, p, 0, None, A.exact)
    return Quotient(tuple(classes), Q)


def check_quotient(A: ProbabilityGroup, S, Q: Quotient, tol: Optional[float] = None) -> dict:
    """Axioms of ``A//S`` and the order identity ``n(S) n(A//S) = n(A)``."""
    tol = DEFAULTS.tol if tol is None else tol
    elems = sorted(S.elements if isinstance(S, ProbabilitySubgroup) else S)
    s = sizes(A)
    nS = sum((s[a] for a in elems), Fraction(0) if A.exact else 0.0)
    prod = nS * order(Q.group)
    nA = order(A)
    diff = abs(float(prod - nA))
    return {
        "axioms": check_axioms(Q.group, tol),
        "order-product": diff if not A.exact else (0.0 if prod == nA else diff),
        "order-product-ok": (prod == nA) if A.exact else diff <= tol * max(1.0, float(nA)),
    }
