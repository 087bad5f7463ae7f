"""Conjugacy classes, class-sum algebra, character table and the E matrix.

Conventions used throughout:

* classes are ordered identity first, then by least element id, and each
  class is represented by its least element;
* ``chars[alpha, i]`` is the value of irreducible character ``alpha`` on class
  ``i``; rows are ordered by degree, then by descending value vectors, which
  puts the trivial character first;
* ``E[i, alpha] = chars[alpha, i] / degree[alpha]`` (class index first). The
  change-of-basis matrix taking central idempotents to normalized class sums
  is its transpose, ``E.T``; the factorization checks use that matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .errors import DefectiveError, MalformedError, SnapError
from .exactmath import DEFAULTS, common_eigenbasis, snap_int
from .groups import FiniteGroup
from .probgroup import ProbabilityGroup


@dataclass(frozen=True)
class Classes:
    members: Tuple[Tuple[int, ...], ...]
    of: Tuple[int, ...]
    inverse_class: Tuple[int, ...]

    @property
    def reps(self) -> Tuple[int, ...]:
        return tuple(c[0] for c in self.members)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.members)

    def __len__(self):
        return len(self.members)


def conjugacy_classes(G: FiniteGroup) -> Classes:
    n = G.order
    of = [-1] * n
    members = []
    for g in range(n):
        if of[g] >= 0:
            continue
        cls = sorted({G.conj(x, g) for x in range(n)})
        for h in cls:
            of[h] = len(members)
        members.append(tuple(cls))
    inv = tuple(of[G.inverse[c[0]]] for c in members)
    return Classes(tuple(members), tuple(of), inv)


def class_constants(G: FiniteGroup, classes: Optional[Classes] = None) -> np.ndarray:
    """``a[i, j, k]`` with ``C_i C_j = sum_k a[i, j, k] C_k``, by counting.

    Counts ``xy = z`` over ``x in C_i``, ``y in C_j`` for every ``z`` and checks
    the count is constant on each class.
    """
    cl = classes or conjugacy_classes(G)
    m = len(cl)
    out = np.zeros((m, m, m), dtype=np.int64)
    for i, j in itertools.product(range(m), repeat=2):
        xs, ys = np.array(cl.members[i]), np.array(cl.members[j])
        prods = G.table[np.ix_(xs, ys)].ravel()
        counts = np.bincount(prods, minlength=G.order)
        for k in range(m):
            vals = counts[list(cl.members[k])]
            if (vals != vals[0]).any():
                raise MalformedError(f"class product count depends on the target element ({i},{j},{k})")
            out[i, j, k] = vals[0]
    return out


def _row_key(degree, row):
    return (degree,) + tuple(v for z in row for v in (-round(z.real, 9), -round(z.imag, 9)))


def character_table(G: FiniteGroup, classes: Optional[Classes] = None,
                    constants: Optional[np.ndarray] = None,
                    tol: Optional[float] = None, seed: Optional[int] = None):
    """Irreducible characters from the class-multiplication matrices.

    The central characters ``omega(C_i) = |C_i| chi(g_i) / chi(1)`` are the
    common eigenvalues of the matrices ``a[i, :, :]``; degrees follow from
    ``chi(1)^2 sum_i |omega_i|^2 / |C_i| = |G|``.

    Returns ``(chars, degrees)`` with ``chars[alpha, i]`` complex.
    """
    tol = DEFAULTS.tol if tol is None else tol
    cl = classes or conjugacy_classes(G)
    a = class_constants(G, cl) if constants is None else constants
    m = len(cl)
    sizes = np.array(cl.sizes, dtype=float)
    _, omega = common_eigenbasis([a[i].astype(float) for i in range(m)], tol=tol, seed=seed)
    chars, degrees = [], []
    for alpha in range(m):
        w = omega[:, alpha]
        d2 = G.order / float(np.sum(np.abs(w) ** 2 / sizes))
        d = snap_int(np.sqrt(d2), max(tol, 1e-7))
        if d is None or d < 1:
            raise SnapError(f"character degree {np.sqrt(d2)!r} is not a positive integer",
                            [(alpha, float(np.sqrt(d2)))])
        degrees.append(d)
        chars.append(w * d / sizes)
    order = sorted(range(m), key=lambda al: _row_key(degrees[al], chars[al]))
    table = np.array([chars[al] for al in order])
    degs = tuple(degrees[al] for al in order)
    first = np.abs(table * sizes[None, :] @ table.conj().T / G.order - np.eye(m)).max()
    if first > max(tol, 1e-8):
        raise DefectiveError(f"character table fails row orthogonality (residual {first:.3e})")
    # clean tiny imaginary/real noise so exact snapping downstream sees clean values
    table = np.where(np.abs(table.imag) < 1e-12, table.real + 0j, table)
    return table, degs


@dataclass(frozen=True, eq=False)
class ClassData:
    group: FiniteGroup
    classes: Classes
    constants: np.ndarray
    chars: np.ndarray
    degrees: Tuple[int, ...]
    tol: float

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> Tuple[int, ...]:
        return self.classes.sizes

    @property
    def inverse_class(self) -> Tuple[int, ...]:
        return self.classes.inverse_class

    @cached_property
    def E(self) -> np.ndarray:
        """``E[i, alpha] = chi_alpha(g_i) / chi_alpha(1)``."""
        return (self.chars / np.array(self.degrees)[:, None]).T

    @cached_property
    def Einv(self) -> np.ndarray:
        return np.linalg.inv(self.E)

    @cached_property
    def char_inverse(self) -> Tuple[int, ...]:
        """``alpha -> alpha*`` with ``chi_alpha* = conj(chi_alpha)``."""
        out = []
        for row in self.chars:
            d = np.abs(self.chars - row.conj()[None, :]).max(axis=1)
            out.append(int(np.argmin(d)))
        return tuple(out)

    @cached_property
    def exact_chars(self):
        """Character values as Fractions, or None if some value is not rational.

        Character values are algebraic integers, so a rational value is an
        integer; snapping to integers avoids mistaking an irrational value
        for a nearby large-denominator fraction.
        """
        out = []
        for row in self.chars:
            r = [snap_int(complex(z), self.tol) for z in row]
            if any(q is None for q in r):
                return None
            out.append([Fraction(q) for q in r])
        return out

    def char_value(self, alpha: int, g: int) -> complex:
        return self.chars[alpha, self.classes.of[g]]


def class_data(G: FiniteGroup, tol: Optional[float] = None, seed: Optional[int] = None) -> ClassData:
    tol = DEFAULTS.tol if tol is None else tol
    cl = conjugacy_classes(G)
    a = class_constants(G, cl)
    chars, degrees = character_table(G, cl, a, tol, seed)
    return ClassData(G, cl, a, chars, degrees, tol)


def closed_form_inverse(cd: ClassData) -> np.ndarray:
    """``n[i, alpha] = chi_alpha(1)^2 a[i*, alpha] |C_i| / |G|``.

    This is the inverse of the change-of-basis matrix ``E.T``; equivalently
    ``inv(E) == n.T``.
    """
    deg2 = np.array(cd.degrees, dtype=float) ** 2
    sizes = np.array(cd.class_sizes, dtype=float)
    E = cd.E
    istar = list(cd.inverse_class)
    return deg2[None, :] * E[istar, :] * sizes[:, None] / cd.order


def e_matrix(cd: ClassData, tol: Optional[float] = None):
    """``(E, inv(E))``, checking ``E inv(E) = I`` and the closed-form inverse."""
    tol = cd.tol if tol is None else tol
    E = cd.E
    if abs(np.linalg.det(E)) < 1e-12:
        raise DefectiveError("E is singular")
    Einv = cd.Einv
    r1 = np.abs(E @ Einv - np.eye(cd.m)).max()
    r2 = np.abs(closed_form_inverse(cd).T - Einv).max()
    if r1 > tol or r2 > tol:
        raise DefectiveError(f"E inverse check failed (numeric {r1:.3e}, closed form {r2:.3e})")
    return E, Einv


def character_multiplicities(cd: ClassData, tol: Optional[float] = None) -> np.ndarray:
    """``N[i, j, k]``: multiplicity of ``chi_k`` in ``chi_i chi_j`` by inner products.

    Exact rational arithmetic when every character value is rational.
    """
    tol = cd.tol if tol is None else tol
    m, sizes = cd.m, cd.class_sizes
    exact = cd.exact_chars
    N = np.zeros((m, m, m), dtype=np.int64)
    if exact is not None:
        for i, j, k in itertools.product(range(m), repeat=3):
            v = sum(sizes[l] * exact[i][l] * exact[j][l] * exact[k][l] for l in range(m))
            v = Fraction(v, cd.order)
            if v.denominator != 1 or v < 0:
                raise SnapError(f"multiplicity {v} is not a nonnegative integer", [(i, j, k, v)])
            N[i, j, k] = int(v)
        return N
    X = cd.chars
    w = np.array(sizes, dtype=float) / cd.order
    raw = np.einsum("l,il,jl,kl->ijk", w, X, X, X.conj())
    return _snap_tensor(raw, tol, "character multiplicity")


def _snap_tensor(raw: np.ndarray, tol: float, what: str) -> np.ndarray:
    raw = np.asarray(raw, dtype=complex)
    k = np.rint(raw.real)
    bad_mask = (np.abs(raw.imag) > tol) | (np.abs(raw.real - k) > tol) | (k < 0)
    if bad_mask.any():
        bad = [tuple(int(x) for x in idx) + (complex(raw[tuple(idx)]),) for idx in np.argwhere(bad_mask)]
        raise SnapError(f"{len(bad)} {what} value(s) are not nonnegative integers", bad)
    return k.astype(np.int64)


def left_multiplication_character_side(cd: ClassData, N: Optional[np.ndarray] = None) -> np.ndarray:
    """``B[i, u, v] = p_v(i, u)`` for normalized characters ``chi/chi(1)``."""
    N = character_multiplicities(cd) if N is None else N
    d = np.array(cd.degrees, dtype=float)
    return N * d[None, None, :] / (d[:, None, None] * d[None, :, None])


def left_multiplication_class_side(cd: ClassData) -> np.ndarray:
    """``Bhat[i, u, v] = phat_v(i, u)`` for normalized class sums ``C/|C|``."""
    s = np.array(cd.class_sizes, dtype=float)
    return cd.constants * s[None, None, :] / (s[:, None, None] * s[None, :, None])


def verify_factorizations(cd: ClassData, tol: Optional[float] = None) -> dict:
    """Residuals of the diagonalizations of both left-multiplication families.

    With ``P = E.T`` (rows = characters, columns = classes):

    * ``B_i = P diag(E[:, i]) P^-1``;
    * ``Bhat_i = P.T diag(E[i, :]) (P.T)^-1``;
    * column ``j`` of ``P`` is an eigenvector of every ``B_i`` with eigenvalue ``P[i, j]``.
    """
    P = cd.E.T
    Pinv = np.linalg.inv(P)
    B = left_multiplication_character_side(cd)
    Bh = left_multiplication_class_side(cd)
    r_char = r_class = r_vec = 0.0
    for i in range(cd.m):
        r_char = max(r_char, np.abs(B[i] - P @ np.diag(cd.E[:, i]) @ Pinv).max())
        r_class = max(r_class, np.abs(Bh[i] - P.T @ np.diag(cd.E[i, :]) @ Pinv.T).max())
        r_vec = max(r_vec, np.abs(B[i] @ P - P * P[i][None, :]).max())
    return {"character-side": float(r_char), "class-side": float(r_class),
            "common-eigenvectors": float(r_vec)}


def orthogonality_check(cd: ClassData) -> dict:
    """Residuals of both orthogonality relations in E-matrix form, and the group form."""
    E, n = cd.E, cd.order
    deg2 = np.array(cd.degrees, dtype=float) ** 2
    sizes = np.array(cd.class_sizes, dtype=float)
    istar = list(cd.inverse_class)
    m = cd.m
    # sum_i chi_a(1)^2 |C_i| a[i,a] a[i*,b] = n delta_ab
    first = deg2[:, None] * np.einsum("i,ia,ib->ab", sizes, E, E[istar, :])
    # sum_a chi_a(1)^2 |C_i| a[i,a] a[j*,a] = n delta_ij
    second = sizes[:, None] * np.einsum("a,ia,ja->ij", deg2, E, E[istar, :])
    G = cd.group
    X = np.array([[cd.char_value(al, g) for g in range(n)] for al in range(m)])
    Xinv = X[:, list(G.inverse)]
    group_form = X @ Xinv.T
    I = n * np.eye(m)
    return {
        "first": float(np.abs(first - I).max()),
        "second": float(np.abs(second - I).max()),
        "group-form": float(np.abs(group_form - I).max()),
    }


def fusion_from_E(cd: ClassData, tol: Optional[float] = None) -> np.ndarray:
    """Character multiplicities rebuilt from ``E``, class sizes and degrees alone."""
    tol = cd.tol if tol is None else tol
    E, n = cd.E, cd.order
    d = np.array(cd.degrees, dtype=float)
    sizes = np.array(cd.class_sizes, dtype=float)
    istar = list(cd.inverse_class)
    raw = np.einsum("li,lj,lk,l->ijk", E, E, E[istar, :], sizes)
    raw = raw * d[:, None, None] * d[None, :, None] * d[None, None, :] / n
    return _snap_tensor(raw, tol, "fusion coefficient")


def classsums_from_E(cd: ClassData, tol: Optional[float] = None) -> np.ndarray:
    """Class-sum structure constants rebuilt from ``E``, class sizes and degrees alone."""
    tol = cd.tol if tol is None else tol
    return _snap_tensor(_classsums_raw(cd.E, cd.class_sizes, cd.degrees, cd.inverse_class, cd.order),
                        tol, "class-sum coefficient")


def _classsums_raw(E, class_dims, char_dims, istar, dim):
    s = np.array(class_dims, dtype=float)
    d2 = np.array(char_dims, dtype=float) ** 2
    m = E.shape[0]
    left = (E[:, None, :] * E[None, :, :] * d2[None, None, :]).reshape(m * m, m)
    raw = (left @ E[list(istar), :].T).reshape(m, m, m)
    return raw * s[:, None, None] * s[None, :, None] / dim


def divisibility_failures(cd: ClassData) -> list:
    """Classes whose size does not divide the group order (always empty)."""
    return [i for i, s in enumerate(cd.class_sizes) if cd.order % s]


def degree_divisibility_failures(cd: ClassData) -> list:
    return [al for al, d in enumerate(cd.degrees) if cd.order % d]


def class_probgroup(cd: ClassData) -> ProbabilityGroup:
    """Normalized class sums with ``p(c_i.c_j=c_k) = a[i,j,k] |C_k| / (|C_i| |C_j|)``."""
    s = cd.class_sizes
    p = {}
    for i, j, k in zip(*np.nonzero(cd.constants)):
        p[(int(i), int(j), int(k))] = Fraction(int(cd.constants[i, j, k]) * s[k], s[i] * s[j])
    names = tuple(f"c{i + 1}" for i in range(cd.m))
    return ProbabilityGroup(names, p, 0, cd.inverse_class, True)
