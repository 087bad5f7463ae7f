"""Modular data of the Drinfeld double ``D(G)`` of a finite group and checks on it.

Simple modules of ``D(G)`` are pairs ``(a, pi)``: a conjugacy class ``a`` of
``G`` with representative ``r_a`` and an irreducible character ``pi`` of the
centralizer ``C_G(r_a)``. Simples are ordered by class (class-data order),
then by the centralizer's character-table order, so the trivial ``pi`` comes
first in every block.

The S-matrix is the usual one for group doubles::

    S[(a,al), (b,be)] = 1/|G| * sum over commuting g in K_a, h in K_b of
        al(x_g^-1 h x_g) * be(y_h^-1 g y_h)

where ``x_g`` is the least element with ``x_g r_a x_g^-1 = g``. With this
normalization ``S[0, j] = dim_j / |G|``; ``s_tilde = |G| S``. The complex
conjugate matrix is an equally valid S-matrix; this one is picked because
with it the simple ``(a, trivial)`` restricts to the normalized class sum of
``a`` itself rather than of its inverse class.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from .classdata import ClassData, _classsums_raw, _snap_tensor, class_data, conjugacy_classes
from .errors import DefectiveError, InputError, SnapError
from .exactmath import DEFAULTS, snap_int
from .fusion import FusionRing, to_probgroup, validate
from .groups import FiniteGroup

MAX_ORDER = 48


@dataclass(frozen=True, eq=False)
class DoubleData:
    group: FiniteGroup
    simples: Tuple[Tuple[int, int], ...]          # (class index, centralizer irrep index)
    labels: Tuple[str, ...]
    dims: Tuple[int, ...]
    S: np.ndarray                                  # normalized: S[0, j] = dims[j] / |G|
    dual: Tuple[int, ...]
    class_sizes: Tuple[int, ...]
    beta: Tuple[int, ...]                          # class index -> its (class, trivial) simple
    centralizers: Tuple[ClassData, ...]
    tol: float

    @property
    def rank(self) -> int:
        return len(self.simples)

    @property
    def D(self) -> int:
        """Dimension of ``kG``."""
        return self.group.order

    @property
    def dim(self) -> int:
        """Dimension of the double, ``|G|^2``."""
        return self.group.order ** 2

    @property
    def s_tilde(self) -> np.ndarray:
        return self.D * self.S

    @cached_property
    def E(self) -> np.ndarray:
        """``a[i, j] = s[i, j] / (D s[0, i] s[0, j])``."""
        s0 = self.S[0]
        return self.S / (self.D * np.outer(s0, s0))

    @cached_property
    def fusion(self) -> np.ndarray:
        return verlinde(self)

    def fusion_ring(self) -> FusionRing:
        return FusionRing(self.fusion, self.dual, self.labels)


def _least_conjugators(G: FiniteGroup, rep: int) -> Dict[int, int]:
    out = {}
    for x in range(G.order):
        g = G.conj(x, rep)
        if g not in out:
            out[g] = x
    return out


def build_double(G: FiniteGroup, tol: Optional[float] = None, seed: Optional[int] = None,
                 max_order: int = MAX_ORDER) -> DoubleData:
    """Simples, dimensions, S-matrix and duality of ``D(G)``.

    Raises ``InputError`` when ``|G|`` exceeds ``max_order`` and
    ``DefectiveError`` when the S-matrix fails its structural checks.
    """
    tol = DEFAULTS.tol if tol is None else tol
    n = G.order
    if n > max_order:
        raise InputError(f"|G| = {n} exceeds the double's size cap of {max_order}")
    cl = conjugacy_classes(G)
    m = len(cl)

    cents, cpos, xs, cls_of = [], [], {}, cl.of
    for a in range(m):
        r = cl.reps[a]
        C = G.centralizer(r)                       # ascending ids, matches G.subgroup order
        cents.append(class_data(G.subgroup(C, f"C({G.names[r]})"), tol, seed))
        cpos.append({h: i for i, h in enumerate(C)})
        xs.update(_least_conjugators(G, r))

    simples, labels, dims, start = [], [], [], []
    for a in range(m):
        start.append(len(simples))
        for pi in range(cents[a].m):
            simples.append((a, pi))
            dims.append(cl.sizes[a] * cents[a].degrees[pi])
            labels.append(f"({G.names[cl.reps[a]]},{pi + 1})")
    r_tot = len(simples)

    def local_values(g: int, h: int) -> np.ndarray:
        """Conjugated centralizer characters of class(g), evaluated at ``x_g^-1 h x_g``."""
        a = cls_of[g]
        x = xs[g]
        k = G.mul(G.mul(G.inverse[x], h), x)
        return cents[a].chars[:, cents[a].classes.of[cpos[a][k]]]

    S = np.zeros((r_tot, r_tot), dtype=complex)
    for g in range(n):
        for h in G.centralizer(g):
            u = local_values(g, h)
            v = local_values(h, g)
            a, b = cls_of[g], cls_of[h]
            S[start[a]:start[a] + len(u), start[b]:start[b] + len(v)] += np.outer(u, v)
    S /= n

    dims_arr = np.array(dims, dtype=float)
    checks = {
        "first-row": np.abs(n * S[0] - dims_arr).max(),
        "first-column": np.abs(n * S[:, 0] - dims_arr).max(),
        "symmetry": np.abs(S - S.T).max(),
        "unitarity": np.abs(S @ S.conj().T - np.eye(r_tot)).max(),
    }
    if abs(sum(d * d for d in dims) - n * n) != 0:
        raise DefectiveError(f"sum of squared dimensions is not |G|^2 = {n * n}")
    bad = {k: v for k, v in checks.items() if v > tol}
    if bad:
        raise DefectiveError(f"S-matrix checks failed: {bad}")

    S2 = S @ S
    dual = []
    for j in range(r_tot):
        k = int(np.argmax(np.abs(S2[j])))
        if abs(S2[j, k] - 1) > tol or np.abs(np.delete(S2[j], k)).max(initial=0.0) > tol:
            raise DefectiveError("S^2 is not a permutation matrix")
        dual.append(k)
    if any(dual[dual[j]] != j for j in range(r_tot)):
        raise DefectiveError("the duality read from S^2 is not an involution")

    return DoubleData(G, tuple(simples), tuple(labels), tuple(dims), S, tuple(dual),
                      tuple(cl.sizes), tuple(start), tuple(cents), tol)


def verlinde(dd: DoubleData, tol: Optional[float] = None) -> np.ndarray:
    """``N[i, j, k] = sum_r s[i,r] s[j,r] s[k*,r] / s[0,r]``, snapped to nonnegative integers."""
    tol = dd.tol if tol is None else tol
    s = dd.S
    r = dd.rank
    left = (s[:, None, :] * s[None, :, :] / s[0][None, None, :]).reshape(r * r, r)
    raw = (left @ s[list(dd.dual)].T).reshape(r, r, r)
    return _snap_tensor(raw, tol, "Verlinde coefficient")


def check_E_symmetry(dd: DoubleData) -> float:
    return float(np.abs(dd.E - dd.E.T).max())


def class_dims(dd: DoubleData) -> np.ndarray:
    """Dimensions of the class sums of ``D(G)``, from ``E`` alone.

    ``dim(C_i) = dim D(G) / sum_al dim_al^2 a[i, al] a[i*, al]``.
    """
    E = dd.E
    d2 = np.array(dd.dims, dtype=float) ** 2
    denom = np.einsum("a,ia,ia->i", d2, E, E[list(dd.dual)])
    return (dd.dim / denom).real


def class_sum_constants(dd: DoubleData) -> np.ndarray:
    """Raw ``Nhat[i, j, k]`` with ``C_i C_j = sum_k Nhat[i,j,k] C_k`` in ``D(G)``."""
    return _classsums_raw(dd.E, class_dims(dd), dd.dims, dd.dual, dd.dim)


@dataclass
class DualIsoReport:
    residual: float
    permutation: Optional[Tuple[int, ...]]
    class_dims: Tuple[float, ...]
    size_realization: bool
    unmatched: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.permutation is not None and self.size_realization


def _find_isomorphism(P: np.ndarray, Q: np.ndarray, tol: float) -> Optional[Tuple[int, ...]]:
    """A relabeling ``pi`` with ``P[i,j,k] == Q[pi i, pi j, pi k]``, by backtracking."""
    n = P.shape[0]
    sig = lambda T: [tuple(np.round(np.sort(T[i].ravel()), 8)) for i in range(n)]
    sp, sq = sig(P), sig(Q)
    cands = [[j for j in range(n) if sp[i] == sq[j]] for i in range(n)]
    perm = [-1] * n
    used = [False] * n

    def consistent(i):
        done = [k for k in range(n) if perm[k] >= 0]
        idx = np.array(done)
        img = np.array([perm[k] for k in done])
        return np.abs(P[np.ix_(idx, idx, idx)] - Q[np.ix_(img, img, img)]).max() <= tol

    def go(i):
        if i == n:
            return True
        for j in cands[i]:
            if used[j]:
                continue
            perm[i], used[j] = j, True
            if consistent(i) and go(i + 1):
                return True
            perm[i], used[j] = -1, False
        return False

    return tuple(perm) if go(0) else None


def check_dual_iso(dd: DoubleData, tol: Optional[float] = None) -> DualIsoReport:
    """Compare the class-sum probability map with the character one.

    The class-sum side is ``phat_k(i,j) = Nhat[i,j,k] dim(C_k) / (dim(C_i) dim(C_j))``
    with ``Nhat`` rebuilt from ``E``; the character side is the fusion
    probability group of the Verlinde fusion ring. Identity indexing is tried
    first; if it fails, a matching relabeling is searched for. Also checks
    that each class dimension equals some squared simple dimension.
    """
    tol = dd.tol if tol is None else tol
    cdim = class_dims(dd)
    Nh = class_sum_constants(dd)
    phat = Nh * cdim[None, None, :] / (cdim[:, None, None] * cdim[None, :, None])
    P = to_probgroup(dd.fusion_ring(), tol).dense
    residual = float(np.abs(phat - P).max())
    perm = tuple(range(dd.rank)) if residual <= tol else _find_isomorphism(phat.real, P, tol)
    sq = {d * d for d in dd.dims}
    unmatched = [i for i, c in enumerate(cdim) if snap_int(c, tol) not in sq]
    return DualIsoReport(residual, perm, tuple(float(c) for c in cdim), not unmatched, unmatched)


def orthogonality_double(dd: DoubleData) -> float:
    """Residual of ``sum_al dim_al^2 dim_i^2 a[i,al] a[j*,al] = |G|^2 [i == j]``."""
    E = dd.E
    d2 = np.array(dd.dims, dtype=float) ** 2
    M = d2[:, None] * np.einsum("a,ia,ja->ij", d2, E, E[list(dd.dual)])
    return float(np.abs(M - dd.dim * np.eye(dd.rank)).max())


def degree_divisibility(dd: DoubleData, cd: Optional[ClassData] = None) -> dict:
    """Simple dimensions dividing ``|G|^2`` and, for ``kG``, degrees dividing ``|G|``."""
    cd = class_data(dd.group, dd.tol) if cd is None else cd
    return {
        "double": [j for j, d in enumerate(dd.dims) if dd.dim % d],
        "group": [al for al, d in enumerate(cd.degrees) if cd.order % d],
    }


@dataclass
class IntegralityReport:
    scaled: Optional[np.ndarray]          # |G|^2 * Nhat, as integers
    failures: list
    group_scaled: np.ndarray              # |G| * a[i,j,k] for kG
    group_failures: list

    @property
    def ok(self) -> bool:
        return not self.failures and not self.group_failures


def classsum_integrality(dd: DoubleData, cd: Optional[ClassData] = None,
                         tol: Optional[float] = None) -> IntegralityReport:
    """``dim(D(G)) * Nhat`` must be a nonnegative integer tensor; likewise ``|G| * a`` for ``kG``."""
    tol = dd.tol if tol is None else tol
    cd = class_data(dd.group, tol) if cd is None else cd
    raw = dd.dim * class_sum_constants(dd)
    try:
        scaled, failures = _snap_tensor(raw, tol * dd.dim, "scaled class-sum coefficient"), []
    except SnapError as exc:
        scaled, failures = None, list(exc.offenders)
    gs = cd.order * cd.constants
    gfail = [tuple(int(x) for x in idx) for idx in np.argwhere(gs < 0)]
    return IntegralityReport(scaled, failures, gs, gfail)


@dataclass
class RestrictionReport:
    A: Tuple[Tuple[int, ...], ...]        # A[i] = simples whose class sum restricts to c_i
    beta: Tuple[int, ...]
    unmatched: List[int]
    beta_in_A: bool
    divisibility_failures: List[Tuple[int, int]]
    quotient_formula_residual: float
    restriction: np.ndarray               # restriction[j, pi] = a[j, (e, pi)]

    @property
    def is_partition(self) -> bool:
        return not self.unmatched and sum(len(a) for a in self.A) == self.restriction.shape[0]

    @property
    def ok(self) -> bool:
        return (self.is_partition and self.beta_in_A and not self.divisibility_failures
                and self.quotient_formula_residual <= 1e-6)


def restriction_and_Ai(dd: DoubleData, cd: Optional[ClassData] = None,
                       tol: Optional[float] = None) -> RestrictionReport:
    """Restrict each class sum of ``D(G)`` to the characters of ``G``.

    The characters of ``G`` sit inside those of ``D(G)`` as the simples
    ``(e, pi)``. ``A[i]`` collects the simples ``j`` whose row
    ``a[j, (e, pi)]`` equals ``chi_pi(g_i) / chi_pi(1)``.
    """
    tol = dd.tol if tol is None else tol
    cd = class_data(dd.group, tol) if cd is None else cd
    m = cd.m
    ident = [j for j, (a, _) in enumerate(dd.simples) if a == 0]
    # match each (e, pi) with a character of G by values
    local = dd.centralizers[0]
    match = []
    for pi in range(local.m):
        d = np.abs(cd.chars - local.chars[pi][None, :]).max(axis=1)
        match.append(int(np.argmin(d)))
    R = dd.E[:, ident]                                    # R[j, pi]
    target = cd.E[:, match]                               # target[i, pi]
    groups: List[List[int]] = [[] for _ in range(m)]
    unmatched = []
    for j in range(dd.rank):
        hits = [i for i in range(m) if np.abs(R[j] - target[i]).max() <= tol * 10]
        if len(hits) == 1:
            groups[hits[0]].append(j)
        else:
            unmatched.append(j)
    A = tuple(tuple(g) for g in groups)
    beta_ok = all(dd.beta[i] in A[i] for i in range(m))
    div = [(i, s) for i in range(m) for s in A[i] if (dd.dims[s] ** 2) % cd.class_sizes[i]]

    N = dd.fusion
    dims = np.array(dd.dims, dtype=float)
    worst = 0.0
    for i, j, k in itertools.product(range(m), repeat=3):
        v = sum(N[dd.beta[i], dd.beta[j], x] * dims[x] for x in A[k]) / cd.class_sizes[k]
        worst = max(worst, abs(v - cd.constants[i, j, k]))
    return RestrictionReport(A, dd.beta, unmatched, beta_ok, div, float(worst), R)


def validate_double(dd: DoubleData, tol: Optional[float] = None) -> dict:
    """Fusion-ring axioms of the Verlinde ring and the Verlinde/E reconstruction agreement."""
    tol = dd.tol if tol is None else tol
    F = dd.fusion_ring()
    rep = validate(F)
    E = dd.E
    d = np.array(dd.dims, dtype=float)
    cdim = class_dims(dd)
    r = dd.rank
    left = (E[:, :, None] * E[:, None, :] * cdim[:, None, None]).reshape(r, r * r)
    raw = (left.T @ E[list(dd.dual)]).reshape(r, r, r)
    raw = raw * d[:, None, None] * d[None, :, None] * d[None, None, :] / dd.dim
    return {"fusion-axioms": rep, "E-reconstruction": float(np.abs(raw - dd.fusion).max())}
