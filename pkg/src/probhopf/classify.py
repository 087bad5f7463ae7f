"""Exhaustive search for 2-integral probability groups of small order.

A 2-integral probability group has sizes ``s(a) = n_a^2`` with integer
``n_a`` and integers ``k[a,b,c] = p(a.b=c) n_a n_b / n_c >= 0``. Conversely
``(n, k)`` describes a normalized map exactly when
``sum_c k[a,b,c] n_c = n_a n_b`` for every row, so for a bound on the
``n_a`` the search space is finite. Associativity becomes the integer identity
``sum_x k[a,b,x] k[x,c,d] = sum_y k[a,y,d] k[b,c,y]``, which does not involve
``n`` at all.

The search enumerates inverse patterns and size vectors, solves each row
identity, joins rows with numpy and checks associativity in bulk. The axiom
constraints (unit rows, the support of ``p(a.b=1)``, the anti-homomorphism
identity and ``s(a) = n_a^2``) are always built in. ``prune=True`` adds
necessary conditions that hold for every 2-integral probability group, so
it must never change the result; the test suite checks this against the
unpruned search.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError
from .probgroup import R_INTEGRAL, ProbabilityGroup, check_axioms, integrality_class

MAX_CANDIDATES = 10**8
CHUNK = 200_000


class SearchLimitError(InputError):
    """The candidate count for one cell exceeds the runtime guard."""


@dataclass(frozen=True, eq=False)
class SearchPoint:
    """Square-root sizes ``n`` (``n[0] = 1``), inverse map and multiplicity tensor ``k``."""

    n: Tuple[int, ...]
    inverse: Tuple[int, ...]
    k: np.ndarray

    @property
    def order(self) -> int:
        return len(self.n)

    def probabilities(self) -> dict:
        n = self.n
        return {(a, b, c): Fraction(int(self.k[a, b, c]) * n[c], n[a] * n[b])
                for a, b, c in zip(*np.nonzero(self.k))}

    def group(self, names: Optional[Sequence[str]] = None) -> ProbabilityGroup:
        names = tuple(names) if names is not None else ("1",) + tuple(
            chr(ord("a") + i) for i in range(self.order - 1))
        return ProbabilityGroup(names, self.probabilities(), 0, self.inverse, True)


def involutions(m: int) -> Iterator[Tuple[int, ...]]:
    """Inverse maps on ``0..m-1`` fixing the unit ``0``."""
    def rec(rest, acc):
        if not rest:
            yield acc
            return
        a, tail = rest[0], rest[1:]
        yield from rec(tail, {**acc, a: a})
        for i, b in enumerate(tail):
            yield from rec(tail[:i] + tail[i + 1:], {**acc, a: b, b: a})
    for inv in rec(list(range(1, m)), {0: 0}):
        yield tuple(inv[i] for i in range(m))


def _compositions(total: int, weights: Sequence[int]) -> List[Tuple[int, ...]]:
    """All nonnegative ``x`` with ``sum x_i w_i == total``."""
    if total < 0:
        return []
    if not weights:
        return [()] if total == 0 else []
    w, rest = weights[0], weights[1:]
    out = []
    for x in range(total // w + 1):
        for tail in _compositions(total - x * w, rest):
            out.append((x,) + tail)
    return out


def _row_options(n, inv, a, b) -> List[Tuple[int, ...]]:
    """Rows ``k[a, b, :]`` meeting the sum identity and the unit-support pattern."""
    m = len(n)
    if b == inv[a]:
        # s(a) = n_a^2 forces p(a.a^-1=1) = 1/n_a^2, i.e. k[a,a^-1,0] = n_{a^-1} / n_a
        if n[inv[a]] % n[a]:
            return []
        k0 = n[inv[a]] // n[a]
    else:
        k0 = 0
    return [(k0,) + rest for rest in _compositions(n[a] * n[b] - k0, [n[c] for c in range(1, m)])]


def _partner(n, inv, a, b, row) -> Optional[Tuple[int, ...]]:
    """Row ``k[b^-1, a^-1, :]`` forced by ``p(a.b=c) = p(b^-1.a^-1=c^-1)``."""
    m = len(n)
    ai, bi = inv[a], inv[b]
    out = [0] * m
    for c in range(m):
        num = row[c] * n[c] * n[ai] * n[bi]
        den = n[a] * n[b] * n[inv[c]]
        if num % den:
            return None
        out[inv[c]] = num // den
    return tuple(out)


def size_vectors(order: int, max_size: int) -> Iterator[Tuple[int, ...]]:
    for rest in itertools.product(range(1, max_size + 1), repeat=order - 1):
        yield (1,) + rest


def lemma_filters(sp: SearchPoint) -> bool:
    """Cheap necessary conditions for a 2-integral probability group.

    * inverse elements have equal sizes;
    * ``k[a,b,c^-1] == k[b,c,a^-1]`` (the size-weighted reciprocity identity, with equal inverse sizes);
    * ``k[a,b,a] == k[b,a,a]`` when ``a`` is its own inverse;
    * for order 3 with both non-units self-inverse, ``gcd(n_1, n_2) == 1``.
    """
    return _size_filter(sp.n, sp.inverse) and bool(_tensor_filter(sp.k[None], sp.inverse)[0])


def _size_filter(n, inv) -> bool:
    if any(n[a] != n[inv[a]] for a in range(len(n))):
        return False
    if len(n) == 3 and inv == (0, 1, 2) and math.gcd(n[1], n[2]) != 1:
        return False
    return True


def _tensor_filter(K: np.ndarray, inv) -> np.ndarray:
    """Vectorized tensor part of :func:`lemma_filters` over a stack ``K[z, a, b, c]``."""
    iv = list(inv)
    # reciprocity: K[a, b, c*] == K[b, c, a*]
    lhs = K[:, :, :, iv]                                     # K[a, b, c*] at [a, b, c]
    m = K.shape[1]
    rhs = np.empty_like(K)
    for a in range(m):
        rhs[:, a] = K[:, :, :, iv[a]]                        # K[b, c, a*] at [a, b, c]
    ok = (lhs == rhs).all(axis=(1, 2, 3))
    for a in range(m):
        if iv[a] == a:
            ok &= (K[:, a, :, a] == K[:, :, a, a]).all(axis=1)
    return ok


def _associative(K: np.ndarray) -> np.ndarray:
    lhs = np.einsum("zabx,zxcd->zabcd", K, K)
    rhs = np.einsum("zayd,zbcy->zabcd", K, K)
    return (lhs == rhs).all(axis=(1, 2, 3, 4))


@dataclass
class CellStats:
    candidates: int = 0
    associative: int = 0


@dataclass
class Classification:
    order: int
    max_size: int
    prune: bool
    structures: List[SearchPoint] = field(default_factory=list)
    candidates: int = 0
    associative: int = 0
    cells: int = 0

    @property
    def groups(self) -> List[ProbabilityGroup]:
        return [sp.group() for sp in self.structures]

    def __len__(self):
        return len(self.structures)


def _cell(n, inv, prune: bool, stats: CellStats, limit: int) -> Iterator[np.ndarray]:
    m = len(n)
    base = np.zeros((m, m, m), dtype=np.int64)
    for a in range(m):
        base[0, a, a] = base[a, 0, a] = 1
    # orbit representatives of the free rows under (a, b) -> (b^-1, a^-1)
    reps, seen = [], set()
    for a, b in itertools.product(range(1, m), repeat=2):
        if (a, b) in seen:
            continue
        seen.update({(a, b), (inv[b], inv[a])})
        reps.append((a, b))
    options = []
    for a, b in reps:
        opts = []
        for row in _row_options(n, inv, a, b):
            partner = _partner(n, inv, a, b, row)
            if partner is None:
                continue
            if (inv[b], inv[a]) == (a, b) and partner != row:
                continue
            if (inv[b], inv[a]) != (a, b) and partner not in _row_options(n, inv, inv[b], inv[a]):
                continue
            opts.append((row, partner))
        if not opts:
            return
        options.append(opts)
    total = math.prod(len(o) for o in options)
    if total > limit:
        raise SearchLimitError(
            f"cell n={n}, inverse={inv} has {total} candidate tensors, above the guard of {limit}")
    stats.candidates += total

    # materialize every option as its pair of rows, then join in chunks
    row_tables = []
    for (a, b), opts in zip(reps, options):
        R = np.array([r for r, _ in opts], dtype=np.int64)
        Pt = np.array([p for _, p in opts], dtype=np.int64)
        row_tables.append(((a, b), (inv[b], inv[a]), R, Pt))
    sizes = [len(o) for o in options]
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK))
        K = np.broadcast_to(base, (len(idx), m, m, m)).copy()
        rem = idx
        for (ab, ba, R, Pt), size in zip(reversed(row_tables), reversed(sizes)):
            pick = rem % size
            rem = rem // size
            K[:, ab[0], ab[1], :] = R[pick]
            K[:, ba[0], ba[1], :] = Pt[pick]
        if prune:
            K = K[_tensor_filter(K, inv)]
        K = K[_associative(K)]
        stats.associative += len(K)
        yield from K


def canonical_form(sp: SearchPoint) -> tuple:
    """Lexicographically least ``(sizes, inverse, k)`` over relabelings of the non-unit elements."""
    m = sp.order
    best = None
    for tail in itertools.permutations(range(1, m)):
        perm = (0,) + tail                       # old -> new
        inv_perm = [0] * m
        for old, new in enumerate(perm):
            inv_perm[new] = old
        n = tuple(sp.n[inv_perm[i]] for i in range(m))
        inverse = tuple(perm[sp.inverse[inv_perm[i]]] for i in range(m))
        k = sp.k[np.ix_(inv_perm, inv_perm, inv_perm)]
        key = (n, inverse, tuple(int(x) for x in k.ravel()))
        if best is None or key < best:
            best = key
    return best


def from_canonical(key: tuple) -> SearchPoint:
    n, inverse, flat = key
    m = len(n)
    return SearchPoint(n, inverse, np.array(flat, dtype=np.int64).reshape(m, m, m))


def enumerate_structures(order: int, max_size: int = 12, prune: bool = True,
                         experimental: bool = False, limit: int = MAX_CANDIDATES) -> Classification:
    """Every 2-integral probability group with ``order`` elements and ``n_a <= max_size``, up to relabeling.

    Orders 2 and 3 are supported; order 4 needs ``experimental=True``.
    """
    if order not in (2, 3) and not (experimental and order == 4):
        raise InputError("order must be 2 or 3 (4 only with the experimental flag)")
    if max_size < 1:
        raise InputError("max_size must be at least 1")
    result = Classification(order, max_size, prune)
    found = {}
    for inv in involutions(order):
        for n in size_vectors(order, max_size):
            if prune and not _size_filter(n, inv):
                continue
            result.cells += 1
            stats = CellStats()
            for K in _cell(n, inv, prune, stats, limit):
                sp = SearchPoint(n, inv, np.array(K))
                A = sp.group()
                if not check_axioms(A).ok:
                    continue
                if integrality_class(A, 2).verdict != R_INTEGRAL:
                    continue
                key = canonical_form(sp)
                found.setdefault(key, sp)
            result.candidates += stats.candidates
            result.associative += stats.associative
    result.structures = [from_canonical(key) for key in sorted(found)]
    return result


classify = enumerate_structures
