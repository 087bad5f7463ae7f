"""Probability groups: finite sets with a stochastic ternary product.

A probability group is stored as a sparse map ``(a, b, c) -> p(a.b=c)`` over
positional element ids. Built-in constructions always produce exact
:class:`~fractions.Fraction` values; float tensors (only from files) carry
``exact=False`` and every check then runs with a tolerance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import InconsistentInputError, MalformedError, ParseError
from .exactmath import DEFAULTS, snap_rational

Triple = Tuple[int, int, int]


@dataclass(frozen=True)
class AxiomResult:
    name: str
    passed: bool
    residual: float = 0.0
    witness: Optional[tuple] = None
    detail: str = ""


@dataclass
class AxiomReport:
    results: Dict[str, AxiomResult] = field(default_factory=dict)

    def add(self, result: AxiomResult) -> None:
        self.results[result.name] = result

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results.values())

    @property
    def worst_residual(self) -> float:
        return max((r.residual for r in self.results.values()), default=0.0)

    def failures(self):
        return [r for r in self.results.values() if not r.passed]

    def __getitem__(self, name) -> AxiomResult:
        return self.results[name]

    def __iter__(self):
        return iter(self.results.values())


@dataclass(frozen=True, eq=False)
class ProbabilityGroup:
    """Finite probability group on ids ``0..n-1``.

    ``inverse[a]`` is ``None`` when ``a`` has no (unique) inverse; such a
    group fails :func:`check_axioms` but can still be inspected.
    """

    names: Tuple[str, ...]
    p: Dict[Triple, object]
    unit: int = 0
    inverse: Tuple[Optional[int], ...] = None
    exact: bool = True

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise MalformedError("a probability group needs at least one element")
        if not 0 <= self.unit < n:
            raise MalformedError(f"unit id {self.unit} out of range")
        clean = {}
        for key, val in self.p.items():
            if len(key) != 3 or not all(isinstance(i, (int, np.integer)) and 0 <= i < n for i in key):
                raise MalformedError(f"element id out of range in triple {key}")
            if self.exact:
                val = Fraction(val)
            else:
                val = float(val)
            if val != 0:
                clean[tuple(int(i) for i in key)] = val
        object.__setattr__(self, "p", clean)
        if self.inverse is None:
            object.__setattr__(self, "inverse", self._derive_inverse())
        else:
            inv = tuple(None if i is None else int(i) for i in self.inverse)
            if len(inv) != n or any(i is not None and not 0 <= i < n for i in inv):
                raise MalformedError("inverse map has wrong length or out-of-range ids")
            object.__setattr__(self, "inverse", inv)

    def _derive_inverse(self):
        inv = []
        for a in range(self.n):
            cands = [b for b in range(self.n) if self.prob(a, b, self.unit) > 0]
            inv.append(cands[0] if len(cands) == 1 else None)
        return tuple(inv)

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self):
        return self.n

    def prob(self, a: int, b: int, c: int):
        return self.p.get((a, b, c), Fraction(0) if self.exact else 0.0)

    @cached_property
    def dense(self) -> np.ndarray:
        """Float tensor ``P[a, b, c]``."""
        P = np.zeros((self.n,) * 3)
        for (a, b, c), v in self.p.items():
            P[a, b, c] = float(v)
        return P

    @cached_property
    def common_denominator(self) -> int:
        if not self.exact:
            raise ValueError("float-mode group has no common denominator")
        return math.lcm(*(v.denominator for v in self.p.values())) if self.p else 1

    @cached_property
    def scaled(self) -> np.ndarray:
        """Integer tensor ``L * P`` with ``L`` the common denominator (exact mode)."""
        L = self.common_denominator
        dtype = np.int64 if self.n * L * L < 2**62 else object
        K = np.zeros((self.n,) * 3, dtype=dtype)
        for (a, b, c), v in self.p.items():
            K[a, b, c] = v.numerator * (L // v.denominator)
        return K

    def index(self, name: str) -> int:
        return self.names.index(name)

    def name_of(self, a: int) -> str:
        return self.names[a]

    @classmethod
    def from_dense(cls, P, names=None, unit=0, inverse=None, exact=None):
        P = np.asarray(P, dtype=object)
        n = P.shape[0]
        if P.shape != (n, n, n):
            raise MalformedError(f"expected an n x n x n tensor, got shape {P.shape}")
        if exact is None:
            exact = all(isinstance(x, (int, Fraction, np.integer)) for x in P.flat)
        p = {(a, b, c): P[a, b, c] for a, b, c in itertools.product(range(n), repeat=3)
             if P[a, b, c] != 0}
        names = tuple(names) if names is not None else tuple(str(i + 1) for i in range(n))
        return cls(names=names, p=p, unit=unit, inverse=inverse, exact=exact)

    @classmethod
    def from_multiplication_table(cls, table, names=None, identity=0):
        """The delta probability group ``p(g.h=k) = [gh = k]`` of a group."""
        table = np.asarray(table)
        n = table.shape[0]
        p = {(g, h, int(table[g, h])): 1 for g in range(n) for h in range(n)}
        names = tuple(names) if names is not None else tuple(f"g{i + 1}" for i in range(n))
        return cls(names=names, p=p, unit=identity)


def _eq(x, y, exact, tol):
    return x == y if exact else abs(float(x) - float(y)) <= tol


def check_axioms(A: ProbabilityGroup, tol: Optional[float] = None) -> AxiomReport:
    """Exhaustively check the six probability-group axioms.

    Exact groups are checked in integer arithmetic (tensor scaled by the
    common denominator); float groups within ``tol``.
    """
    tol = DEFAULTS.tol if tol is None else tol
    n, e, inv, exact = A.n, A.unit, A.inverse, A.exact
    rep = AxiomReport()

    if exact:
        K, L = A.scaled, A.common_denominator
        neg = np.argwhere(K < 0)
        row_dev = np.abs(K.sum(axis=2) - L)
        scale = L
    else:
        K = A.dense
        neg = np.argwhere(K < -tol)
        row_dev = np.abs(K.sum(axis=2) - 1.0)
        scale = 1
    if len(neg):
        a, b, c = (int(i) for i in neg[0])
        rep.add(AxiomResult("normalization", False, float(-K[a, b, c]) / scale, (a, b, c),
                            "negative probability"))
    else:
        worst = float(row_dev.max()) / scale
        a, b = (int(i) for i in np.unravel_index(int(np.argmax(row_dev)), row_dev.shape))
        ok = worst == 0 if exact else worst <= tol
        rep.add(AxiomResult("normalization", ok, worst, None if ok else (a, b),
                            "" if ok else "row does not sum to 1"))

    raw, wit = associativity_defect(K)
    worst = raw / (scale * scale)
    ok = worst == 0 if exact else worst <= tol
    rep.add(AxiomResult("associativity", ok, worst, None if ok else wit))

    one = Fraction(1) if exact else 1.0
    worst, wit = 0.0, None
    for a in range(n):
        for val in (A.prob(e, a, a), A.prob(a, e, a)):
            d = abs(float(val - one))
            if (d != 0 if exact else d > tol) and wit is None:
                wit = (a,)
            worst = max(worst, d)
    rep.add(AxiomResult("unit", wit is None, worst, wit))

    wit, detail = None, ""
    for a in range(n):
        cands = [b for b in range(n) if (A.prob(a, b, e) > 0 if exact else A.prob(a, b, e) > tol)]
        if len(cands) != 1:
            wit, detail = (a,), f"{len(cands)} candidate inverses"
            break
        if inv[a] != cands[0]:
            wit, detail = (a,), "declared inverse disagrees with the tensor"
            break
    rep.add(AxiomResult("inverse", wit is None, 0.0, wit, detail))

    if any(i is None for i in inv):
        a = inv.index(None)
        rep.add(AxiomResult("anti-homomorphism", False, 0.0, (a,), "inverse undefined"))
        rep.add(AxiomResult("size-symmetry", False, 0.0, (a,), "inverse undefined"))
        return rep

    iv = list(inv)
    flipped = K[iv][:, iv][:, :, iv].transpose(1, 0, 2)               # K[b*, a*, c*] at [a, b, c]
    diff = np.abs(K - flipped)
    worst = float(diff.max()) / scale
    ok = worst == 0 if exact else worst <= tol
    wit = None if ok else tuple(int(i) for i in np.unravel_index(int(np.argmax(diff)), diff.shape))
    rep.add(AxiomResult("anti-homomorphism", ok, worst, wit))

    worst, wit = 0.0, None
    for a in range(n):
        x, y = A.prob(a, inv[a], e), A.prob(inv[a], a, e)
        d = abs(float(x - y))
        if not _eq(x, y, exact, tol) and wit is None:
            wit = (a,)
        worst = max(worst, d)
    rep.add(AxiomResult("size-symmetry", wit is None, worst, wit))
    return rep


CHUNK_ABOVE = 32


def associativity_defect(K: np.ndarray):
    """Largest ``|sum_x K[a,b,x] K[x,c,d] - sum_y K[a,y,d] K[b,c,y]|`` and where it occurs.

    Works one ``a`` at a time once the tensor is large, to bound memory.
    """
    n = K.shape[0]
    if n <= CHUNK_ABOVE:
        lhs = np.tensordot(K, K, axes=([2], [0]))                          # a b c d
        rhs = np.tensordot(K, K, axes=([2], [1])).transpose(2, 0, 1, 3)    # b c a d -> a b c d
        diff = np.abs(lhs - rhs)
        wit = tuple(int(i) for i in np.unravel_index(int(np.argmax(diff)), diff.shape))
        return float(diff.max()), wit
    flat_first = K.reshape(n, n * n)                                       # [x, (c d)]
    flat_last = K.reshape(n * n, n)                                        # [(b c), y]
    worst, wit = 0.0, (0, 0, 0, 0)
    for a in range(n):
        lhs = (K[a] @ flat_first).reshape(n, n, n)                         # b c d
        rhs = (flat_last @ K[a]).reshape(n, n, n)                          # b c d
        diff = np.abs(lhs - rhs)
        m = float(diff.max())
        if m > worst:
            worst = m
            wit = (a,) + tuple(int(i) for i in np.unravel_index(int(np.argmax(diff)), diff.shape))
    return worst, wit


def size(A: ProbabilityGroup, a: int):
    """``1 / p(a.a^-1 = 1)``."""
    b = A.inverse[a]
    if b is None:
        raise InconsistentInputError(f"element {A.names[a]} has no unique inverse")
    q = A.prob(a, b, A.unit)
    if q == 0:
        raise InconsistentInputError(f"p({A.names[a]}.{A.names[b]}=1) vanishes")
    return 1 / q


def sizes(A: ProbabilityGroup) -> list:
    return [size(A, a) for a in range(A.n)]


def order(A: ProbabilityGroup):
    return sum(sizes(A), Fraction(0) if A.exact else 0.0)


def is_abelian(A: ProbabilityGroup, tol: Optional[float] = None) -> bool:
    tol = DEFAULTS.tol if tol is None else tol
    if A.exact:
        K = A.scaled
        return bool((K == K.transpose(1, 0, 2)).all())
    P = A.dense
    return bool(np.abs(P - P.transpose(1, 0, 2)).max() <= tol)


def convolve(A: ProbabilityGroup, a: int, b: int) -> Dict[int, object]:
    """Coefficients of ``a *_p b`` in the algebra spanned by the elements."""
    return {c: A.prob(a, b, c) for c in range(A.n) if A.prob(a, b, c) != 0}


def relabel(A: ProbabilityGroup, perm: Sequence[int]) -> ProbabilityGroup:
    """Group with element ``a`` renamed to position ``perm[a]``."""
    perm = list(perm)
    n = A.n
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation")
    names = [None] * n
    for a in range(n):
        names[perm[a]] = A.names[a]
    p = {(perm[a], perm[b], perm[c]): v for (a, b, c), v in A.p.items()}
    inverse = [None] * n
    for a in range(n):
        inverse[perm[a]] = None if A.inverse[a] is None else perm[A.inverse[a]]
    return ProbabilityGroup(tuple(names), p, perm[A.unit], tuple(inverse), A.exact)


def derived_identities(A: ProbabilityGroup, tol: Optional[float] = None) -> AxiomReport:
    """Consequences of the axioms that must hold in any probability group.

    * size-reciprocity: ``p(a.b=c^-1) s(a) == p(b.c=a^-1) s(c)``
    * self-inverse-commutation: ``p(a.b=a) == p(b.a=a)`` whenever ``a == a^-1``
    """
    tol = DEFAULTS.tol if tol is None else tol
    n, inv, exact = A.n, A.inverse, A.exact
    s = sizes(A)
    rep = AxiomReport()
    worst, wit = 0.0, None
    for a, b, c in itertools.product(range(n), repeat=3):
        x = A.prob(a, b, inv[c]) * s[a]
        y = A.prob(b, c, inv[a]) * s[c]
        if not _eq(x, y, exact, tol) and wit is None:
            wit = (a, b, c)
        worst = max(worst, abs(float(x - y)))
    rep.add(AxiomResult("size-reciprocity", wit is None, worst, wit))
    worst, wit = 0.0, None
    for a in range(n):
        if inv[a] != a:
            continue
        for b in range(n):
            x, y = A.prob(a, b, a), A.prob(b, a, a)
            if not _eq(x, y, exact, tol) and wit is None:
                wit = (a, b)
            worst = max(worst, abs(float(x - y)))
    rep.add(AxiomResult("self-inverse-commutation", wit is None, worst, wit))
    return rep


# --- integrality -----------------------------------------------------------

R_INTEGRAL = "r-integral"
QUASI_R_INTEGRAL = "quasi-r-integral"
FAILS = "fails"
NOT_CERTIFIED = "not-certified"


@dataclass(frozen=True)
class Integrality:
    verdict: str
    r: int
    witnesses: Tuple[str, ...] = ()

    @property
    def label(self) -> str:
        return self.verdict.replace("r-", f"{self.r}-")


def _is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    return all(math.isqrt(x) ** 2 == x for x in (q.numerator, q.denominator))


CERTIFY_TOL = 1e-13


def _exact_probs(A: ProbabilityGroup, tol) -> Optional[Dict[Triple, Fraction]]:
    if A.exact:
        return A.p
    out = {}
    # quadratic irrationals sit about 1/(sqrt(5) q^2) from their convergents,
    # so with q <= 10^6 nothing irrational of that kind snaps at this tolerance
    cert_tol = min(tol, CERTIFY_TOL)
    for k, v in A.p.items():
        q = snap_rational(v, cert_tol)
        if q is None:
            return None
        out[k] = q
    # a tight tolerance still lets most irrationals snap to some fraction, so
    # the snapped tensor only counts as rational data if it is exactly a probability group
    snapped = ProbabilityGroup(A.names, out, A.unit, A.inverse, True)
    if not check_axioms(snapped).ok:
        return None
    return out


def integrality_class(A: ProbabilityGroup, r: int, tol: Optional[float] = None) -> Integrality:
    """Classify ``A`` as r-integral, quasi-r-integral, failing, or not certified.

    Only rational data can be certified. A rational size has an algebraic
    integer r-th root exactly when it is an integer, and for ``r = 2`` the
    scaled probability ``p * sqrt(s(a) s(b) / s(c))`` is an integer exactly
    when its square is a perfect square, so both conditions reduce to
    rational arithmetic.
    """
    if r not in (1, 2):
        raise ValueError("only r = 1 or r = 2 can occur")
    tol = DEFAULTS.tol if tol is None else tol
    probs = _exact_probs(A, tol)
    if probs is None:
        return Integrality(NOT_CERTIFIED, r, ("irrational probabilities",))
    n, inv, e = A.n, A.inverse, A.unit
    if any(i is None for i in inv):
        return Integrality(FAILS, r, ("inverse undefined",))
    s = []
    for a in range(n):
        q = probs.get((a, inv[a], e), Fraction(0))
        if q == 0:
            return Integrality(FAILS, r, (f"p({A.names[a]}.{A.names[a]}^-1=1) = 0",))
        s.append(1 / q)
    bad = []
    roots_integral = True
    for a in range(n):
        if s[a].denominator != 1:
            bad.append(f"size of {A.names[a]} is {s[a]}, not an algebraic integer root")
        elif r == 2 and not _is_square(s[a]):
            roots_integral = False
            bad_root = f"sqrt(size of {A.names[a]}) = sqrt({s[a]}) is not an integer"
            if bad_root not in bad:
                bad.append(bad_root)
    hard_fail = any("algebraic" in w for w in bad)
    for (a, b, c), q in sorted(probs.items()):
        if r == 1:
            v = q * s[a] * s[b] / s[c]
            good = v.denominator == 1 and v >= 0
        else:
            v = q * q * s[a] * s[b] / s[c]
            good = q >= 0 and v.denominator == 1 and _is_square(v)
        if not good:
            hard_fail = True
            bad.append(f"scaled p({A.names[a]}.{A.names[b]}={A.names[c]}) is not a nonnegative integer")
    if hard_fail:
        return Integrality(FAILS, r, tuple(bad))
    if roots_integral:
        return Integrality(R_INTEGRAL, r)
    return Integrality(QUASI_R_INTEGRAL, r, tuple(bad))


# --- text format -----------------------------------------------------------

HEADER = "probgroup v1"


def _parse_value(tok: str, lineno, source):
    try:
        if any(ch in tok for ch in ".eE") and "/" not in tok:
            return float(tok), False
        return Fraction(tok), True
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability value {tok!r}", lineno, source) from None


def _parse_id(tok, n, lineno, source):
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"bad element id {tok!r}", lineno, source) from None
    if n is None:
        raise ParseError("'elements' must come before ids are used", lineno, source)
    if not 1 <= i <= n:
        raise ParseError(f"element id {i} out of range 1..{n}", lineno, source)
    return i - 1


def loads(text: str, source: Optional[str] = None) -> ProbabilityGroup:
    """Parse ``probgroup v1`` text. Ids are 1-based; the unit is moved to the front."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != HEADER:
        raise ParseError(f"expected header {HEADER!r}", lines[0][0] if lines else 1, source)
    n = unit = None
    names, inverse, p = {}, {}, {}
    exact = True
    for lineno, ln in lines[1:]:
        tok = ln.split()
        key = tok[0]
        if key == "elements" and len(tok) == 2:
            if n is not None:
                raise ParseError("duplicate 'elements' line", lineno, source)
            try:
                n = int(tok[1])
            except ValueError:
                raise ParseError("bad element count", lineno, source) from None
            if n < 1:
                raise ParseError("element count must be positive", lineno, source)
        elif key == "unit" and len(tok) == 2:
            unit = _parse_id(tok[1], n, lineno, source)
        elif key == "name" and len(tok) == 3:
            names[_parse_id(tok[1], n, lineno, source)] = tok[2]
        elif key == "inverse" and len(tok) == 3:
            i = _parse_id(tok[1], n, lineno, source)
            j = _parse_id(tok[2], n, lineno, source)
            if inverse.get(i, j) != j or inverse.get(j, i) != i:
                raise ParseError("conflicting inverse declaration", lineno, source)
            inverse[i], inverse[j] = j, i
        elif key == "p" and len(tok) == 5:
            triple = tuple(_parse_id(t, n, lineno, source) for t in tok[1:4])
            if triple in p:
                raise ParseError(f"duplicate triple {tok[1:4]}", lineno, source)
            val, is_exact = _parse_value(tok[4], lineno, source)
            exact = exact and is_exact
            p[triple] = val
        else:
            raise ParseError(f"unrecognized line {ln!r}", lineno, source)
    if n is None:
        raise ParseError("missing 'elements' line", None, source)
    if unit is None:
        raise ParseError("missing 'unit' line", None, source)
    order_ = [unit] + [i for i in range(n) if i != unit]
    pos = {old: new for new, old in enumerate(order_)}
    p = {(pos[a], pos[b], pos[c]): v for (a, b, c), v in p.items()}
    nm = tuple(names.get(old, str(old + 1)) for old in order_)
    inv = None
    if inverse:
        if len(inverse) != n:
            raise ParseError("inverse declared for some but not all elements", None, source)
        inv = tuple(pos[inverse[old]] for old in order_)
    return ProbabilityGroup(nm, p, 0, inv, exact)


def load(path) -> ProbabilityGroup:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def _fmt_p(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def dumps(A: ProbabilityGroup) -> str:
    out = [HEADER, f"elements {A.n}"]
    for a, nm in enumerate(A.names):
        if nm != str(a + 1):
            out.append(f"name {a + 1} {nm}")
    out.append(f"unit {A.unit + 1}")
    done = set()
    for a, b in enumerate(A.inverse):
        if b is not None and a not in done:
            out.append(f"inverse {a + 1} {b + 1}")
            done.update((a, b))
    for (a, b, c) in sorted(A.p):
        out.append(f"p {a + 1} {b + 1} {c + 1} {_fmt_p(A.p[(a, b, c)])}")
    return "\n".join(out) + "\n"


def equal(A: ProbabilityGroup, B: ProbabilityGroup, tol: float = 0.0) -> bool:
    """Same ids, names, inverse map and probabilities (within ``tol`` for floats)."""
    if (A.n, A.names, A.unit, A.inverse, A.exact) != (B.n, B.names, B.unit, B.inverse, B.exact):
        return False
    if A.exact:
        return A.p == B.p
    keys = set(A.p) | set(B.p)
    return all(abs(float(A.prob(*k)) - float(B.prob(*k))) <= tol for k in keys)
