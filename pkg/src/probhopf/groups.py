"""Finite groups given by full multiplication tables, plus the built-in registry."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, MalformedError, ParseError

FULL_ASSOC_CHECK_MAX = 64
ASSOC_SAMPLES = 10_000


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on ids ``0..n-1`` with identity ``0``.

    ``table[g, h]`` is the id of ``gh``. The constructor validates the table
    (Latin square, identity, associativity) and raises ``MalformedError``.
    """

    table: np.ndarray
    names: Tuple[str, ...] = None
    label: str = "G"

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.int64)
        object.__setattr__(self, "table", T)
        n = T.shape[0] if T.ndim == 2 else 0
        if T.ndim != 2 or T.shape != (n, n) or n == 0:
            raise MalformedError("multiplication table must be a nonempty square array")
        if self.names is None:
            object.__setattr__(self, "names", tuple(str(i + 1) for i in range(n)))
        elif len(self.names) != n:
            raise MalformedError("wrong number of element names")
        if T.min() < 0 or T.max() >= n:
            raise MalformedError("table entry out of range")
        full = np.arange(n)
        if not all((np.sort(T[i]) == full).all() and (np.sort(T[:, i]) == full).all()
                   for i in range(n)):
            raise MalformedError("table is not a Latin square")
        if not ((T[0] == full).all() and (T[:, 0] == full).all()):
            raise MalformedError("element 1 is not the identity")
        if n <= FULL_ASSOC_CHECK_MAX:
            lhs = T[T, :]                         # (ab)c  indexed [a, b, c]
            rhs = T[:, T]                         # a(bc)
            bad = np.argwhere(lhs != rhs)
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, ASSOC_SAMPLES))
            mask = T[T[a, b], c] != T[a, T[b, c]]
            bad = np.stack([a[mask], b[mask], c[mask]], axis=1)
        if len(bad):
            a, b, c = (int(x) + 1 for x in bad[0])
            raise MalformedError(f"table is not associative at ({a},{b},{c})")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    @property
    def identity(self) -> int:
        return 0

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    @cached_property
    def inverse(self) -> Tuple[int, ...]:
        return tuple(int(np.nonzero(self.table[g] == 0)[0][0]) for g in range(self.order))

    def conj(self, x: int, g: int) -> int:
        """``x g x^-1``."""
        return self.mul(self.mul(x, g), self.inverse[x])

    def commute(self, g: int, h: int) -> bool:
        return self.table[g, h] == self.table[h, g]

    def centralizer(self, g: int) -> list[int]:
        return [int(h) for h in np.nonzero(self.table[g] == self.table[:, g])[0]]

    def subgroup(self, elements: Sequence[int], label: Optional[str] = None) -> "FiniteGroup":
        """Subgroup on ``elements`` re-indexed in ascending id order (identity first)."""
        elems = sorted(int(x) for x in elements)
        pos = {g: i for i, g in enumerate(elems)}
        try:
            T = [[pos[self.mul(g, h)] for h in elems] for g in elems]
        except KeyError:
            raise MalformedError("subset is not closed under multiplication") from None
        return FiniteGroup(np.array(T), tuple(self.names[g] for g in elems), label or self.label)

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())


# --- constructions ---------------------------------------------------------

def _from_elements(elements, mul, names, label) -> FiniteGroup:
    idx = {x: i for i, x in enumerate(elements)}
    T = np.array([[idx[mul(a, b)] for b in elements] for a in elements])
    return FiniteGroup(T, tuple(names), label)


def _compose(s, t):
    # (s t)(x) = s(t(x))
    return tuple(s[i] for i in t)


def _perm_name(p) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = p[j]
        cycles.append("(" + "".join(cyc) + ")")
    return "".join(cycles) or "id"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    T = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroup(T, tuple(f"g^{k}" if k > 1 else ("g" if k else "e") for k in range(n)),
                       f"Z{n}")


def symmetric(k: int, even_only: bool = False) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(k)))
    if even_only:
        perms = [p for p in perms if _parity(p) == 0]
    label = f"A{k}" if even_only else f"S{k}"
    return _from_elements(perms, _compose, [_perm_name(p) for p in perms], label)


def _parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n: elements r^k s^e."""
    elems = [(k, e) for e in (0, 1) for k in range(n)]

    def mul(x, y):
        (k1, e1), (k2, e2) = x, y
        return ((k1 + (-k2 if e1 else k2)) % n, (e1 + e2) % 2)

    names = [("r" + (f"^{k}" if k > 1 else "") if k else "") + ("s" if e else "") or "e"
             for k, e in elems]
    return _from_elements(elems, mul, names, f"D{n}")


_QMUL = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def quaternion() -> FiniteGroup:
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]

    def mul(x, y):
        sgn, u = _QMUL[(x[1], y[1])]
        return (x[0] * y[0] * sgn, u)

    names = [("" if s > 0 else "-") + u for s, u in elems]
    return _from_elements(elems, mul, names, "Q8")


def trivial() -> FiniteGroup:
    return cyclic(1)


def random_relabel(G: FiniteGroup, seed: int = 0) -> FiniteGroup:
    """Same group with non-identity ids shuffled (for invariance tests)."""
    rng = random.Random(seed)
    perm = list(range(1, G.order))
    rng.shuffle(perm)
    perm = [0] + perm                      # old id -> new id
    inv = [0] * G.order
    for old, new in enumerate(perm):
        inv[new] = old
    T = np.array([[perm[G.mul(inv[a], inv[b])] for b in range(G.order)] for a in range(G.order)])
    return FiniteGroup(T, tuple(G.names[inv[a]] for a in range(G.order)), G.label)


BUILTIN_GROUPS = {
    "S3": lambda: symmetric(3),
    "S4": lambda: symmetric(4),
    "A4": lambda: symmetric(4, even_only=True),
    "D4": lambda: dihedral(4),
    "D5": lambda: dihedral(5),
    "Q8": quaternion,
}
for _n in range(1, 13):
    BUILTIN_GROUPS[f"Z{_n}"] = (lambda n: lambda: cyclic(n))(_n)


def builtin_group(name: str) -> FiniteGroup:
    try:
        return BUILTIN_GROUPS[name]()
    except KeyError:
        raise InputError(f"unknown built-in group {name!r}") from None


# --- text format -----------------------------------------------------------

HEADER = "group v1"


def loads(text: str, source: Optional[str] = None) -> FiniteGroup:
    """Parse ``group v1``: ``order n`` then n rows of n 1-based ids (identity = 1)."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != HEADER:
        raise ParseError(f"expected header {HEADER!r}", lines[0][0] if lines else 1, source)
    if len(lines) < 2:
        raise ParseError("missing 'order' line", None, source)
    lineno, ln = lines[1]
    tok = ln.split()
    if len(tok) != 2 or tok[0] != "order":
        raise ParseError("expected 'order n'", lineno, source)
    try:
        n = int(tok[1])
    except ValueError:
        raise ParseError("bad order", lineno, source) from None
    if n < 1:
        raise ParseError("order must be positive", lineno, source)
    rows = lines[2:]
    if len(rows) != n:
        raise ParseError(f"expected {n} table rows, found {len(rows)}", None, source)
    T = []
    for lineno, ln in rows:
        try:
            row = [int(x) - 1 for x in ln.split()]
        except ValueError:
            raise ParseError("non-integer table entry", lineno, source) from None
        if len(row) != n:
            raise ParseError(f"row has {len(row)} entries, expected {n}", lineno, source)
        if min(row) < 0 or max(row) >= n:
            raise ParseError("table entry out of range", lineno, source)
        T.append(row)
    try:
        return FiniteGroup(np.array(T), label=source or "G")
    except MalformedError as exc:
        raise ParseError(str(exc), None, source) from None


def load(path) -> FiniteGroup:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def dumps(G: FiniteGroup) -> str:
    out = [HEADER, f"order {G.order}"]
    out += [" ".join(str(int(x) + 1) for x in row) for row in G.table]
    return "\n".join(out) + "\n"
