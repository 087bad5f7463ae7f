"""Fusion rings (Grothendieck data) and the probability groups they carry."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .classdata import ClassData, character_multiplicities
from .errors import ConvergenceError, MalformedError, ParseError
from .exactmath import DEFAULTS, perron_root, snap_int
from .groups import FiniteGroup
from .probgroup import AxiomReport, AxiomResult, ProbabilityGroup, associativity_defect


@dataclass(frozen=True, eq=False)
class FusionRing:
    """Based ring with structure constants ``N[i, j, k]`` (``X_i X_j = sum N X_k``).

    The unit is always index 0; ``dual[i]`` is ``i*``.
    """

    N: np.ndarray
    dual: Tuple[int, ...]
    names: Tuple[str, ...] = None

    def __post_init__(self):
        N = np.asarray(self.N)
        if N.ndim != 3 or len(set(N.shape)) != 1 or N.shape[0] == 0:
            raise MalformedError(f"fusion tensor must be m x m x m, got shape {N.shape}")
        if not np.issubdtype(N.dtype, np.integer):
            raise MalformedError("fusion coefficients must be integers")
        m = N.shape[0]
        object.__setattr__(self, "N", N.astype(np.int64))
        dual = tuple(int(i) for i in self.dual)
        if len(dual) != m or any(not 0 <= i < m for i in dual):
            raise MalformedError("dual map has wrong length or out-of-range ids")
        object.__setattr__(self, "dual", dual)
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"X{i + 1}" for i in range(m)))
        elif len(self.names) != m:
            raise MalformedError("wrong number of names")

    @property
    def rank(self) -> int:
        return self.N.shape[0]

    def left_matrix(self, i: int) -> np.ndarray:
        """``L[k, j] = N[i, j, k]``: column ``j`` holds the decomposition of ``X_i X_j``."""
        return self.N[i].T


@dataclass(frozen=True)
class FPDims:
    values: Tuple[object, ...]
    exact: bool
    residual: float

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def validate(F: FusionRing) -> AxiomReport:
    """Unit, duality, dual-symmetry and associativity of the structure constants."""
    N, dual, m = F.N, F.dual, F.rank
    rep = AxiomReport()

    neg = np.argwhere(N < 0)
    rep.add(AxiomResult("nonnegativity", not len(neg), 0.0,
                        tuple(int(x) for x in neg[0]) if len(neg) else None))

    eye = np.eye(m, dtype=np.int64)
    bad = [(j,) for j in range(m) if not ((N[0, j] == eye[j]).all() and (N[j, 0] == eye[j]).all())]
    rep.add(AxiomResult("unit", not bad, 0.0, bad[0] if bad else None))

    inv_ok = all(dual[dual[i]] == i for i in range(m))
    wit = None
    for i, j in itertools.product(range(m), repeat=2):
        if N[i, j, 0] != (1 if j == dual[i] else 0):
            wit = (i, j)
            break
    if wit is None and not inv_ok:
        wit = (next(i for i in range(m) if dual[dual[i]] != i),)
    rep.add(AxiomResult("duality", wit is None, 0.0, wit))

    wit = None
    for i, j, k in itertools.product(range(m), repeat=3):
        if N[i, j, k] != N[dual[j], dual[i], dual[k]]:
            wit = (i, j, k)
            break
    rep.add(AxiomResult("dual-symmetry", wit is None, 0.0, wit))

    worst, wit = associativity_defect(N)
    rep.add(AxiomResult("associativity", worst == 0, worst, None if worst == 0 else wit))
    return rep


def fpdims(F: FusionRing, tol: Optional[float] = None) -> FPDims:
    """Frobenius-Perron dimensions, snapped to integers when the ring homomorphism law holds exactly."""
    tol = DEFAULTS.tol if tol is None else tol
    raw = np.array([perron_root(F.left_matrix(i), tol=min(tol, 1e-12) * max(1, F.rank))
                    for i in range(F.rank)])
    # an FP dimension is an algebraic integer, so a rational one is an integer
    snapped = [snap_int(float(x), max(tol, 1e-9)) for x in raw]
    exact = all(q is not None for q in snapped)
    if exact:
        ok = all(sum(int(F.N[i, j, k]) * snapped[k] for k in range(F.rank)) == snapped[i] * snapped[j]
                 for i, j in itertools.product(range(F.rank), repeat=2))
        exact = ok
    vals = tuple(Fraction(q) for q in snapped) if exact else tuple(float(x) for x in raw)
    d = np.array([float(v) for v in vals])
    residual = float(np.abs(np.einsum("ijk,k->ij", F.N, d) - np.outer(d, d)).max())
    if residual > tol * max(1.0, float(d.max()) ** 2):
        raise ConvergenceError(f"FP dimensions are not a ring homomorphism (residual {residual:.3e})",
                               residual=residual)
    return FPDims(vals, exact, residual)


def to_probgroup(F: FusionRing, tol: Optional[float] = None, dims: Optional[FPDims] = None) -> ProbabilityGroup:
    """``p(X_i.X_j=X_k) = N[i,j,k] d_k / (d_i d_j)``."""
    d = fpdims(F, tol) if dims is None else dims
    p = {}
    for i, j, k in zip(*np.nonzero(F.N)):
        n = int(F.N[i, j, k])
        if d.exact:
            p[(int(i), int(j), int(k))] = n * Fraction(d[k]) / (Fraction(d[i]) * Fraction(d[j]))
        else:
            p[(int(i), int(j), int(k))] = n * float(d[k]) / (float(d[i]) * float(d[j]))
    return ProbabilityGroup(F.names, p, 0, F.dual, d.exact)


def from_group_characters(cd: ClassData, tol: Optional[float] = None) -> FusionRing:
    """Character ring of a finite group, in character-table row order."""
    N = character_multiplicities(cd, tol)
    return FusionRing(N, cd.char_inverse, tuple(f"chi{a + 1}" for a in range(cd.m)))


def from_group_table(G: FiniteGroup) -> FusionRing:
    """Group ring: ``N[g, h, k] = [gh = k]``."""
    n = G.order
    N = np.zeros((n, n, n), dtype=np.int64)
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    N[g, h, G.table] = 1
    return FusionRing(N, G.inverse, G.names)


def character_probgroup(cd: ClassData, tol: Optional[float] = None) -> ProbabilityGroup:
    return to_probgroup(from_group_characters(cd, tol), tol)


# --- text format -----------------------------------------------------------

HEADER = "fusionring v1"


def loads(text: str, source: Optional[str] = None) -> FusionRing:
    """Parse ``fusionring v1``: ``rank m``, ``unit 1``, ``dual i j``, ``N i j k v`` (1-based)."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != HEADER:
        raise ParseError(f"expected header {HEADER!r}", lines[0][0] if lines else 1, source)
    m = None
    unit_seen = False
    dual, entries, names = {}, {}, {}

    def idx(tok, lineno):
        try:
            i = int(tok)
        except ValueError:
            raise ParseError(f"bad index {tok!r}", lineno, source) from None
        if m is None:
            raise ParseError("'rank' must come first", lineno, source)
        if not 1 <= i <= m:
            raise ParseError(f"index {i} out of range 1..{m}", lineno, source)
        return i - 1

    for lineno, ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "rank" and len(tok) == 2:
            try:
                m = int(tok[1])
            except ValueError:
                raise ParseError("bad rank", lineno, source) from None
            if m < 1:
                raise ParseError("rank must be positive", lineno, source)
        elif tok[0] == "unit" and len(tok) == 2:
            if idx(tok[1], lineno) != 0:
                raise ParseError("the unit must be object 1", lineno, source)
            unit_seen = True
        elif tok[0] == "name" and len(tok) == 3:
            names[idx(tok[1], lineno)] = tok[2]
        elif tok[0] == "dual" and len(tok) == 3:
            i, j = idx(tok[1], lineno), idx(tok[2], lineno)
            if dual.get(i, j) != j or dual.get(j, i) != i:
                raise ParseError("conflicting dual declaration", lineno, source)
            dual[i], dual[j] = j, i
        elif tok[0] == "N" and len(tok) == 5:
            key = tuple(idx(t, lineno) for t in tok[1:4])
            if key in entries:
                raise ParseError(f"duplicate entry {tok[1:4]}", lineno, source)
            try:
                v = int(tok[4])
            except ValueError:
                raise ParseError(f"bad multiplicity {tok[4]!r}", lineno, source) from None
            if v < 0:
                raise ParseError("negative multiplicity", lineno, source)
            entries[key] = v
        else:
            raise ParseError(f"unrecognized line {ln!r}", lineno, source)
    if m is None:
        raise ParseError("missing 'rank' line", None, source)
    if not unit_seen:
        raise ParseError("missing 'unit 1' line", None, source)
    if len(dual) != m:
        raise ParseError("dual must be declared for every object", None, source)
    N = np.zeros((m, m, m), dtype=np.int64)
    for key, v in entries.items():
        N[key] = v
    nm = tuple(names.get(i, f"X{i + 1}") for i in range(m))
    return FusionRing(N, tuple(dual[i] for i in range(m)), nm)


def load(path) -> FusionRing:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def dumps(F: FusionRing) -> str:
    out = [HEADER, f"rank {F.rank}", "unit 1"]
    for i, nm in enumerate(F.names):
        if nm != f"X{i + 1}":
            out.append(f"name {i + 1} {nm}")
    done = set()
    for i, j in enumerate(F.dual):
        if i not in done:
            out.append(f"dual {i + 1} {j + 1}")
            done.update((i, j))
    for i, j, k in zip(*np.nonzero(F.N)):
        out.append(f"N {i + 1} {j + 1} {k + 1} {int(F.N[i, j, k])}")
    return "\n".join(out) + "\n"


def equal(F: FusionRing, G: FusionRing) -> bool:
    return F.dual == G.dual and F.names == G.names and np.array_equal(F.N, G.N)


def s3_character_ring() -> FusionRing:
    """Character ring of S3 (trivial, sign, 2-dimensional), written out by hand."""
    N = np.zeros((3, 3, 3), dtype=np.int64)
    for j in range(3):
        N[0, j, j] = N[j, 0, j] = 1
    N[1, 1, 0] = 1
    N[1, 2, 2] = N[2, 1, 2] = 1
    N[2, 2, 0] = N[2, 2, 1] = N[2, 2, 2] = 1
    return FusionRing(N, (0, 1, 2), ("chi1", "chi2", "chi3"))
