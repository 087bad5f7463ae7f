"""Acceptance suite: one PASS/FAIL line per criterion, printed even when output is captured."""
import time
from fractions import Fraction

import numpy as np
import pytest

from probhopf.classdata import (character_multiplicities, class_data, class_probgroup, classsums_from_E,
                                degree_divisibility_failures, divisibility_failures, fusion_from_E,
                                orthogonality_check, verify_factorizations)
from probhopf.classify import canonical_form, enumerate_structures
from probhopf.duality import (as_probgroup, check_quotient, dual, dual_sizes, find_subgroups,
                              orthogonality, quotient)
from probhopf.fusion import character_probgroup, to_probgroup
from probhopf.groups import builtin_group
from probhopf.probgroup import ProbabilityGroup, check_axioms, derived_identities, order, sizes
from probhopf.qdouble import (build_double, check_dual_iso, check_E_symmetry, class_sum_constants,
                              orthogonality_double, restriction_and_Ai)

ALL_BUILTINS = [f"Z{n}" for n in range(2, 13)] + ["S3", "S4", "A4", "D4", "D5", "Q8"]
ABELIAN = [f"Z{n}" for n in range(1, 13)]
TOL = 1e-9


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({elapsed:.2f} s)")
    return emit


def test_criterion_1_s3_character_table_and_probabilities(report):
    t0 = time.perf_counter()
    cd = class_data(builtin_group("S3"))
    A = character_probgroup(cd)
    elapsed = time.perf_counter() - t0
    # columns: identity, transpositions, 3-cycles
    expected = {(1, 1, 1), (1, -1, 1), (2, 0, -1)}
    table = {tuple(int(v) for v in row) for row in cd.exact_chars}
    probs = (A.prob(2, 2, 0), A.prob(2, 2, 1), A.prob(2, 2, 2))
    ok = (cd.class_sizes == (1, 3, 2) and table == expected and A.exact
          and probs == (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)) and elapsed < 1.0)
    report(1, ok, f"S3 table rows {sorted(table)}, p(chi3.chi3=.) = {tuple(map(str, probs))}", elapsed)
    assert ok


def test_criterion_2_dual_of_s3_character_group(report):
    t0 = time.perf_counter()
    A = character_probgroup(class_data(builtin_group("S3")))
    D = dual(A)
    elapsed = time.perf_counter() - t0
    expected = np.array([[1, 1, 1], [1, -1, 0], [1, 1, -0.5]])
    err = float(np.abs(D.values - expected).max()) if D.n == 3 else float("inf")
    nonneg = bool((D.phat.real >= -TOL).all())
    s_hat = [int(s) for s in dual_sizes(D)]
    ok = D.n == 3 and err <= TOL and D.dualizable and nonneg and s_hat == [1, 3, 2]
    report(2, ok, f"3 functionals, max deviation {err:.1e}, dualizable={D.dualizable}, s_hat={s_hat}", elapsed)
    assert ok


def test_criterion_3_quotient(report):
    t0 = time.perf_counter()
    A = character_probgroup(class_data(builtin_group("S3")))
    S = [0, 1]
    Q = quotient(A, S)
    res = check_quotient(A, S, Q)
    elapsed = time.perf_counter() - t0
    nS = sum(sizes(A)[a] for a in S)
    product = nS * order(Q.group)
    chi3 = Q.class_of(2)
    p1, p3 = Q.group.prob(chi3, chi3, 0), Q.group.prob(chi3, chi3, chi3)
    ok = (len(Q.classes) == 2 and p1 == p3 == Fraction(1, 2) and product == 6
          and res["axioms"].ok and res["order-product-ok"])
    report(3, ok, f"classes {Q.classes}, P = {p1}, {p3}, n(S) n(A//S) = {product}", elapsed)
    assert ok


def test_criterion_4_class_and_character_tensors_from_E(report):
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for name in ALL_BUILTINS:
        cd = class_data(builtin_group(name))
        if not (classsums_from_E(cd) == cd.constants).all():
            bad.append(f"{name}: class sums")
        if not (fusion_from_E(cd) == character_multiplicities(cd)).all():
            bad.append(f"{name}: fusion")
        orth = orthogonality_check(cd)
        worst = max(worst, orth["first"], orth["second"])
        if divisibility_failures(cd) or degree_divisibility_failures(cd):
            bad.append(f"{name}: divisibility")
    elapsed = time.perf_counter() - t0
    ok = not bad and worst <= TOL and elapsed < 30
    report(4, ok, f"{len(ALL_BUILTINS)} groups, orthogonality residual {worst:.1e}, failures {bad}", elapsed)
    assert ok


def test_criterion_5_factorizations(report):
    t0 = time.perf_counter()
    worst = 0.0
    for name in ALL_BUILTINS:
        res = verify_factorizations(class_data(builtin_group(name)))
        worst = max(worst, res["character-side"], res["class-side"])
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL
    report(5, ok, f"worst factorization residual {worst:.1e} over {len(ALL_BUILTINS)} groups", elapsed)
    assert ok


def _double_suite(name):
    dd = build_double(builtin_group(name))
    N = dd.fusion
    scaled = dd.dim * class_sum_constants(dd)
    snapped = np.rint(scaled.real)
    iso = check_dual_iso(dd)
    squares = {d * d for d in dd.dims}
    return {
        "rank": dd.rank,
        "sum-dims2": sum(d * d for d in dd.dims),
        "verlinde": bool((N >= 0).all()),
        "symmetry": check_E_symmetry(dd),
        "orthogonality": orthogonality_double(dd),
        "sizes-realized": iso.ok and all(any(abs(s - q) <= 1e-6 for q in squares) for s in iso.class_dims),
        "integrality": bool(np.abs(scaled - snapped).max() <= 1e-6 and (snapped >= 0).all()),
        "order": dd.group.order,
    }


def test_criterion_6_double_of_s3(report):
    t0 = time.perf_counter()
    r = _double_suite("S3")
    elapsed = time.perf_counter() - t0
    s3_ok = (r["rank"] == 8 and r["sum-dims2"] == 36 and r["verlinde"] and r["symmetry"] <= TOL
             and r["orthogonality"] <= TOL and r["sizes-realized"] and r["integrality"] and elapsed < 10)
    others = {}
    for name in ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "D4", "Q8"]:
        o = _double_suite(name)
        others[name] = (o["sum-dims2"] == o["order"] ** 2 and o["verlinde"] and o["symmetry"] <= TOL
                        and o["orthogonality"] <= TOL and o["sizes-realized"] and o["integrality"])
    ok = s3_ok and all(others.values())
    failed = [k for k, v in others.items() if not v]
    report(6, ok, f"D(S3) rank {r['rank']}, sum {r['sum-dims2']}, symmetry {r['symmetry']:.1e}, "
                  f"orthogonality {r['orthogonality']:.1e}; other doubles failing: {failed}", elapsed)
    assert ok


def test_criterion_7_restriction_sets(report):
    t0 = time.perf_counter()
    bad = []
    for name in ["S3", "D4", "Q8", "A4"]:
        G = builtin_group(name)
        dd = build_double(G)
        cd = class_data(G)
        rep = restriction_and_Ai(dd, cd)
        if not rep.is_partition:
            bad.append(f"{name}: not a partition")
        if not all(rep.beta[i] in rep.A[i] for i in range(cd.m)):
            bad.append(f"{name}: beta")
        if any(dd.dims[s] ** 2 % cd.class_sizes[i] for i in range(cd.m) for s in rep.A[i]):
            bad.append(f"{name}: divisibility")
        # exact rebuild of the class constants of G from the double's fusion rules
        N = dd.fusion
        for i in range(cd.m):
            for j in range(cd.m):
                for k in range(cd.m):
                    v = Fraction(sum(int(N[rep.beta[i], rep.beta[j], x]) * dd.dims[x] for x in rep.A[k]),
                                 cd.class_sizes[k])
                    if v != cd.constants[i, j, k]:
                        bad.append(f"{name}: a[{i},{j},{k}]")
    elapsed = time.perf_counter() - t0
    ok = not bad
    report(7, ok, f"S3, D4, Q8, A4 restriction checks, failures {bad[:5]}", elapsed)
    assert ok


def test_criterion_8_classification(report):
    t0 = time.perf_counter()
    two = enumerate_structures(2, 50)
    three = enumerate_structures(3, 12)
    kS3 = character_probgroup(class_data(builtin_group("S3")))
    found = {tuple(int(s) for s in sizes(A)): A for A in three.groups}
    s3 = found.get((1, 1, 4))
    z3 = found.get((1, 1, 1))
    agree = True
    for order_ in (2, 3):
        for m in range(1, 7):
            a = [canonical_form(sp) for sp in enumerate_structures(order_, m, prune=True).structures]
            b = [canonical_form(sp) for sp in enumerate_structures(order_, m, prune=False).structures]
            agree &= a == b
    elapsed = time.perf_counter() - t0
    ok = (len(two) == 1 and sizes(two.groups[0]) == [1, 1] and len(three) == 2
          and s3 is not None and s3.prob(2, 2, 2) == Fraction(1, 2) and s3.p == kS3.p
          and z3 is not None and z3.inverse == (0, 2, 1) and agree and elapsed < 60)
    report(8, ok, f"order 2: {len(two)} structure, order 3: {len(three)} structures "
                  f"{sorted(found)}, pruned == unpruned: {agree}", elapsed)
    assert ok


def _constructed_groups():
    out = {}
    for name in ["Z1"] + ALL_BUILTINS:
        G = builtin_group(name)
        cd = class_data(G)
        out[f"{name} group"] = ProbabilityGroup.from_multiplication_table(G.table)
        A = character_probgroup(cd)
        out[f"A(k{name})"] = A
        out[f"{name} classes"] = class_probgroup(cd)
        D = dual(A)
        out[f"dual A(k{name})"] = as_probgroup(D)
        for S in find_subgroups(A):
            out[f"A(k{name})//{S.elements}"] = quotient(A, S).group
    for name in ["S3", "D4", "Q8"]:
        out[f"D({name}) fusion"] = to_probgroup(build_double(builtin_group(name)).fusion_ring())
    for order_ in (2, 3):
        for i, A in enumerate(enumerate_structures(order_, 12).groups):
            out[f"classified {order_}.{i}"] = A
    return out


def test_criterion_9_property_suites(report):
    t0 = time.perf_counter()
    objs = _constructed_groups()
    axiom_fail = [k for k, A in objs.items() if not check_axioms(A).ok]
    derived_fail = [k for k, A in objs.items() if not derived_identities(A).ok]
    worst = 0.0
    for name in ABELIAN + ["S3"]:
        A = character_probgroup(class_data(builtin_group(name)))
        worst = max(worst, *orthogonality(A, dual(A)))
    elapsed = time.perf_counter() - t0
    ok = not axiom_fail and not derived_fail and worst <= TOL
    report(9, ok, f"{len(objs)} probability groups, axiom failures {axiom_fail}, identity failures "
                  f"{derived_fail}, orthogonality residual {worst:.1e}", elapsed)
    assert ok
