"""``probhopf`` command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails (or a numeric
routine gives up), 2 on unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import classdata, classify, duality, fusion, groups, probgroup, qdouble
from .errors import InputError, ProbHopfError
from .exactmath import format_number, override_defaults

GROUP_HEADERS = {
    probgroup.HEADER: "probgroup",
    fusion.HEADER: "fusion",
    groups.HEADER: "group",
}


@dataclass
class Check:
    name: str
    passed: bool
    residual: Optional[float] = None
    witness: Optional[str] = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class Report:
    command: str
    lines: List[str] = field(default_factory=list)
    data: List[tuple] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)

    def say(self, text: str = "") -> None:
        self.lines.append(text)

    def value(self, name: str, value) -> None:
        self.data.append((name, value))

    def check(self, name, passed, residual=None, witness=None) -> None:
        self.checks.append(Check(name, bool(passed), None if residual is None else float(residual),
                                 None if witness is None else str(witness)))

    @property
    def exit_code(self) -> int:
        return 0 if all(c.passed for c in self.checks) else 1

    def render(self, fmt: str) -> str:
        if fmt == "json":
            out = [json.dumps({"command": self.command})]
            out += [json.dumps({"name": n, "value": v}) for n, v in self.data]
            for c in self.checks:
                obj = {"name": c.name, "status": c.status, "residual": c.residual}
                if c.witness is not None:
                    obj["witness"] = c.witness
                out.append(json.dumps(obj))
            return "\n".join(out)
        out = list(self.lines)
        for c in self.checks:
            res = "" if c.residual is None else f"  residual={c.residual:.3e}"
            wit = "" if c.witness is None else f"  witness: {c.witness}"
            out.append(f"{c.status.upper():4}  {c.name}{res}{wit}")
        return "\n".join(out)


# --- inputs ----------------------------------------------------------------

def _builtin(ref: str):
    """``(kind, object)`` for ``builtin:NAME[-charring|-classes]``."""
    name = ref[len("builtin:"):]
    base, _, suffix = name.partition("-")
    if base not in groups.BUILTIN_GROUPS:
        raise InputError(f"unknown built-in {ref!r}; known groups: {', '.join(groups.BUILTIN_GROUPS)}")
    G = groups.builtin_group(base)
    if suffix == "":
        return "group", G
    if suffix == "charring":
        return "fusion", fusion.from_group_characters(classdata.class_data(G))
    if suffix == "classes":
        return "probgroup", classdata.class_probgroup(classdata.class_data(G))
    raise InputError(f"unknown built-in suffix {suffix!r} (use -charring or -classes)")


def load_any(ref: str):
    if ref.startswith("builtin:"):
        return _builtin(ref)
    try:
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise probgroup.ParseError("file is not valid UTF-8 text", None, ref) from None
    first = next((ln.split("#", 1)[0].strip() for ln in text.splitlines()
                  if ln.split("#", 1)[0].strip()), "")
    kind = GROUP_HEADERS.get(first)
    if kind == "probgroup":
        return kind, probgroup.loads(text, ref)
    if kind == "fusion":
        return kind, fusion.loads(text, ref)
    if kind == "group":
        return kind, groups.loads(text, ref)
    raise probgroup.ParseError(f"unknown header {first!r}; expected one of {sorted(GROUP_HEADERS)}", 1, ref)


def as_probgroup(ref: str) -> probgroup.ProbabilityGroup:
    kind, obj = load_any(ref)
    if kind == "probgroup":
        return obj
    if kind == "fusion":
        return fusion.to_probgroup(obj)
    return probgroup.ProbabilityGroup.from_multiplication_table(obj.table, obj.names)


def as_fusion(ref: str) -> fusion.FusionRing:
    kind, obj = load_any(ref)
    if kind == "fusion":
        return obj
    if kind == "group":
        return fusion.from_group_table(obj)
    raise InputError(f"{ref} is a probability group, not a fusion ring")


def as_group(ref: str) -> groups.FiniteGroup:
    kind, obj = load_any(ref)
    if kind != "group":
        raise InputError(f"{ref} is not a group (use builtin:NAME or a 'group v1' file)")
    return obj


def _fmt(x) -> str:
    return format_number(x)


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> List[str]:
    cols = [header] + [list(r) for r in rows]
    widths = [max(len(str(r[i])) for r in cols) for i in range(len(header))]
    return ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in cols]


def _axiom_checks(rep: Report, axioms: probgroup.AxiomReport, prefix: str = "", names=None) -> None:
    for r in axioms:
        wit = None
        if r.witness is not None:
            ids = [names[i] if names is not None and isinstance(i, (int, np.integer)) and i < len(names)
                   else i + 1 for i in r.witness]
            wit = f"{r.name} axiom at ({','.join(str(i) for i in ids)})"
            if r.detail:
                wit += f": {r.detail}"
        rep.check(prefix + r.name, r.passed, r.residual, wit)


# --- subcommands -----------------------------------------------------------

def cmd_validate_fusion(args, rep: Report) -> None:
    F = as_fusion(args.input)
    ax = fusion.validate(F)
    _axiom_checks(rep, ax)
    if not ax.ok:
        return
    d = fusion.fpdims(F, args.tol)
    rep.say("FPdims: " + " ".join(_fmt(v) for v in d.values))
    rep.value("fpdims", [_fmt(v) for v in d.values])
    A = fusion.to_probgroup(F, args.tol, d)
    _axiom_checks(rep, probgroup.check_axioms(A, args.tol), "probgroup-")


def cmd_probgroup(args, rep: Report) -> None:
    A = as_probgroup(args.input)
    ax = probgroup.check_axioms(A, args.tol)
    _axiom_checks(rep, ax, names=None)
    if not all(ax[n].passed for n in ("inverse",)):
        return
    s = probgroup.sizes(A)
    rep.say(f"elements: {' '.join(A.names)}")
    rep.say(f"sizes: {' '.join(_fmt(x) for x in s)}")
    rep.say(f"order: {_fmt(probgroup.order(A))}")
    rep.say(f"abelian: {'yes' if probgroup.is_abelian(A, args.tol) else 'no'}")
    rep.value("sizes", [_fmt(x) for x in s])
    rep.value("order", _fmt(probgroup.order(A)))
    rep.value("abelian", probgroup.is_abelian(A, args.tol))
    for r in (1, 2):
        v = probgroup.integrality_class(A, r, args.tol)
        rep.say(f"integrality r={r}: {v.label}")
        rep.value(f"integrality-{r}", v.label)
    if ax.ok:
        _axiom_checks(rep, probgroup.derived_identities(A, args.tol))


def cmd_dual(args, rep: Report) -> None:
    A = as_probgroup(args.input)
    D = duality.dual(A, args.tol, args.seed)
    rows = [[D.names[i]] + [_fmt(v) for v in f.values] for i, f in enumerate(D.functionals)]
    rep.lines += _table([""] + list(A.names), rows)
    rep.value("functionals", [[_fmt(v) for v in f.values] for f in D.functionals])
    rep.say(f"dualizable: {'yes' if D.dualizable else 'no'}")
    rep.value("dualizable", D.dualizable)
    worst = max(f.residual(A) for f in D.functionals)
    rep.check("functional-multiplicativity", worst <= args.tol * max(1, A.n), worst)
    sh = duality.dual_sizes(D)
    rep.say("dual sizes: " + " ".join(_fmt(x) for x in sh))
    rep.value("dual-sizes", [_fmt(x) for x in sh])
    first, second = duality.orthogonality(A, D)
    scale = args.tol * max(1.0, float(probgroup.order(A)))
    rep.check("orthogonality-first", first <= scale, first)
    rep.check("orthogonality-second", second <= scale, second)
    if D.dualizable:
        _axiom_checks(rep, probgroup.check_axioms(duality.as_probgroup(D), args.tol), "dual-")


def cmd_subgroups(args, rep: Report) -> None:
    A = as_probgroup(args.input)
    subs = duality.find_subgroups(A, args.limit)
    for S in subs:
        rep.say("{" + ", ".join(S.names(A)) + "}")
    rep.value("subgroups", [list(S.names(A)) for S in subs])
    rep.say(f"{len(subs)} probability subgroups")


def _parse_subset(A, text: str) -> List[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in A.names:
            out.append(A.names.index(tok))
        elif tok.isdigit() and 1 <= int(tok) <= A.n:
            out.append(int(tok) - 1)
        else:
            raise InputError(f"unknown element {tok!r} in subgroup list")
    return out


def cmd_quotient(args, rep: Report) -> None:
    A = as_probgroup(args.input)
    S = _parse_subset(A, args.subgroup)
    Q = duality.quotient(A, S, args.tol)
    for i, c in enumerate(Q.classes):
        rep.say(f"{Q.group.names[i]} = {{{', '.join(A.names[a] for a in c)}}}")
    rep.value("classes", [[A.names[a] for a in c] for c in Q.classes])
    rep.lines += probgroup.dumps(Q.group).rstrip("\n").split("\n")
    info = duality.check_quotient(A, S, Q, args.tol)
    _axiom_checks(rep, info["axioms"])
    rep.check("order-product", info["order-product-ok"], info["order-product"])


def cmd_group(args, rep: Report) -> None:
    G = as_group(args.input)
    cd = classdata.class_data(G, args.tol, args.seed)
    if args.action == "info":
        rep.say(f"order {G.order}, {cd.m} classes")
        rep.lines += _table(["class", "rep", "size"],
                            [[str(i + 1), G.names[r], str(s)] for i, (r, s)
                             in enumerate(zip(cd.classes.reps, cd.class_sizes))])
        rep.say("character table:")
        rows = [[f"chi{a + 1}"] + [_fmt(v) for v in cd.chars[a]] for a in range(cd.m)]
        rep.lines += _table([""] + [G.names[r] for r in cd.classes.reps], rows)
        rep.value("class-sizes", list(cd.class_sizes))
        rep.value("characters", [[_fmt(v) for v in row] for row in cd.chars])
        rep.check("class-size-divides-order", not classdata.divisibility_failures(cd))
        rep.check("degree-divides-order", not classdata.degree_divisibility_failures(cd))
    elif args.action == "ortho":
        for name, r in classdata.orthogonality_check(cd).items():
            rep.check(f"orthogonality-{name}", r <= args.tol, r)
        for name, r in classdata.verify_factorizations(cd).items():
            rep.check(f"factorization-{name}", r <= args.tol, r)
        classdata.e_matrix(cd, args.tol)
        rep.check("classsums-from-E",
                  np.array_equal(classdata.classsums_from_E(cd, args.tol), cd.constants))
        rep.check("fusion-from-E", np.array_equal(classdata.fusion_from_E(cd, args.tol),
                                                  classdata.character_multiplicities(cd, args.tol)))
        rep.check("class-size-divides-order", not classdata.divisibility_failures(cd))
    else:
        F = fusion.from_group_characters(cd, args.tol)
        rep.lines += fusion.dumps(F).rstrip("\n").split("\n")
        _axiom_checks(rep, fusion.validate(F))


DOUBLE_CHECKS = ("symmetry", "ortho", "integrality", "restriction")


def cmd_double(args, rep: Report) -> None:
    G = as_group(args.input)
    dd = qdouble.build_double(G, args.tol, args.seed, max_order=args.max_order)
    cd = classdata.class_data(G, args.tol, args.seed)
    rep.say(f"D({G.label}): {dd.rank} simples, sum of squared dimensions {sum(d * d for d in dd.dims)}")
    rep.lines += _table(["simple", "dim", "dual"],
                        [[dd.labels[j], str(dd.dims[j]), dd.labels[dd.dual[j]]] for j in range(dd.rank)])
    rep.value("dims", list(dd.dims))
    vd = qdouble.validate_double(dd)
    _axiom_checks(rep, vd["fusion-axioms"], "verlinde-")
    rep.check("verlinde-vs-E", vd["E-reconstruction"] <= args.tol, vd["E-reconstruction"])
    wanted = DOUBLE_CHECKS if args.check == "all" else (args.check,)
    if "symmetry" in wanted:
        r = qdouble.check_E_symmetry(dd)
        rep.check("E-symmetry", r <= args.tol, r)
        iso = qdouble.check_dual_iso(dd)
        rep.check("dual-iso", iso.permutation is not None, iso.residual,
                  None if iso.permutation == tuple(range(dd.rank)) else f"permutation {iso.permutation}")
        rep.check("class-dims-are-squares", iso.size_realization, None,
                  None if iso.size_realization else f"classes {[i + 1 for i in iso.unmatched]}")
    if "ortho" in wanted:
        r = qdouble.orthogonality_double(dd)
        rep.check("orthogonality", r <= args.tol * dd.dim, r)
        div = qdouble.degree_divisibility(dd, cd)
        rep.check("dims-divide-dim", not div["double"] and not div["group"])
    if "integrality" in wanted:
        ci = qdouble.classsum_integrality(dd, cd, args.tol)
        rep.check("classsum-integrality", ci.ok, None,
                  None if ci.ok else f"{len(ci.failures)} non-integral entries")
    if "restriction" in wanted:
        rr = qdouble.restriction_and_Ai(dd, cd, args.tol)
        for i, Ai in enumerate(rr.A):
            rep.say(f"A_{i + 1} = {{{', '.join(dd.labels[j] for j in Ai)}}}  beta = {dd.labels[rr.beta[i]]}")
        rep.value("A", [[dd.labels[j] for j in Ai] for Ai in rr.A])
        rep.check("A-partition", rr.is_partition, None,
                  None if rr.is_partition else f"unmatched {[dd.labels[j] for j in rr.unmatched]}")
        rep.check("beta-in-A", rr.beta_in_A)
        rep.check("class-size-divides-dim-squared", not rr.divisibility_failures, None,
                  None if not rr.divisibility_failures else str(rr.divisibility_failures))
        rep.check("quotient-formula", rr.quotient_formula_residual <= 1e-6, rr.quotient_formula_residual)


def cmd_classify(args, rep: Report) -> None:
    order = args.order
    experimental = False
    if args.experimental_order is not None:
        order, experimental = args.experimental_order, True
    if order is None:
        raise InputError("--order is required")
    res = classify.enumerate_structures(order, args.max_size, not args.no_prune, experimental)
    for sp in res.structures:
        A = sp.group()
        rep.lines += probgroup.dumps(A).rstrip("\n").split("\n")
        rep.say(f"# sizes {' '.join(_fmt(x) for x in probgroup.sizes(A))}")
        rep.say()
        rep.check(f"structure-{len(rep.checks) + 1}-axioms", probgroup.check_axioms(A).ok)
    rep.value("count", len(res))
    rep.value("candidates", res.candidates)
    rep.say(f"{len(res)} structure{'s' if len(res) != 1 else ''} found "
            f"({res.candidates} candidate tensors, max size {args.max_size})")


COMMANDS = {
    "validate-fusion": cmd_validate_fusion,
    "probgroup": cmd_probgroup,
    "dual": cmd_dual,
    "subgroups": cmd_subgroups,
    "quotient": cmd_quotient,
    "group": cmd_group,
    "double": cmd_double,
    "classify": cmd_classify,
}


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=argparse.SUPPRESS,
                        help="numeric tolerance (default 1e-9)")
    common.add_argument("--max-den", type=_positive_int, default=argparse.SUPPRESS,
                        help="largest denominator accepted when snapping (default 10^6)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for random combinations (default 0)")
    common.add_argument("--format", choices=("table", "json"), default=argparse.SUPPRESS,
                        help="output format (json = one object per line)")

    p = argparse.ArgumentParser(prog="probhopf", parents=[common],
                                description="Probability groups, fusion rings, character tables "
                                            "and Drinfeld double modular data.")
    p.set_defaults(tol=1e-9, max_den=10**6, seed=0, format="table")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    s = add("validate-fusion", "check fusion-ring axioms and the induced probability group")
    s.add_argument("input", help="fusionring file or builtin:NAME[-charring]")
    s = add("probgroup", "check probability-group axioms, sizes and integrality")
    s.add_argument("input", help="probgroup/fusionring/group file or builtin:NAME[-charring|-classes]")
    s = add("dual", "functionals, dual structure constants and orthogonality")
    s.add_argument("input")
    s = add("subgroups", "list all probability subgroups")
    s.add_argument("input")
    s.add_argument("--limit", type=_positive_int, default=None, help="stop after this many subgroups")
    s = add("quotient", "quotient by a probability subgroup")
    s.add_argument("input")
    s.add_argument("--subgroup", required=True, help="comma-separated element names or 1-based ids")
    s = add("group", "class data and character table of a finite group")
    s.add_argument("action", choices=("info", "ortho", "fusion"))
    s.add_argument("input", help="group file or builtin:NAME")
    s = add("double", "modular data of the Drinfeld double D(G)")
    s.add_argument("input", help="group file or builtin:NAME")
    s.add_argument("--check", choices=("all",) + DOUBLE_CHECKS, default="all")
    s.add_argument("--max-order", type=_positive_int, default=qdouble.MAX_ORDER,
                   help=f"largest |G| accepted (default {qdouble.MAX_ORDER})")
    s = add("classify", "enumerate 2-integral probability groups with 2 or 3 elements")
    s.add_argument("--order", type=int, choices=(2, 3), default=None)
    s.add_argument("--max-size", type=_positive_int, default=12,
                   help="bound on the square roots of the sizes (default 12)")
    s.add_argument("--no-prune", action="store_true", help="skip the necessary-condition filters")
    s.add_argument("--experimental-order", type=int, choices=(4,), default=None,
                   help="search order 4 (no correctness claim)")
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand, print the report; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    rep = Report(" ".join(["probhopf"] + list(argv if argv is not None else sys.argv[1:])))
    try:
        with override_defaults(tol=args.tol, max_den=args.max_den, seed=args.seed):
            COMMANDS[args.command](args, rep)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except ProbHopfError as exc:
        print(f"failed: {exc}", file=stderr)
        return 1
    text = rep.render(args.format)
    if text:
        print(text, file=stdout, flush=True)
    return rep.exit_code


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
