"""Command-line front end: ``resolve essential|build|resultant|verify|classical``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Sequence

from .core import (NotEssential, SylvesterViolation, fill_entries, NotUnmixed, ResultantMatrix, RowAssignment, SecondaryRecord, System,
                   analyze_essential, build_general, build_unmixed, detect_unmixed, is_block_upper_triangular,
                   leading_block_order, reduce_to_essential, resultant_degrees, rotate_distinguished)
from .geometry import convex_hull, mixed_volume
from .oracles import OracleError, classical_macaulay, planted_root_system, simplex_support
from .subdivision import BoundaryPoint, RetryExhausted
from .symbolic import (CapExceeded, extract_resultant, integer_determinant, render, specialized_quotient,
                       symbolic_determinant)

EXIT_OK, EXIT_PARSE, EXIT_RETRY, EXIT_VERIFY = 0, 2, 3, 4


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------- problem files


def parse_rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(f"{where}: floats are not accepted, write rationals as \"p/q\"")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(f"{where}: bad rational {x!r}") from err
    raise ParseError(f"{where}: expected a rational, got {type(x).__name__}")


def _int_vector(x: Any, where: str) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in x):
        raise ParseError(f"{where}: expected a list of integers")
    return tuple(x)


@dataclass
class ProblemFile:
    supports: list[list[tuple[int, ...]]]
    names: list[list[str]] | None = None
    mode: str = "auto"
    lam: Fraction | None = None
    delta: list[Fraction] | None = None
    q_polytope: list[tuple[Fraction, ...]] | None = None
    b0: tuple[int, ...] | None = None
    liftings: list[list[Fraction]] | None = None
    seed: int = 0
    subfamily_policy: str = "first"
    strict_liftings: bool = False
    extras: dict = field(default_factory=dict)

    def system(self) -> System:
        names = None
        if self.names:
            names = {(i, p): nm for i, (s, ns) in enumerate(zip(self.supports, self.names)) for p, nm in zip(s, ns)}
        return System(tuple(tuple(s) for s in self.supports), names=names)

    def lifting_maps(self) -> list | None:
        """Input-order arrays turned into point-keyed maps."""
        if self.liftings is None:
            return None
        if len(self.liftings) != len(self.supports):
            raise ParseError("liftings: need one array per non-distinguished support plus one for Q")
        out = [dict(zip(s, vals)) for s, vals in zip(self.supports[1:], self.liftings[:-1])]
        out.append(list(self.liftings[-1]))
        return out


def parse_problem(text: str) -> ProblemFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"line {err.lineno}, column {err.colno}: {err.msg}") from err
    if not isinstance(raw, dict):
        raise ParseError("top level must be an object")
    if "supports" not in raw or not isinstance(raw["supports"], list) or not raw["supports"]:
        raise ParseError("supports: required non-empty list")
    supports = []
    for i, s in enumerate(raw["supports"]):
        if not isinstance(s, list) or not s:
            raise ParseError(f"supports[{i}]: expected a non-empty list of points")
        supports.append([_int_vector(p, f"supports[{i}][{k}]") for k, p in enumerate(s)])
    dims = {len(p) for s in supports for p in s}
    if len(dims) != 1:
        raise ParseError("supports: all points must have the same dimension")
    prob = ProblemFile(supports)
    if "names" in raw and raw["names"] is not None:
        names = raw["names"]
        if not isinstance(names, list) or len(names) != len(supports) or any(
                not isinstance(ns, list) or len(ns) != len(s) for ns, s in zip(names, supports)):
            raise ParseError("names: must mirror the shape of supports")
        prob.names = [[str(x) for x in ns] for ns in names]
    mode = raw.get("mode", "auto")
    if mode not in ("auto", "unmixed", "general"):
        raise ParseError(f"mode: unknown value {mode!r}")
    prob.mode = mode
    if raw.get("lambda") is not None:
        prob.lam = parse_rational(raw["lambda"], "lambda")
        if prob.lam < 0:
            raise ParseError("lambda: must be nonnegative")
    delta = raw.get("delta", "random")
    if delta != "random":
        if not isinstance(delta, list):
            raise ParseError("delta: expected a list of rationals or \"random\"")
        prob.delta = [parse_rational(x, f"delta[{k}]") for k, x in enumerate(delta)]
    if raw.get("q_polytope") is not None:
        prob.q_polytope = [tuple(parse_rational(x, f"q_polytope[{k}]") for x in v)
                           for k, v in enumerate(raw["q_polytope"])]
    b0 = raw.get("b0", "auto")
    if b0 != "auto":
        prob.b0 = _int_vector(b0, "b0")
    if raw.get("liftings") is not None:
        lifts = raw["liftings"]
        if not isinstance(lifts, list):
            raise ParseError("liftings: expected a list of arrays")
        prob.liftings = [[parse_rational(x, f"liftings[{k}]") for x in arr] for k, arr in enumerate(lifts)]
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ParseError("seed: expected an integer")
    prob.seed = seed
    policy = raw.get("subfamily_policy", "first")
    if policy not in ("first", "last"):
        raise ParseError("subfamily_policy: expected \"first\" or \"last\"")
    prob.subfamily_policy = policy
    strict = raw.get("strict_liftings", False)
    if not isinstance(strict, bool):
        raise ParseError("strict_liftings: expected true or false")
    prob.strict_liftings = strict
    return prob


def build_from_problem(prob: ProblemFile, seed: int | None = None) -> ResultantMatrix:
    system = prob.system()
    seed = prob.seed if seed is None else seed
    an = analyze_essential(system)
    if not an.trivial and len(an.essential_sets[0]) != len(system.supports):
        if prob.liftings is not None:
            raise ParseError("liftings were given for a family that is not essential as a whole")
        system = reduce_to_essential(system)
    mode = prob.mode
    if mode == "auto":
        try:
            detect_unmixed(system)
            mode = "unmixed" if prob.q_polytope is None else "general"
        except NotUnmixed:
            mode = "general"
    common = dict(b0=prob.b0, liftings=prob.lifting_maps(), seed=seed, delta=prob.delta,
                  strict_liftings=prob.strict_liftings, subfamily_policy=prob.subfamily_policy)
    if mode == "unmixed":
        common.pop("subfamily_policy")
        return build_unmixed(system, prob.lam or 0, **common)
    return build_general(system, prob.q_polytope, **common)


# ---------------------------------------------------------------- rendering


def monomial(p: Sequence[int]) -> str:
    parts = []
    for k, e in enumerate(p, start=1):
        if e == 1:
            parts.append(f"x{k}")
        elif e:
            parts.append(f"x{k}^{e}")
    return "".join(parts) or "1"


def row_table(m: ResultantMatrix) -> list[tuple[str, str, str, str]]:
    out = []
    for p in m.points:
        a = m.assignments[p]
        i, pt = a.content
        shift = tuple(x - y for x, y in zip(p, pt))
        kind = f"mixed({a.mixed_type})" if a.mixed else "non-mixed"
        out.append((monomial(p), f"{monomial(shift)} f{i}", a.cell, kind))
    return out


def format_table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    widths = [max(len(str(r[k])) for r in [header, *rows]) for k in range(len(header))]
    line = lambda r: "  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip()
    return "\n".join([line(header), line(["-" * w for w in widths])] + [line(r) for r in rows])


def _frac(x) -> str:
    return str(Fraction(x))


def matrix_to_json(m: ResultantMatrix) -> dict:
    sys_ = m.system
    return {
        "supports": [[list(p) for p in s] for s in sys_.supports],
        "indices": list(sys_.indices),
        "points": [list(p) for p in m.points],
        "rows": [{"point": list(p), "poly": m.assignments[p].content[0], "a": list(m.assignments[p].content[1]),
                  "mixed": m.assignments[p].mixed, "mixed_type": m.assignments[p].mixed_type,
                  "cell": m.assignments[p].cell} for p in m.points],
        "entries": [[list(p), list(q), [sym[0], list(sym[1])]] for (p, q), sym in sorted(m.entries.items())],
        "extraneous": [list(p) for p in m.non_mixed],
        "b0": list(m.b0),
        "shift_polytope": [[_frac(x) for x in v] for v in m.shift_polytope],
        "heights": [[list(p), _frac(h)] for p, h in sorted(m.heights.items())],
        "secondary": [{"v": list(r.v), "admissible": r.admissible, "essential": [list(e) for e in r.essential],
                       "multiplicity": r.multiplicity, "classes": [[list(p) for p in c] for c in r.classes],
                       "chosen": r.chosen,
                       "sub_mixed": [[list(p), mx, t] for p, (mx, t) in sorted(r.sub_mixed.items())]}
                      for r in m.secondary],
        "warnings": list(m.warnings),
    }


def matrix_from_json(d: dict) -> ResultantMatrix:
    system = System(tuple(tuple(tuple(p) for p in s) for s in d["supports"]), tuple(d["indices"]))
    points = [tuple(p) for p in d["points"]]
    assignments = {}
    for r in d["rows"]:
        p = tuple(r["point"])
        assignments[p] = RowAssignment(p, (r["poly"], tuple(r["a"])), r["mixed"], r["mixed_type"], r["cell"])
    secondary = [SecondaryRecord(tuple(r["v"]), r["admissible"], tuple(tuple(e) for e in r["essential"]),
                                 r["multiplicity"], [[tuple(p) for p in c] for c in r["classes"]], list(r["chosen"]),
                                 {tuple(p): (mx, t) for p, mx, t in r["sub_mixed"]})
                 for r in d["secondary"]]
    m = ResultantMatrix(system, points, assignments, tuple(d["b0"]),
                        [tuple(Fraction(x) for x in v) for v in d["shift_polytope"]],
                        {tuple(p): Fraction(h) for p, h in d["heights"]}, secondary, list(d["warnings"]))
    expected = {(tuple(p), tuple(q)): (s[0], tuple(s[1])) for p, q, s in d["entries"]}
    if m.entries != expected:
        raise ParseError("entries do not follow the fill rule of the stored row contents")
    return m


# ---------------------------------------------------------------- commands


def cmd_essential(prob: ProblemFile, args) -> tuple[int, str, dict]:
    system = prob.system()
    an = analyze_essential(system)
    data = {"codim": an.codim, "essential_sets": [list(e) for e in an.essential_sets], "trivial": an.trivial}
    if an.trivial:
        text = f"codimension {an.codim}; essential sets {data['essential_sets']}; resultant trivial (constant 1)"
        return EXIT_OK, text, data
    degs = resultant_degrees(system)
    data["degrees"] = [degs[i] for i in system.indices]
    ess = "{" + ",".join(map(str, an.essential_sets[0])) + "}"
    text = f"essential: {ess}; degrees {','.join(map(str, data['degrees']))}"
    return EXIT_OK, text, data


def cmd_build(prob: ProblemFile, args) -> tuple[int, str, dict]:
    m = build_from_problem(prob, args.seed)
    data = matrix_to_json(m)
    rows = row_table(m)
    text = format_table(rows, ("row", "coefficients of", "cell", "type"))
    text += f"\nsize {len(m.points)}; extraneous minor on {len(m.non_mixed)} points"
    for w in m.warnings:
        text += f"\nnote: {w}"
    return EXIT_OK, text, data


def cmd_resultant(prob: ProblemFile, args) -> tuple[int, str, dict]:
    m = build_from_problem(prob, args.seed)
    names = m.system.symbol_name
    try:
        res = extract_resultant(m, args.size_cap)
        ext = symbolic_determinant(m.extraneous(), args.size_cap)
    except CapExceeded:
        msg = f"matrix of size {len(m.points)} exceeds the symbolic cap {args.size_cap}; try `resolve verify`"
        return EXIT_OK, msg, {"error": "cap", "size": len(m.points)}
    data = {"resultant": render(res, names), "extraneous": render(ext, names), "terms": len(res.terms)}
    text = f"Res = {data['resultant']}\nextraneous factor = {data['extraneous']}"
    return EXIT_OK, text, data


def _random_assignment(system: System, rng: random.Random, bound: int = 50) -> dict:
    return {sym: rng.choice([k for k in range(-bound, bound + 1) if k]) for sym in system.symbols()}


def verify_problem(prob: ProblemFile, seed: int, trials: int,
                   matrix: ResultantMatrix | None = None) -> list[tuple[str, bool, str]]:
    """Specialization-based checks of a build; returns (name, ok, detail) triples.

    ``matrix`` replaces the build of ``prob`` (used to audit stored or edited matrices).
    """
    checks: list[tuple[str, bool, str]] = []
    rng = random.Random(seed)
    m = matrix if matrix is not None else build_from_problem(prob, seed)
    system = m.system
    try:
        sylvester = fill_entries(system, m.points, m.assignments) == m.entries
    except SylvesterViolation:
        sylvester = False
    checks.append(("rows are monomial multiples of their polynomials", sylvester, ""))
    hulls = {i: convex_hull(s) for i, s in zip(system.indices, system.supports)}
    lat = system.lattice
    counts = m.mixed_counts()
    expect = {i: int(mixed_volume([hulls[j] for j in system.indices if j != i], lat)) for i in system.indices}
    checks.append(("mixed counts equal mixed volumes", counts == expect, f"{counts} vs {expect}"))
    first = system.indices[0]
    e_syms = {s for (p, q), s in m.entries.items() if p in set(m.non_mixed) and q in set(m.non_mixed)}
    checks.append(("extraneous minor free of first polynomial", all(s[0] != first for s in e_syms), ""))
    others = []
    for k in range(2):
        try:
            others.append(build_from_problem(_with_random(prob), seed + 1000 * (k + 1)))
        except (RetryExhausted, BoundaryPoint):
            pass
    rotations = []
    for i in system.indices[1:]:
        try:
            rotations.append(build_general(rotate_distinguished(system, i), seed=seed))
        except (RetryExhausted, BoundaryPoint):
            pass
    ok_div = ok_inv = ok_gcd = True
    for _ in range(trials):
        asg = _random_assignment(system, rng)
        dm, de = specialized_quotient(m, asg)
        if de == 0 or dm % de:
            ok_div = False
            continue
        res = dm // de
        for o in others:
            om, oe = specialized_quotient(o, asg)
            if oe == 0 or om % oe or abs(om // oe) != abs(res):
                ok_inv = False
        g = abs(dm)
        for r in rotations:
            g = gcd(g, integer_determinant(r.symbolic().specialize(asg)))
        if res and g % abs(res):
            ok_gcd = False
    checks.append(("det(E) divides det(M) at random points", ok_div, f"{trials} trials"))
    checks.append(("quotient independent of shift, b0 and liftings", ok_inv, f"{len(others)} extra builds"))
    checks.append(("quotient divides gcd of rotated determinants", ok_gcd, f"{len(rotations)} rotations"))
    vanish = True
    planted = 0
    for k in range(trials):
        try:
            asg = planted_root_system(system.supports, seed * 7919 + k, system.indices)
        except ValueError:
            continue
        planted += 1
        dm, de = specialized_quotient(m, asg)
        if de != 0 and dm != 0:
            vanish = False
    checks.append(("resultant vanishes at planted roots", vanish, f"{planted} systems"))
    order, groups, lead = leading_block_order(m)
    sizes = [len(g) for g in groups]
    tri = is_block_upper_triangular(lead, sizes)
    b0_sym = (first, m.b0)
    diag = sum(1 for k in range(len(order)) if lead.rows[k][k] == b0_sym)
    checks.append(("leading coefficient matrix is block triangular", tri, f"blocks {sizes}"))
    checks.append(("distinguished coefficient on the diagonal M0 times", diag == expect[first],
                   f"{diag} vs {expect[first]}"))
    return checks


def _with_random(prob: ProblemFile) -> ProblemFile:
    """Same problem with the random parts (shift, b0, liftings) left to the seed."""
    clone = ProblemFile(**{**prob.__dict__})
    clone.delta = None
    clone.liftings = None
    clone.b0 = None
    return clone


def cmd_verify(prob: ProblemFile, args) -> tuple[int, str, dict]:
    checks = verify_problem(prob, args.seed if args.seed is not None else prob.seed, args.trials)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "") for name, ok, detail in checks]
    data = {"checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks]}
    return (EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_VERIFY), "\n".join(lines), data


def classical_check(n: int, degrees: Sequence[int], t: int | None, seed: int, trials: int) -> dict:
    """Compare Macaulay's quotient with the sparse construction on the dehomogenized family."""
    tn = sum(m - 1 for m in degrees)
    t = tn + 1 if t is None else t
    data = classical_macaulay(n, degrees, t)
    system = System(tuple(simplex_support(n - 1, m) for m in degrees))
    rotated = rotate_distinguished(system, n - 1)
    eps = Fraction(1, 1000)
    lam = t - tn - 1
    m = build_unmixed(rotated, lam, delta=(eps,) * (n - 1), seed=seed)
    rng = random.Random(seed)
    agree = True
    for _ in range(trials):
        asg = _random_assignment(system, rng)
        d = integer_determinant(data.matrix.specialize(asg))
        e = integer_determinant(data.minor.specialize(asg)) if data.non_reduced else 1
        dm, de = specialized_quotient(m, asg)
        if e == 0 or de == 0 or d % e or dm % de or abs(d // e) != abs(dm // de):
            agree = False
    return {"n": n, "degrees": list(degrees), "t": t, "size": len(data.monomials),
            "non_reduced": len(data.non_reduced), "sparse_size": len(m.points), "agree": agree}


def cmd_classical(prob: ProblemFile | None, args) -> tuple[int, str, dict]:
    if args.degrees is None:
        raise ParseError("classical: --degrees is required")
    try:
        degrees = [int(x) for x in args.degrees.split(",")]
    except ValueError as err:
        raise ParseError(f"classical: bad degree list {args.degrees!r}") from err
    n = args.n if args.n is not None else len(degrees)
    if n < 2:
        raise ParseError("classical: need at least two polynomials")
    seed = args.seed if args.seed is not None else 0
    info = classical_check(n, degrees, args.t, seed, args.trials)
    text = (f"D({n},{info['t']}): {info['size']}x{info['size']}, minor on {info['non_reduced']} non-reduced monomials; "
            f"sparse matrix {info['sparse_size']}x{info['sparse_size']}; "
            f"quotients {'agree' if info['agree'] else 'DISAGREE'} on {args.trials} specializations")
    return (EXIT_OK if info["agree"] else EXIT_VERIFY), text, info


COMMANDS = {"essential": cmd_essential, "build": cmd_build, "resultant": cmd_resultant, "verify": cmd_verify,
            "classical": cmd_classical}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resolve", description="Sylvester-style matrices for sparse resultants.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", help="problem file (JSON); '-' for stdin")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "table"), default="table")
    parser.add_argument("--size-cap", type=int, default=32, help="largest matrix expanded symbolically")
    parser.add_argument("--n", type=int, default=None, help="classical: number of homogeneous polynomials")
    parser.add_argument("--degrees", default=None, help="classical: comma-separated degrees")
    parser.add_argument("--t", type=int, default=None, help="classical: degree of the monomials indexing D(n,t)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    prob = None
    try:
        if args.command != "classical" or args.input:
            if not args.input:
                raise ParseError("--input is required")
            text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
            prob = parse_problem(text)
        code, report, data = COMMANDS[args.command](prob, args)
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (NotEssential, NotUnmixed, OracleError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (RetryExhausted, BoundaryPoint) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RETRY
    out = json.dumps(data, indent=2, sort_keys=True) if args.format == "json" else report
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
