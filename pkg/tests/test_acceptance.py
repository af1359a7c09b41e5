"""Acceptance criteria: exact comparisons, zero tolerance, equality up to one global sign where allowed.

Each test prints one PASS/FAIL line; the lines are also collected into a summary
at the end of the pytest run. Run this file directly for the summary alone.
"""

import random
import time
from fractions import Fraction as F
from math import gcd

from fixtures import (ALPHA, BETA, BILINEAR_TABLE, GAMMA, SIMPLEX_TABLE, SQUARE, THREE_TERM, bilinear_build,
                      observed_table, reference_terms, random_essential_system, simplex_build,
                      three_term_build, triangle_build, univariate_build)
from sparseres.core import (build_general, is_block_upper_triangular, leading_block_order,
                            resultant_degrees, rotate_distinguished)
from sparseres.geometry import convex_hull, mixed_volume
from sparseres.lattice import AffineLattice
from sparseres.oracles import (dixon_bilinear, macaulay_resultant, mixed_volume_by_cells, planted_root_system,
                               sylvester_resultant)
from sparseres.symbolic import (degree_in_group, equal_up_to_sign, evaluate, extract_resultant,
                                integer_determinant, symbolic_determinant)

REPORT = []
CAP = 40


class Criterion:
    def __init__(self, number, title, limit=None):
        self.number, self.title, self.limit = number, title, limit
        self.subs = []
        self.notes = []
        self.start = time.perf_counter()

    def check(self, name, ok):
        self.subs.append((name, bool(ok)))
        return ok

    def note(self, text):
        self.notes.append(text)

    @property
    def ok(self):
        return all(ok for _, ok in self.subs)

    def close(self):
        elapsed = time.perf_counter() - self.start
        if self.limit is not None:
            self.check(f"runtime {elapsed:.2f}s < {self.limit}s", elapsed < self.limit)
        failed = [n for n, ok in self.subs if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"{status}  [{self.number:2d}] {self.title} ({len(self.subs) - len(failed)}/{len(self.subs)} checks)"
        if failed:
            line += "; failed: " + "; ".join(failed)
        for n in self.notes:
            line += f"\n        note: {n}"
        REPORT.append(line)
        print(line)
        assert not failed, line


def sym(poly, point):
    return (poly, tuple(point))


def var(ring, poly, point):
    return ring.var(sym(poly, point))


# ---------------------------------------------------------------- shared state

_cache = {}


def cached(key, fn):
    if key not in _cache:
        _cache[key] = fn()
    return _cache[key]


def fixture_resultant(name):
    builders = {"univariate": univariate_build, "bilinear": bilinear_build, "simplex": simplex_build,
                "triangle": triangle_build, "three_term": lambda: three_term_build(seed=0)}
    return cached(("res", name), lambda: extract_resultant(cached(("m", name), builders[name]), CAP))


# ---------------------------------------------------------------- criteria


def test_c01_mixed_volumes():
    c = Criterion(1, "mixed volumes of the square and the three-term family", limit=1)
    z2 = AffineLattice.full(2)
    sq = convex_hull(SQUARE)
    c.check("MV(C,C) = 2 by inclusion-exclusion", mixed_volume([sq, sq], z2) == 2)
    c.check("MV(C,C) = 2 by mixed cells", mixed_volume_by_cells([sq, sq], z2) == 2)
    q = [convex_hull(s) for s in THREE_TERM]
    pairs = [(0, 1), (0, 2), (1, 2)]
    c.check("MV = 7, 7, 5 by inclusion-exclusion", [mixed_volume([q[i], q[j]], z2) for i, j in pairs] == [7, 7, 5])
    c.check("MV = 7, 7, 5 by mixed cells", [mixed_volume_by_cells([q[i], q[j]], z2) for i, j in pairs] == [7, 7, 5])
    c.close()


def test_c02_univariate_fixture():
    c = Criterion(2, "univariate family on the lattice 2Z", limit=1)
    m = univariate_build()
    c.check("E = {6,8,10,12,14}", m.points == [(6,), (8,), (10,), (12,), (14,)])
    a, b, cc, d, e = sym(0, (0,)), sym(0, (2,)), sym(0, (4,)), sym(1, (4,)), sym(1, (8,))
    reference = ((a, b, cc, None, None), (None, a, b, cc, None), (None, d, e, None, None),
                 (None, None, d, e, None), (None, None, None, d, e))
    c.check("M equals the reference 5x5 in increasing point order", m.symbolic().rows == reference)
    c.check("extraneous minor is [e]", m.extraneous().rows == ((e,),))
    res = extract_resultant(m, CAP)
    c.check("quotient equals the Sylvester resultant", equal_up_to_sign(res, sylvester_resultant(
        [0, 2, 4], [4, 8], ring=res.ring)))
    expected = ((a, b, cc, None, None), (None, a, b, cc, None), (d, None, e, None, None),
                (None, d, None, e, None), (None, None, d, None, e))
    if m.symbolic().rows == expected:
        c.note("computed rows are [d 0 e 0 0], [0 d 0 e 0], [0 0 d 0 e]; the reference rows put d and e in "
               "adjacent columns, which the exponent gap 4 = 2 steps of 2Z rules out")
    c.close()


def test_c03_bilinear_fixture():
    c = Criterion(3, "three bilinear polynomials with the unit square as Q", limit=30)
    m = bilinear_build()
    c.check("16-row content/type table", observed_table(m) == BILINEAR_TABLE)
    r = m.system.ring()
    a, b, cc, d = ([var(r, i, p) for i in range(3)] for p in ((0, 0), (1, 0), (0, 1), (1, 1)))
    want_e = -(cc[2] ** 3) * (-cc[1] * a[2] + a[1] * cc[2]) * b[2] * (cc[1] * d[2] - d[1] * cc[2]) * (
        -b[2] * cc[1] + b[1] * cc[2])
    det_e = symbolic_determinant(m.extraneous(), CAP)
    c.check("det(E) equals the reference product", equal_up_to_sign(det_e, want_e))
    det_m = symbolic_determinant(m.symbolic(), CAP)
    res = fixture_resultant("bilinear")
    c.check("det(M) = +-Res det(E)", equal_up_to_sign(det_m, res * det_e))
    c.check("Res equals the Dixon determinant", equal_up_to_sign(res, dixon_bilinear(r)))
    c.close()


def test_c04_simplex_fixture():
    c = Criterion(4, "dense system of degrees 1, 2, 3 in two variables", limit=60)
    m = cached(("m", "simplex"), simplex_build)
    c.check("15-row content/type table", observed_table(m) == SIMPLEX_TABLE)
    r = m.system.ring()
    b4, b5, b6 = (var(r, 1, p) for p in ((2, 0), (1, 1), (0, 2)))
    c7, c9, c10 = (var(r, 2, p) for p in ((3, 0), (1, 2), (0, 3)))
    det_e = symbolic_determinant(m.extraneous(), CAP)
    c.check("det(E) = b6(c7 b6^2 - b4 b6 c9 + b4 b5 c10)",
            equal_up_to_sign(det_e, b6 * (c7 * b6 ** 2 - b4 * b6 * c9 + b4 * b5 * c10)))
    res = fixture_resultant("simplex")
    c.check("Res equals Macaulay's quotient", equal_up_to_sign(res, macaulay_resultant(3, (1, 2, 3), ring=r)))
    c.close()


def test_c05_triangle_fixture():
    c = Criterion(5, "family with a non-admissible secondary cell", limit=30)
    m = cached(("m", "triangle"), triangle_build)
    r = m.system.ring()
    # b-polynomial has support {(1,0),(0,1)}, c-polynomial {(0,0),(1,1)}
    b1, b2 = var(r, 2, (1, 0)), var(r, 2, (0, 1))
    c2 = var(r, 1, (1, 1))
    factor = b2 * c2 ** 2 * b1 ** 4
    c.check("13x13", len(m.points) == 13)
    det_m = symbolic_determinant(m.symbolic(), CAP)
    res = fixture_resultant("triangle")
    c.check("det(M) = +-b2 c2^2 b1^4 Res", equal_up_to_sign(det_m, factor * res))
    rec = next(x for x in m.secondary if len(x.classes) == 2 and x.multiplicity == 1)
    for choice in range(2):
        alt = m.with_choice(rec.v, [choice])
        det_e = symbolic_determinant(alt.extraneous(), CAP)
        c.check(f"choice {choice} in cell {rec.v}: extraneous factor b2 c2^2 b1^4 (7x7)",
                equal_up_to_sign(det_e, factor) and len(alt.non_mixed) == 7)
    c.close()


def random_systems():
    def make():
        rng = random.Random(2024)
        return [random_essential_system(rng, 1 + k % 2) for k in range(25)]
    return cached("random", make)


def test_c06_degree_law():
    c = Criterion(6, "degrees of Res equal mixed volumes on 25 random essential systems", limit=300)
    bad = 0
    for k, s in enumerate(random_systems()):
        m = cached(("rand", k), lambda: build_general(s, seed=k))
        res = extract_resultant(m, CAP)
        degs = resultant_degrees(s)
        bad += any(degree_in_group(res, i) != degs[i] for i in s.indices)
    c.check(f"{25 - bad}/25 systems with matching degrees", bad == 0)
    c.close()


def test_c07_counting_law():
    c = Criterion(7, "mixed rows of type i number MV of the other polytopes")
    builds = {"univariate": univariate_build(), "bilinear": bilinear_build(), "simplex": simplex_build(),
              "triangle": triangle_build(), "three_term": three_term_build(seed=0)}
    rec = next(x for x in builds["triangle"].secondary if len(x.classes) == 2 and x.multiplicity == 1)
    builds["triangle, other choice"] = builds["triangle"].with_choice(rec.v, [1 - rec.chosen[0]])
    for k, s in enumerate(random_systems()):
        builds[f"random {k}"] = cached(("rand", k), lambda: build_general(s, seed=k))
    for name, m in builds.items():
        if not name.startswith("random"):
            c.check(name, m.mixed_counts() == resultant_degrees(m.system))
    c.check("25 random systems", all(builds[f"random {k}"].mixed_counts() == resultant_degrees(s)
                                     for k, s in enumerate(random_systems())))
    c.close()


VARIANTS = {
    "univariate": (univariate_build, [dict(b0=(4,), delta=None, liftings=None, seed=1),
                                      dict(b0=(0,), delta=None, liftings=None, seed=2),
                                      dict(b0=(4,), delta=(F(1, 5),), liftings=None, seed=3)]),
    "bilinear": (bilinear_build, [dict(b0=(1, 1), delta=None, liftings=None, seed=1),
                                  dict(b0=(1, 0), delta=None, liftings=None, seed=2),
                                  dict(b0=(0, 0), delta=None, liftings=None, seed=3)]),
    "simplex": (simplex_build, [dict(b0=(1, 0), delta=None, liftings=None, seed=1),
                                dict(b0=(0, 1), delta=None, liftings=None, seed=2),
                                dict(b0=(0, 0), delta=None, liftings=None, seed=3)]),
    "triangle": (triangle_build, [dict(b0=(1, 1), delta=None, liftings=None, seed=2),
                                  dict(b0=(1, 0), delta=None, liftings=None, seed=3),
                                  dict(b0=(0, 0), delta=None, liftings=None, seed=4)]),
    "three_term": (three_term_build, [dict(b0=(2, 2), seed=1), dict(b0=(1, 3), seed=2), dict(seed=3)]),
}


def test_c08_invariance():
    c = Criterion(8, "Res independent of b0, shift and lifting seed")
    for name, (builder, variants) in VARIANTS.items():
        base = fixture_resultant(name)
        same = all(equal_up_to_sign(extract_resultant(builder(**kw), CAP), base) for kw in variants)
        c.check(f"{name}: 3 variants", same)
    c.close()


def test_c09_vanishing_and_gcd():
    c = Criterion(9, "vanishing at planted roots and divisibility of rotated determinants")
    for name in VARIANTS:
        m = cached(("m", name), lambda: VARIANTS[name][0]())
        res = fixture_resultant(name)
        s = m.system
        planted = [planted_root_system(s.supports, 1000 * k + 7, s.indices) for k in range(50)]
        c.check(f"{name}: 50 planted roots", all(evaluate(res, asg) == 0 for asg in planted))
        rotations = [m] + [build_general(rotate_distinguished(s, i), seed=i) for i in s.indices[1:]]
        rng = random.Random(99)
        ok = True
        for _ in range(20):
            asg = {x: rng.randint(-30, 30) or 1 for x in s.symbols()}
            value = evaluate(res, asg)
            g = 0
            for r in rotations:
                g = gcd(g, integer_determinant(r.symbolic().specialize(asg)))
            ok &= value != 0 and g % value == 0
        c.check(f"{name}: Res divides the gcd at 20 specializations", ok)
    c.close()


def test_c10_block_structure():
    c = Criterion(10, "graded leading-coefficient matrix of the bilinear build")
    m = bilinear_build()
    order, groups, lead = leading_block_order(m)
    sizes = [len(g) for g in groups]
    c.check("blocks 9, 3, 4", sizes == [9, 3, 4])
    c.check("block upper triangular", is_block_upper_triangular(lead, sizes))
    r = m.system.ring()
    a, b, cc, d = ([var(r, i, p) for i in range(3)] for p in ((0, 0), (1, 0), (0, 1), (1, 1)))
    want = -(a[0] ** 2) * cc[2] ** 3 * (-cc[1] * a[2] + a[1] * cc[2]) * b[2] * (-cc[2] * d[1] + d[2] * cc[1]) ** 2 \
        * (b[1] * d[2] - b[2] * d[1]) * (cc[2] * b[1] - cc[1] * b[2])
    c.check("determinant equals the displayed product", equal_up_to_sign(symbolic_determinant(lead, CAP), want))
    c.close()


def test_c11_three_term_family():
    c = Criterion(11, "three-term family: degrees, vanishing, invariance", limit=120)
    res = fixture_resultant("three_term")
    m = cached(("m", "three_term"), lambda: three_term_build(seed=0))
    s = m.system
    c.check("degrees (5, 7, 7)", [degree_in_group(res, i) for i in s.indices] == [5, 7, 7])
    planted = [planted_root_system(s.supports, 31 * k + 5, s.indices) for k in range(50)]
    c.check("vanishes at 50 planted roots", all(evaluate(res, asg) == 0 for asg in planted))
    others = [three_term_build(**kw) for kw in VARIANTS["three_term"][1]]
    c.check("b0/shift invariant", all(equal_up_to_sign(extract_resultant(o, CAP), res) for o in others))
    # soft comparison against the reference polynomial
    reference = reference_terms(res.ring)
    computed = dict(res.sorted_terms())
    signs = {c_ * computed.get(e, 0) > 0 for t in reference for e, c_ in t.sorted_terms() if e in computed}
    matched = [t for t in reference for e, c_ in t.sorted_terms()
               if e in computed and abs(computed[e]) == abs(c_)]
    syms = ALPHA + BETA + GAMMA
    weights = set()
    for t in reference:
        for e, _ in t.sorted_terms():
            expo = [e[res.ring.symbols.index(x)] for x in syms]
            weights.add(tuple(sum(k * x[1][j] for k, x in zip(expo, syms)) for j in range(2)))
    c.note(f"reference polynomial: {len(matched)}/{len(reference)} terms match the computed "
           f"{len(computed)}-term quotient (one global sign: {len(signs) == 1}); the unmatched reference terms "
           f"break the torus weight shared by all computed terms ({len(weights)} distinct weights among the reference terms)")
    c.close()


if __name__ == "__main__":
    import sys

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
