"""Worked systems shared by the test modules, with their expected row tables."""

from fractions import Fraction as F

from sparseres.core import System, build_general, build_unmixed
from sparseres.oracles import BILINEAR, simplex_support
from sparseres.subdivision import lifting_from_vertex_values

SQUARE = BILINEAR
THREE_TERM = (((0, 0), (2, 2), (1, 3)), ((0, 0), (2, 0), (1, 2)), ((3, 0), (1, 1)))
TRIANGLE_FAMILY = (SQUARE, ((0, 0), (1, 1)), ((1, 0), (0, 1)))


def univariate_system():
    return System((((0,), (2,), (4,)), ((4,), (8,))))


def univariate_build(**kw):
    opts = dict(delta=(F(1, 3),), b0=(0,), liftings=[[0, 1], [0, 0]])
    opts.update(kw)
    return build_unmixed(univariate_system(), F(5, 2), **opts)


def bilinear_build(**kw):
    opts = dict(delta=(F(2, 3), F(1, 2)), b0=(0, 0),
                liftings=[dict(zip(SQUARE, [0, 1, 1, 2])), dict(zip(SQUARE, [0, 0, 7, 7])), [0, 14, 0, 14]])
    opts.update(kw)
    return build_general(System((SQUARE,) * 3), [(0, 0), (1, 0), (0, 1), (1, 1)], **opts)


def simplex_system():
    return System(tuple(simplex_support(2, k) for k in (1, 2, 3)))


def simplex_build(**kw):
    s = simplex_system()
    w1 = lifting_from_vertex_values(s.supports[1], {(0, 0): 1, (2, 0): 0, (0, 2): 1})
    w2 = lifting_from_vertex_values(s.supports[2], {(0, 0): 1, (3, 0): 1, (0, 3): 0})
    opts = dict(delta=(F(1, 1000), F(1, 1000)), b0=(0, 0), liftings=[w1, w2, [0]])
    opts.update(kw)
    return build_general(s, [(0, 0)], **opts)


def triangle_build(**kw):
    fam = TRIANGLE_FAMILY
    opts = dict(b0=(0, 0), delta=(F(1, 100), F(1, 3)),
                liftings=[{p: 2 for p in fam[1]}, {p: 2 for p in fam[2]}, [0, 0, 0]],
                strict_liftings=True, seed=1, subfamily_policy="last")
    opts.update(kw)
    return build_general(System(fam), [(0, 0), (1, 0), (1, 1)], **opts)


def three_term_build(**kw):
    return build_general(System(THREE_TERM), **kw)


# row point: (multiplier monomial, polynomial, cell, mixed)
BILINEAR_TABLE = {
    (1, 1): ((1, 1), 1, "primary", False),
    (2, 1): ((2, 1), 0, "primary", True),
    (3, 1): ((2, 1), 1, "primary", False),
    (1, 2): ((1, 1), 2, "primary", False),
    (2, 2): ((2, 1), 2, "primary", False),
    (3, 2): ((3, 2), 0, "primary", True),
    (1, 3): ((1, 2), 2, "primary", False),
    # the reference table lists x1x2^2 f2 here; its own matrix row gives x1^2x2^2 f2
    (2, 3): ((2, 2), 2, "primary", False),
    (3, 3): ((2, 2), 1, "primary", False),
    (4, 3): ((3, 2), 1, "(-1, 0)-secondary", True),
    (4, 2): ((3, 2), 2, "(-1, 0)-secondary", False),
    (4, 1): ((3, 1), 2, "(-1, 0)-secondary", True),
    (1, 4): ((1, 3), 2, "(0, -1)-secondary", True),
    (2, 4): ((2, 3), 2, "(0, -1)-secondary", False),
    (3, 4): ((3, 3), 2, "(0, -1)-secondary", False),
    (4, 4): ((3, 3), 1, "(0, -1)-secondary", True),
}

SIMPLEX_TABLE = {
    (1, 3): ((1, 1), 1, "primary", False),
    (1, 4): ((1, 2), 1, "primary", False),
    (2, 3): ((2, 1), 1, "primary", False),
    (4, 1): ((1, 1), 2, "primary", False),
    (5, 1): ((2, 1), 2, "(-1, -1)-secondary", True),
    (1, 5): ((1, 3), 1, "(-1, -1)-secondary", True),
    (2, 4): ((2, 2), 1, "(-1, -1)-secondary", True),
    (3, 3): ((3, 1), 1, "(-1, -1)-secondary", True),
    (4, 2): ((1, 2), 2, "(-1, -1)-secondary", True),
    (1, 1): ((1, 1), 0, "primary", True),
    (1, 2): ((1, 2), 0, "primary", True),
    (2, 1): ((2, 1), 0, "primary", True),
    (3, 1): ((3, 1), 0, "primary", True),
    (3, 2): ((3, 2), 0, "primary", True),
    (2, 2): ((2, 2), 0, "primary", True),
}


def observed_table(m):
    out = {}
    for p in m.points:
        a = m.assignments[p]
        i, pt = a.content
        out[p] = (tuple(x - y for x, y in zip(p, pt)), i, a.cell, a.mixed)
    return out


def random_essential_system(rng, n, span=3, max_points=3):
    """A system of n + 1 small random supports that is essential as a whole."""
    from sparseres.core import analyze_essential

    while True:
        supports = []
        for _ in range(n + 1):
            k = rng.randint(2, max_points)
            pts = {tuple(rng.randint(0, span) for _ in range(n)) for _ in range(k)}
            supports.append(tuple(sorted(pts)))
        if any(len(s) < 2 for s in supports):
            continue
        system = System(tuple(supports))
        an = analyze_essential(system)
        if not an.trivial and len(an.essential_sets[0]) == n + 1:
            return system


# reference resultant of the three-term family, kept verbatim including its slips:
# (coefficient, exponents of alpha1..3, beta1..3, gamma1..2)
ALPHA = ((0, (0, 0)), (0, (2, 2)), (0, (1, 3)))
BETA = ((1, (0, 0)), (1, (2, 0)), (1, (1, 2)))
GAMMA = ((2, (3, 0)), (2, (1, 1)))
REFERENCE_THREE_TERM = [
    (1, (5, 0, 0), (0, 0, 7), (6, 1)),
    (3, (4, 1, 0), (0, 2, 5), (4, 3)),
    (3, (3, 2, 0), (0, 4, 3), (0, 7)),
    (-13, (3, 1, 1), (2, 1, 4), (5, 2)),
    (-7, (3, 0, 2), (1, 3, 3), (4, 3)),
    (6, (2, 3, 0), (3, 1, 3), (4, 3)),
    (1, (2, 3, 0), (0, 6, 1), (0, 7)),
    (-1, (2, 2, 1), (2, 3, 0), (3, 4)),
    (5, (2, 1, 2), (4, 0, 3), (6, 1)),
    (-1, (2, 1, 2), (1, 5, 1), (2, 5)),
    (14, (2, 0, 3), (2, 2, 5), (5, 2)),
    (1, (2, 0, 3), (0, 7, 0), (6, 1)),
    (-2, (1, 4, 0), (3, 3, 1), (2, 5)),
    (-5, (1, 3, 1), (5, 0, 2), (5, 2)),
    (1, (0, 5, 0), (6, 0, 1), (4, 3)),
    (2, (1, 2, 2), (4, 2, 1), (4, 3)),
    (-2, (1, 1, 3), (3, 4, 0), (3, 4)),
    (-7, (1, 0, 4), (5, 1, 1), (6, 1)),
    (1, (0, 2, 3), (6, 1, 0), (5, 2)),
    (1, (0, 0, 5), (7, 0, 0), (7, 0)),
]


def reference_terms(ring):
    syms = ALPHA + BETA + GAMMA
    out = []
    for c, a, b, g in REFERENCE_THREE_TERM:
        mono = ring.const(c)
        for s, e in zip(syms, a + b + g):
            mono = mono * ring.var(s) ** e
        out.append(mono)
    return out
