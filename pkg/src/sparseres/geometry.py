"""Exact rational convex geometry for Newton polytopes.

Polytopes may be lower dimensional; their affine hull is kept as a set of
integer equations and the facets are inequalities relative to that hull.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from . import linalg as la
from .lattice import AffineLattice, echelon_coordinates

Point = tuple  # rational coordinates, integral entries stored as int


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class RationalPolytope:
    """Vertices plus an H-description ``<x, v> >= m`` (facets) and ``<x, e> = c`` (hull equations)."""

    ambient_dim: int
    vertices: tuple[Point, ...]
    facets: tuple[tuple[tuple[int, ...], Fraction], ...]
    equations: tuple[tuple[tuple[int, ...], Fraction], ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.equations)

    def support_value(self, v: Sequence) -> Fraction:
        """m_Q(v) = min over Q of <x, v>."""
        return min(Fraction(la.dot(p, v)) for p in self.vertices)

    def contains(self, x: Sequence) -> bool:
        return all(la.dot(x, e) == c for e, c in self.equations) and all(
            la.dot(x, n) >= m for n, m in self.facets
        )

    def interior_contains(self, x: Sequence) -> bool:
        """Relative-interior membership (strict on every facet)."""
        return all(la.dot(x, e) == c for e, c in self.equations) and all(
            la.dot(x, n) > m for n, m in self.facets
        )


def _dedupe(points: Iterable[Sequence]) -> list[Point]:
    return sorted({la.normalize(p) for p in points})


def _affine_frame(pts: list[Point], dim: int):
    """Origin, rational direction basis and hull equations of the points."""
    o = pts[0]
    diffs = [la.sub(p, o) for p in pts[1:]]
    basis, _ = la.rref(diffs) if diffs else ([], [])
    if len(basis) == dim:
        basis = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    eqs = []
    for n in la.nullspace(basis, dim) if basis else la.nullspace([], dim):
        e = la.primitive(n)
        eqs.append((e, Fraction(la.dot(o, e))))
    return o, [tuple(b) for b in basis], eqs


def _local(x: Sequence, o: Sequence, basis: list[tuple]) -> tuple[Fraction, ...]:
    """Coordinates of x - o in an rref (or identity) basis."""
    d = la.sub(x, o)
    out = []
    for b in basis:
        p = next(j for j, t in enumerate(b) if t != 0)
        out.append(Fraction(d[p]) / b[p])
    return tuple(out)


def _hull_2d(loc: list[tuple]) -> list[int]:
    """Indices of hull vertices in counter-clockwise order (monotone chain)."""
    order = sorted(range(len(loc)), key=lambda i: loc[i])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(loc[lower[-2]], loc[lower[-1]], loc[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(loc[upper[-2]], loc[upper[-1]], loc[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _local_facets(loc: list[tuple], d: int) -> list[tuple[tuple, Fraction]]:
    """Facet inequalities <y, w> >= c of a full-dimensional point set in Q^d."""
    if d == 1:
        xs = [y[0] for y in loc]
        return [((Fraction(1),), min(xs)), ((Fraction(-1),), -max(xs))]
    if d == 2:
        idx = _hull_2d(loc)
        out = []
        for k in range(len(idx)):
            a, b = loc[idx[k]], loc[idx[(k + 1) % len(idx)]]
            # counter-clockwise order: inward normal is the left perpendicular
            w = (-(b[1] - a[1]), b[0] - a[0])
            out.append((w, la.dot(w, a)))
        return out
    found: dict = {}
    for combo in combinations(range(len(loc)), d):
        base = loc[combo[0]]
        rows = [la.sub(loc[i], base) for i in combo[1:]]
        ns = la.nullspace(rows, d)
        if len(ns) != 1:
            continue
        w = la.primitive(ns[0])
        c = la.dot(w, base)
        vals = [la.dot(w, y) for y in loc]
        if all(t >= c for t in vals):
            found[w] = Fraction(c)
        elif all(t <= c for t in vals):
            found[tuple(-x for x in w)] = Fraction(-c)
    return list(found.items())


def convex_hull(points: Iterable[Sequence], ambient_dim: int | None = None) -> RationalPolytope:
    """Vertex and facet description of conv(points)."""
    pts = _dedupe(points)
    if not pts:
        raise GeometryError("convex hull of an empty set")
    dim = ambient_dim if ambient_dim is not None else len(pts[0])
    o, basis, eqs = _affine_frame(pts, dim)
    d = len(basis)
    if d == 0:
        return RationalPolytope(dim, (pts[0],), (), tuple(eqs))
    loc = [_local(p, o, basis) for p in pts]
    lf = _local_facets(loc, d)
    # map local normals back to ambient normals lying in the direction space
    gram = [[la.dot(a, b) for b in basis] for a in basis]
    ginv = la.inverse(gram)
    facets = []
    for w, c in lf:
        coef = [la.dot(row, w) for row in ginv]
        n = [sum(coef[k] * basis[k][j] for k in range(d)) for j in range(dim)]
        prim = la.primitive(n)
        scale = Fraction(prim[next(j for j in range(dim) if prim[j] != 0)]) / next(x for x in n if x != 0)
        facets.append((prim, Fraction(la.dot(o, prim)) + c * scale))
    facets.sort()
    verts = []
    for p in pts:
        tight = [n for n, m in facets if la.dot(p, n) == m]
        if la.rank(tight) == d:
            verts.append(p)
    return RationalPolytope(dim, tuple(verts), tuple(facets), tuple(eqs))


def point_polytope(p: Sequence) -> RationalPolytope:
    return convex_hull([p])


def face(q: RationalPolytope, v: Sequence) -> RationalPolytope:
    """Face of q on which <., v> is minimized."""
    if not any(v):
        raise GeometryError("face direction must be nonzero")
    m = q.support_value(v)
    return convex_hull([p for p in q.vertices if la.dot(p, v) == m], q.ambient_dim)


def face_points(points: Sequence[Sequence], v: Sequence) -> list:
    """Points of a finite set minimizing <., v>."""
    m = min(la.dot(p, v) for p in points)
    return [p for p in points if la.dot(p, v) == m]


def minkowski_sum(a: RationalPolytope, b: RationalPolytope) -> RationalPolytope:
    if a.ambient_dim != b.ambient_dim:
        raise GeometryError("dimension mismatch in Minkowski sum")
    return convex_hull([la.add(x, y) for x in a.vertices for y in b.vertices], a.ambient_dim)


def minkowski_sum_all(polys: Sequence[RationalPolytope], dim: int | None = None) -> RationalPolytope:
    if not polys:
        if dim is None:
            raise GeometryError("empty Minkowski sum needs a dimension")
        return point_polytope((0,) * dim)
    out = polys[0]
    for p in polys[1:]:
        out = minkowski_sum(out, p)
    return out


def scale(q: RationalPolytope, lam) -> RationalPolytope:
    lam = Fraction(lam)
    if lam < 0:
        raise GeometryError("negative scale factor")
    return convex_hull([la.mul(lam, p) for p in q.vertices], q.ambient_dim)


def translate(q: RationalPolytope, delta: Sequence) -> RationalPolytope:
    return convex_hull([la.add(p, [Fraction(x) for x in delta]) for p in q.vertices], q.ambient_dim)


def _chart_points(q: RationalPolytope, lat: AffineLattice) -> list[tuple]:
    out = []
    for p in q.vertices:
        c = lat.coordinates(p)
        if c is None:
            raise GeometryError("polytope is not contained in the lattice's affine span")
        out.append(tuple(c))
    return out


def lattice_points(q: RationalPolytope, lat: AffineLattice) -> list[tuple[int, ...]]:
    """All points of lat inside q, in lexicographic order."""
    if lat.rank == 0:
        return [lat.origin] if q.contains(lat.origin) else []
    try:
        loc = _chart_points(q, lat)
    except GeometryError:
        if lat.rank == lat.ambient_dim:
            raise
        return []
    r = lat.rank
    lo = [min(y[k] for y in loc) for k in range(r)]
    hi = [max(y[k] for y in loc) for k in range(r)]
    ranges = [range(-((-lo[k].numerator) // lo[k].denominator) if isinstance(lo[k], Fraction) else int(lo[k]),
                    (hi[k].numerator // hi[k].denominator if isinstance(hi[k], Fraction) else int(hi[k])) + 1)
              for k in range(r)]
    out = []

    def rec(k: int, acc: list[int]):
        if k == r:
            p = lat.point(acc)
            if q.contains(p):
                out.append(tuple(int(x) for x in p))
            return
        for z in ranges[k]:
            acc.append(z)
            rec(k + 1, acc)
            acc.pop()

    rec(0, [])
    return sorted(out)


def triangulate(q: RationalPolytope) -> list[tuple[Point, ...]]:
    """Pulling triangulation from the lexicographically first vertex."""
    if q.dim == 0:
        return [(q.vertices[0],)]
    v0 = q.vertices[0]
    out = []
    for n, m in q.facets:
        if la.dot(v0, n) == m:
            continue
        fv = [p for p in q.vertices if la.dot(p, n) == m]
        for s in triangulate(convex_hull(fv, q.ambient_dim)):
            out.append((v0,) + s)
    return out


def _simplex_volume(s: Sequence[Sequence]) -> Fraction:
    d = len(s) - 1
    rows = [la.sub(p, s[0]) for p in s[1:]]
    return abs(la.det(rows)) / factorial(d)


def normalized_volume(q: RationalPolytope, lat: AffineLattice) -> Fraction:
    """Euclidean volume in units of the lattice's fundamental parallelotope."""
    r = lat.rank
    base = q.vertices[0]
    loc = []
    for p in q.vertices:
        c = echelon_coordinates(lat.basis, la.sub(p, base)) if r else []
        if c is None:
            raise GeometryError("polytope is not parallel to the lattice")
        loc.append(tuple(c))
    if q.dim > r:
        raise GeometryError("polytope dimension exceeds the lattice rank")
    if q.dim < r or r == 0:
        return Fraction(0) if r else Fraction(1)
    chart = convex_hull(loc, r)
    return sum((_simplex_volume(s) for s in triangulate(chart)), Fraction(0))


def mixed_volume(polys: Sequence[RationalPolytope], lat: AffineLattice) -> Fraction:
    """Inclusion-exclusion mixed volume, normalized so that MV(S_n,...,S_n) = 1."""
    n = lat.rank
    if len(polys) != n:
        raise GeometryError(f"mixed volume needs {n} polytopes, got {len(polys)}")
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for k in range(1, n + 1):
        for sub_ in combinations(range(n), k):
            s = minkowski_sum_all([polys[j] for j in sub_])
            total += (-1) ** (n - k) * normalized_volume(s, lat)
    return total


def support_width(f: RationalPolytope, v: Sequence) -> Fraction:
    if not any(v):
        raise GeometryError("width direction must be nonzero")
    vals = [Fraction(la.dot(p, v)) for p in f.vertices]
    return max(vals) - min(vals)


def support_offset(f: RationalPolytope, v: Sequence) -> Fraction:
    """a_F(v) = -min over F of <m, v>."""
    if not any(v):
        raise GeometryError("direction must be nonzero")
    return -f.support_value(v)


def slice_polytope(q: RationalPolytope, origin: Sequence, directions: Sequence[Sequence]) -> list[tuple]:
    """Vertices, in coordinates t, of {t : origin + sum t_j d_j in q}."""
    k = len(directions)
    o = [Fraction(x) for x in origin]
    # constraints a.t >= b
    cons = []
    for n, m in q.facets:
        cons.append((tuple(Fraction(la.dot(d, n)) for d in directions), m - la.dot(o, n)))
    for e, c in q.equations:
        a = tuple(Fraction(la.dot(d, e)) for d in directions)
        cons.append((a, c - la.dot(o, e)))
        cons.append((tuple(-x for x in a), -(c - la.dot(o, e))))

    def feasible(t):
        return all(la.dot(a, t) >= b for a, b in cons)

    if k == 0:
        return [()] if feasible(()) else []
    found = set()
    for combo in combinations(range(len(cons)), k):
        a = [cons[i][0] for i in combo]
        t = la.solve(a, [cons[i][1] for i in combo])
        if t is not None and feasible(t):
            found.add(la.normalize(t))
    return sorted(found)
