"""Coherent mixed decompositions of Minkowski sums and the queries built on them.

A decomposition is computed from the dual side: every maximal cell of the
upper envelope is selected by a vector ``u`` such that each summand
contributes the points maximizing ``omega_i(a) - <u, a>``. Such a ``u`` is
pinned down by n independent equalities between lifted points of the same
summand, so enumerating those small linear systems finds every cell.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import linalg as la
from .geometry import RationalPolytope, convex_hull, support_width
from .lattice import AffineLattice, lattice_index

MAX_LIFTING_RETRIES = 32


class BoundaryPoint(ValueError):
    """A lattice point sits on the boundary of a cell; the shift is not generic enough."""

    def __init__(self, point, message: str = ""):
        super().__init__(message or f"point {point} lies on a cell boundary")
        self.point = point


class RetryExhausted(RuntimeError):
    pass


class DecompositionShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Lifting:
    """One value map per summand; the last map usually lifts the extra polytope's vertices."""

    values: tuple[Mapping[tuple, Fraction], ...]

    def __getitem__(self, i: int) -> Mapping[tuple, Fraction]:
        return self.values[i]


@dataclass
class Cell:
    faces: tuple[tuple[tuple, ...], ...]
    witness: tuple[Fraction, ...]
    kind: str = "cell"
    v: tuple[int, ...] | None = None
    _hull: RationalPolytope | None = field(default=None, repr=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(la.rank([la.sub(p, f[0]) for p in f[1:]]) if len(f) > 1 else 0 for f in self.faces)

    @property
    def total(self) -> RationalPolytope:
        if self._hull is None:
            pts = [()]
            for f in self.faces:
                pts = [la.add(a, b) if a else tuple(b) for a in pts for b in f]
                pts = [tuple(p) for p in {la.normalize(p) for p in pts}]
            self._hull = convex_hull(pts, len(self.faces[0][0]))
        return self._hull

    def constant(self, lifting: Lifting) -> Fraction:
        """Height offset c with envelope value <u, x> + c on this cell."""
        return sum((max(Fraction(lifting[i][a]) - la.dot(self.witness, a) for a in f)
                    for i, f in enumerate(self.faces)), Fraction(0))


@dataclass
class CellDecomposition:
    cells: list[Cell]
    lifting: Lifting
    point_sets: tuple[tuple[tuple, ...], ...]
    dim: int

    def is_tight(self) -> bool:
        return all(sum(c.dims) == self.dim for c in self.cells)


def _argmax_face(points: Sequence[tuple], values: Mapping[tuple, Fraction], u: Sequence) -> tuple:
    scored = [(Fraction(values[a]) - la.dot(u, a), a) for a in points]
    best = max(s for s, _ in scored)
    return tuple(sorted(a for s, a in scored if s == best))


def _span_rank(faces: Sequence[Sequence[tuple]]) -> int:
    rows = []
    for f in faces:
        rows.extend(la.sub(p, f[0]) for p in f[1:])
    return la.rank(rows) if rows else 0


def coherent_decomposition(point_sets: Sequence[Sequence[tuple]], lifting: Lifting, dim: int) -> CellDecomposition:
    """All full-dimensional cells of the upper-envelope decomposition of the Minkowski sum."""
    sets = tuple(tuple(sorted({la.normalize(p) for p in s})) for s in point_sets)
    if dim == 0:
        cell = Cell(tuple((s[0],) for s in sets), ())
        return CellDecomposition([cell], lifting, sets, 0)
    equations = []
    for i, s in enumerate(sets):
        for a, b in combinations(s, 2):
            equations.append((la.sub(a, b), Fraction(lifting[i][a]) - Fraction(lifting[i][b])))
    candidates = {tuple(Fraction(0) for _ in range(dim))}
    for combo in combinations(equations, dim):
        u = la.solve([e[0] for e in combo], [e[1] for e in combo])
        if u is not None:
            candidates.add(u)
    seen: dict = {}
    for u in sorted(candidates):
        faces = tuple(_argmax_face(s, lifting[i], u) for i, s in enumerate(sets))
        if faces in seen:
            continue
        if _span_rank(faces) == dim:
            seen[faces] = Cell(faces, la.normalize(u))
    return CellDecomposition(list(seen.values()), lifting, sets, dim)


def macaulay_lifting(point_sets: Sequence[Sequence[tuple]], b0: tuple) -> Lifting:
    """1 on b0 in the first summand, 0 everywhere else."""
    if b0 not in {la.normalize(p) for p in point_sets[0]}:
        raise ValueError(f"{b0} is not a point of the first support")
    vals = [{la.normalize(p): Fraction(0) for p in s} for s in point_sets]
    vals[0][la.normalize(b0)] = Fraction(1)
    return Lifting(tuple(vals))


def linear_lifting(points: Sequence[tuple], weights: Sequence, constant=0) -> dict:
    """Restriction of an affine function to a point set."""
    return {la.normalize(p): Fraction(constant) + la.dot(weights, p) for p in points}


def random_lifting(point_sets: Sequence[Sequence[tuple]], rng: random.Random) -> Lifting:
    m = sum(len(s) for s in point_sets)
    hi = 64 * m * m
    return Lifting(tuple({la.normalize(p): Fraction(rng.randint(0, hi)) for p in s} for s in point_sets))


def generic_tight_lifting(point_sets: Sequence[Sequence[tuple]], dim: int, rng: random.Random,
                          base: Lifting | None = None) -> tuple[Lifting, CellDecomposition]:
    """A lifting whose decomposition is tight.

    With ``base`` given, it is tried first and then perturbed by small random
    amounts; otherwise fresh integer draws are used.
    """
    if base is not None:
        dec = coherent_decomposition(point_sets, base, dim)
        if dec.is_tight():
            return base, dec
    for attempt in range(MAX_LIFTING_RETRIES):
        if base is None:
            lift = random_lifting(point_sets, rng)
        else:
            scale_ = Fraction(1, 1000 * (attempt + 1))
            lift = Lifting(tuple({a: Fraction(w) + scale_ * Fraction(rng.randint(-1000, 1000), 1000) for a, w in vals.items()}
                                 for vals in base.values))
        dec = coherent_decomposition(point_sets, lift, dim)
        if dec.is_tight():
            return lift, dec
    raise RetryExhausted("no tight lifting found within the retry budget")


def classify_cells(dec: CellDecomposition, b0: tuple) -> tuple[Cell, list[Cell]]:
    """Split Macaulay-lifting cells into the primary cell and the secondary cells keyed by v."""
    primary = None
    secondary = []
    for c in dec.cells:
        if c.faces[0] == (b0,) and not any(c.witness):
            c.kind = "primary"
            primary = c
        else:
            if not any(c.witness):
                raise DecompositionShapeError("cell with zero witness is not the primary cell")
            c.kind = "secondary"
            c.v = la.primitive(c.witness)
            secondary.append(c)
    if primary is None:
        raise DecompositionShapeError("no primary cell found")
    secondary.sort(key=lambda c: c.v)
    return primary, secondary


def locate(p: Sequence, cells: Sequence[Cell]) -> Cell:
    """The cell whose interior contains p."""
    hits = [c for c in cells if c.total.interior_contains(p)]
    if len(hits) != 1:
        raise BoundaryPoint(tuple(p))
    return hits[0]


def row_content_primary(p: Sequence, dec: CellDecomposition, b0: tuple) -> tuple[int, tuple, bool]:
    """Row content of a primary point from a tight decomposition of the other summands.

    Summand k of ``dec`` is support k + 1; a trailing extra summand is never chosen.
    Returns (support index, point, mixed) where mixed means every support summand
    has positive dimension.
    """
    shifted = la.sub(p, b0)
    cell = locate(shifted, dec.cells)
    nsupports = len(dec.point_sets) - 1
    dims = cell.dims
    for k in range(nsupports - 1, -1, -1):
        if dims[k] == 0:
            return k + 1, cell.faces[k][0], False
    return 0, b0, True


def support_lattice_rank(point_sets: Sequence[Sequence[tuple]]) -> int:
    rows = []
    for s in point_sets:
        rows.extend(la.sub(p, s[0]) for p in s[1:])
    return la.rank(rows) if rows else 0


def essential_subfamilies(point_sets: Sequence[Sequence[tuple]]) -> list[tuple[int, ...]]:
    """All index sets I with rk(I) = #I - 1 and rk(J) >= #J for proper J, ordered by size then lex."""
    k = len(point_sets)
    rank_of = {}
    for size in range(1, k + 1):
        for J in combinations(range(k), size):
            rank_of[J] = support_lattice_rank([point_sets[j] for j in J])
    out = []
    for size in range(1, k + 1):
        for I in combinations(range(k), size):
            if rank_of[I] != size - 1:
                continue
            ok = all(rank_of[J] >= len(J) for s in range(1, size) for J in combinations(I, s))
            if ok:
                out.append(I)
    return out


def orthogonal_lattice(v: Sequence[int], dim: int) -> AffineLattice:
    """Integer vectors orthogonal to v in Z^dim."""
    from .lattice import row_echelon_unimodular

    e, u = row_echelon_unimodular([[x] for x in v])
    kernel = [u[i] for i in range(len(e)) if not any(e[i])]
    return AffineLattice.linear(kernel, dim)


def direction_diameter(cell: Cell, v: Sequence[int], facet_sets: Sequence[Sequence[tuple]]) -> tuple[Fraction, int, Fraction]:
    """(d_v, ind_v, d_v * ind_v) for a secondary cell of the Macaulay lifting."""
    dim = len(v)
    f0 = convex_hull(cell.faces[0], dim)
    d = support_width(f0, v)
    vecs = []
    for s in facet_sets:
        vecs.extend(la.sub(p, s[0]) for p in s[1:])
    sub_ = AffineLattice.linear(vecs, dim)
    lv = orthogonal_lattice(v, dim)
    ind = lattice_index(sub_, lv) if sub_.rank == lv.rank else 0
    return d, ind, d * ind


def height(p: Sequence, dec: CellDecomposition) -> Fraction:
    """Value at p of the upper envelope of the lifted Minkowski sum."""
    return min(la.dot(c.witness, p) + c.constant(dec.lifting) for c in dec.cells)


def lifting_from_vertex_values(points: Sequence[tuple], vertex_values: Mapping[tuple, object]) -> dict:
    """Extend values given on affinely independent vertices to all points by linearity."""
    verts = [la.normalize(v) for v in vertex_values]
    dim = len(verts[0])
    rows = [list(v) + [1] for v in verts]
    rhs = [Fraction(vertex_values[v]) for v in vertex_values]
    extra = []
    if len(verts) > 1 or dim:
        diffs = [la.sub(v, verts[0]) for v in verts[1:]]
        extra = [list(n) + [0] for n in la.nullspace(diffs, dim)] if diffs else [
            [int(i == j) for j in range(dim)] + [0] for i in range(dim)]
    sol = la.solve(rows + extra, rhs + [Fraction(0)] * len(extra))
    if sol is None:
        raise ValueError("vertex values do not define an affine function")
    w, c = sol[:dim], sol[dim]
    return linear_lifting(points, w, c)
