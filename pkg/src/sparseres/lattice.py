"""Integer lattice algebra: Hermite normal forms, saturations, indices and cosets.

Affine lattices are stored as an origin plus a difference lattice whose basis is
kept in Hermite normal form, so two equal lattices always compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Callable, Sequence

Vector = tuple[int, ...]


class LatticeError(ValueError):
    """Raised on containment or rank violations."""


def _floor_div(a: int, b: int) -> int:
    return a // b


def row_echelon_unimodular(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-reduce an integer matrix with unimodular row operations.

    Returns ``(E, U)`` with ``U * M = E``. ``E`` is in Hermite normal form:
    pivots are positive, entries above a pivot lie in ``[0, pivot)``, and the
    zero rows are at the bottom. ``U`` is unimodular.
    """
    m = [list(map(int, r)) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= nrows:
            break
        # Euclid on the column until a single nonzero entry remains at or below pivot_row.
        while True:
            nz = [r for r in range(pivot_row, nrows) if m[r][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda r: abs(m[r][col]))
            if best != pivot_row:
                m[pivot_row], m[best] = m[best], m[pivot_row]
                u[pivot_row], u[best] = u[best], u[pivot_row]
            done = True
            for r in range(pivot_row + 1, nrows):
                if m[r][col] != 0:
                    q = _floor_div(m[r][col], m[pivot_row][col])
                    m[r] = [x - q * y for x, y in zip(m[r], m[pivot_row])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[pivot_row])]
                    if m[r][col] != 0:
                        done = False
            if done:
                break
        if m[pivot_row][col] == 0:
            continue
        if m[pivot_row][col] < 0:
            m[pivot_row] = [-x for x in m[pivot_row]]
            u[pivot_row] = [-x for x in u[pivot_row]]
        p = m[pivot_row][col]
        for r in range(pivot_row):
            q = _floor_div(m[r][col], p)
            if q:
                m[r] = [x - q * y for x, y in zip(m[r], m[pivot_row])]
                u[r] = [x - q * y for x, y in zip(u[r], u[pivot_row])]
        pivot_row += 1
    return m, u


def hermite_basis(vectors: Sequence[Sequence[int]], dim: int) -> tuple[Vector, ...]:
    """Canonical (HNF) basis of the lattice spanned by ``vectors`` in Z^dim."""
    if not vectors:
        return ()
    e, _ = row_echelon_unimodular(vectors)
    return tuple(tuple(r) for r in e if any(r))


def _pivots(basis: Sequence[Sequence[int]]) -> list[int]:
    out = []
    for r in basis:
        out.append(next(j for j, x in enumerate(r) if x != 0))
    return out


def echelon_coordinates(basis: Sequence[Sequence[int]], x: Sequence) -> list[Fraction] | None:
    """Rational coordinates of ``x`` in an echelon basis, or None if outside the span."""
    rest = [Fraction(v) for v in x]
    coords = []
    for row, piv in zip(basis, _pivots(basis)):
        c = rest[piv] / row[piv]
        coords.append(c)
        if c:
            rest = [a - c * b for a, b in zip(rest, row)]
    if any(rest):
        return None
    return coords


@dataclass(frozen=True)
class AffineLattice:
    """An affine lattice ``origin + span_Z(basis)`` in Z^ambient_dim."""

    ambient_dim: int
    origin: Vector
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def linear(cls, vectors: Sequence[Sequence[int]], dim: int) -> "AffineLattice":
        return cls(dim, (0,) * dim, hermite_basis(vectors, dim))

    @classmethod
    def full(cls, dim: int) -> "AffineLattice":
        return cls(dim, (0,) * dim, tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)))

    def coordinates(self, p: Sequence) -> list[Fraction] | None:
        """Rational coordinates of ``p - origin`` in the basis (None if off the span)."""
        diff = [Fraction(a) - b for a, b in zip(p, self.origin)]
        return echelon_coordinates(self.basis, diff)

    def direction_contains(self, d: Sequence) -> bool:
        c = echelon_coordinates(self.basis, d)
        return c is not None and all(x.denominator == 1 for x in c)

    def contains(self, p: Sequence) -> bool:
        c = self.coordinates(p)
        return c is not None and all(x.denominator == 1 for x in c)

    def in_span(self, p: Sequence) -> bool:
        return self.coordinates(p) is not None

    def point(self, coords: Sequence) -> tuple:
        out = list(Fraction(o) for o in self.origin)
        for c, row in zip(coords, self.basis):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return tuple(int(x) if x.denominator == 1 else x for x in out)

    def covolume_squared(self) -> Fraction:
        """Gram determinant of the basis (squared covolume)."""
        g = [[sum(Fraction(a) * b for a, b in zip(r, s)) for s in self.basis] for r in self.basis]
        return _rational_det(g)

    def with_origin(self, origin: Sequence[int]) -> "AffineLattice":
        return AffineLattice(self.ambient_dim, tuple(int(x) for x in origin), self.basis)


def _rational_det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    a = [list(map(Fraction, r)) for r in m]
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return det


def difference_vectors(points: Sequence[Sequence[int]]) -> list[Vector]:
    p0 = points[0]
    return [tuple(int(a) - int(b) for a, b in zip(p, p0)) for p in points[1:]]


def affine_lattice_of(points: Sequence[Sequence[int]]) -> AffineLattice:
    """The affine lattice generated by ``points``, with origin the first point."""
    if not points:
        raise LatticeError("need at least one point")
    dim = len(points[0])
    return AffineLattice(dim, tuple(int(x) for x in points[0]), hermite_basis(difference_vectors(points), dim))


def lattice_of_sum(supports: Sequence[Sequence[Sequence[int]]]) -> AffineLattice:
    """Affine lattice generated by the Minkowski sum of several point sets."""
    dim = len(supports[0][0])
    origin = [0] * dim
    vecs: list[Vector] = []
    for pts in supports:
        origin = [a + b for a, b in zip(origin, pts[0])]
        vecs.extend(difference_vectors(pts))
    return AffineLattice(dim, tuple(origin), hermite_basis(vecs, dim))


def rank_of(points: Sequence[Sequence[int]]) -> int:
    return affine_lattice_of(points).rank


def _sub_coordinates(sub: AffineLattice, sup: AffineLattice) -> list[list[int]]:
    """Integer coordinates of the sub basis vectors in the super basis."""
    rows = []
    for b in sub.basis:
        c = echelon_coordinates(sup.basis, b)
        if c is None or any(x.denominator != 1 for x in c):
            raise LatticeError("sublattice not contained in the ambient lattice")
        rows.append([int(x) for x in c])
    return rows


def saturation(sub: AffineLattice, ambient: AffineLattice) -> AffineLattice:
    """Largest sublattice of ``ambient`` with the same rational span as ``sub``."""
    coords = _sub_coordinates(sub, ambient)
    r = ambient.rank
    if not coords:
        return AffineLattice(ambient.ambient_dim, sub.origin, ())
    sat_coords = _saturate_rows(coords, r)
    vecs = [_combine(ambient.basis, c) for c in sat_coords]
    return AffineLattice(ambient.ambient_dim, sub.origin, hermite_basis(vecs, ambient.ambient_dim))


def _combine(basis: Sequence[Sequence[int]], coeffs: Sequence[int]) -> Vector:
    dim = len(basis[0]) if basis else 0
    out = [0] * dim
    for c, row in zip(coeffs, basis):
        if c:
            out = [a + c * b for a, b in zip(out, row)]
    return tuple(out)


def _complete(rows: list[list[int]], r: int) -> tuple[list[list[int]], list[list[int]]]:
    """Return (W, V) with W = V^{-1} unimodular and rows*V = [H | 0]."""
    cols = [list(col) for col in zip(*rows)]  # r x k
    e, u = row_echelon_unimodular(cols)  # u * cols = e
    v = [list(col) for col in zip(*u)]  # V = U^T
    w = _integer_inverse(u)  # U^{-1}
    w = [list(col) for col in zip(*w)]  # (U^{-1})^T = V^{-1}
    return w, v


def _integer_inverse(u: list[list[int]]) -> list[list[int]]:
    n = len(u)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(u)]
    for i in range(n):
        piv = next(r for r in range(i, n) if a[r][i] != 0)
        a[i], a[piv] = a[piv], a[i]
        f = a[i][i]
        a[i] = [x / f for x in a[i]]
        for r in range(n):
            if r != i and a[r][i] != 0:
                g = a[r][i]
                a[r] = [x - g * y for x, y in zip(a[r], a[i])]
    return [[int(x) for x in row[n:]] for row in a]


def _saturate_rows(rows: list[list[int]], r: int) -> list[list[int]]:
    k = len(rows)
    w, _ = _complete(rows, r)
    # rows = H * W[:k], so the saturation is spanned by the first k rows of W.
    return [list(x) for x in w[:k]]


def lattice_index(sub: AffineLattice, sup: AffineLattice) -> int:
    """Number of cosets of ``sub`` in ``sup`` (equal ranks required)."""
    if sub.rank != sup.rank:
        raise LatticeError("rank mismatch: index is infinite")
    if sub.rank == 0:
        return 1
    coords = _sub_coordinates(sub, sup)
    e, _ = row_echelon_unimodular(coords)
    return prod(e[i][i] for i in range(len(e)))


@dataclass(frozen=True)
class CosetSystem:
    sub: AffineLattice
    sup: AffineLattice
    representatives: tuple[Vector, ...]
    _hnf: tuple[tuple[int, ...], ...]

    def reduce(self, d: Sequence[int]) -> Vector:
        """Canonical representative of the coset of the difference vector ``d``."""
        c = echelon_coordinates(self.sup.basis, d)
        if c is None or any(x.denominator != 1 for x in c):
            raise LatticeError("vector not in the super lattice")
        coords = [int(x) for x in c]
        for i, row in enumerate(self._hnf):
            q = coords[i] // row[i]
            if q:
                coords = [a - q * b for a, b in zip(coords, row)]
        return _combine(self.sup.basis, coords) if self.sup.basis else tuple([0] * self.sup.ambient_dim)


def coset_representatives(sub: AffineLattice, sup: AffineLattice) -> CosetSystem:
    """Mixed-radix coset representatives of ``sub`` in ``sup``."""
    if sub.rank != sup.rank:
        raise LatticeError("rank mismatch: index is infinite")
    if sup.rank == 0:
        zero = tuple([0] * sup.ambient_dim)
        return CosetSystem(sub, sup, (zero,), ())
    coords = _sub_coordinates(sub, sup)
    e, _ = row_echelon_unimodular(coords)
    hnf = tuple(tuple(r) for r in e)
    digits = [range(hnf[i][i]) for i in range(len(hnf))]
    reps = tuple(_combine(sup.basis, list(c)) for c in product(*digits))
    return CosetSystem(sub, sup, reps, hnf)


@dataclass(frozen=True)
class Decomposition:
    saturated: AffineLattice
    complement: AffineLattice
    project: Callable[[Sequence[int]], Vector]
    complement_coordinates: Callable[[Sequence], tuple]

    def __iter__(self):
        return iter((self.saturated, self.complement, self.project))


def orthogonal_decomposition(sub: AffineLattice, ambient: AffineLattice) -> Decomposition:
    """Split ``ambient = saturation(sub) + complement`` and project along the first factor.

    ``project`` returns vectors of the ambient space; ``complement_coordinates``
    returns coordinates in the complement basis (usable for rational vectors too).
    """
    dim = ambient.ambient_dim
    coords = _sub_coordinates(sub, ambient)
    r = ambient.rank
    k = len(coords)
    if r == 0:
        zero = tuple([0] * dim)
        empty = AffineLattice(dim, zero, ())
        return Decomposition(empty, empty, lambda p: zero, lambda p: ())
    if k == 0:
        w = [[int(i == j) for j in range(r)] for i in range(r)]
        v = w
    else:
        w, v = _complete(coords, r)
    sat_vecs = [_combine(ambient.basis, w[i]) for i in range(k)]
    comp_vecs = [_combine(ambient.basis, w[i]) for i in range(k, r)]
    saturated = AffineLattice(dim, tuple([0] * dim), hermite_basis(sat_vecs, dim))
    complement = AffineLattice(dim, tuple([0] * dim), tuple(comp_vecs))

    def comp_coords(p: Sequence) -> tuple:
        c = echelon_coordinates(ambient.basis, p)
        if c is None:
            raise LatticeError("vector outside the ambient span")
        y = [sum(c[a] * v[a][b] for a in range(r)) for b in range(r)]
        return tuple(int(x) if x.denominator == 1 else x for x in y[k:])

    def project(p: Sequence[int]) -> Vector:
        y = comp_coords(p)
        out = [Fraction(0)] * dim
        for coef, vec in zip(y, comp_vecs):
            out = [a + coef * b for a, b in zip(out, vec)]
        return tuple(int(x) if x.denominator == 1 else x for x in out)

    return Decomposition(saturated, complement, project, comp_coords)


@dataclass(frozen=True)
class Chart:
    """Affine bijection between a rank-r affine lattice and Z^r."""

    lattice: AffineLattice

    def forward(self, p: Sequence) -> tuple:
        c = self.lattice.coordinates(p)
        if c is None:
            raise LatticeError(f"point {tuple(p)} is outside the lattice span")
        return tuple(int(x) if x.denominator == 1 else x for x in c)

    def inverse(self, y: Sequence) -> tuple:
        return self.lattice.point(y)

    def forward_vector(self, d: Sequence) -> tuple:
        c = echelon_coordinates(self.lattice.basis, d)
        if c is None:
            raise LatticeError("vector outside the lattice span")
        return tuple(int(x) if x.denominator == 1 else x for x in c)


def to_full_rank_coordinates(lat: AffineLattice) -> Chart:
    if lat.rank == 0:
        raise LatticeError("rank-0 lattice has no coordinates")
    return Chart(lat)
