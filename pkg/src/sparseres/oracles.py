"""Independent reference computations used to cross-check the sparse construction."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Hashable, Sequence

from . import linalg as la
from .geometry import RationalPolytope, convex_hull
from .lattice import AffineLattice, echelon_coordinates
from .subdivision import generic_tight_lifting
from .symbolic import (PolyRing, SparsePoly, SymbolicMatrix, exact_divide, symbolic_determinant)


class OracleError(ValueError):
    pass


# ---------------------------------------------------------------- univariate


def sylvester_matrix(support_f: Sequence[int], support_g: Sequence[int], sym_f=None, sym_g=None):
    """Classical Sylvester matrix in the coordinates of the lattice generated by both supports.

    Returns (matrix, degree of f, degree of g) where entries are symbols
    ``sym_f(a)`` / ``sym_g(b)`` keyed by the original exponents.
    """
    sf, sg = sorted(set(support_f)), sorted(set(support_g))
    sym_f = sym_f or (lambda a: (0, (a,)))
    sym_g = sym_g or (lambda b: (1, (b,)))
    step = 0
    for s in (sf, sg):
        for a in s:
            step = gcd(step, a - s[0])
    if step == 0:
        step = 1
    df, dg = (sf[-1] - sf[0]) // step, (sg[-1] - sg[0]) // step
    size = df + dg
    rows = []
    for k in range(dg):
        row = [None] * size
        for a in sf:
            row[k + (a - sf[0]) // step] = sym_f(a)
        rows.append(row)
    for k in range(df):
        row = [None] * size
        for b in sg:
            row[k + (b - sg[0]) // step] = sym_g(b)
        rows.append(row)
    return rows, df, dg


def sylvester_resultant(support_f: Sequence[int], support_g: Sequence[int], ring: PolyRing | None = None,
                        sym_f=None, sym_g=None) -> SparsePoly:
    """Resultant of two univariate sparse polynomials by the Sylvester determinant."""
    sym_f = sym_f or (lambda a: (0, (a,)))
    sym_g = sym_g or (lambda b: (1, (b,)))
    rows, df, dg = sylvester_matrix(support_f, support_g, sym_f, sym_g)
    if ring is None:
        ring = PolyRing(sorted({sym_f(a) for a in support_f} | {sym_g(b) for b in support_g}))
    if df == 0 and dg == 0:
        return ring.one()
    if df == 0:
        return ring.var(sym_f(support_f[0])) ** dg
    if dg == 0:
        return ring.var(sym_g(support_g[0])) ** df
    return symbolic_determinant(SymbolicMatrix(ring, tuple(map(tuple, rows))), size_cap=64)


# ---------------------------------------------------------------- bilinear

BILINEAR = ((0, 0), (1, 0), (0, 1), (1, 1))


def dixon_matrix() -> list[list]:
    """The 6x6 Dixon matrix of three bilinear polynomials in its customary layout."""
    rows = []
    for i in range(3):
        rows.append([(i, (0, 0)), (i, (1, 0)), (i, (0, 1)), (i, (1, 1)), None, None])
    for i in range(3):
        rows.append([None, (i, (0, 0)), None, (i, (0, 1)), (i, (1, 0)), (i, (1, 1))])
    return rows


def dixon_bilinear(ring: PolyRing | None = None) -> SparsePoly:
    ring = ring or PolyRing(sorted((i, a) for i in range(3) for a in BILINEAR))
    return symbolic_determinant(SymbolicMatrix(ring, tuple(map(tuple, dixon_matrix()))))


# ---------------------------------------------------------------- homogeneous


def _monomials(n: int, t: int) -> list[tuple[int, ...]]:
    """Exponents of total degree t in n variables, graded-lex descending."""
    if n == 1:
        return [(t,)]
    out = []
    for first in range(t, -1, -1):
        out.extend((first,) + rest for rest in _monomials(n - 1, t - first))
    return out


@dataclass
class MacaulayData:
    monomials: list[tuple[int, ...]]
    matrix: SymbolicMatrix
    non_reduced: list[int]
    minor: SymbolicMatrix


def classical_macaulay(n: int, degrees: Sequence[int], t: int | None = None,
                       ring: PolyRing | None = None) -> MacaulayData:
    """Macaulay's matrix for n homogeneous polynomials in n variables.

    The coefficient of x^alpha in C_i is the symbol (i - 1, alpha without its
    last entry), i.e. the coefficient of the dehomogenization at x_n = 1.
    Rows use the first i with x_i^{m_i} dividing the monomial; the minor keeps
    the monomials divisible by two or more of the x_i^{m_i}.
    """
    if len(degrees) != n or n < 1 or any(m < 1 for m in degrees):
        raise OracleError("need n positive degrees")
    tn = sum(m - 1 for m in degrees)
    if t is None:
        t = tn + 1
    if t <= tn:
        raise OracleError(f"t must exceed {tn}")
    mons = _monomials(n, t)
    pos = {m: k for k, m in enumerate(mons)}
    supports = [_monomials(n, m) for m in degrees]
    if ring is None:
        ring = PolyRing(sorted((i, s[:-1]) for i, sup in enumerate(supports) for s in sup))
    rows = []
    non_reduced = []
    for k, alpha in enumerate(mons):
        divisible = [i for i in range(n) if alpha[i] >= degrees[i]]
        i = divisible[0]
        if len(divisible) > 1:
            non_reduced.append(k)
        shift = tuple(a - (degrees[i] if j == i else 0) for j, a in enumerate(alpha))
        row = [None] * len(mons)
        for beta in supports[i]:
            row[pos[tuple(x + y for x, y in zip(shift, beta))]] = (i, beta[:-1])
        rows.append(row)
    matrix = SymbolicMatrix(ring, tuple(map(tuple, rows)))
    return MacaulayData(mons, matrix, non_reduced, matrix.minor(non_reduced))


def macaulay_resultant(n: int, degrees: Sequence[int], t: int | None = None, ring: PolyRing | None = None,
                       size_cap: int = 40) -> SparsePoly:
    data = classical_macaulay(n, degrees, t, ring)
    num = symbolic_determinant(data.matrix, size_cap)
    den = symbolic_determinant(data.minor, size_cap) if data.non_reduced else num.ring.one()
    return exact_divide(num, den)


def simplex_support(dim: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Integer points of k times the standard simplex in Z^dim."""
    out = [p for p in product(range(k + 1), repeat=dim) if sum(p) <= k]
    return tuple(sorted(out))


# ---------------------------------------------------------------- vanishing


def _small_nonzero(rng: random.Random) -> Fraction:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    return Fraction(num, rng.randint(1, 3))


def planted_root_system(supports: Sequence[Sequence[Sequence[int]]], seed: int,
                        indices: Sequence[int] | None = None, bound: int = 9) -> dict[Hashable, int]:
    """Integer coefficients for which all polynomials vanish at a common torus point."""
    rng = random.Random(seed)
    indices = list(indices) if indices is not None else list(range(len(supports)))
    dim = len(supports[0][0])
    for _ in range(64):
        root = [_small_nonzero(rng) for _ in range(dim)]
        out: dict = {}
        ok = True
        for i, s in zip(indices, supports):
            pts = [tuple(p) for p in s]
            if len(pts) < 2:
                raise OracleError("planting needs at least two points per support")
            mono = {a: _power(root, a) for a in pts}
            pivot = rng.choice(pts)
            coeffs = {a: Fraction(rng.randint(-bound, bound)) for a in pts if a != pivot}
            if not any(coeffs.values()):
                ok = False
                break
            coeffs[pivot] = -sum(c * mono[a] for a, c in coeffs.items()) / mono[pivot]
            if coeffs[pivot] == 0:
                ok = False
                break
            den = lcm(*[c.denominator for c in coeffs.values()])
            for a, c in coeffs.items():
                out[(i, a)] = int(c * den)
        if ok:
            return out
    raise OracleError("could not plant a root")


def _power(root: Sequence[Fraction], a: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for x, e in zip(root, a):
        out *= x ** e
    return out


# ---------------------------------------------------------------- mixed volume


def mixed_volume_by_cells(polys: Sequence[RationalPolytope | Sequence[Sequence[int]]], lat: AffineLattice,
                          seed: int = 0) -> int:
    """Sum of the normalized volumes of the fully mixed cells of a random tight subdivision."""
    n = lat.rank
    if len(polys) != n:
        raise OracleError("need as many polytopes as the lattice rank")
    pts_sets = []
    for q in polys:
        verts = q.vertices if isinstance(q, RationalPolytope) else convex_hull(q).vertices
        base = verts[0]
        pts_sets.append([la.normalize(echelon_coordinates(lat.basis, la.sub(v, base))) for v in verts])
    if n == 0:
        return 1
    _, dec = generic_tight_lifting(pts_sets, n, random.Random(seed))
    total = Fraction(0)
    for cell in dec.cells:
        if all(d == 1 for d in cell.dims):
            edges = [la.sub(f[1], f[0]) for f in cell.faces]
            total += abs(la.det(edges))
    if total.denominator != 1:
        raise OracleError("non-integral mixed volume")
    return int(total)
