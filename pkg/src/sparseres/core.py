"""Essential families and the recursive construction of Sylvester-style resultant matrices.

Every subproblem is solved in full-rank local coordinates Z^r. A subproblem
holds r + 1 supports (the first one plays the distinguished role) and an
extra rational polytope R that carries the generic shift. The lattice points
of the Minkowski sum are split into the primary cell and the secondary cells
of the lifting that is 1 at b0 and 0 elsewhere. Secondary cells are sliced
along cosets of the lattice spanned by their essential facet subfamily and
each slice is solved recursively in one dimension less.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Hashable, Mapping, Sequence

from . import linalg as la
from .geometry import convex_hull, lattice_points, minkowski_sum_all, mixed_volume, slice_polytope, support_width
from .lattice import (AffineLattice, coset_representatives, echelon_coordinates, hermite_basis,
                      lattice_index, lattice_of_sum, orthogonal_decomposition)
from .subdivision import (BoundaryPoint, Cell, CellDecomposition, Lifting, RetryExhausted,
                          classify_cells, coherent_decomposition, essential_subfamilies,
                          generic_tight_lifting, height, locate, macaulay_lifting,
                          orthogonal_lattice, row_content_primary, support_lattice_rank)
from .symbolic import PolyRing, SymbolicMatrix

MAX_SHIFT_RETRIES = 32


class ConstructionError(RuntimeError):
    pass


class SylvesterViolation(ConstructionError):
    pass


class NotEssential(ValueError):
    pass


class NotUnmixed(ValueError):
    pass


# ---------------------------------------------------------------- systems


@dataclass(frozen=True)
class System:
    """Supports A_0..A_n of a polynomial family, one symbol (i, a) per point."""

    supports: tuple[tuple[tuple[int, ...], ...], ...]
    indices: tuple[int, ...] = ()
    names: Mapping[Hashable, str] | None = field(default=None, compare=False)

    def __post_init__(self):
        sup = tuple(tuple(sorted({tuple(int(x) for x in p) for p in s})) for s in self.supports)
        if not sup or any(not s for s in sup):
            raise ValueError("every support needs at least one point")
        dims = {len(p) for s in sup for p in s}
        if len(dims) != 1:
            raise ValueError("support points must share one dimension")
        object.__setattr__(self, "supports", sup)
        if not self.indices:
            object.__setattr__(self, "indices", tuple(range(len(sup))))

    @property
    def ambient_dim(self) -> int:
        return len(self.supports[0][0])

    @property
    def lattice(self) -> AffineLattice:
        return lattice_of_sum(self.supports)

    def symbols(self) -> list[tuple]:
        return [(i, a) for i, s in zip(self.indices, self.supports) for a in s]

    def ring(self) -> PolyRing:
        return PolyRing(sorted(self.symbols()))

    def support_of(self, i: int) -> tuple[tuple[int, ...], ...]:
        return self.supports[self.indices.index(i)]

    def symbol_name(self, sym) -> str:
        if self.names and sym in self.names:
            return self.names[sym]
        from .symbolic import default_symbol_name

        return default_symbol_name(sym)


@dataclass(frozen=True)
class EssentialAnalysis:
    codim: int
    essential_sets: tuple[tuple[int, ...], ...]

    @property
    def trivial(self) -> bool:
        return self.codim != 1 or len(self.essential_sets) != 1


def analyze_essential(system: System) -> EssentialAnalysis:
    """Codimension and all essential subfamilies (indices are polynomial indices)."""
    sets = system.supports
    k = len(sets)
    codim = max(len(J) - support_lattice_rank([sets[j] for j in J])
                for size in range(1, k + 1) for J in combinations(range(k), size))
    ess = tuple(tuple(system.indices[j] for j in I) for I in essential_subfamilies(sets))
    return EssentialAnalysis(codim, ess)


def reduce_to_essential(system: System) -> System:
    """Restrict to the unique essential subfamily."""
    an = analyze_essential(system)
    if an.trivial:
        raise NotEssential(f"no unique essential subfamily (codimension {an.codim}); the resultant is 1")
    keep = an.essential_sets[0]
    pos = [system.indices.index(i) for i in keep]
    return System(tuple(system.supports[p] for p in pos), tuple(keep), system.names)


def resultant_degrees(system: System) -> dict[int, int]:
    """Degree of the resultant in the coefficients of each polynomial."""
    an = analyze_essential(system)
    out = {i: 0 for i in system.indices}
    if an.trivial:
        return out
    red = reduce_to_essential(system)
    lat = red.lattice
    hulls = {i: convex_hull(s) for i, s in zip(red.indices, red.supports)}
    for i in red.indices:
        others = [hulls[j] for j in red.indices if j != i]
        out[i] = int(mixed_volume(others, lat))
    return out


def rotate_distinguished(system: System, i: int) -> System:
    """Reorder so that polynomial i takes the distinguished first role."""
    pos = system.indices.index(i)
    order = [pos] + [k for k in range(len(system.supports)) if k != pos]
    return System(tuple(system.supports[k] for k in order), tuple(system.indices[k] for k in order), system.names)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class RowAssignment:
    point: tuple[int, ...]
    content: tuple[int, tuple[int, ...]]
    mixed: bool
    mixed_type: int | None
    cell: str


@dataclass
class SecondaryRecord:
    """Top-level bookkeeping for one secondary cell."""

    v: tuple[int, ...]
    admissible: bool
    essential: tuple[tuple[int, ...], ...]
    multiplicity: int
    classes: list[list[tuple[int, ...]]]
    chosen: list[int]
    sub_mixed: dict


@dataclass
class ResultantMatrix:
    system: System
    points: list[tuple[int, ...]]
    assignments: dict[tuple[int, ...], RowAssignment]
    b0: tuple[int, ...]
    shift_polytope: list[tuple]
    heights: dict[tuple[int, ...], Fraction] = field(default_factory=dict)
    secondary: list[SecondaryRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._entries = None

    @property
    def entries(self) -> dict[tuple[tuple, tuple], tuple]:
        """Nonzero entries keyed by (row point, column point)."""
        if self._entries is None:
            self._entries = fill_entries(self.system, self.points, self.assignments)
        return self._entries

    @property
    def non_mixed(self) -> list[tuple[int, ...]]:
        return [p for p in self.points if not self.assignments[p].mixed]

    @property
    def mixed_index_subset(self) -> list[tuple[int, ...]]:
        return [p for p in self.points if self.assignments[p].mixed]

    def mixed_counts(self) -> dict[int, int]:
        out = {i: 0 for i in self.system.indices}
        for a in self.assignments.values():
            if a.mixed:
                out[a.mixed_type] += 1
        return out

    def symbolic(self, order: Sequence[tuple] | None = None) -> SymbolicMatrix:
        order = list(order) if order is not None else self.points
        pos = {p: k for k, p in enumerate(order)}
        rows = [[None] * len(order) for _ in order]
        for (p, q), sym in self.entries.items():
            if p in pos and q in pos:
                rows[pos[p]][pos[q]] = sym
        return SymbolicMatrix(self.system.ring(), tuple(tuple(r) for r in rows))

    def extraneous(self) -> SymbolicMatrix:
        return self.symbolic(self.non_mixed)

    def with_choice(self, v: Sequence[int], chosen: Sequence[int]) -> "ResultantMatrix":
        """Same matrix with a different set of mixed slices in the secondary cell v."""
        v = tuple(v)
        rec = next(r for r in self.secondary if r.v == v)
        if not rec.admissible or len(chosen) != rec.multiplicity:
            raise ValueError("choice must pick exactly the multiplicity of an admissible cell")
        new_assign = dict(self.assignments)
        for k, cls in enumerate(rec.classes):
            for p in cls:
                old = new_assign[p]
                mixed, typ = rec.sub_mixed[p] if k in chosen else (False, None)
                new_assign[p] = replace(old, mixed=mixed, mixed_type=typ)
        new_rec = replace(rec, chosen=list(chosen))
        out = ResultantMatrix(self.system, self.points, new_assign, self.b0, self.shift_polytope,
                              self.heights, [new_rec if r is rec else r for r in self.secondary],
                              list(self.warnings))
        return out


def fill_entries(system: System, points: Sequence[tuple], assignments: Mapping) -> dict:
    """Row p holds the coefficients of x^(p - a) f_i, checked to stay inside the index set."""
    index = set(points)
    out = {}
    for p in points:
        i, a = assignments[p].content
        for b in system.support_of(i):
            q = tuple(x - y + z for x, y, z in zip(p, a, b))
            if q not in index:
                raise SylvesterViolation(f"row {p} reaches {q} outside the index set")
            out[(p, q)] = (i, b)
    return out


# ---------------------------------------------------------------- recursion data


@dataclass(frozen=True)
class AffineMap:
    """y -> origin + sum_k y_k basis_k between integer coordinate systems."""

    origin: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    def linear(self, y: Sequence) -> tuple:
        out = [0] * len(self.origin)
        for c, b in zip(y, self.basis):
            if c:
                out = [s + c * t for s, t in zip(out, b)]
        return tuple(out)

    def __call__(self, y: Sequence) -> tuple:
        return la.normalize(la.add(self.origin, self.linear(y)))

    def compose(self, origin: Sequence[int], basis: Sequence[Sequence[int]]) -> "AffineMap":
        return AffineMap(self(origin), tuple(self.linear(b) for b in basis))


@dataclass
class Role:
    poly: int
    points: tuple[tuple[int, ...], ...]
    to_orig: AffineMap


@dataclass
class Level:
    roles: list[Role]
    extra: list[tuple]
    point_map: AffineMap
    generic: Lifting | None
    b0: tuple | None = None
    b0_preference: Mapping | None = None
    strict: bool = True


@dataclass
class _Row:
    poly: int
    a: tuple
    mixed: bool
    mixed_type: int | None
    cell: str


def _coords(basis: Sequence[Sequence[int]], d: Sequence) -> tuple:
    c = echelon_coordinates(basis, d)
    if c is None:
        raise ConstructionError("vector outside the expected lattice span")
    return la.normalize(c)


def _difference_vectors(sets: Sequence[Sequence[tuple]]) -> list[tuple]:
    out = []
    for s in sets:
        out.extend(la.sub(p, s[0]) for p in s[1:])
    return out


def facet_multiplicity(v: Sequence[int], role0: Sequence[tuple], b0: tuple, facets: Sequence[Sequence[tuple]],
                       essential: Sequence[int]) -> int:
    """Number of slices of a secondary cell to mark mixed (local coordinates).

    ``facets`` are the faces of supports 1..k in direction v and ``essential``
    indexes the unique essential subfamily among them.
    """
    r = len(v)
    face0 = [p for p in role0 if la.dot(p, v) == min(la.dot(q, v) for q in role0)]
    width = support_width(convex_hull([b0] + face0, r), v)
    lv = orthogonal_lattice(v, r)
    lall = AffineLattice.linear(_difference_vectors(facets), r)
    if lall.rank < r - 1:
        return 0
    index = lattice_index(lall, lv)
    g = AffineLattice.linear(_difference_vectors([facets[j] for j in essential]), r)
    rest = [j for j in range(len(facets)) if j not in essential]
    if not rest:
        extra = Fraction(1)
    else:
        dec = orthogonal_decomposition(g, lall)
        comp_rank = dec.complement.rank
        projected = [convex_hull([dec.complement_coordinates(la.sub(p, facets[j][0])) for p in facets[j]], comp_rank)
                     for j in rest]
        extra = mixed_volume(projected, AffineLattice.full(comp_rank))
    value = width * index * extra
    if value.denominator != 1:
        raise ConstructionError("non-integral multiplicity")
    return int(value)


class Builder:
    def __init__(self, rng: random.Random, subfamily_policy: str = "first"):
        if subfamily_policy not in ("first", "last"):
            raise ValueError("subfamily_policy must be 'first' or 'last'")
        self.rng = rng
        self.subfamily_policy = subfamily_policy
        self.warnings: list[str] = []
        self.top_records: list[SecondaryRecord] = []
        self.top_decomposition: CellDecomposition | None = None

    # -- helpers

    def _choose_b0(self, level: Level) -> tuple:
        pts = level.roles[0].points
        hull = convex_hull(pts)
        if level.b0 is not None:
            return level.b0
        verts = [tuple(int(x) for x in v) for v in hull.vertices]
        if level.b0_preference:
            best = max(level.b0_preference[v] for v in verts)
            verts = [v for v in verts if level.b0_preference[v] == best]
        return min(verts)

    def _generic(self, level: Level, r: int) -> tuple[Lifting, CellDecomposition]:
        """Tight lifting of the non-distinguished supports and R, fixed once per level."""
        sets = [role.points for role in level.roles[1:]] + [level.extra]
        if level.generic is not None and not level.strict:
            dec = coherent_decomposition(sets, level.generic, r)
            if not dec.is_tight():
                self.warnings.append("supplied lifting does not give a tight decomposition; used as given")
            return level.generic, dec
        return generic_tight_lifting(sets, r, self.rng, level.generic)

    # -- recursion

    def solve(self, level: Level, depth: int = 0) -> dict[tuple, _Row]:
        r = len(level.point_map.basis)
        if r == 0:
            if len(level.roles) != 1:
                raise ConstructionError("rank-0 subproblem must have a single support")
            role = level.roles[0]
            return {(): _Row(role.poly, role.to_orig(role.points[0]), True, role.poly, "primary")}
        sets = [role.points for role in level.roles] + [level.extra]
        hull = minkowski_sum_all([convex_hull(s, r) for s in sets])
        points = lattice_points(hull, AffineLattice.full(r))
        b0 = self._choose_b0(level)
        mac = macaulay_lifting(sets, b0)
        dec = coherent_decomposition(sets, mac, r)
        primary, secondary = classify_cells(dec, b0)
        if depth == 0:
            self.top_decomposition = dec
        where: dict[tuple, Cell] = {p: locate(p, dec.cells) for p in points}
        out: dict[tuple, _Row] = {}
        glift, pdec = self._generic(level, r)
        for p in points:
            if where[p] is primary:
                k, a, mixed = row_content_primary(p, pdec, b0)
                role = level.roles[k]
                out[p] = _Row(role.poly, role.to_orig(a), mixed, role.poly if mixed else None, "primary")
        for cell in secondary:
            members = [p for p in points if where[p] is cell]
            if members:
                out.update(self._solve_secondary(level, glift, cell, members, b0, depth))
        return out

    def _solve_secondary(self, level: Level, parent: Lifting, cell: Cell, members: list[tuple], b0: tuple, depth: int):
        r = len(level.point_map.basis)
        v = cell.v
        k = len(level.roles) - 1
        facets = [cell.faces[j] for j in range(1, k + 1)]
        ess = essential_subfamilies(facets)
        admissible = len(ess) == 1
        chosen_ess = ess[0] if self.subfamily_policy == "first" else ess[-1]
        if not admissible:
            self.warnings.append(f"direction {v} is not admissible ({len(ess)} essential subfamilies)")
        I = [j + 1 for j in chosen_ess]
        g_basis = hermite_basis(_difference_vectors([cell.faces[j] for j in I]), r)
        g = AffineLattice(r, (0,) * r, g_basis)
        classes = self._partition(members, g, r)
        classes.sort(key=lambda cls: (la.dot(cls[0], v), cls[0]))
        mult = facet_multiplicity(v, level.roles[0].points, b0, facets, chosen_ess) if admissible else 0
        if mult > len(classes):
            raise ConstructionError(f"direction {v}: multiplicity {mult} exceeds {len(classes)} slices")
        base_pts = {j: cell.faces[j][0] for j in I}
        rest = [cell.faces[0]] + [cell.faces[j] for j in range(1, k + 1) if j not in I] + [cell.faces[-1]]
        tilde = minkowski_sum_all([convex_hull(s, r) for s in rest])
        results: dict[tuple, _Row] = {}
        sub_mixed: dict[tuple, tuple] = {}
        class_rows: list[list[tuple]] = []
        for idx, cls in enumerate(classes):
            c = cls[0]
            sub_rows = self._solve_slice(level, parent, cell, I, g, c, base_pts, tilde, cls, depth)
            keep = admissible and idx < mult
            rows_here = []
            for p in cls:
                row = sub_rows[p]
                sub_mixed[p] = (row.mixed, row.mixed_type)
                results[p] = _Row(row.poly, row.a, row.mixed and keep, row.mixed_type if (row.mixed and keep) else None,
                                  f"{v}-secondary")
                rows_here.append(p)
            class_rows.append(rows_here)
        if depth == 0:
            self.top_records.append(SecondaryRecord(v, admissible, tuple(tuple(x) for x in ess), mult, class_rows,
                                                    list(range(mult)), sub_mixed))
        return results

    @staticmethod
    def _partition(members: list[tuple], g: AffineLattice, r: int) -> list[list[tuple]]:
        if g.rank == 0:
            return [[p] for p in sorted(members)]
        ambient = AffineLattice.full(r)
        dec = orthogonal_decomposition(g, ambient)
        sat = dec.saturated
        cosets = coset_representatives(g, sat)
        groups: dict = {}
        for p in sorted(members):
            y = dec.complement_coordinates(p)
            psat = la.sub(p, dec.complement.point(y))
            key = (y, cosets.reduce(psat))
            groups.setdefault(key, []).append(p)
        return list(groups.values())

    def _solve_slice(self, level: Level, parent: Lifting, cell: Cell, I: list[int], g: AffineLattice, c: tuple, base_pts: dict,
                     tilde, cls: list[tuple], depth: int) -> dict[tuple, _Row]:
        gb = g.basis
        roles = []
        for j in I:
            role = level.roles[j]
            pts = tuple(sorted(_coords(gb, la.sub(b, base_pts[j])) if gb else () for b in cell.faces[j]))
            roles.append(Role(role.poly, pts, role.to_orig.compose(base_pts[j], gb)))
        origin = la.sub(c, [sum(x) for x in zip(*[base_pts[j] for j in I])])
        extra = slice_polytope(tilde, origin, gb)
        if not extra:
            raise ConstructionError("empty slice of the residual polytope")
        # lifting of the new non-distinguished supports is inherited from this level
        gen_vals = []
        inherited = []
        for role_j, j in zip(roles[1:], I[1:]):
            vals = {}
            for b in cell.faces[j]:
                loc = _coords(gb, la.sub(b, base_pts[j])) if gb else ()
                vals[loc] = Fraction(parent[j - 1][b])
            gen_vals.append(vals)
            inherited.extend(vals.values())
        spread = (max(inherited) - min(inherited)) if inherited else Fraction(0)
        dominant = spread + 1
        gen_vals.append({la.normalize(t): dominant * sum(t, Fraction(0)) for t in extra})
        j0 = I[0]
        pref = {(_coords(gb, la.sub(b, base_pts[j0])) if gb else ()): Fraction(parent[j0 - 1][b])
                for b in cell.faces[j0]}
        sub = Level(roles, [la.normalize(t) for t in extra], level.point_map.compose(c, gb),
                    Lifting(tuple(gen_vals)) if len(gb) else None, b0_preference=pref)
        rows = self.solve(sub, depth + 1)
        local = {(_coords(gb, la.sub(p, c)) if gb else ()): p for p in cls}
        if set(rows) != set(local):
            raise ConstructionError("slice subproblem does not reproduce its class of points")
        return {local[y]: row for y, row in rows.items()}


# ---------------------------------------------------------------- entry points


def _parse_lifting(values, points: Sequence[tuple]) -> dict:
    if isinstance(values, Mapping):
        return {la.normalize(k): Fraction(v) for k, v in values.items()}
    if len(values) != len(points):
        raise ValueError("lifting values must align with the support points")
    return {la.normalize(p): Fraction(v) for p, v in zip(points, values)}


def random_shift(dim_basis: Sequence[Sequence[int]], rng: random.Random, span: int) -> tuple:
    """Seeded rational shift inside the lattice span, with denominator 3 * (prime > span)."""
    prime = next(q for q in range(max(span, 2) + 1, 10 * max(span, 2) + 100) if all(q % d for d in range(2, int(q ** 0.5) + 1)))
    den = 3 * prime
    coeffs = [Fraction(rng.randint(1, den - 1), den) for _ in dim_basis]
    out = [Fraction(0)] * len(dim_basis[0])
    for c, b in zip(coeffs, dim_basis):
        out = [x + c * y for x, y in zip(out, b)]
    return tuple(out)


def build_general(system: System, q_vertices: Sequence[Sequence] | None = None, b0: Sequence[int] | None = None,
                  liftings: Sequence | None = None, seed: int = 0, delta: Sequence | None = None,
                  strict_liftings: bool = False, subfamily_policy: str = "first") -> ResultantMatrix:
    """Construct the matrix for an essential family with extra polytope Q (+ delta).

    ``q_vertices`` defaults to the single point 0. When ``delta`` is None a
    seeded random shift is drawn. Whenever a lattice point falls on a cell
    boundary the random parts (shift and/or liftings) are redrawn.
    """
    an = analyze_essential(system)
    if an.trivial:
        raise NotEssential(f"no unique essential subfamily (codimension {an.codim}); the resultant is 1")
    if len(an.essential_sets[0]) != len(system.supports):
        raise NotEssential("family is not essential as a whole; call reduce_to_essential first")
    n = system.ambient_dim
    q_vertices = [tuple(Fraction(x) for x in q) for q in (q_vertices or [(0,) * n])]
    rng = random.Random(seed)
    lat = system.lattice
    span = max((max(p) - min(p)) for s in system.supports for p in zip(*s)) + 1
    # a fixed shift with fixed liftings is deterministic, so one attempt suffices
    attempts = 1 if (delta is not None and liftings is not None and not strict_liftings) else MAX_SHIFT_RETRIES
    last_err: Exception | None = None
    for _ in range(attempts):
        d = tuple(Fraction(x) for x in delta) if delta is not None else random_shift(lat.basis, rng, span)
        try:
            return _build_once(system, [la.add(q, d) for q in q_vertices], b0, liftings, rng, strict_liftings, d,
                               subfamily_policy)
        except BoundaryPoint as err:
            last_err = err
            if attempts == 1:
                raise
    raise RetryExhausted(f"no generic configuration found; last boundary point {last_err.point}")


def _build_once(system: System, r_vertices: list[tuple], b0, liftings, rng: random.Random, strict: bool,
                delta: tuple, subfamily_policy: str = "first") -> ResultantMatrix:
    lat = system.lattice
    basis = lat.basis
    roles = []
    for i, s in zip(system.indices, system.supports):
        pts = tuple(_coords(basis, la.sub(a, s[0])) for a in s)
        roles.append(Role(i, pts, AffineMap(s[0], basis)))
    extra_local = [_coords(basis, q) for q in r_vertices]
    b0_orig = tuple(b0) if b0 is not None else min(tuple(int(x) for x in v) for v in convex_hull(system.supports[0]).vertices)
    if b0_orig not in system.supports[0]:
        raise ValueError(f"b0 = {b0_orig} is not in the first support")
    b0_local = _coords(basis, la.sub(b0_orig, system.supports[0][0]))
    generic = None
    if liftings is not None:
        if len(liftings) != len(system.supports):
            raise ValueError("need one lifting per non-distinguished support plus one for Q")
        vals = []
        for k, s in enumerate(system.supports[1:], start=1):
            d = _parse_lifting(liftings[k - 1], s)
            vals.append({roles[k].points[idx]: d[la.normalize(a)] for idx, a in enumerate(s)})
        qd = _parse_lifting(liftings[-1], [la.sub(q, delta) for q in r_vertices])
        vals.append({la.normalize(_coords(basis, q)): qd[la.normalize(la.sub(q, delta))] for q in r_vertices})
        generic = Lifting(tuple(vals))
    top = Level(roles, [la.normalize(x) for x in extra_local], AffineMap(tuple(x for x in lat.origin), basis),
                generic, b0=b0_local, strict=strict or generic is None)
    builder = Builder(rng, subfamily_policy)
    rows = builder.solve(top)
    assignments = {}
    for y, row in rows.items():
        p = top.point_map(y)
        p = tuple(int(x) for x in p)
        cell = row.cell or "primary"
        assignments[p] = RowAssignment(p, (row.poly, tuple(int(x) for x in row.a)), row.mixed, row.mixed_type,
                                       _orig_label(cell, basis))
    points = sorted(assignments)
    dec = builder.top_decomposition
    heights = {top.point_map(y): height(y, dec) for y in rows} if dec is not None else {}
    heights = {tuple(int(x) for x in p): h for p, h in heights.items()}
    records = []
    for rec in builder.top_records:
        conv = lambda y: tuple(int(x) for x in top.point_map(y))
        records.append(SecondaryRecord(_orig_direction(rec.v, basis), rec.admissible, rec.essential, rec.multiplicity,
                                       [[conv(y) for y in cls] for cls in rec.classes], rec.chosen,
                                       {conv(y): m for y, m in rec.sub_mixed.items()}))
    m = ResultantMatrix(system, points, assignments, b0_orig, [la.normalize(q) for q in r_vertices], heights, records,
                        builder.warnings)
    m.entries  # enforce the Sylvester property at build time
    return m


def _orig_direction(v: Sequence[int], basis: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Ambient normal w with <x, w> proportional to <coords(x), v>."""
    gram = [[la.dot(a, b) for b in basis] for a in basis]
    coef = [la.dot(row, v) for row in la.inverse(gram)]
    w = [sum(coef[k] * basis[k][j] for k in range(len(basis))) for j in range(len(basis[0]))]
    return la.primitive(w)


def _orig_label(cell: str, basis) -> str:
    if cell.endswith("-secondary"):
        v = tuple(int(x) for x in cell[1:cell.index(")")].split(",") if x.strip())
        return f"{_orig_direction(v, basis)}-secondary"
    return cell


@dataclass(frozen=True)
class UnmixedShape:
    polytope_vertices: tuple[tuple, ...]
    factors: tuple[Fraction, ...]


def detect_unmixed(system: System) -> UnmixedShape:
    """Find P and factors k_i with conv(A_i) a translate of k_i P."""
    shifted = []
    for s in system.supports:
        verts = convex_hull(s).vertices
        base = min(verts)
        shifted.append(sorted(la.normalize(la.sub(v, base)) for v in verts))
    g = 0
    for vs in shifted:
        for v in vs:
            for x in v:
                g = gcd(g, int(x))
    if g == 0:
        raise NotUnmixed("all supports are single points")
    p_verts = sorted(la.normalize(la.mul(Fraction(1, g), v)) for v in shifted[0])
    ref = next(v for v in p_verts if any(v))
    axis = next(k for k, x in enumerate(ref) if x)
    factors = []
    for vs in shifted:
        if len(vs) == 1:
            factors.append(Fraction(0))
            continue
        # the image of ref is the vertex with the same position in sorted order
        k = Fraction(vs[p_verts.index(ref)][axis]) / ref[axis] if len(vs) == len(p_verts) else None
        if k is None or k <= 0 or sorted(la.normalize(la.mul(k, w)) for w in p_verts) != vs:
            raise NotUnmixed("hulls are not multiples of a common polytope")
        factors.append(k)
    return UnmixedShape(tuple(p_verts), tuple(factors))


def build_unmixed(system: System, lam, delta: Sequence | None = None, b0: Sequence[int] | None = None,
                  liftings: Sequence | None = None, seed: int = 0, strict_liftings: bool = False) -> ResultantMatrix:
    """Generalized unmixed construction: extra polytope lambda * P shifted by delta."""
    shape = detect_unmixed(system)
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    q = sorted({la.normalize(la.mul(lam, v)) for v in shape.polytope_vertices})
    return build_general(system, q, b0=b0, liftings=liftings, seed=seed, delta=delta,
                         strict_liftings=strict_liftings)


def secondary_multiplicity(matrix: ResultantMatrix, v: Sequence[int]) -> int:
    rec = next((r for r in matrix.secondary if r.v == tuple(v)), None)
    if rec is None:
        raise KeyError(f"no secondary cell with direction {tuple(v)}")
    return rec.multiplicity


def admissible(v: Sequence[int], facet_supports: Sequence[Sequence[tuple]]) -> tuple[bool, tuple[int, ...] | None]:
    ess = essential_subfamilies([sorted(set(map(tuple, s))) for s in facet_supports])
    if len(ess) == 1:
        return True, ess[0]
    return False, None


def leading_block_order(matrix: ResultantMatrix) -> tuple[list[tuple], list[list[tuple]], SymbolicMatrix]:
    """Order by decreasing height and keep only entries of maximal deformation exponent.

    An entry (p, q) of row content (i, a) survives when h(p) - w_i(a) + w_i(b) = h(q)
    with w the lifting that is 1 at b0 in the first polynomial. Returns the
    ordered points, the height groups and the pruned symbolic matrix.
    """
    first = matrix.system.indices[0]
    w = lambda i, a: 1 if (i == first and a == matrix.b0) else 0
    h = matrix.heights
    order = sorted(matrix.points, key=lambda p: (-h[p], p))
    groups: dict = {}
    for p in order:
        groups.setdefault(h[p], []).append(p)
    pos = {p: k for k, p in enumerate(order)}
    rows = [[None] * len(order) for _ in order]
    for (p, q), sym in matrix.entries.items():
        i, a = matrix.assignments[p].content
        if h[p] - w(i, a) + w(*sym) == h[q]:
            rows[pos[p]][pos[q]] = sym
    return order, [groups[k] for k in sorted(groups, reverse=True)], SymbolicMatrix(matrix.system.ring(),
                                                                                    tuple(map(tuple, rows)))


def is_block_upper_triangular(m: SymbolicMatrix, sizes: Sequence[int]) -> bool:
    bounds = []
    start = 0
    for s in sizes:
        bounds.extend([start] * s)
        start += s
    return all(m.rows[i][j] is None for i in range(len(m.rows)) for j in range(len(m.rows)) if j < bounds[i])
