"""Sparse integer polynomials in coefficient symbols, and exact determinants.

Monomials are packed into a single Python int: one 16-bit field per symbol,
symbol 0 in the most significant field, and the total degree above all of
them. Multiplying monomials is then integer addition, and comparing packed
ints is graded lexicographic order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1


class NotDivisible(ArithmeticError):
    pass


class CapExceeded(RuntimeError):
    pass


class MissingSymbol(KeyError):
    pass


def default_symbol_name(sym: Hashable) -> str:
    if isinstance(sym, tuple) and len(sym) == 2 and isinstance(sym[1], tuple):
        i, a = sym
        return f"c[{i},({','.join(str(x) for x in a)})]"
    return str(sym)


class PolyRing:
    """An ordered list of symbols; the order fixes the monomial order."""

    def __init__(self, symbols: Iterable[Hashable]):
        self.symbols: tuple = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols")
        self.index = {s: k for k, s in enumerate(self.symbols)}
        self.nvars = len(self.symbols)
        self._deg_shift = FIELD_BITS * self.nvars

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def var_key(self, sym: Hashable) -> int:
        k = self.index[sym]
        return (1 << self._deg_shift) + (1 << (FIELD_BITS * (self.nvars - 1 - k)))

    def pack(self, exps: Sequence[int]) -> int:
        key = sum(exps) << self._deg_shift
        for k, e in enumerate(exps):
            if e:
                key += e << (FIELD_BITS * (self.nvars - 1 - k))
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (FIELD_BITS * (self.nvars - 1 - k))) & FIELD_MASK for k in range(self.nvars))

    def total_degree(self, key: int) -> int:
        return key >> self._deg_shift

    def divides(self, a: int, b: int) -> bool:
        """True if monomial a divides monomial b."""
        return all(x <= y for x, y in zip(self.unpack(a), self.unpack(b)))

    def var(self, sym: Hashable) -> "SparsePoly":
        return SparsePoly(self, {self.var_key(sym): 1})

    def const(self, c: int) -> "SparsePoly":
        return SparsePoly(self, {0: int(c)} if c else {})

    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})

    def one(self) -> "SparsePoly":
        return self.const(1)


class SparsePoly:
    """Integer polynomial stored as {packed monomial: coefficient}."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[int, int]):
        self.ring = ring
        self.terms = {k: v for k, v in terms.items() if v}

    def _check(self, other: "SparsePoly") -> None:
        if self.ring != other.ring:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return SparsePoly(self.ring, out)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, int):
            return SparsePoly(self.ring, {k: v * other for k, v in self.terms.items()})
        self._check(other)
        out: dict[int, int] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = k1 + k2
                out[k] = out.get(k, 0) + v1 * v2
        return SparsePoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "SparsePoly":
        out = self.ring.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePoly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"SparsePoly({render(self)})"

    def leading_term(self) -> tuple[int, int]:
        k = max(self.terms)
        return k, self.terms[k]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms as (exponent vector, coefficient) in descending graded lex order."""
        return [(self.ring.unpack(k), self.terms[k]) for k in sorted(self.terms, reverse=True)]

    def total_degree(self) -> int:
        return max((self.ring.total_degree(k) for k in self.terms), default=0)


def exact_divide(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Quotient p / q, raising NotDivisible when the remainder is nonzero."""
    p._check(q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ring = p.ring
    lq, cq = q.leading_term()
    rest = [(k, v) for k, v in q.terms.items() if k != lq]
    rem = dict(p.terms)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    quot: dict[int, int] = {}
    while heap:
        lt = -heapq.heappop(heap)
        c = rem.get(lt, 0)
        if c == 0:
            continue
        if lt < lq or not ring.divides(lq, lt) or c % cq:
            raise NotDivisible("remainder is nonzero")
        t = lt - lq
        qc = c // cq
        quot[t] = qc
        del rem[lt]
        for k, v in rest:
            nk = k + t
            old = rem.get(nk, 0)
            new = old - qc * v
            if new:
                if not old:
                    heapq.heappush(heap, -nk)
                rem[nk] = new
            elif old:
                del rem[nk]
    return SparsePoly(ring, quot)


def equal_up_to_sign(p: SparsePoly, q: SparsePoly) -> bool:
    return p == q or p == -q


def canonical_sign(p: SparsePoly) -> SparsePoly:
    """Sign-normalize so the leading coefficient is positive."""
    if p.is_zero():
        return p
    return -p if p.leading_term()[1] < 0 else p


def degree_in_group(p: SparsePoly, members: Callable[[Hashable], bool] | int) -> int:
    """Maximal total degree in the symbols selected by ``members``.

    An integer ``i`` selects the symbols ``(i, a)`` of the i-th polynomial.
    """
    ring = p.ring
    if isinstance(members, int):
        i = members
        members = lambda s, i=i: isinstance(s, tuple) and s[0] == i
    idx = [k for k, s in enumerate(ring.symbols) if members(s)]
    best = 0
    for key in p.terms:
        e = ring.unpack(key)
        best = max(best, sum(e[k] for k in idx))
    return best


def is_homogeneous_in_group(p: SparsePoly, i: int) -> bool:
    ring = p.ring
    idx = [k for k, s in enumerate(ring.symbols) if isinstance(s, tuple) and s[0] == i]
    degs = {sum(ring.unpack(key)[k] for k in idx) for key in p.terms}
    return len(degs) <= 1


def initial_form(p: SparsePoly, weight: Mapping[Hashable, object]) -> SparsePoly:
    """Sum of the terms of maximal weight (symbols absent from ``weight`` weigh 0)."""
    ring = p.ring
    w = [weight.get(s, 0) for s in ring.symbols]
    scored = {k: sum(a * b for a, b in zip(ring.unpack(k), w)) for k in p.terms}
    if not scored:
        return p
    top = max(scored.values())
    return SparsePoly(ring, {k: p.terms[k] for k, s in scored.items() if s == top})


def evaluate(p: SparsePoly, assignment: Mapping[Hashable, int]) -> int:
    ring = p.ring
    vals = []
    for s in ring.symbols:
        if s not in assignment:
            if any(ring.unpack(k)[ring.index[s]] for k in p.terms):
                raise MissingSymbol(s)
            vals.append(0)
        else:
            vals.append(int(assignment[s]))
    total = 0
    for key, c in p.terms.items():
        term = c
        for e, x in zip(ring.unpack(key), vals):
            if e:
                term *= x**e
        total += term
    return total


def render(p: SparsePoly, names: Callable[[Hashable], str] | None = None) -> str:
    """Terms in descending graded lex order, e.g. ``2*c[0,(1)]^2 - c[1,(0)]``."""
    if p.is_zero():
        return "0"
    name = names or default_symbol_name
    pieces = []
    for exps, c in p.sorted_terms():
        factors = []
        for s, e in zip(p.ring.symbols, exps):
            if e == 1:
                factors.append(name(s))
            elif e:
                factors.append(f"{name(s)}^{e}")
        mono = "*".join(factors)
        mag = abs(c)
        body = mono if mag == 1 and mono else (f"{mag}*{mono}" if mono else str(mag))
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True)
class SymbolicMatrix:
    """Square matrix whose nonzero entries are single symbols."""

    ring: PolyRing
    rows: tuple[tuple[Hashable | None, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def minor(self, keep: Sequence[int]) -> "SymbolicMatrix":
        return SymbolicMatrix(self.ring, tuple(tuple(self.rows[i][j] for j in keep) for i in keep))

    def specialize(self, assignment: Mapping[Hashable, int]) -> list[list[int]]:
        out = []
        for row in self.rows:
            r = []
            for s in row:
                if s is None:
                    r.append(0)
                elif s not in assignment:
                    raise MissingSymbol(s)
                else:
                    r.append(int(assignment[s]))
            out.append(r)
        return out


def _permutation_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def symbolic_determinant(m: SymbolicMatrix, size_cap: int = 20) -> SparsePoly:
    """Exact determinant by row-by-row column-subset expansion with memoization."""
    n = m.dimension
    ring = m.ring
    if n > size_cap:
        raise CapExceeded(f"dimension {n} exceeds the symbolic cap {size_cap}")
    if n == 0:
        return ring.one()
    nz = [[(j, ring.var_key(s)) for j, s in enumerate(row) if s is not None] for row in m.rows]
    # greedy row order keeps the set of touched columns small, which bounds the states
    order: list[int] = []
    used_cols = 0
    remaining = set(range(n))
    while remaining:
        best = min(remaining, key=lambda r: (bin(used_cols | sum(1 << j for j, _ in nz[r])).count("1"), r))
        order.append(best)
        used_cols |= sum(1 << j for j, _ in nz[best])
        remaining.discard(best)
    states: dict[int, dict[int, int]] = {0: {0: 1}}
    for r in order:
        nxt: dict[int, dict[int, int]] = {}
        for mask, poly in states.items():
            for j, key in nz[r]:
                bit = 1 << j
                if mask & bit:
                    continue
                sign = -1 if bin(mask >> (j + 1)).count("1") % 2 else 1
                target = nxt.setdefault(mask | bit, {})
                for k, c in poly.items():
                    nk = k + key
                    v = target.get(nk, 0) + sign * c
                    if v:
                        target[nk] = v
                    else:
                        target.pop(nk, None)
        states = {k: v for k, v in nxt.items() if v}
        if not states:
            return ring.zero()
    result = states.get((1 << n) - 1, {})
    # the expansion above computes det of the row-permuted matrix
    return SparsePoly(ring, result) * _permutation_sign(order)


def integer_determinant(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    a = [list(map(int, r)) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def specialize(obj, assignment: Mapping[Hashable, int]):
    """Integer substitution into a SymbolicMatrix or a SparsePoly."""
    if isinstance(obj, SymbolicMatrix):
        return obj.specialize(assignment)
    if isinstance(obj, SparsePoly):
        return evaluate(obj, assignment)
    raise TypeError(f"cannot specialize {type(obj).__name__}")


def extract_resultant(matrix, size_cap: int = 32) -> SparsePoly:
    """det(M) / det(E) for an object exposing ``symbolic()`` and ``extraneous()``, sign-normalized."""
    num = symbolic_determinant(matrix.symbolic(), size_cap)
    den = symbolic_determinant(matrix.extraneous(), size_cap)
    if den.is_zero():
        raise NotDivisible("extraneous minor vanishes identically")
    return canonical_sign(exact_divide(num, den))


def specialized_quotient(matrix, assignment: Mapping[Hashable, int]) -> tuple[int, int]:
    """(det M, det E) at an integer specialization."""
    return (integer_determinant(matrix.symbolic().specialize(assignment)),
            integer_determinant(matrix.extraneous().specialize(assignment)))
