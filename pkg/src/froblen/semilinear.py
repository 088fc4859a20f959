"""Twisted (Frobenius-semilinear) matrix algebra over exact coefficient domains.

A ``TwistedMatrix`` packages a square matrix ``A`` together with a twist
exponent ``e`` and represents the additive map ``f(b) = A b^[p^e]``,
where ``[p^e]`` raises coordinates to the ``p^e``-th power in the
coefficient domain (GF(p), GF(p^m), or GF(p)[t]).

On top of that sit the structural computations: iterates ``B_m`` with
``B_{m+1} = B_m A^[p^{e m}]``, twisted change of basis, the stable part
(eventual column space), nilpotency, Krylov closures, the longest flag
of f-stable subspaces with non-nilpotent successive quotients, finite
order of invertible maps over finite fields, and a 3x3 cyclic
determinant with its closed-form expansion and degree-dominance
certificate over GF(p)[t].
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

from .errors import PreconditionError, ResourceLimitError, UnsupportedDomainError
from .ff import ExtFieldElem, FieldElem, check_prime, ext_field, ext_frobenius
from .poly import NEG_INF, UniPoly

log = logging.getLogger(__name__)

DEFAULT_FLAG_DIM_CAP = 8
GENERIC_STATE_CAP = 10**8
LATTICE_CAP = 200_000
LINEAR_SCAN_MAX_P = 100_000
FINITE_ORDER_CAP = 10**6
_DIRECT_ORDER_SCAN = 128


# ---------------------------------------------------------------------------
# Coefficient domains.


class FpDomain:
    """GF(p) coefficients."""

    kind = "Fp"
    is_finite_field = True

    def __init__(self, p: int):
        check_prime(p)
        self.p = p
        self.order = p
        self.ext_degree = 1

    def coerce(self, x) -> FieldElem:
        if isinstance(x, FieldElem):
            if x.p != self.p:
                raise PreconditionError("mixed moduli")
            return x
        if isinstance(x, int):
            return FieldElem(x, self.p)
        raise PreconditionError(f"cannot coerce {x!r} into GF({self.p})")

    def zero(self) -> FieldElem:
        return FieldElem(0, self.p)

    def one(self) -> FieldElem:
        return FieldElem(1, self.p)

    def frob(self, x: FieldElem, k: int) -> FieldElem:
        return x  # a^(p^k) = a in GF(p)

    def inv(self, x: FieldElem) -> FieldElem:
        return x.inv()

    def elements(self) -> Iterator[FieldElem]:
        return (FieldElem(i, self.p) for i in range(self.p))

    def json_entry(self, x: FieldElem):
        return x.value

    def entry_from_json(self, v) -> FieldElem:
        return FieldElem(int(v), self.p)

    def __eq__(self, other):
        return isinstance(other, FpDomain) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"FpDomain({self.p})"


class FpmDomain:
    """GF(p^m) coefficients, m >= 2, built on the packaged modulus table."""

    kind = "Fpm"
    is_finite_field = True

    def __init__(self, p: int, m: int):
        self.field = ext_field(p, m)
        self.p = p
        self.m = m
        self.order = p**m
        self.ext_degree = m

    def coerce(self, x) -> ExtFieldElem:
        return self.field.elem(x)

    def zero(self) -> ExtFieldElem:
        return self.field.zero()

    def one(self) -> ExtFieldElem:
        return self.field.one()

    def frob(self, x: ExtFieldElem, k: int) -> ExtFieldElem:
        k %= self.m  # the Frobenius automorphism has order m
        for _ in range(k):
            x = ext_frobenius(x)
        return x

    def inv(self, x: ExtFieldElem) -> ExtFieldElem:
        return x.inv()

    def elements(self) -> Iterator[ExtFieldElem]:
        return self.field.elements()

    def json_entry(self, x: ExtFieldElem):
        return list(x.coeffs)

    def entry_from_json(self, v) -> ExtFieldElem:
        return self.field.elem(tuple(int(c) for c in v))

    def __eq__(self, other):
        return isinstance(other, FpmDomain) and other.field == self.field

    def __hash__(self):
        return hash(("Fpm", self.p, self.m))

    def __repr__(self):
        return f"FpmDomain({self.p}, {self.m})"


class PolyDomain:
    """GF(p)[t] coefficients; a ring, not a field."""

    kind = "Fp[t]"
    is_finite_field = False

    def __init__(self, p: int):
        check_prime(p)
        self.p = p
        self.order = None
        self.ext_degree = 1

    def coerce(self, x) -> UniPoly:
        if isinstance(x, UniPoly):
            if x.p != self.p:
                raise PreconditionError("mixed moduli")
            return x
        if isinstance(x, int):
            return UniPoly.const(x, self.p)
        if isinstance(x, FieldElem):
            if x.p != self.p:
                raise PreconditionError("mixed moduli")
            return UniPoly.const(x.value, self.p)
        raise PreconditionError(f"cannot coerce {x!r} into GF({self.p})[t]")

    def zero(self) -> UniPoly:
        return UniPoly.zero(self.p)

    def one(self) -> UniPoly:
        return UniPoly.const(1, self.p)

    def frob(self, x: UniPoly, k: int) -> UniPoly:
        return x.frobenius(k)

    def inv(self, x: UniPoly):
        if x.degree == 0:
            return UniPoly.const(pow(x.coeff(0), -1, self.p), self.p)
        raise UnsupportedDomainError("only unit constants invert in GF(p)[t]")

    def json_entry(self, x: UniPoly):
        return {str(d): c for d, c in sorted(x.items())}

    def entry_from_json(self, v) -> UniPoly:
        return UniPoly({int(d): int(c) for d, c in v.items()}, self.p)

    def __eq__(self, other):
        return isinstance(other, PolyDomain) and other.p == self.p

    def __hash__(self):
        return hash(("Fp[t]", self.p))

    def __repr__(self):
        return f"PolyDomain({self.p})"


def _require_finite_field(dom) -> None:
    if not dom.is_finite_field:
        raise UnsupportedDomainError(
            "operation requires a finite-field coefficient domain"
        )


# ---------------------------------------------------------------------------
# Exact dense linear algebra over a field domain.


def _rref(dom, rows: Sequence[Sequence]) -> tuple[tuple[tuple, ...], tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    if not work:
        return (), ()
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][col]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = dom.inv(work[r][col])
        work[r] = [x * inv for x in work[r]]
        prow = work[r]
        for i in range(len(work)):
            if i != r and work[i][col]:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], prow)]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return tuple(tuple(row) for row in work[:r]), tuple(pivots)


def _reduce_vec(dom, rows, pivots, v) -> tuple:
    out = list(v)
    for row, pc in zip(rows, pivots):
        c = out[pc]
        if c:
            out = [a - c * b for a, b in zip(out, row)]
    return tuple(out)


def _mat_mul(dom, A, B):
    n = len(A)
    inner = len(B)
    cols = len(B[0])
    zero = dom.zero()
    out = []
    for i in range(n):
        Ai = A[i]
        row = []
        for j in range(cols):
            acc = zero
            for k in range(inner):
                a = Ai[k]
                if a:
                    b = B[k][j]
                    if b:
                        acc = acc + a * b
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_twist(dom, A, k: int):
    if k == 0:
        return tuple(tuple(row) for row in A)
    return tuple(tuple(dom.frob(x, k) for x in row) for row in A)


def _identity(dom, n: int):
    zero, one = dom.zero(), dom.one()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def _mat_is_zero(A) -> bool:
    return all(not x for row in A for x in row)


def _mat_vec_twist(dom, A, v, twist: int):
    w = [dom.frob(x, twist) for x in v] if twist else list(v)
    zero = dom.zero()
    out = []
    for row in A:
        acc = zero
        for a, x in zip(row, w):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return tuple(out)


def _invert_matrix(dom, A):
    n = len(A)
    work = [list(row) + list(irow) for row, irow in zip(A, _identity(dom, n))]
    r = 0
    for col in range(n):
        pr = next((i for i in range(r, n) if work[i][col]), None)
        if pr is None:
            raise PreconditionError("matrix is singular")
        work[r], work[pr] = work[pr], work[r]
        inv = dom.inv(work[r][col])
        work[r] = [x * inv for x in work[r]]
        for i in range(n):
            if i != r and work[i][col]:
                c = work[i][col]
                work[i] = [a - c * b for a, b in zip(work[i], work[r])]
        r += 1
    return tuple(tuple(row[n:]) for row in work)


def _det(dom, A):
    n = len(A)
    work = [list(row) for row in A]
    det = dom.one()
    for col in range(n):
        pr = next((i for i in range(col, n) if work[i][col]), None)
        if pr is None:
            return dom.zero()
        if pr != col:
            work[col], work[pr] = work[pr], work[col]
            det = -det
        pivot = work[col][col]
        det = det * pivot
        inv = dom.inv(pivot)
        for i in range(col + 1, n):
            if work[i][col]:
                c = work[i][col] * inv
                work[i] = [a - c * b for a, b in zip(work[i], work[col])]
    return det


# ---------------------------------------------------------------------------
# Public value types.


class Subspace:
    """A subspace of domain^n held in canonical reduced-row-echelon form."""

    __slots__ = ("domain", "ambient", "rows", "pivots")

    def __init__(self, domain, ambient: int, vectors: Sequence[Sequence]):
        _require_finite_field(domain)
        vecs = [tuple(domain.coerce(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise PreconditionError("vector length != ambient dimension")
        rows, pivots = _rref(domain, vecs)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "pivots", pivots)

    def __setattr__(self, name, val):
        raise AttributeError("Subspace is immutable")

    @property
    def basis(self) -> tuple[tuple, ...]:
        return self.rows

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, v) -> bool:
        v = tuple(self.domain.coerce(x) for x in v)
        return not any(_reduce_vec(self.domain, self.rows, self.pivots, v))

    def reduce(self, v) -> tuple:
        return _reduce_vec(self.domain, self.rows, self.pivots, v)

    def coordinates(self, v) -> tuple:
        """Coordinates of v in the echelon basis; v must lie in the space."""
        v = tuple(self.domain.coerce(x) for x in v)
        if any(_reduce_vec(self.domain, self.rows, self.pivots, v)):
            raise PreconditionError("vector not in subspace")
        return tuple(v[pc] for pc in self.pivots)

    def join(self, other: "Subspace") -> "Subspace":
        if other.domain != self.domain or other.ambient != self.ambient:
            raise PreconditionError("subspaces live in different ambient spaces")
        return Subspace(self.domain, self.ambient, self.rows + other.rows)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.domain == other.domain
            and self.ambient == other.ambient
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


class TwistedMatrix:
    """Square matrix A plus twist e: the semilinear map b -> A b^[p^e]."""

    __slots__ = ("domain", "e", "entries", "dim")

    def __init__(self, entries: Sequence[Sequence], e: int, domain):
        if e < 1:
            raise PreconditionError("twist exponent must be >= 1")
        rows = tuple(tuple(domain.coerce(x) for x in row) for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise PreconditionError("entries must form a nonempty square matrix")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "dim", n)

    def __setattr__(self, name, val):
        raise AttributeError("TwistedMatrix is immutable")

    @property
    def p(self) -> int:
        return self.domain.p

    def coerce_vector(self, v) -> tuple:
        v = tuple(self.domain.coerce(x) for x in v)
        if len(v) != self.dim:
            raise PreconditionError("vector length != matrix dimension")
        return v

    def __eq__(self, other):
        return (
            isinstance(other, TwistedMatrix)
            and self.domain == other.domain
            and self.e == other.e
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.e, self.entries))

    def __repr__(self):
        return f"TwistedMatrix(dim={self.dim}, e={self.e}, domain={self.domain!r})"


@dataclass(frozen=True)
class IterateMatrix:
    """The matrix B_m of the m-th iterate: f^m(b) = B_m b^[p^{e m}]."""

    entries: tuple
    step: int
    base: TwistedMatrix

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def domain(self):
        return self.base.domain

    @property
    def twist(self) -> int:
        return self.base.e * self.step

    def as_twisted(self) -> TwistedMatrix:
        return TwistedMatrix(self.entries, self.twist, self.base.domain)

    def is_diagonal_nonzero(self) -> bool:
        return all(
            bool(x) == (i == j)
            for i, row in enumerate(self.entries)
            for j, x in enumerate(row)
        )

    def is_zero(self) -> bool:
        return _mat_is_zero(self.entries)


# ---------------------------------------------------------------------------
# Core operations.


def apply(M: TwistedMatrix, v) -> tuple:
    """f(v) = A v^[p^e]: coordinates twisted, then multiplied by A."""
    v = M.coerce_vector(v)
    return _mat_vec_twist(M.domain, M.entries, v, M.e)


def iterate(M: TwistedMatrix, m: int) -> IterateMatrix:
    """B_m with B_1 = A and B_{m+1} = B_m A^[p^{e m}]."""
    if m < 1:
        raise PreconditionError("iterate step must be >= 1")
    dom = M.domain
    B = M.entries
    for j in range(1, m):
        B = _mat_mul(dom, B, _mat_twist(dom, M.entries, M.e * j))
    return IterateMatrix(B, m, M)


def iterate_pow(M: TwistedMatrix, s: int) -> tuple:
    """B_s by square-and-multiply on (matrix, twist-phase) pairs.

    Same value as ``iterate(M, s).entries`` in O(log s) products; the
    combination rule is (B, i) * (B', i') = (B B'^[p^i], i + i').
    """
    if s < 1:
        raise PreconditionError("iterate step must be >= 1")
    dom = M.domain

    def combine(x, y):
        (Bx, jx), (By, jy) = x, y
        return (_mat_mul(dom, Bx, _mat_twist(dom, By, jx)), jx + jy)

    base = (M.entries, M.e)
    result = None
    while s:
        if s & 1:
            result = base if result is None else combine(result, base)
        s >>= 1
        if s:
            base = combine(base, base)
    return result[0]


def change_basis(M: TwistedMatrix, C) -> TwistedMatrix:
    """The same abstract map in the basis given by C: C A (C^{-1})^[p^e]."""
    dom = M.domain
    if not dom.is_finite_field:
        raise UnsupportedDomainError("change of basis needs a field domain")
    Crows = tuple(tuple(dom.coerce(x) for x in row) for row in C)
    if len(Crows) != M.dim or any(len(r) != M.dim for r in Crows):
        raise PreconditionError("basis matrix has wrong shape")
    Cinv = _invert_matrix(dom, Crows)
    out = _mat_mul(dom, _mat_mul(dom, Crows, M.entries), _mat_twist(dom, Cinv, M.e))
    return TwistedMatrix(out, M.e, dom)


# -- monomial fast path (at most one nonzero entry per column) ---------------


def _monomial_columns(M: TwistedMatrix):
    cols = []
    for j in range(M.dim):
        hits = [(i, M.entries[i][j]) for i in range(M.dim) if M.entries[i][j]]
        if len(hits) > 1:
            return None
        cols.append(hits[0] if hits else None)
    return cols


def _monomial_iterates(M: TwistedMatrix, steps: int):
    """Column maps of B_1..B_steps for a monomial matrix; O(dim) per step."""
    dom = M.domain
    base = _monomial_columns(M)
    assert base is not None
    seq = [list(base)]
    cur = list(base)
    for m in range(1, steps):
        nxt = []
        for j in range(M.dim):
            hit = base[j]
            if hit is None:
                nxt.append(None)
                continue
            i, c = hit
            prev = cur[i]
            if prev is None:
                nxt.append(None)
            else:
                r, c0 = prev
                nxt.append((r, c0 * dom.frob(c, M.e * m)))
        cur = nxt
        seq.append(list(cur))
    return seq


def _monomial_rank(colmap) -> int:
    return len({hit[0] for hit in colmap if hit is not None})


def stable_subspace(M: TwistedMatrix) -> Subspace:
    """The stable part: column space of B_m once its rank stops dropping.

    Over a finite field coordinate-wise Frobenius is bijective, so the
    span of f^m(V) equals the column space of B_m; once two consecutive
    ranks agree the column space is fixed by f, and the restriction of f
    to it is bijective.
    """
    _require_finite_field(M.domain)
    dom = M.domain
    n = M.dim
    if _monomial_columns(M) is not None:
        seq = _monomial_iterates(M, n + 1)
        prev = seq[0]
        for m in range(1, n + 1):
            if _monomial_rank(seq[m]) == _monomial_rank(prev):
                break
            prev = seq[m]
        live_rows = sorted({hit[0] for hit in prev if hit is not None})
        zero, one = dom.zero(), dom.one()
        basis = [
            tuple(one if i == r else zero for i in range(n)) for r in live_rows
        ]
        return Subspace(dom, n, basis)
    B = M.entries
    prev_cols = Subspace(dom, n, list(zip(*B)))
    for m in range(1, n + 1):
        B = _mat_mul(dom, B, _mat_twist(dom, M.entries, M.e * m))
        cols = Subspace(dom, n, list(zip(*B)))
        if cols.dim == prev_cols.dim:
            return prev_cols
        prev_cols = cols
    return prev_cols


def is_nilpotent(M: TwistedMatrix) -> bool:
    """True iff B_dim = 0, equivalently the stable part is zero."""
    _require_finite_field(M.domain)
    if _monomial_columns(M) is not None:
        seq = _monomial_iterates(M, max(M.dim, 1))
        return all(hit is None for hit in seq[-1])
    return _mat_is_zero(iterate(M, M.dim).entries)


def krylov_closure(M: TwistedMatrix, v) -> Subspace:
    """span{v, f(v), f^2(v), ...}: the smallest f-stable subspace containing v."""
    _require_finite_field(M.domain)
    v = M.coerce_vector(v)
    if not any(v):
        raise PreconditionError("krylov_closure requires a nonzero vector")
    dom = M.domain
    space = Subspace(dom, M.dim, [v])
    cur = v
    for _ in range(M.dim):
        cur = apply(M, cur)
        if space.contains(cur):
            return space
        space = Subspace(dom, M.dim, space.rows + (cur,))
    return space


# -- flag length --------------------------------------------------------------


def _support_components(entries) -> list[list[int]]:
    n = len(entries)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if entries[i][j]:
                adj[i].add(j)
                adj[j].add(i)
    seen: set[int] = set()
    comps = []
    for start in range(n):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def _submatrix(M: TwistedMatrix, idx: list[int]) -> TwistedMatrix:
    sub = tuple(tuple(M.entries[i][j] for j in idx) for i in idx)
    return TwistedMatrix(sub, M.e, M.domain)


def _char_poly_coeffs(S, p: int) -> list[int]:
    """Characteristic polynomial (low -> high residues) of a linear matrix
    over GF(p), dim <= 3."""
    n = len(S)
    a = [[x.value for x in row] for row in S]
    if n == 1:
        return [(-a[0][0]) % p, 1]
    if n == 2:
        tr = (a[0][0] + a[1][1]) % p
        det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % p
        return [det, (-tr) % p, 1]
    if n == 3:
        tr = (a[0][0] + a[1][1] + a[2][2]) % p
        m2 = (
            a[0][0] * a[1][1]
            - a[0][1] * a[1][0]
            + a[0][0] * a[2][2]
            - a[0][2] * a[2][0]
            + a[1][1] * a[2][2]
            - a[1][2] * a[2][1]
        ) % p
        det = (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        ) % p
        return [(-det) % p, m2, (-tr) % p, 1]
    raise PreconditionError("characteristic polynomial path limited to dim <= 3")


def _poly_degree(c: list[int]) -> int:
    d = len(c) - 1
    while d >= 0 and c[d] == 0:
        d -= 1
    return d


def _count_irreducible_factors(coeffs: list[int], p: int) -> int:
    """Number of irreducible factors (with multiplicity) of a monic polynomial
    of degree <= 3 over GF(p), by exhaustive root search and deflation."""

    def eval_at(c, x):
        acc = 0
        for cc in reversed(c):
            acc = (acc * x + cc) % p
        return acc

    def deflate(c, x):
        d = _poly_degree(c)
        out = [0] * d
        carry = c[d]
        for i in range(d - 1, -1, -1):
            out[i] = carry
            carry = (c[i] + x * carry) % p
        return out

    count = 0
    work = list(coeffs)
    for x in range(p):
        while _poly_degree(work) >= 1 and eval_at(work, x) == 0:
            work = deflate(work, x)
            count += 1
        if _poly_degree(work) == 0:
            break
    if _poly_degree(work) >= 2:
        count += 1  # degree 2 or 3 without roots over GF(p): irreducible
    return count


def _flag_linear_small(M: TwistedMatrix) -> int:
    # Over GF(p) the map is linear, so the flag length equals the number of
    # irreducible factors, with multiplicity, of the characteristic
    # polynomial of the restriction to the stable part: a composition series
    # of the restriction realizes that count, and every admissible quotient
    # consumes at least one irreducible factor away from X.
    dom = M.domain
    if dom.p > LINEAR_SCAN_MAX_P:
        raise ResourceLimitError("root scan infeasible for this modulus")
    Vs = stable_subspace(M)
    s = Vs.dim
    if s == 0:
        return 0
    cols = [Vs.coordinates(_mat_vec_twist(dom, M.entries, b, 0)) for b in Vs.rows]
    S = tuple(tuple(cols[i][j] for i in range(s)) for j in range(s))
    return _count_irreducible_factors(_char_poly_coeffs(S, dom.p), dom.p)


def _projective_reps(dom, n: int) -> Iterator[tuple]:
    zero, one = dom.zero(), dom.one()
    elems = list(dom.elements())
    for i in range(n):
        for tail in itertools.product(elems, repeat=n - 1 - i):
            yield (zero,) * i + (one,) + tail


def _quotient_nilpotent(M: TwistedMatrix, W: Subspace, U: Subspace) -> bool:
    """Is the induced map on W/U nilpotent?  U must be f-stable inside W."""
    dom = M.domain
    residues = [r for r in (U.reduce(w) for w in W.rows) if any(r)]
    crows, cpivots = _rref(dom, residues)
    k = len(crows)
    if k == 0:
        raise PreconditionError("quotient by the full subspace")
    cols = []
    for c in crows:
        w = _mat_vec_twist(dom, M.entries, c, M.e)
        r = _reduce_vec(dom, U.rows, U.pivots, w)
        if any(_reduce_vec(dom, crows, cpivots, r)):
            raise PreconditionError("subspace is not f-stable")
        cols.append(tuple(r[pc] for pc in cpivots))
    Q = tuple(tuple(cols[i][j] for i in range(k)) for j in range(k))
    B = Q
    for j in range(1, k):
        B = _mat_mul(dom, B, _mat_twist(dom, Q, M.e * j))
    return _mat_is_zero(B)


def _stable_lattice(M: TwistedMatrix) -> list[Subspace]:
    """All f-stable subspaces: Krylov closures of projective representatives,
    closed under pairwise joins (every f-stable subspace is a join of the
    closures of its members)."""
    dom = M.domain
    n = M.dim
    lattice: dict[tuple, Subspace] = {}
    zero_space = Subspace(dom, n, [])
    lattice[zero_space.rows] = zero_space
    fresh: list[Subspace] = []
    for v in _projective_reps(dom, n):
        K = krylov_closure(M, v)
        if K.rows not in lattice:
            lattice[K.rows] = K
            fresh.append(K)
    while fresh:
        if len(lattice) > LATTICE_CAP:
            raise ResourceLimitError("f-stable subspace lattice too large")
        w = fresh.pop()
        for other in list(lattice.values()):
            j = w.join(other)
            if j.rows not in lattice:
                lattice[j.rows] = j
                fresh.append(j)
    full = Subspace(dom, n, _identity(dom, n))
    lattice.setdefault(full.rows, full)
    return sorted(lattice.values(), key=lambda s: s.dim)


def _flag_dfs(M: TwistedMatrix) -> int:
    dom = M.domain
    n = M.dim
    if n == 1:
        return 1 if M.entries[0][0] else 0
    if dom.order**n > GENERIC_STATE_CAP:
        raise ResourceLimitError(
            f"exhaustive subspace search infeasible: {dom.order}^{n} states"
        )
    lattice = _stable_lattice(M)
    best: dict[tuple, int] = {}
    for W in lattice:
        score = 0
        for U in lattice:
            if U.dim >= W.dim:
                break
            if best[U.rows] + 1 <= score:
                continue
            if U.is_subspace_of(W) and not _quotient_nilpotent(M, W, U):
                score = best[U.rows] + 1
        best[W.rows] = score
    full = Subspace(dom, n, _identity(dom, n))
    return best[full.rows]


def flag_length(
    M: TwistedMatrix, max_dim: int | None = None, strategy: str = "auto"
) -> int:
    """Length of the longest flag of f-stable subspaces 0 < V_1 < ... < V_m = V
    with f non-nilpotent on every successive quotient.

    The matrix is split into the connected blocks of its support graph
    first; the flag length is additive across a block-diagonal
    decomposition.  A block of dimension <= 3 over GF(p) is handled by
    characteristic-polynomial root counting on its stable part; any
    other block goes through the exhaustive search over the lattice of
    f-stable subspaces generated by Krylov closures.
    """
    _require_finite_field(M.domain)
    cap = DEFAULT_FLAG_DIM_CAP if max_dim is None else max_dim
    if strategy not in ("auto", "linear", "generic"):
        raise PreconditionError(f"unknown strategy {strategy!r}")
    if strategy == "linear" and M.domain.kind != "Fp":
        raise UnsupportedDomainError("linear strategy requires GF(p) coefficients")
    comps = _support_components(M.entries)
    oversized = [c for c in comps if len(c) > cap]
    if oversized:
        raise ResourceLimitError(
            f"block of dimension {len(oversized[0])} exceeds the cap {cap}"
        )
    total = 0
    for comp in comps:
        block = _submatrix(M, comp)
        if strategy == "linear" or (
            strategy == "auto" and M.domain.kind == "Fp" and block.dim <= 3
        ):
            total += _flag_linear_small(block)
        else:
            total += _flag_dfs(block)
    return total


def is_triangularizable_nonzero_diag(
    M: TwistedMatrix, max_dim: int | None = None
) -> bool:
    """True iff some basis makes A upper-triangular with nonzero diagonal,
    i.e. the flag length equals the dimension."""
    return flag_length(M, max_dim=max_dim) == M.dim


# -- finite order -------------------------------------------------------------


def _factorize(n: int) -> dict[int, int]:
    fs: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            fs[d] = fs.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        fs[n] = fs.get(n, 0) + 1
    return fs


def _mat_pow(dom, A, k: int, n: int):
    result = _identity(dom, n)
    base = A
    while k:
        if k & 1:
            result = _mat_mul(dom, result, base)
        k >>= 1
        if k:
            base = _mat_mul(dom, base, base)
    return result


def _matrix_order(dom, A, n: int) -> int:
    """Multiplicative order of an invertible matrix over GF(q)."""
    q = dom.order
    exponent = 1
    for i in range(1, n + 1):
        exponent = exponent * (q**i - 1) // gcd(exponent, q**i - 1)
    pp = 1
    while pp < n:
        pp *= dom.p
        exponent *= dom.p
    order = exponent
    ident = _identity(dom, n)
    for prime in _factorize(exponent):
        while order % prime == 0 and _mat_pow(dom, A, order // prime, n) == ident:
            order //= prime
    return order


def _elem_order(dom, x) -> int:
    order = dom.order - 1
    if order == 0:
        return 1
    for prime in _factorize(dom.order - 1):
        while order % prime == 0 and x ** (order // prime) == dom.one():
            order //= prime
    return order


def _bsgs_matrix_dlog(dom, G, target, order: int, n: int) -> int | None:
    """Smallest i >= 0 with G^i = target inside the cyclic group <G> of the
    given order; None when target is outside <G>."""
    ident = _identity(dom, n)
    if target == ident:
        return 0
    t = int(order**0.5) + 1
    baby: dict[tuple, int] = {}
    cur = ident
    for b in range(t):
        baby.setdefault(cur, b)
        cur = _mat_mul(dom, cur, G)
    giant = _invert_matrix(dom, _mat_pow(dom, G, t, n))
    cur = target
    for a in range(t + 1):
        hit = baby.get(cur)
        if hit is not None:
            return a * t + hit
        cur = _mat_mul(dom, cur, giant)
    return None


def finite_order(M: TwistedMatrix, max_steps: int = FINITE_ORDER_CAP) -> int:
    """Smallest s >= 1 such that B_s is the identity matrix.

    Requires an invertible matrix over a finite field.  Such an s always
    exists: the pairs (B_s, twist phase) walk a finite set under an
    invertible transition, so the trajectory through (I, 0) is purely
    periodic.  Small orders are found by direct iteration (budget
    ``max_steps``, direct scan capped much lower); large ones exactly,
    through the Galois-period norm matrix C = B_m', its multiplicative
    order, and a determinant-pruned baby-step giant-step discrete log.
    """
    _require_finite_field(M.domain)
    dom = M.domain
    n = M.dim
    ident = _identity(dom, n)
    try:
        _invert_matrix(dom, M.entries)
    except PreconditionError:
        raise PreconditionError("finite_order requires an invertible matrix") from None
    B = M.entries
    direct = min(max_steps, _DIRECT_ORDER_SCAN)
    for s in range(1, direct + 1):
        if B == ident:
            return s
        B = _mat_mul(dom, B, _mat_twist(dom, M.entries, M.e * s))
    exponent = 1
    for i in range(1, n + 1):
        exponent = exponent * (dom.order**i - 1) // gcd(exponent, dom.order**i - 1)
    if exponent > 1 << 64:
        # group-exponent factorization infeasible; keep iterating to the cap
        for s in range(direct + 1, max_steps + 1):
            if B == ident:
                return s
            B = _mat_mul(dom, B, _mat_twist(dom, M.entries, M.e * s))
        raise ResourceLimitError(f"no identity iterate within {max_steps} steps")
    # structured exact search
    m_deg = dom.ext_degree
    phases = m_deg // gcd(M.e, m_deg)
    Bs = [ident]
    B = ident
    for r in range(phases):
        B = _mat_mul(dom, B, _mat_twist(dom, M.entries, M.e * r))
        Bs.append(B)
    C = Bs[phases]
    N = _matrix_order(dom, C, n)
    best = phases * N  # r = 0: smallest positive j with C^j = I is ord(C)
    for r in range(1, phases):
        Cr = _mat_twist(dom, C, M.e * r)
        Dr = _invert_matrix(dom, Bs[r])
        dC = _det(dom, Cr)
        dD = _det(dom, Dr)
        od = _elem_order(dom, dC)
        j0 = None
        cur = dom.one()
        for j in range(od):
            if cur == dD:
                j0 = j
                break
            cur = cur * dC
        if j0 is None:
            continue  # determinant obstruction: no solution in this phase
        G = _mat_pow(dom, Cr, od, n)
        ord_g = N // gcd(N, od)
        target = _mat_mul(dom, Dr, _invert_matrix(dom, _mat_pow(dom, Cr, j0, n)))
        i = _bsgs_matrix_dlog(dom, G, target, ord_g, n)
        if i is None:
            continue
        cand = r + phases * (j0 + od * i)
        if 1 <= cand < best:
            best = cand
    return best


# -- 3x3 cyclic determinant machinery -----------------------------------------


def cyclic_det3(M: TwistedMatrix, v) -> object:
    """det(v, f(v), f^2(v)) for a 3-dimensional twisted matrix.

    Vanishes for some nonzero v exactly when a proper nonzero f-stable
    subspace exists (the Krylov closure of such a v is proper).
    """
    if M.dim != 3:
        raise PreconditionError("cyclic_det3 requires a 3x3 matrix")
    v = M.coerce_vector(v)
    w1 = v
    w2 = apply(M, w1)
    w3 = apply(M, w2)
    a, d, g = w1[0], w1[1], w1[2]
    b, e_, h = w2[0], w2[1], w2[2]
    c, f, i = w3[0], w3[1], w3[2]
    return a * (e_ * i - f * h) - b * (d * i - f * g) + c * (d * h - e_ * g)


def reduced_det3_expansion(p: int, a: UniPoly, b: UniPoly, c: UniPoly) -> UniPoly:
    """Closed six-term form of the reduced cyclic determinant over GF(p)[t],
    for p = 7k + 4: the full determinant equals t^((3k+1)p + 8k + 3) times
    this value."""
    check_prime(p)
    if p % 7 != 4:
        raise PreconditionError("requires p congruent to 4 mod 7")
    k = (p - 4) // 7
    dom = PolyDomain(p)
    a, b, c = dom.coerce(a), dom.coerce(b), dom.coerce(c)
    a1, a2 = a.frobenius(1), a.frobenius(2)
    b1, b2 = b.frobenius(1), b.frobenius(2)
    c1, c2 = c.frobenius(1), c.frobenius(2)

    def tpow(d):
        return UniPoly.monomial(d, p)

    term1 = a * a1 * a2
    term2 = tpow((3 * k + 2) * p) * a * b1 * c2
    term3 = tpow(3 * k + 2) * a2 * b * c1
    term4 = tpow((3 * k + 2) * p + k + 1) * c * c1 * c2
    term5 = tpow((2 * k + 1) * p + 3 * k + 2) * b * b1 * b2
    term6 = tpow((2 * k + 1) * p + k + 1) * a1 * b2 * c
    return term1 - term2 - term3 + term4 + term5 - term6


def _dominance_degrees(p: int, alpha: int, beta: int, gamma: int) -> list[int]:
    k = (p - 4) // 7
    return [
        (p * p + p + 1) * alpha,
        p * p * gamma + p * (beta + 3 * k + 2) + alpha,
        p * p * alpha + p * gamma + beta + 3 * k + 2,
        p * p * gamma + p * (gamma + 3 * k + 2) + gamma + k + 1,
        p * p * beta + p * (beta + 2 * k + 1) + beta + 3 * k + 2,
        p * p * beta + p * (alpha + 2 * k + 1) + gamma + k + 1,
    ]


def dominance_case(alpha, beta, gamma) -> tuple[int, int] | None:
    """Classify a degree triple and name the term expected to dominate.

    Returns (case, term index) with cases 1: gamma >= max(alpha, beta)
    dominating term 4; 2: beta > gamma and beta >= alpha dominating term
    5; 3: alpha > max(beta, gamma) dominating term 1.  Triples whose
    designated entry is the zero polynomial (degree NEG_INF) are skipped
    with a logged warning, returning None.
    """
    if gamma >= alpha and gamma >= beta:
        case, idx, designated = 1, 3, gamma
    elif beta > gamma and beta >= alpha:
        case, idx, designated = 2, 4, beta
    else:
        case, idx, designated = 3, 0, alpha
    if designated is NEG_INF:
        log.warning(
            "dominance check skipped: designated entry is the zero polynomial"
        )
        return None
    return case, idx


def verify_degree_dominance(p: int, max_deg: int) -> bool:
    """Exhaustively check, for all degree triples 0 <= alpha, beta, gamma <=
    max_deg, that the case-designated term's degree strictly exceeds the
    other five; true iff every triple passes."""
    check_prime(p)
    if p % 7 != 4:
        raise PreconditionError("requires p congruent to 4 mod 7")
    if max_deg < 0:
        raise PreconditionError("max_deg must be >= 0")
    for alpha in range(max_deg + 1):
        for beta in range(max_deg + 1):
            for gamma in range(max_deg + 1):
                classified = dominance_case(alpha, beta, gamma)
                assert classified is not None
                _, idx = classified
                degs = _dominance_degrees(p, alpha, beta, gamma)
                top = degs[idx]
                if any(top <= d for i, d in enumerate(degs) if i != idx):
                    return False
    return True


# -- JSON wire format ----------------------------------------------------------


def matrix_to_json(M: TwistedMatrix) -> dict:
    """Plain-dict form of the documented matrix format."""
    dom = M.domain
    obj: dict = {"p": dom.p, "e": M.e, "domain": dom.kind}
    if dom.kind == "Fpm":
        obj["m"] = dom.m
    obj["entries"] = [[dom.json_entry(x) for x in row] for row in M.entries]
    return obj


def matrix_from_json(obj: dict) -> TwistedMatrix:
    p = int(obj["p"])
    e = int(obj["e"])
    kind = obj["domain"]
    if kind == "Fp":
        dom = FpDomain(p)
    elif kind == "Fpm":
        dom = FpmDomain(p, int(obj["m"]))
    elif kind == "Fp[t]":
        dom = PolyDomain(p)
    else:
        raise PreconditionError(f"unknown domain {kind!r}")
    entries = [[dom.entry_from_json(x) for x in row] for row in obj["entries"]]
    return TwistedMatrix(entries, e, dom)
