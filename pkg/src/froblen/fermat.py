"""Frobenius action on degree-zero top local cohomology of diagonal hypersurfaces.

For A = k[x_0, ..., x_d]/(x_0^n + ... + x_d^n) with p not dividing n,
the degree-zero part of the top local cohomology has the inverse-monomial
basis x_0^c / (x_1^{a_1} ... x_d^{a_d}) with a_i >= 1 and
c = a_1 + ... + a_d <= n - 1.  Writing r = p mod n, the Frobenius map
sends a basis element to zero when (r a_1) % n + ... + (r a_d) % n >= n
and otherwise to a single scalar multiple of the basis element with
exponents (r a_i) % n; the scalar is
(-1)^floor(cp/n) * multinomial(floor(cp/n); floor(a_1 p/n), ...)
reduced mod p, and it is always nonzero.

This module builds that basis, the resulting monomial matrix, the
surviving-orbit (cycle) decomposition, the solution-counting form of the
stable-part dimension, and the hard-coded weighted family
t x^7 + t y^7 + z^7 with grading deg x = deg y = 1, deg z = 2,
deg t = 7, whose localized cycle matrices live over GF(p)[t].
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, ResourceLimitError
from .ff import FieldElem, binom_mod_p, check_prime, euler_phi, multinomial_mod_p
from .poly import UniPoly
from .semilinear import FpDomain, PolyDomain, TwistedMatrix

FULL_MATRIX_DIM_CAP = 200


@dataclass(frozen=True)
class InverseMonomial:
    """x_0^c / (x_1^{a_1} ... x_d^{a_d}) with c = sum(a); all a_i >= 1."""

    denominators: tuple[int, ...]

    def __post_init__(self):
        if not self.denominators:
            raise PreconditionError("at least one denominator exponent required")
        if any(a < 1 for a in self.denominators):
            raise PreconditionError("denominator exponents must be >= 1")

    @property
    def numerator(self) -> int:
        return sum(self.denominators)

    @property
    def d(self) -> int:
        return len(self.denominators)

    def __str__(self) -> str:
        if self.d == 2:
            names = ("x", "y")
            num = "z"
        else:
            names = tuple(f"x{i}" for i in range(1, self.d + 1))
            num = "x0"
        parts = []
        for name, a in zip(names, self.denominators):
            parts.append(name if a == 1 else f"{name}^{a}")
        c = self.numerator
        head = num if c == 1 else f"{num}^{c}"
        return f"{head}/({'*'.join(parts)})"


@dataclass(frozen=True)
class FermatContext:
    """Diagonal hypersurface data: degree n, dimension d, prime p with p not
    dividing n; r = p mod n."""

    n: int
    d: int
    p: int

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError("degree n must be >= 2")
        if self.d < 1:
            raise PreconditionError("dimension d must be >= 1")
        check_prime(self.p)
        if self.n % self.p == 0:
            raise PreconditionError("p divides n")

    @property
    def r(self) -> int:
        return self.p % self.n


@dataclass(frozen=True)
class FrobeniusOrbit:
    """A cycle of surviving basis elements; coefficients[i] scales the step
    members[i] -> members[(i+1) % len]."""

    members: tuple[InverseMonomial, ...]
    coefficients: tuple[FieldElem, ...]

    def __post_init__(self):
        if len(self.members) != len(self.coefficients):
            raise PreconditionError("one coefficient per orbit step required")
        if any(not c for c in self.coefficients):
            raise PreconditionError("orbit coefficients must be nonzero")

    def __len__(self) -> int:
        return len(self.members)


def _tuples_bounded(n: int, d: int) -> list[tuple[int, ...]]:
    # all (a_1..a_d), a_i >= 1, sum <= n - 1, lexicographic
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], budget: int, k: int):
        if k == 0:
            out.append(tuple(prefix))
            return
        for a in range(1, budget - (k - 1) + 1):
            prefix.append(a)
            rec(prefix, budget - a, k - 1)
            prefix.pop()

    if n - 1 >= d:
        rec([], n - 1, d)
    return out


def basis(ctx: FermatContext) -> list[InverseMonomial]:
    """All inverse monomials of the context, in lexicographic order; the
    count is C(n-1, d)."""
    return [InverseMonomial(t) for t in _tuples_bounded(ctx.n, ctx.d)]


def frobenius_image(
    elem: InverseMonomial, ctx: FermatContext
) -> tuple[FieldElem, InverseMonomial] | None:
    """Image of a basis element under Frobenius: None when it dies, else
    (coefficient, image element) with a guaranteed-nonzero coefficient."""
    n, d, p, r = ctx.n, ctx.d, ctx.p, ctx.r
    a = elem.denominators
    if len(a) != d or any(not 1 <= x <= n - 1 for x in a) or elem.numerator > n - 1:
        raise PreconditionError("element does not belong to the context basis")
    if sum((x * r) % n for x in a) >= n:
        return None
    c = elem.numerator
    q = (c * p) // n
    parts = [(x * p) // n for x in a]
    coeff = multinomial_mod_p(q, parts, p)
    if q % 2:
        coeff = -coeff
    image = InverseMonomial(tuple((x * r) % n for x in a))
    if not coeff:
        raise RuntimeError("surviving Frobenius coefficient vanished")
    return coeff, image


def stable_dim_by_count(ctx: FermatContext) -> int:
    """Dimension of the stable part as the number of exponent tuples
    surviving every Frobenius iterate.

    Counts (a_1..a_d) with 1 <= a_i <= n-1 such that
    sum_i (r^j a_i) % n < n for every j = 0 .. phi(n)-1; the conditions
    repeat from there on since r^phi(n) = 1 mod n.
    """
    n, d, r = ctx.n, ctx.d, ctx.r
    powers = []
    rj = 1
    for _ in range(euler_phi(n)):
        powers.append(rj)
        rj = (rj * r) % n
    count = 0
    for a in _tuples_bounded(n, d):
        if all(sum((rj * x) % n for x in a) < n for rj in powers):
            count += 1
    return count


def _survives_all(a: tuple[int, ...], ctx: FermatContext) -> bool:
    n, r = ctx.n, ctx.r
    rj = 1
    for _ in range(euler_phi(n)):
        if sum((rj * x) % n for x in a) >= n:
            return False
        rj = (rj * r) % n
    return True


def full_matrix(ctx: FermatContext, max_dim: int = FULL_MATRIX_DIM_CAP) -> TwistedMatrix:
    """The monomial matrix of the Frobenius map on the full basis, twist 1."""
    elems = basis(ctx)
    dim = len(elems)
    if dim == 0:
        raise PreconditionError("empty basis: n - 1 < d leaves no elements")
    if dim > max_dim:
        raise ResourceLimitError(f"basis of size {dim} exceeds the cap {max_dim}")
    index = {e.denominators: i for i, e in enumerate(elems)}
    zero = FieldElem(0, ctx.p)
    rows = [[zero] * dim for _ in range(dim)]
    for j, e in enumerate(elems):
        hit = frobenius_image(e, ctx)
        if hit is None:
            continue
        coeff, image = hit
        rows[index[image.denominators]][j] = coeff
    return TwistedMatrix(rows, 1, FpDomain(ctx.p))


def cycles(ctx: FermatContext) -> list[FrobeniusOrbit]:
    """Orbit decomposition of the persistent basis elements under the
    exponent map a -> (r*a) % n, each orbit starting at its smallest member."""
    survivors = [a for a in _tuples_bounded(ctx.n, ctx.d) if _survives_all(a, ctx)]
    unvisited = set(survivors)
    orbits = []
    for start in survivors:
        if start not in unvisited:
            continue
        members: list[InverseMonomial] = []
        coeffs: list[FieldElem] = []
        cur = start
        while True:
            unvisited.discard(cur)
            elem = InverseMonomial(cur)
            hit = frobenius_image(elem, ctx)
            assert hit is not None  # persistence guarantees survival
            coeff, image = hit
            members.append(elem)
            coeffs.append(coeff)
            cur = image.denominators
            if cur == start:
                break
        orbits.append(FrobeniusOrbit(tuple(members), tuple(coeffs)))
    return orbits


def orbit_matrix(orbit: FrobeniusOrbit, p: int) -> TwistedMatrix:
    """The cycle's own twisted matrix: entry [(i+1) % L][i] = coefficients[i]."""
    L = len(orbit)
    zero = FieldElem(0, p)
    rows = [[zero] * L for _ in range(L)]
    for i, coeff in enumerate(orbit.coefficients):
        rows[(i + 1) % L][i] = coeff
    return TwistedMatrix(rows, 1, FpDomain(p))


# ---------------------------------------------------------------------------
# The weighted family t x^7 + t y^7 + z^7.


@dataclass(frozen=True)
class WeightedInverseMonomial:
    """z^c / (t^e x^a y^b) in the weighted model (deg x = y = 1, z = 2, t = 7)."""

    z: int
    t: int
    x: int
    y: int

    def __post_init__(self):
        if self.z < 0 or min(self.t, self.x, self.y) < 1:
            raise PreconditionError("invalid weighted inverse monomial")

    @property
    def weighted_degree(self) -> int:
        return 2 * self.z - 7 * self.t - self.x - self.y

    def __str__(self) -> str:
        parts = []
        for name, a in (("t", self.t), ("x", self.x), ("y", self.y)):
            parts.append(name if a == 1 else f"{name}^{a}")
        head = "z" if self.z == 1 else f"z^{self.z}"
        return f"{head}/({'*'.join(parts)})"


def _check_p_7k4(p: int) -> int:
    check_prime(p)
    if p % 7 != 4:
        raise PreconditionError("requires p congruent to 4 mod 7")
    return (p - 4) // 7


def weighted_fermat7_basis(p: int) -> list[WeightedInverseMonomial]:
    """The six weighted-degree-zero elements of the family's top local
    cohomology, for p = 7k + 4."""
    _check_p_7k4(p)
    data = [(5, 1, 2, 1), (5, 1, 1, 2), (6, 1, 4, 1), (6, 1, 3, 2), (6, 1, 2, 3), (6, 1, 1, 4)]
    return [WeightedInverseMonomial(*t) for t in data]


def weighted_frobenius_image(
    combo: dict[WeightedInverseMonomial, int], p: int
) -> dict[WeightedInverseMonomial, int]:
    """One Frobenius step on a formal GF(p)-combination of weighted inverse
    monomials.

    Raising z^c/(t^e x^a y^b) to the p-th power and rewriting
    z^7 = -t (x^7 + y^7) yields
    sum_i (-1)^q C(q, i) z^s / (t^{ep-q} x^{ap-7i} y^{bp-7(q-i)}) with
    q = floor(cp/7), s = cp % 7; summands with a nonpositive exponent in
    any denominator slot vanish.
    """
    check_prime(p)
    out: dict[WeightedInverseMonomial, int] = {}
    for elem, u in combo.items():
        u %= p
        if not u:
            continue
        q, s = divmod(elem.z * p, 7)
        sign = -1 if q % 2 else 1
        nt = elem.t * p - q
        if nt < 1:
            continue
        for i in range(q + 1):
            nx = elem.x * p - 7 * i
            ny = elem.y * p - 7 * (q - i)
            if nx < 1 or ny < 1:
                continue
            coeff = sign * u * binom_mod_p(q, i, p).value % p
            if not coeff:
                continue
            key = WeightedInverseMonomial(s, nt, nx, ny)
            out[key] = (out.get(key, 0) + coeff) % p
    return {k: v for k, v in out.items() if v}


def weighted_nilpotency_steps(
    elem: WeightedInverseMonomial, p: int, max_steps: int = 8
) -> int:
    """Number of Frobenius steps after which the element's class vanishes."""
    combo = {elem: 1}
    for step in range(1, max_steps + 1):
        combo = weighted_frobenius_image(combo, p)
        if not combo:
            return step
    raise ResourceLimitError(f"element not nilpotent within {max_steps} steps")


def weighted_fermat7_cycle_matrix(p: int, normalized: bool = False) -> TwistedMatrix:
    """The 3x3 twisted matrix over GF(p)[t] of the Frobenius action on each
    localized cycle of the weighted family, for p = 7k + 4.

    Nonzero entries are C(3k+1, k) t^{6k+3}, C(3k+1, k) t^{3k+1},
    C(3k+1, k) t^{5k+2} in cyclic positions; ``normalized=True`` drops
    the shared scalar.
    """
    k = _check_p_7k4(p)
    scalar = 1 if normalized else binom_mod_p(3 * k + 1, k, p).value
    dom = PolyDomain(p)
    zero = UniPoly.zero(p)
    e13 = UniPoly.monomial(6 * k + 3, p, scalar)
    e21 = UniPoly.monomial(3 * k + 1, p, scalar)
    e32 = UniPoly.monomial(5 * k + 2, p, scalar)
    rows = [
        [zero, zero, e13],
        [e21, zero, zero],
        [zero, e32, zero],
    ]
    return TwistedMatrix(rows, 1, dom)
