"""Number-theoretic and finite-field kernel.

Exact residue arithmetic in GF(p) and in small extension fields
GF(p^m), together with the elementary number theory the rest of the
package leans on: Legendre symbols via Euler's criterion, binomial and
multinomial coefficients mod p via Lucas' theorem, and the Euler
totient.

Primes are restricted to p < 2^32 and verified by trial division once
per process.  Extension fields are supported for 2 <= m <= 4 and
p <= 13 through a built-in table of small primitive polynomials; each
table entry is re-verified (no roots, no small factors) when the field
is first constructed.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

from .errors import PreconditionError

MAX_PRIME = 1 << 32

_verified_primes: set[int] = set()


def is_prime(n: int) -> bool:
    """Trial-division primality test for n < 2^32, with caching."""
    if n in _verified_primes:
        return True
    if n < 2 or n >= MAX_PRIME:
        return False
    if n < 4:
        _verified_primes.add(n)
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    _verified_primes.add(n)
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise PreconditionError(f"{p!r} is not a prime < 2^32")
    return p


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p < hi."""
    return [n for n in range(max(lo, 2), hi) if is_prime(n)]


class FieldElem:
    """An element of GF(p): a residue in [0, p) with exact arithmetic."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        check_prime(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "value", value % p)

    def __setattr__(self, name, val):  # immutable after construction
        raise AttributeError("FieldElem is immutable")

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise PreconditionError("mixed moduli in field arithmetic")
            return other
        if isinstance(other, int):
            return FieldElem(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.value - o.value, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(o.value - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.value * o.value, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value, self.p)

    def inv(self) -> "FieldElem":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return FieldElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return FieldElem(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElem({self.value}, p={self.p})"


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    check_prime(p)
    if p == 2:
        raise PreconditionError("Legendre symbol requires an odd prime")
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def _binom_digit(m: int, k: int, p: int) -> int:
    # C(m, k) mod p for 0 <= m, k < p, via the multiplicative formula.
    if k > m:
        return 0
    k = min(k, m - k)
    num = den = 1
    for i in range(k):
        num = num * (m - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def binom_mod_p(m: int, k: int, p: int) -> FieldElem:
    """C(m, k) mod p via Lucas' theorem on base-p digits; 0 when k > m."""
    check_prime(p)
    if m < 0 or k < 0:
        raise PreconditionError("binomial arguments must be nonnegative")
    acc = 1
    while (m or k) and acc:
        acc = acc * _binom_digit(m % p, k % p, p) % p
        m //= p
        k //= p
    return FieldElem(acc, p)


def multinomial_mod_p(top: int, parts: list[int], p: int) -> FieldElem:
    """Multinomial coefficient (top; parts) mod p as a product of binomials.

    Nonzero whenever top < p, since base-p addition of the parts then
    carries nowhere.
    """
    check_prime(p)
    if any(x < 0 for x in parts) or top < 0:
        raise PreconditionError("multinomial arguments must be nonnegative")
    if sum(parts) != top:
        raise PreconditionError("parts must sum to top")
    acc = FieldElem(1, p)
    rest = top
    for part in parts:
        acc = acc * binom_mod_p(rest, part, p)
        rest -= part
    return acc


def euler_phi(n: int) -> int:
    """Euler totient by trial factorization."""
    if n < 1:
        raise PreconditionError("euler_phi requires n >= 1")
    result = n
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            result -= result // d
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        result -= result // m
    return result


# ---------------------------------------------------------------------------
# Extension fields GF(p^m), m <= 4, p <= 13.

# Small primitive polynomials, coefficients low -> high, monic.  Generated by
# scanning coefficient tuples in lexicographic order and keeping the first
# polynomial that is irreducible and has a multiplicative generator as a root.
PRIMITIVE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (3, 2): (2, 1, 1),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (2, 0, 0, 1, 1),
    (5, 2): (2, 1, 1),
    (5, 3): (2, 0, 1, 1),
    (5, 4): (2, 0, 2, 1, 1),
    (7, 2): (3, 1, 1),
    (7, 3): (2, 1, 1, 1),
    (7, 4): (3, 0, 1, 1, 1),
    (11, 2): (2, 4, 1),
    (11, 3): (3, 0, 1, 1),
    (11, 4): (2, 0, 0, 4, 1),
    (13, 2): (2, 1, 1),
    (13, 3): (2, 0, 1, 1),
    (13, 4): (2, 0, 2, 6, 1),
}

# Fields of order up to this bound precompute full multiplication tables.
_TABLE_ORDER_CAP = 1024


def _poly_mul_mod(a: tuple[int, ...], b: tuple[int, ...], g: tuple[int, ...], p: int) -> tuple[int, ...]:
    m = len(g) - 1
    res = [0] * (2 * m - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    for d in range(2 * m - 2, m - 1, -1):
        c = res[d]
        if c:
            res[d] = 0
            for i in range(m):
                res[d - m + i] = (res[d - m + i] - c * g[i]) % p
    return tuple(res[:m])


def _poly_has_root(g: tuple[int, ...], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(g):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


class ExtField:
    """GF(p^m) presented as GF(p)[y]/(g) for a fixed primitive g of degree m.

    Only 2 <= m <= 4 with p <= 13 is supported; the modulus is checked
    for irreducibility at construction (no roots, and for m = 4 no
    quadratic factor either, detected via gcd(g, y^(p^2) - y)).
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...] | None = None):
        check_prime(p)
        if not 2 <= m <= 4:
            raise PreconditionError("extension degree must satisfy 2 <= m <= 4")
        if modulus is None:
            try:
                modulus = PRIMITIVE_POLYS[(p, m)]
            except KeyError:
                raise PreconditionError(
                    f"no built-in modulus for GF({p}^{m}); supported p <= 13"
                ) from None
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != m + 1 or modulus[m] != 1:
            raise PreconditionError("modulus must be monic of degree m")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.order = p**m
        self._check_irreducible()
        self._mul_table: list[int] | None = None
        self._pow_p: list[int] | None = None
        self._coeffs_cache: list[tuple[int, ...]] | None = None

    def _check_irreducible(self) -> None:
        g, p, m = self.modulus, self.p, self.m
        if _poly_has_root(g, p):
            raise PreconditionError("modulus has a root; not irreducible")
        if m == 4:
            # no linear factors, so a reducible quartic has a quadratic one;
            # those divide y^(p^2) - y.
            y = (0, 1, 0, 0)
            yq = y
            for _ in range(2):
                acc = (1, 0, 0, 0)
                base = yq
                e = p
                while e:
                    if e & 1:
                        acc = _poly_mul_mod(acc, base, g, p)
                    base = _poly_mul_mod(base, base, g, p)
                    e >>= 1
                yq = acc
            diff = list(yq)
            diff[1] = (diff[1] - 1) % p
            if self._gcd_with_modulus(tuple(diff)) > 0:
                raise PreconditionError("modulus has a quadratic factor")

    def _gcd_with_modulus(self, h: tuple[int, ...]) -> int:
        # degree of gcd(modulus, h); h given low->high with deg < m
        p = self.p

        def deg(u):
            d = len(u) - 1
            while d >= 0 and u[d] == 0:
                d -= 1
            return d

        a = list(self.modulus)
        b = list(h)
        while deg(b) >= 0:
            da, db = deg(a), deg(b)
            if da < db:
                a, b = b, a
                continue
            inv = pow(b[db], -1, p)
            while deg(a) >= deg(b) >= 0:
                sh = deg(a) - deg(b)
                c = a[deg(a)] * inv % p
                for i in range(db + 1):
                    a[i + sh] = (a[i + sh] - c * b[i]) % p
            a, b = b, a
        return deg(a)

    # -- packed-index helpers; elements of small fields are indexed 0..q-1 ----

    def _index(self, coeffs: tuple[int, ...]) -> int:
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        return idx

    def _coeffs_of(self, idx: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            out.append(idx % self.p)
            idx //= self.p
        return tuple(out)

    def _ensure_tables(self) -> bool:
        if self.order > _TABLE_ORDER_CAP:
            return False
        if self._mul_table is None:
            q, p = self.order, self.p
            coeffs = [self._coeffs_of(i) for i in range(q)]
            self._coeffs_cache = coeffs
            table = [0] * (q * q)
            for i in range(q):
                for j in range(i, q):
                    v = self._index(_poly_mul_mod(coeffs[i], coeffs[j], self.modulus, p))
                    table[i * q + j] = v
                    table[j * q + i] = v
            self._mul_table = table
            one = self._index((1,) + (0,) * (self.m - 1))
            pow_p = [0] * q
            for i in range(q):
                r, b, e = one, i, p
                while e:
                    if e & 1:
                        r = table[r * q + b]
                    b = table[b * q + b]
                    e >>= 1
                pow_p[i] = r
            self._pow_p = pow_p
        return True

    def elem(self, coeffs) -> "ExtFieldElem":
        if isinstance(coeffs, ExtFieldElem):
            if coeffs.field is not self:
                raise PreconditionError("element from a different field context")
            return coeffs
        if isinstance(coeffs, int):
            coeffs = (coeffs % self.p,) + (0,) * (self.m - 1)
        coeffs = tuple(int(c) % self.p for c in coeffs)
        if len(coeffs) != self.m:
            raise PreconditionError(f"expected {self.m} coefficients")
        return ExtFieldElem(self, coeffs)

    def zero(self) -> "ExtFieldElem":
        return self.elem(0)

    def one(self) -> "ExtFieldElem":
        return self.elem(1)

    def gen(self) -> "ExtFieldElem":
        """The residue of y, a multiplicative generator for table moduli."""
        return self.elem((0, 1) + (0,) * (self.m - 2))

    def elements(self) -> Iterator["ExtFieldElem"]:
        for coeffs in itertools.product(range(self.p), repeat=self.m):
            yield self.elem(coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"ExtField(p={self.p}, m={self.m})"


@lru_cache(maxsize=None)
def ext_field(p: int, m: int) -> ExtField:
    """The canonical GF(p^m) built from the packaged modulus table."""
    return ExtField(p, m)


class ExtFieldElem:
    """An element of GF(p^m), stored by its coefficient vector in GF(p)[y]/(g)."""

    __slots__ = ("field", "coeffs", "_idx")

    def __init__(self, field: ExtField, coeffs: tuple[int, ...]):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_idx", None)

    def __setattr__(self, name, val):
        raise AttributeError("ExtFieldElem is immutable")

    @property
    def p(self) -> int:
        return self.field.p

    def _coerce(self, other):
        if isinstance(other, ExtFieldElem):
            if other.field != self.field:
                raise PreconditionError("mixed extension-field contexts")
            return other
        if isinstance(other, int):
            return self.field.elem(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        return ExtFieldElem(
            self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs))
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        return ExtFieldElem(
            self.field, tuple((a - b) % p for a, b in zip(self.coeffs, o.coeffs))
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return ExtFieldElem(self.field, tuple((-a) % self.p for a in self.coeffs))

    def _index(self) -> int:
        idx = self._idx
        if idx is None:
            idx = self.field._index(self.coeffs)
            object.__setattr__(self, "_idx", idx)
        return idx

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.field
        if f._ensure_tables():
            q = f.order
            idx = f._mul_table[self._index() * q + o._index()]
            out = ExtFieldElem(f, f._coeffs_cache[idx])
            object.__setattr__(out, "_idx", idx)
            return out
        return ExtFieldElem(f, _poly_mul_mod(self.coeffs, o.coeffs, f.modulus, f.p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> "ExtFieldElem":
        if not self:
            raise ZeroDivisionError("inverse of 0 in GF(p^m)")
        # x^(q-2) = x^(-1) in GF(q)
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __eq__(self, other):
        if isinstance(other, ExtFieldElem):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self.field.elem(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.field.p, self.field.modulus))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"ExtFieldElem({list(self.coeffs)}, GF({self.p}^{self.field.m}))"


def ext_frobenius(x: ExtFieldElem) -> ExtFieldElem:
    """x^p, computed by square-and-multiply in the extension field."""
    f = x.field
    if f._ensure_tables():
        idx = f._pow_p[x._index()]
        out = ExtFieldElem(f, f._coeffs_cache[idx])
        object.__setattr__(out, "_idx", idx)
        return out
    return x**f.p
