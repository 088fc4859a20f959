"""Exact polynomial arithmetic over GF(p).

Two flavours live here:

* ``UniPoly`` -- univariate polynomials in ``t`` with the Frobenius
  endomorphism ``f -> f(t^p)``, used for the matrices whose entries are
  powers of ``t``.
* ``SparsePoly`` -- sparse multivariate polynomials with a text
  parser/printer, used for Fedder's F-purity criterion.

The degree of the zero polynomial is the sentinel ``NEG_INF`` which
compares below every integer; it is deliberately not ``-1``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .errors import PolyParseError, PreconditionError, ResourceLimitError
from .ff import FieldElem, check_prime

# Per-variable exponent cap for sparse polynomials (configurable per call).
DEFAULT_MAX_EXP = 1 << 15


class _NegInf:
    """Degree of the zero polynomial: below every integer, equal to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("froblen-neg-inf")

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInf()


class UniPoly:
    """A univariate polynomial over GF(p), stored as {degree: nonzero coeff}."""

    __slots__ = ("p", "_terms")

    def __init__(self, terms: Mapping[int, int], p: int):
        check_prime(p)
        clean = {}
        for d, c in terms.items():
            if d < 0:
                raise PreconditionError("negative degree in polynomial")
            c %= p
            if c:
                clean[int(d)] = c
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, val):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def zero(cls, p: int) -> "UniPoly":
        return cls({}, p)

    @classmethod
    def const(cls, c: int, p: int) -> "UniPoly":
        return cls({0: c}, p)

    @classmethod
    def monomial(cls, deg: int, p: int, coeff: int = 1) -> "UniPoly":
        return cls({deg: coeff}, p)

    def items(self):
        return self._terms.items()

    def coeff(self, d: int) -> int:
        return self._terms.get(d, 0)

    @property
    def degree(self):
        return max(self._terms) if self._terms else NEG_INF

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            if other.p != self.p:
                raise PreconditionError("mixed moduli in polynomial arithmetic")
            return other
        if isinstance(other, int):
            return UniPoly.const(other, self.p)
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise PreconditionError("mixed moduli in polynomial arithmetic")
            return UniPoly.const(other.value, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for d, c in o._terms.items():
            terms[d] = terms.get(d, 0) + c
        return UniPoly(terms, self.p)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly({d: -c for d, c in self._terms.items()}, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        out: dict[int, int] = {}
        for d1, c1 in self._terms.items():
            for d2, c2 in o._terms.items():
                d = d1 + d2
                out[d] = (out.get(d, 0) + c1 * c2) % p
        return UniPoly(out, p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        if k < 0:
            raise PreconditionError("negative power of a polynomial")
        result = UniPoly.const(1, self.p)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def frobenius(self, times: int = 1) -> "UniPoly":
        """f -> f(t^(p^times)); equals f^(p^times) since GF(p) is Frobenius-fixed."""
        if times < 0:
            raise PreconditionError("negative Frobenius power")
        scale = self.p**times
        return UniPoly({d * scale: c for d, c in self._terms.items()}, self.p)

    def evaluate(self, x: int) -> FieldElem:
        acc = 0
        for d, c in self._terms.items():
            acc = (acc + c * pow(x, d, self.p)) % self.p
        return FieldElem(acc, self.p)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.p == other.p and self._terms == other._terms
        if isinstance(other, int):
            return self == UniPoly.const(other, self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for d in sorted(self._terms, reverse=True):
            c = self._terms[d]
            if d == 0:
                parts.append(str(c))
            elif d == 1:
                parts.append("t" if c == 1 else f"{c}*t")
            else:
                parts.append(f"t^{d}" if c == 1 else f"{c}*t^{d}")
        return "+".join(parts)


def uni_frobenius(f: UniPoly) -> UniPoly:
    """f^p over GF(p)[t], i.e. f with t replaced by t^p."""
    return f.frobenius(1)


class SparsePoly:
    """A sparse multivariate polynomial over GF(p).

    Terms map exponent vectors (one entry per variable) to nonzero
    residues.  Variables are single letters fixed at construction.
    """

    __slots__ = ("p", "vars", "_terms")

    def __init__(self, terms: Mapping[tuple[int, ...], int], variables: Iterable[str], p: int):
        check_prime(p)
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise PreconditionError("duplicate variable names")
        for v in vs:
            if len(v) != 1 or not v.isalpha():
                raise PreconditionError(f"variables must be single letters, got {v!r}")
        clean = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != len(vs):
                raise PreconditionError("exponent vector length != number of variables")
            if any(x < 0 for x in e):
                raise PreconditionError("negative exponent")
            c %= p
            if c:
                clean[e] = c
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, val):
        raise AttributeError("SparsePoly is immutable")

    @classmethod
    def zero(cls, variables, p):
        return cls({}, variables, p)

    @classmethod
    def const(cls, c: int, variables, p: int) -> "SparsePoly":
        vs = tuple(variables)
        return cls({(0,) * len(vs): c}, vs, p)

    def items(self):
        return self._terms.items()

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def has_constant_term(self) -> bool:
        return (0,) * len(self.vars) in self._terms

    @property
    def total_degree(self):
        return max((sum(e) for e in self._terms), default=NEG_INF)

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            if other.p != self.p or other.vars != self.vars:
                raise PreconditionError("mixed polynomial rings")
            return other
        if isinstance(other, int):
            return SparsePoly.const(other, self.vars, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in o._terms.items():
            terms[e] = terms.get(e, 0) + c
        return SparsePoly(terms, self.vars, self.p)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly({e: -c for e, c in self._terms.items()}, self.vars, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def mul(self, other: "SparsePoly", max_exp: int = DEFAULT_MAX_EXP) -> "SparsePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            raise PreconditionError("cannot multiply by that operand")
        p = self.p
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x > max_exp for x in e):
                    raise ResourceLimitError(
                        f"exponent above configured cap {max_exp}"
                    )
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return SparsePoly(out, self.vars, p)

    def __mul__(self, other):
        if isinstance(other, int):
            return SparsePoly(
                {e: c * other for e, c in self._terms.items()}, self.vars, self.p
            )
        return self.mul(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return (
                self.p == other.p
                and self.vars == other.vars
                and self._terms == other._terms
            )
        if isinstance(other, int):
            return self == SparsePoly.const(other, self.vars, self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.vars, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in graded-lexicographic order, largest first."""
        return sorted(
            self._terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True
        )

    def __repr__(self):
        return format_poly(self)


def poly_pow(f: SparsePoly, e: int, max_exp: int = DEFAULT_MAX_EXP) -> SparsePoly:
    """f^e by binary exponentiation with exact reduction mod p."""
    if e < 0:
        raise PreconditionError("poly_pow requires e >= 0")
    result = SparsePoly.const(1, f.vars, f.p)
    base = f
    while e:
        if e & 1:
            result = result.mul(base, max_exp)
        if e > 1:
            base = base.mul(base, max_exp)
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Fedder's criterion.


def _truncate(f: SparsePoly, bound: int) -> SparsePoly:
    # drop terms inside (x_1^bound, ..., x_n^bound); exponents only grow under
    # multiplication, so truncating intermediates is exact for membership
    return SparsePoly(
        {e: c for e, c in f.items() if all(x < bound for x in e)}, f.vars, f.p
    )


def _fedder_disjoint_supports(f: SparsePoly) -> bool:
    seen: set[int] = set()
    for e, _ in f.items():
        sup = {i for i, x in enumerate(e) if x}
        if seen & sup:
            return False
        seen |= sup
    return True


def _fedder_disjoint_path(f: SparsePoly, p: int) -> bool:
    # With pairwise-disjoint term supports, distinct compositions of p-1 over
    # the terms yield distinct monomials of f^(p-1), and each multinomial
    # coefficient (p-1; e_1..e_s) is nonzero mod p because p-1 < p admits no
    # base-p carries.  Membership outside (x_i^p) then reduces to a feasibility
    # check on one composition.
    caps = []
    for e, _ in f.items():
        cap = min((p - 1) // x for x in e if x)
        caps.append(cap)
    return sum(caps) >= p - 1


def fedder_is_f_pure(f: SparsePoly, p: int) -> bool:
    """Fedder's criterion for the hypersurface f: F-pure iff f^(p-1) has a
    monomial outside (x_1^p, ..., x_n^p)."""
    check_prime(p)
    if f.p != p:
        raise PreconditionError("polynomial modulus must match p")
    if f.is_zero():
        raise PreconditionError("f must be nonzero")
    if f.has_constant_term():
        raise PreconditionError("f must vanish at the origin")
    if _fedder_disjoint_supports(f):
        return _fedder_disjoint_path(f, p)
    acc = SparsePoly.const(1, f.vars, f.p)
    ft = _truncate(f, p)
    for _ in range(p - 1):
        acc = _truncate(acc.mul(ft, max_exp=2 * p), p)
        if acc.is_zero():
            return False
    return not acc.is_zero()


# ---------------------------------------------------------------------------
# Text format: "x^3+y^3+z^3", "t*x^7+t*y^7+z^7", "3*x^2*y+2".

_TERM_RE = re.compile(r"^(?:(\d+)\*?)?((?:[A-Za-z](?:\^\d+)?\*?)*)$")
_FACTOR_RE = re.compile(r"([A-Za-z])(?:\^(\d+))?")


def parse_poly(text: str, p: int, variables: Iterable[str] | None = None) -> SparsePoly:
    """Parse a polynomial string over GF(p).

    Variables are single letters; ``^`` takes powers, ``*`` is optional,
    coefficients are decimal integers reduced mod p.  When *variables* is
    omitted, the letters appearing in the string are used, sorted.
    """
    check_prime(p)
    compact = text.replace(" ", "")
    if not compact:
        raise PolyParseError("empty polynomial string")
    if variables is None:
        vs = tuple(sorted(set(ch for ch in compact if ch.isalpha())))
    else:
        vs = tuple(variables)
    index = {v: i for i, v in enumerate(vs)}
    # split into signed terms
    pieces = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(pieces) != compact:
        raise PolyParseError(f"cannot parse {text!r}")
    terms: dict[tuple[int, ...], int] = {}
    for piece in pieces:
        sign = 1
        if piece[0] == "+":
            piece = piece[1:]
        elif piece[0] == "-":
            sign = -1
            piece = piece[1:]
        if not piece or "**" in piece or piece.startswith("*") or piece.endswith("*"):
            raise PolyParseError(f"cannot parse term {piece!r} in {text!r}")
        m = _TERM_RE.match(piece)
        if not m or (m.group(1) is None and not m.group(2)):
            raise PolyParseError(f"cannot parse term {piece!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        expo = [0] * len(vs)
        body = m.group(2)
        consumed = 0
        for fm in _FACTOR_RE.finditer(body):
            consumed += len(fm.group(0))
            v = fm.group(1)
            if v not in index:
                raise PolyParseError(f"unknown variable {v!r} in {text!r}")
            expo[index[v]] += int(fm.group(2)) if fm.group(2) else 1
        if consumed != len(body.replace("*", "")):
            raise PolyParseError(f"cannot parse term {piece!r} in {text!r}")
        key = tuple(expo)
        terms[key] = terms.get(key, 0) + sign * coeff
    return SparsePoly(terms, vs, p)


def format_poly(f: SparsePoly) -> str:
    """Canonical text form: graded-lex term order, canonical residues."""
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        factors = []
        for v, x in zip(f.vars, e):
            if x == 1:
                factors.append(v)
            elif x > 1:
                factors.append(f"{v}^{x}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([str(c)] + factors))
    return "+".join(parts)
