import math
import random

import pytest

from froblen.errors import PreconditionError
from froblen.ff import (
    PRIMITIVE_POLYS,
    ExtField,
    FieldElem,
    binom_mod_p,
    euler_phi,
    ext_field,
    ext_frobenius,
    is_prime,
    legendre,
    multinomial_mod_p,
    primes_in_range,
)

SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def test_field_elem_arithmetic_is_exact():
    a = FieldElem(9, 11)
    b = FieldElem(5, 11)
    assert (a + b).value == 3
    assert (a - b).value == 4
    assert (a * b).value == 1
    assert (a / b).value == (9 * pow(5, -1, 11)) % 11
    assert (-a).value == 2
    assert (a**10).value == 1
    assert a.inv() * a == FieldElem(1, 11)


def test_field_elem_rejects_composite_modulus():
    with pytest.raises(PreconditionError):
        FieldElem(1, 12)
    with pytest.raises(PreconditionError):
        FieldElem(1, 1)


def test_field_elem_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        FieldElem(0, 7).inv()


def test_legendre_examples():
    assert legendre(-3, 7) == 1
    assert legendre(-3, 11) == -1
    assert legendre(0, 13) == 0


def test_legendre_requires_odd_prime():
    with pytest.raises(PreconditionError):
        legendre(3, 2)
    with pytest.raises(PreconditionError):
        legendre(3, 9)


def test_legendre_agrees_with_exhaustive_square_search():
    for p in primes_in_range(3, 200):
        squares = {(x * x) % p for x in range(1, p)}
        for a in range(p):
            expected = 0 if a == 0 else (1 if a in squares else -1)
            assert legendre(a, p) == expected


def test_legendre_minus_three_tracks_mod_three_class():
    for p in primes_in_range(5, 1000):
        assert (legendre(-3, p) == 1) == (p % 3 == 1)


def test_binom_examples():
    assert binom_mod_p(9, 3, 11).value == 7
    for p in SMALL_PRIMES:
        assert binom_mod_p(p, 1, p).value == 0
    # k > m gives zero
    assert binom_mod_p(3, 5, 7).value == 0


def test_binom_wilson_style_identities_at_k1():
    p, k = 11, 1
    a = binom_mod_p(5 * k + 2, k, p).value
    b = binom_mod_p(6 * k + 3, 2 * k + 1, p).value
    c = (-binom_mod_p(3 * k + 1, k, p)).value
    assert a == b == c == 7


def test_binom_agrees_with_exact_binomials_small_range():
    for p in SMALL_PRIMES:
        for m in range(300):
            for k in range(m + 1):
                assert binom_mod_p(m, k, p).value == math.comb(m, k) % p


def test_binom_agrees_with_pascal_rows_stratified():
    # deterministic stratified sample of larger rows, Pascal recurrence oracle
    for p in SMALL_PRIMES:
        row = [1]
        for m in range(1, 2000):
            row = [1] + [(row[i] + row[i + 1]) % p for i in range(len(row) - 1)] + [1]
            if m % 37 == 0:
                for k in range(0, m + 1, 13):
                    assert binom_mod_p(m, k, p).value == row[k], (p, m, k)


@pytest.mark.slow
def test_binom_agrees_with_pascal_rows_exhaustive():
    for p in SMALL_PRIMES:
        row = [1]
        for m in range(1, 2000):
            row = [1] + [(row[i] + row[i + 1]) % p for i in range(len(row) - 1)] + [1]
            for k, expected in enumerate(row):
                assert binom_mod_p(m, k, p).value == expected, (p, m, k)


def test_multinomial_examples():
    assert multinomial_mod_p(4, [1, 1, 2], 5).value == 2
    for p in SMALL_PRIMES:
        assert multinomial_mod_p(9, [9], p).value == 1
    assert multinomial_mod_p(4, [3, 1], 11).value == 4


def test_multinomial_nonzero_when_top_below_p():
    rng = random.Random(0)
    for _ in range(200):
        p = rng.choice((5, 7, 11, 13))
        top = rng.randrange(p)
        parts = []
        rest = top
        while rest:
            a = rng.randint(1, rest)
            parts.append(a)
            rest -= a
        assert multinomial_mod_p(top, parts or [0], p).value != 0


def test_multinomial_rejects_bad_parts():
    with pytest.raises(PreconditionError):
        multinomial_mod_p(4, [1, 1], 5)


def test_euler_phi_values():
    assert euler_phi(7) == 6
    assert euler_phi(1) == 1
    assert euler_phi(12) == 4
    for n in range(1, 200):
        brute = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert euler_phi(n) == brute


def test_is_prime_and_ranges():
    assert primes_in_range(2, 20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert not is_prime(1)
    assert not is_prime(2**33)


def test_packaged_moduli_are_irreducible_and_primitive():
    for (p, m), coeffs in PRIMITIVE_POLYS.items():
        F = ExtField(p, m, coeffs)  # constructor re-checks irreducibility
        gen = F.gen()
        order = p**m - 1
        seen = gen
        # y must generate the multiplicative group
        for q in {f for f in _prime_factors(order)}:
            assert gen ** (order // q) != F.one(), (p, m)
        assert gen**order == F.one()


def _prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def test_ext_field_rejects_reducible_modulus():
    with pytest.raises(PreconditionError):
        ExtField(2, 2, (0, 0, 1))  # y^2
    with pytest.raises(PreconditionError):
        ExtField(3, 4, (1, 0, 2, 0, 1))  # (y^2+1)(y^2+2) over GF(3)


def test_ext_frobenius_fixes_prime_subfield():
    for p, m in ((2, 2), (3, 3), (5, 2), (13, 4)):
        F = ext_field(p, m)
        for c in range(p):
            assert ext_frobenius(F.elem(c)) == F.elem(c)


def test_ext_frobenius_on_quartic_root_of_unity():
    F4 = ext_field(2, 2)
    y = F4.gen()
    assert ext_frobenius(y) == y + F4.one()


def test_ext_frobenius_has_order_m():
    rng = random.Random(1)
    for p, m in ((2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (7, 2), (5, 3)):
        F = ext_field(p, m)
        for _ in range(10):
            x = F.elem(tuple(rng.randrange(p) for _ in range(m)))
            z = x
            for _ in range(m):
                z = ext_frobenius(z)
            assert z == x


def test_ext_frobenius_is_field_automorphism():
    rng = random.Random(2)
    F = ext_field(5, 3)
    for _ in range(50):
        x = F.elem(tuple(rng.randrange(5) for _ in range(3)))
        y = F.elem(tuple(rng.randrange(5) for _ in range(3)))
        assert ext_frobenius(x + y) == ext_frobenius(x) + ext_frobenius(y)
        assert ext_frobenius(x * y) == ext_frobenius(x) * ext_frobenius(y)


def test_ext_field_inverse_and_pow():
    F = ext_field(7, 2)
    for x in F.elements():
        if x:
            assert x * x.inv() == F.one()
            assert x ** (F.order - 1) == F.one()


def test_ext_field_unsupported_degree():
    with pytest.raises(PreconditionError):
        ExtField(3, 5)
    with pytest.raises(PreconditionError):
        ext_field(17, 2)
