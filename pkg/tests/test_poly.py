import random

import pytest

from froblen.errors import PolyParseError, PreconditionError, ResourceLimitError
from froblen.ff import primes_in_range
from froblen.poly import (
    NEG_INF,
    SparsePoly,
    UniPoly,
    fedder_is_f_pure,
    format_poly,
    parse_poly,
    poly_pow,
    uni_frobenius,
)


def _rand_unipoly(rng, p, max_deg=6):
    return UniPoly({d: rng.randrange(p) for d in range(max_deg + 1)}, p)


def _rand_sparse(rng, p, nvars=3, max_terms=4, max_exp=3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(0, max_exp) for _ in range(nvars))
        terms[e] = rng.randrange(p)
    return SparsePoly(terms, tuple("xyzuvw"[:nvars]), p)


# -- degree sentinel ----------------------------------------------------------


def test_zero_degree_sentinel_orders_below_everything():
    z = UniPoly.zero(5)
    assert z.degree is NEG_INF
    assert NEG_INF < -100
    assert NEG_INF < 0
    assert not (NEG_INF > 3)
    assert NEG_INF == NEG_INF
    assert NEG_INF != -1
    assert 7 > NEG_INF


def test_degree_multiplicative_over_field():
    rng = random.Random(3)
    for _ in range(100):
        p = rng.choice((2, 3, 5, 7))
        f, g = _rand_unipoly(rng, p), _rand_unipoly(rng, p)
        if f.is_zero() or g.is_zero():
            assert (f * g).is_zero()
        else:
            assert (f * g).degree == f.degree + g.degree


# -- univariate Frobenius -----------------------------------------------------


def test_uni_frobenius_single_monomial():
    for p in (2, 3, 5, 11):
        t = UniPoly.monomial(1, p)
        assert uni_frobenius(t) == UniPoly.monomial(p, p)


def test_uni_frobenius_freshman_dream_over_gf2():
    f = UniPoly({1: 1, 0: 1}, 2)  # t + 1
    assert uni_frobenius(f) == UniPoly({2: 1, 0: 1}, 2)


def test_uni_frobenius_fixes_constants():
    for p in (3, 7):
        for c in range(p):
            assert uni_frobenius(UniPoly.const(c, p)) == UniPoly.const(c, p)


def test_uni_frobenius_is_ring_homomorphism():
    rng = random.Random(4)
    for _ in range(150):
        p = rng.choice((2, 3, 5))
        f, g = _rand_unipoly(rng, p), _rand_unipoly(rng, p)
        assert uni_frobenius(f + g) == uni_frobenius(f) + uni_frobenius(g)
        assert uni_frobenius(f * g) == uni_frobenius(f) * uni_frobenius(g)


def test_uni_frobenius_equals_binary_power():
    rng = random.Random(5)
    for _ in range(30):
        p = rng.choice((2, 3, 5))
        f = _rand_unipoly(rng, p, max_deg=3)
        assert uni_frobenius(f) == f**p


# -- sparse polynomials --------------------------------------------------------


def test_sparse_ring_axioms_on_samples():
    rng = random.Random(6)
    for _ in range(60):
        p = rng.choice((2, 3, 5, 7))
        f, g, h = (_rand_sparse(rng, p) for _ in range(3))
        assert f * g == g * f
        assert (f + g) * h == f * h + g * h


def test_poly_pow_zero_exponent_is_one():
    f = parse_poly("x^2+y", 5)
    assert poly_pow(f, 0) == SparsePoly.const(1, f.vars, 5)


def test_poly_pow_examples():
    f = parse_poly("x+y", 2)
    assert poly_pow(f, 2) == parse_poly("x^2+y^2", 2)
    g = parse_poly("x+y+z", 3)
    assert poly_pow(g, 3) == parse_poly("x^3+y^3+z^3", 3)


def test_poly_pow_p_is_termwise_exponent_scaling():
    rng = random.Random(7)
    for _ in range(40):
        p = rng.choice((2, 3, 5))
        f = _rand_sparse(rng, p, nvars=2, max_terms=3, max_exp=2)
        scaled = SparsePoly(
            {tuple(p * x for x in e): c for e, c in f.items()}, f.vars, p
        )
        assert poly_pow(f, p) == scaled


def test_poly_pow_exponent_cap():
    f = parse_poly("x", 5)
    with pytest.raises(ResourceLimitError):
        poly_pow(f, 1 << 16)


# -- parser / printer -----------------------------------------------------------


def test_parse_basic_forms():
    f = parse_poly("x^3+y^3+z^3", 7)
    assert f.vars == ("x", "y", "z")
    assert dict(f.items()) == {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1}
    g = parse_poly("t*x^7+t*y^7+z^7", 11)
    assert g.vars == ("t", "x", "y", "z")
    assert dict(g.items()) == {
        (1, 7, 0, 0): 1,
        (1, 0, 7, 0): 1,
        (0, 0, 0, 7): 1,
    }


def test_parse_coefficients_and_signs_reduce_mod_p():
    f = parse_poly("6*x^2*y+3-x", 5)
    assert dict(f.items()) == {(2, 1): 1, (0, 0): 3, (1, 0): 4}


def test_parse_rejects_garbage():
    for bad in ("", "x^", "3**x", "x+", "2^x", "*x", "x*"):
        with pytest.raises(PolyParseError):
            parse_poly(bad, 5)


def test_parse_star_is_optional():
    assert parse_poly("x^2y", 5) == parse_poly("x^2*y", 5)
    assert parse_poly("3x", 5) == parse_poly("3*x", 5)


def test_print_parse_round_trip_is_exact():
    rng = random.Random(8)
    for _ in range(200):
        p = rng.choice((2, 3, 5, 11))
        f = _rand_sparse(rng, p)
        assert parse_poly(format_poly(f), p, f.vars) == f


def test_format_uses_graded_lex_descending():
    f = parse_poly("z^7+t*x^7+t*y^7", 11)
    assert format_poly(f) == "t*x^7+t*y^7+z^7"
    assert format_poly(parse_poly("y^3+x^3", 5)) == "x^3+y^3"


# -- Fedder ---------------------------------------------------------------------


def test_fedder_monomial_product_is_always_pure():
    for p in (2, 3, 7, 19):
        f = parse_poly("x*y", p)
        assert fedder_is_f_pure(f, p) is True


def test_fedder_cubic_surface_examples():
    assert fedder_is_f_pure(parse_poly("x^3+y^3+z^3", 7), 7) is True
    assert fedder_is_f_pure(parse_poly("x^3+y^3+z^3", 5), 5) is False


def test_fedder_rejects_constant_term_and_zero():
    with pytest.raises(PreconditionError):
        fedder_is_f_pure(parse_poly("x+1", 5), 5)
    with pytest.raises(PreconditionError):
        fedder_is_f_pure(SparsePoly.zero(("x",), 5), 5)
    with pytest.raises(PreconditionError):
        fedder_is_f_pure(parse_poly("x", 5), 7)


def test_fedder_agrees_with_full_expansion_oracle():
    # small cases: expand f^(p-1) with the generic power and search directly
    rng = random.Random(9)
    cases = 0
    while cases < 40:
        p = rng.choice((2, 3, 5, 7))
        f = _rand_sparse(rng, p, nvars=2, max_terms=3, max_exp=2)
        if f.is_zero() or f.has_constant_term():
            continue
        full = poly_pow(f, p - 1)
        brute = any(all(x <= p - 1 for x in e) for e, _ in full.items())
        assert fedder_is_f_pure(f, p) == brute, (p, dict(f.items()))
        cases += 1


def test_fedder_diagonal_fast_path_matches_truncated_path():
    # same polynomial, with supports made non-disjoint by a harmless rename
    for n in (3, 4, 5):
        for p in primes_in_range(2, 40):
            if n % p == 0:
                continue
            diag = parse_poly("+".join(f"{v}^{n}" for v in "abcde"[:n]), p)
            assert fedder_is_f_pure(diag, p) == (p % n == 1)


def test_fedder_diagonal_sweep_matches_congruence_class():
    for n in (3, 5, 7):
        for p in primes_in_range(2, 100):
            if n % p == 0:
                continue
            f = parse_poly("+".join(f"{v}^{n}" for v in "abcdefg"[:n]), p)
            assert fedder_is_f_pure(f, p) == (p % n == 1), (n, p)
