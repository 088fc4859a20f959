import json

import pytest

from froblen.errors import PreconditionError, ResourceLimitError
from froblen.ff import primes_in_range
from froblen.lengths import (
    LengthReport,
    bernstein_bound,
    calabi_yau_d_length,
    curve_locus_upper_bound,
    d_length_isolated,
    fermat7_expected_table,
    fermat7_lengths,
    hypersurface_bound,
    weighted_fermat7_lengths,
)
from froblen.fermat import FermatContext, stable_dim_by_count
from froblen.poly import parse_poly


# -- bound calculators -----------------------------------------------------------


def test_hypersurface_bound_values():
    assert hypersurface_bound(3, 7) == 511
    assert hypersurface_bound(1, 1) == 1
    assert hypersurface_bound(2, 1) == 3


def test_hypersurface_bound_guards():
    with pytest.raises(PreconditionError):
        hypersurface_bound(0, 3)
    with pytest.raises(PreconditionError):
        hypersurface_bound(3, 0)
    with pytest.raises(ResourceLimitError):
        hypersurface_bound(100, 10)


def test_bernstein_bound_single_generator_matches_hypersurface():
    assert bernstein_bound(3, [7], 1) == hypersurface_bound(3, 7) == 511


def test_bernstein_bound_multiset_examples():
    assert bernstein_bound(2, [1, 1], 1) == 7
    assert bernstein_bound(2, [1, 1], 2) == 26


def test_bernstein_bound_guards():
    with pytest.raises(PreconditionError):
        bernstein_bound(2, [1, 1], 3)
    with pytest.raises(PreconditionError):
        bernstein_bound(2, [], 1)


def test_isolated_point_formula():
    assert d_length_isolated(6, 1) == 7
    assert d_length_isolated(0, 1) == 1
    assert d_length_isolated(15, 1) == 16
    with pytest.raises(PreconditionError):
        d_length_isolated(3, 0)


def test_curve_locus_upper_bound_values():
    assert curve_locus_upper_bound(1, [], 6) == 7
    assert curve_locus_upper_bound(1, [6, 6], 0) == 13
    assert curve_locus_upper_bound(2, [1], 3) == 6


# -- length report type ------------------------------------------------------------


def test_report_enforces_length_chain():
    with pytest.raises(PreconditionError):
        LengthReport(
            p=11, n=7, d=2, stable_dim=6, c=1, l_F=8, l_Fe={1: 8}, l_Finf=7, l_D=7
        )


def test_report_serialization_shape():
    r = fermat7_lengths(11)
    data = json.loads(r.to_json())
    assert set(data) == {
        "p",
        "n",
        "d",
        "stable_dim",
        "c",
        "l_F",
        "l_Fe",
        "l_Finf",
        "l_D",
        "evidence",
    }
    assert data["l_Fe"] == {"1": 5, "3": 7}
    assert r.to_json() == fermat7_lengths(11).to_json()


def test_report_unknown_values_serialize_as_strings():
    r = LengthReport(
        p=5, n=3, d=2, stable_dim=0, c=1, l_F=None, l_Fe={}, l_Finf=None, l_D=1
    )
    assert json.loads(r.to_json())["l_F"] == "unknown"


# -- degree-seven diagonal surface ----------------------------------------------------


def test_fermat7_headline_triples():
    assert _triple(fermat7_lengths(29)) == (16, 16, 16)
    assert _triple(fermat7_lengths(67)) == (7, 7, 7)
    assert _triple(fermat7_lengths(11)) == (5, 7, 7)
    assert _triple(fermat7_lengths(13)) == (1, 1, 1)


def _triple(r):
    return (r.l_F, r.l_Finf, r.l_D)


def test_fermat7_rejects_p_seven():
    with pytest.raises(PreconditionError):
        fermat7_lengths(7)


def test_fermat7_matches_piecewise_classifier_up_to_300():
    for p in primes_in_range(2, 300):
        if p == 7:
            continue
        r = fermat7_lengths(p)
        assert _triple(r) == fermat7_expected_table(p), p
        checks = [e for e in r.evidence if e["op"] == "piecewise_table_check"]
        assert checks and checks[0]["match"] is True


def test_fermat7_lengths_coincide_on_equality_classes():
    for p in primes_in_range(2, 300):
        if p == 7:
            continue
        r = fermat7_lengths(p)
        if p % 3 == 1 or r.stable_dim in (0, 15):
            assert r.l_F == r.l_Finf, p


def test_fermat7_chain_inequalities_hold():
    for p in primes_in_range(2, 200):
        if p == 7:
            continue
        r = fermat7_lengths(p)
        values = [r.l_F, *[r.l_Fe[e] for e in sorted(r.l_Fe)], r.l_Finf, r.l_D]
        assert all(a <= b for a, b in zip(values, values[1:]))


def test_fermat7_stable_dim_recorded_in_evidence():
    r = fermat7_lengths(23)
    ops = {e["op"] for e in r.evidence}
    assert {"stable_dim_by_count", "stable_subspace_rank", "piecewise_table_check"} <= ops


# -- weighted family --------------------------------------------------------------------


def test_weighted_lengths_at_residue_four_primes():
    for p in (11, 53):
        r = weighted_fermat7_lengths(p, trials=200)
        assert _triple(r) == (3, 7, 7)
        assert r.l_Fe == {1: 3, 3: 7}
        notes = [e for e in r.evidence if e["op"] == "l_F_certification"]
        assert notes and "dominance" in notes[0]["note"]


def test_weighted_lengths_rejects_other_residues():
    with pytest.raises(PreconditionError):
        weighted_fermat7_lengths(13, trials=10)


def test_weighted_lengths_deterministic_with_seed():
    a = weighted_fermat7_lengths(11, trials=50, seed=7)
    b = weighted_fermat7_lengths(11, trials=50, seed=7)
    assert a.to_json() == b.to_json()


# -- classifier -------------------------------------------------------------------------


def test_calabi_yau_examples():
    assert calabi_yau_d_length(parse_poly("x^3+y^3+z^3", 7), 7) == 2
    assert calabi_yau_d_length(parse_poly("x^3+y^3+z^3", 5), 5) == 1
    assert calabi_yau_d_length(parse_poly("x^4+y^4+z^4+w^4", 5), 5) == 2


def test_calabi_yau_requires_degree_matching_variable_count():
    with pytest.raises(PreconditionError):
        calabi_yau_d_length(parse_poly("x^3+y^3", 7), 7)


def test_calabi_yau_triangulates_with_counting_criterion():
    for n in (3, 4, 5):
        poly_text = "+".join(f"{v}^{n}" for v in "abcde"[:n])
        for p in primes_in_range(2, 100):
            if n % p == 0:
                continue
            f = parse_poly(poly_text, p)
            classified = calabi_yau_d_length(f, p)
            counted = stable_dim_by_count(FermatContext(n, n - 1, p))
            assert (classified == 2) == (p % n == 1), (n, p)
            assert (counted == 1) == (p % n == 1), (n, p)
