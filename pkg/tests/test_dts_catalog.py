import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hosc.dts_catalog import (
    NotPerfectError,
    UnsupportedDegreeError,
    affine_group,
    catalog_entries,
    catalog_lookup,
    combine,
    embedded_tables,
    is_sharply_2_transitive,
    predicted_combined_sum,
    skolem_okeefe,
    trivial_m1,
    verify_catalog,
)
from hosc.rulers import is_dts, is_perfect, lower_bounds, scope, sum_of_lengths


def test_catalog_checks_out():
    assert verify_catalog() == []
    assert len(catalog_entries()) == 34


def test_catalog_respects_bounds():
    for L, M, d in catalog_entries():
        bs, bm = lower_bounds(L, M)
        assert scope(d) >= bs and sum_of_lengths(d) >= bm


def test_catalog_examples():
    d = catalog_lookup(6, 3)
    assert (d.L, scope(d), sum_of_lengths(d)) == (6, 36, 186)
    d = catalog_lookup(5, 4)
    assert (scope(d), sum_of_lengths(d)) == (51, 233)
    d = catalog_lookup(12, 4)
    assert is_perfect(d) and scope(d) == 120
    assert catalog_lookup(9, 4) is None
    assert catalog_lookup(16, 3) is None


def test_pareto_pair_for_44():
    assert len(embedded_tables()[(4, 4)]) == 2
    a, b = catalog_lookup(4, 4, "scope"), catalog_lookup(4, 4, "sum")
    assert (scope(a), sum_of_lengths(a)) == (41, 153)
    assert (scope(b), sum_of_lengths(b)) == (42, 150)


@pytest.mark.parametrize(
    "L, rows", [(2, [[0, 2, 7], [0, 3, 4]]), (3, [[0, 3, 10], [0, 6, 8], [0, 4, 5]])]
)
def test_skolem_small_tables(L, rows):
    assert skolem_okeefe(L).as_lists() == rows


def test_skolem_family_l8():
    d = skolem_okeefe(8)
    assert is_dts(d) and (scope(d), sum_of_lengths(d)) == (24, 150)


@given(st.integers(1, 500))
@settings(max_examples=80, deadline=None)
def test_skolem_meets_bounds(L):
    d = skolem_okeefe(L)
    assert d.L == L and is_dts(d)
    assert (scope(d), sum_of_lengths(d)) == lower_bounds(L, 2)


def test_trivial_m1():
    d = trivial_m1(5)
    assert is_perfect(d) and sum_of_lengths(d) == lower_bounds(5, 1)[1]


def test_affine_groups():
    g2 = affine_group(2)
    assert sorted(g2.perms) == [(0, 1), (1, 0)]
    g4 = affine_group(4)
    assert len(g4) == 12 and g4.perms[2] == (2, 3, 0, 1)
    for deg in (3, 4, 5):
        assert is_sharply_2_transitive(affine_group(deg))
    with pytest.raises(UnsupportedDegreeError):
        affine_group(6)


def test_combine_golomb_with_itself():
    d = combine([(0, 1, 4, 6)], [(0, 1, 4, 6)])
    assert d.L == 14 and is_perfect(d)
    assert sum_of_lengths(d) == predicted_combined_sum(1, 3, 6, 6) == 1020
    assert d.rulers[0].marks == (0, 1, 4, 6)


def test_combine_53():
    d = combine(catalog_lookup(4, 3), [(0, 1, 4, 6)])
    assert d.L == 4 * 1 * 12 + 4 + 1 == 53
    assert is_perfect(d)


def test_combine_needs_perfect():
    with pytest.raises(NotPerfectError):
        combine([(0, 1, 4, 9, 11)], [(0, 1, 4, 9, 11)])


def test_predicted_sum_arithmetic():
    assert predicted_combined_sum(1, 1, 1, 1) == 10


def _perfect_pool():
    pool = []
    for M in (1, 2, 3):
        for L in range(1, 10):
            d = catalog_lookup(L, M)
            if d is not None and is_perfect(d):
                pool.append(d)
    return pool


PERFECT = _perfect_pool()


@given(st.data())
@settings(max_examples=20, deadline=None)
def test_combine_sum_formula_on_catalog_pairs(data):
    X = data.draw(st.sampled_from(PERFECT))
    Y = data.draw(st.sampled_from([d for d in PERFECT if d.M == X.M]))
    if X.L * Y.L > 20:
        return
    d = combine(X, Y)
    M = X.M
    assert d.L == X.L * Y.L * M * (M + 1) + X.L + Y.L
    assert is_perfect(d)
    assert sum_of_lengths(d) == predicted_combined_sum(Y.L, M, sum_of_lengths(X), sum_of_lengths(Y))


def test_prop8_coefficient():
    # Iterating Y -> combine(X, Y) from L0 = 15, S0 = 5 L0^2 + L0 drives S / L^2 to 5 + 1/91.
    L0, S0 = 15, 5 * 15 * 15 + 15
    assert S0 == 1140
    L, S = L0, S0
    for _ in range(6):
        L, S = L0 * L * 12 + L0 + L, predicted_combined_sum(L, 3, S0, S)
    assert abs(S / L**2 - (5 + 1 / 91)) < 1e-3
