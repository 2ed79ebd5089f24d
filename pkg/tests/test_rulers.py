from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hosc.rulers import (
    DifferenceTriangleSet,
    DtsParseError,
    InvalidRulerError,
    MustNormalizeError,
    NotGolombError,
    UnsupportedBoundError,
    distance_set,
    format_dts,
    is_dts,
    is_golomb,
    is_perfect,
    lower_bounds,
    normalize,
    parse_dts,
    scope,
    sum_of_lengths,
    uniform_ruler,
)


@pytest.mark.parametrize(
    "marks, expected",
    [((6, 4, 1, 0), (0, 1, 4, 6)), ((0, 1, 4, 6), (0, 1, 4, 6)), ((5, 7, 10), (0, 2, 5))],
)
def test_normalize(marks, expected):
    assert normalize(marks).marks == expected


def test_normalize_rejects_duplicates():
    with pytest.raises(InvalidRulerError):
        normalize((0, 3, 3))


@pytest.mark.parametrize(
    "marks, expected", [((0, 1, 3), {1, 2, 3}), ((0, 2, 5), {2, 3, 5}), ((0, 1), {1})]
)
def test_distance_set(marks, expected):
    assert distance_set(marks) == expected


def test_distance_set_rejects_repeats():
    with pytest.raises(NotGolombError):
        distance_set((0, 1, 2))


def test_predicates():
    assert is_golomb((0, 1, 4, 9, 11))
    assert not is_golomb((0, 1, 2))
    assert is_dts([(0, 2, 5), (0, 6, 7)])
    assert not is_dts([(0, 1, 3), (0, 2, 3)])


@pytest.mark.parametrize(
    "dts, sc, sm",
    [([(0, 2, 5), (0, 6, 7)], 7, 12), ([(0, 3, 4), (0, 2, 7)], 7, 11), ([(0, 1, 4, 6)], 6, 6)],
)
def test_scope_and_sum(dts, sc, sm):
    assert scope(dts) == sc
    assert sum_of_lengths(dts) == sm


def test_perfect():
    assert is_perfect([(0, 1, 4, 6)])
    assert not is_perfect([(0, 2, 5), (0, 6, 7)])


@pytest.mark.parametrize(
    "L, M, bounds", [(6, 3, (36, 186)), (2, 2, (7, 11)), (5, 4, (51, 233)), (3, 1, (3, 6))]
)
def test_lower_bounds(L, M, bounds):
    assert lower_bounds(L, M) == bounds


def test_lower_bounds_unsupported():
    with pytest.raises(UnsupportedBoundError):
        lower_bounds(3, 5)


def test_uniform_ruler_examples():
    u = uniform_ruler([(0, 6, 7), (0, 2, 5)])
    assert u.marks == (0, 1, 5, 11, 12, 14)
    assert uniform_ruler([(0, 1)]).marks == (0, 1)
    assert uniform_ruler([(0, 2), (0, 1)]).marks == (0, 1, 3, 4)


def test_uniform_ruler_needs_normalized():
    with pytest.raises(MustNormalizeError):
        uniform_ruler([(1, 3), (0, 1)])


def test_parse_errors_carry_line_number():
    with pytest.raises(DtsParseError) as exc:
        parse_dts("# header\n0 1 3\n0 2\n")
    assert exc.value.lineno == 3
    with pytest.raises(DtsParseError):
        parse_dts("0 x 3\n")


def _brute_is_dts(rows):
    diffs = []
    for r in rows:
        diffs += [abs(a - b) for a, b in combinations(r, 2)]
    return all(len(set(r)) == len(r) for r in rows) and len(diffs) == len(set(diffs))


rulers_strategy = st.integers(1, 6).flatmap(
    lambda L: st.integers(1, 4).flatmap(
        lambda M: st.lists(
            st.lists(st.integers(0, 40), min_size=M + 1, max_size=M + 1, unique=True),
            min_size=L,
            max_size=L,
        )
    )
)


@given(rulers_strategy)
@settings(max_examples=300, deadline=None)
def test_is_dts_matches_brute_force(rows):
    assert is_dts(rows) == _brute_is_dts(rows)


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=8, unique=True))
def test_normalize_idempotent(marks):
    once = normalize(marks)
    assert normalize(once.marks) == once
    assert once.marks[0] == 0


@given(rulers_strategy)
@settings(max_examples=200, deadline=None)
def test_golomb_distance_count(rows):
    for r in rows:
        if is_golomb(r):
            M = len(r) - 1
            assert len(distance_set(normalize(r))) == (M + 1) * M // 2


@given(rulers_strategy)
@settings(max_examples=200, deadline=None)
def test_uniform_ruler_round_trip(rows):
    dts = DifferenceTriangleSet([normalize(r) for r in rows])
    u = uniform_ruler(dts)
    assert u.residue_counts() == [dts.M + 1] * dts.L
    assert u.marks[: dts.L] == tuple(range(dts.L))
    assert u.to_dts().as_lists() == dts.as_lists()


@given(rulers_strategy)
@settings(max_examples=100, deadline=None)
def test_format_parse_round_trip(rows):
    dts = DifferenceTriangleSet(rows)
    assert parse_dts(format_dts(dts, comment="x")).as_lists() == dts.as_lists()
