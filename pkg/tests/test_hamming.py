import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hosc import hamming
from hosc.hamming import (
    AFFINE_TABLE,
    BOOLEAN_TABLE,
    DETECTED,
    NO_ERROR,
    ExtHammingSpec,
    HammingError,
    affine_spec,
    auto_component,
    column,
    column_bits,
    decode,
    encode_parity,
    find_affine,
    gf2_rank,
    syndrome_of,
    systematize_check,
    tau,
    tau_inv,
)


def test_affine_table_inverses():
    for m, (a, b, ainv) in AFFINE_TABLE.items():
        assert a * ainv % (1 << m) == 1
        assert affine_spec(m + 1).a_inv == ainv
    assert AFFINE_TABLE[6] == (3, 3, 43)


def test_boolean_small_map():
    spec = ExtHammingSpec(r=7, perm="boolean")
    for j in range(64):
        b = [(j >> u) & 1 for u in range(6)]
        c = [
            b[0],
            b[1],
            b[2] ^ (b[0] & b[1]),
            b[3] ^ (b[0] & b[1]),
            b[4] ^ (b[0] & b[1] & b[2]),
            b[5] ^ ((1 ^ b[0]) & b[1] & b[2]),
        ]
        assert tau(spec, j) == sum(bit << u for u, bit in enumerate(c))


def test_boolean_parameter_rows():
    assert all(d <= i for i, (d, _) in BOOLEAN_TABLE.items())


def test_natural_column_layout():
    spec = ExtHammingSpec(r=4, perm="natural")
    assert column_bits(spec, 2) == [0, 1, 0, 1]
    assert [column(spec, j) for j in range(8)] == [2 * j + 1 for j in range(8)]


def test_affine_r3_first_column():
    spec = affine_spec(4)
    assert (spec.a, spec.b) == (1, 1)
    assert column(spec, 0) == 2 * 1 + 1


def test_column_range():
    with pytest.raises(IndexError):
        column(affine_spec(5, 3), 13)


def test_boolean_r7_tail_matrix():
    spec = ExtHammingSpec(r=7, perm="boolean")
    rows = ["1111101", "1111110", "1101110", "0011110", "0110011", "1010101", "1111111"]
    cols = [column_bits(spec, j) for j in range(57, 64)]
    got = ["".join(str(c[q]) for c in cols) for q in range(7)]
    assert got == rows
    assert gf2_rank(column(spec, j) for j in range(57, 64)) == 7


@pytest.mark.parametrize("m", sorted(AFFINE_TABLE))
def test_affine_table_systematizes(m):
    assert systematize_check(affine_spec(m + 1))


@pytest.mark.parametrize("m", range(3, 17))
def test_boolean_truncations_systematize(m):
    assert systematize_check(ExtHammingSpec(r=m + 1, perm="boolean"))


def test_natural_tail_is_singular():
    assert not systematize_check(ExtHammingSpec(r=5, perm="natural"))


def test_find_affine():
    assert find_affine(4) == (1, 1)
    a, b = find_affine(5)
    assert systematize_check(affine_spec(5, 0, a, b))
    assert systematize_check(affine_spec(9, 0, 9, 11))
    with pytest.raises(HammingError):
        find_affine(3)


def test_decode_basics():
    spec = affine_spec(6, 5)
    assert decode(spec, 0) == NO_ERROR
    assert syndrome_of(spec, []) == 0
    for j in range(spec.n):
        assert decode(spec, syndrome_of(spec, [j])).position == j
    for a, b in itertools.combinations(range(spec.n), 2):
        assert decode(spec, syndrome_of(spec, [a, b])) == DETECTED


def test_decode_table_matches_decode():
    spec = affine_spec(7, 20)
    tab = hamming.decode_table(spec)
    for s in range(1 << spec.r):
        out = decode(spec, s)
        want = {"no_error": -2, "detected": -1}.get(out.kind, out.position)
        assert tab[s] == want


def test_auto_component_sizes():
    spec = auto_component(1228)
    assert spec.r == 12 and spec.n == 1228 and spec.shortening == 2048 - 1228
    assert auto_component(188).r == 9


specs = st.one_of(
    st.integers(4, 12).flatmap(
        lambda r: st.integers(0, (1 << (r - 1)) - r).map(lambda s: affine_spec(r, s))
    ),
    st.integers(4, 12).map(lambda r: ExtHammingSpec(r=r, perm="boolean")),
)


@given(specs, st.data())
@settings(max_examples=200, deadline=None)
def test_tau_bijection(spec, data):
    y = data.draw(st.integers(0, spec.parent_length - 1))
    assert tau(spec, tau_inv(spec, y)) == y
    assert tau_inv(spec, tau(spec, y)) == y


@given(specs)
@settings(max_examples=60, deadline=None)
def test_columns_odd_and_distinct(spec):
    cols = hamming.column_table(spec)
    assert np.all(cols & 1)
    assert len(np.unique(cols)) == spec.n


@given(st.integers(4, 12), st.data())
@settings(max_examples=200, deadline=None)
def test_shortening_shifts_columns(r, data):
    N = 1 << (r - 1)
    s = data.draw(st.integers(0, N - r))
    j = data.draw(st.integers(0, N - s - 1))
    assert column(affine_spec(r, s), j) == column(affine_spec(r, 0), j + s)


@given(specs, st.data())
@settings(max_examples=60, deadline=None)
def test_even_weight_never_corrects(spec, data):
    w = data.draw(st.sampled_from([2, 4]))
    if spec.n < w:
        return
    pos = data.draw(st.lists(st.integers(0, spec.n - 1), min_size=w, max_size=w, unique=True))
    s = syndrome_of(spec, pos)
    assert decode(spec, s) in (NO_ERROR, DETECTED)


@given(st.integers(4, 10), st.data())
@settings(max_examples=100, deadline=None)
def test_encoder_gives_codewords(r, data):
    N = 1 << (r - 1)
    spec = affine_spec(r, data.draw(st.integers(0, N - 2 * r)))
    info = np.array(data.draw(st.lists(st.integers(0, 1), min_size=spec.k, max_size=spec.k)), dtype=np.uint8)
    parity = encode_parity(spec, info)
    word = np.concatenate([info, parity])
    assert syndrome_of(spec, np.flatnonzero(word)) == 0


def test_encoder_zero_and_linear():
    spec = affine_spec(6, 7)
    assert not encode_parity(spec, np.zeros(spec.k, dtype=np.uint8)).any()
    with pytest.raises(HammingError):
        encode_parity(spec, np.zeros(3, dtype=np.uint8))
