import time
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import backends
from hosc import hamming, kernels
from hosc.simulator import (
    ChannelSpec,
    SimConfig,
    SimReport,
    build_tables,
    complexity_metrics,
    decode_positions,
    epsilon_to_gap,
    frame_rng,
    gap_to_epsilon,
    run_campaign,
    sample_errors,
    simulate_frame,
    spec_complexity,
    terminated_rate,
)
from hosc.staircase import build_spec, constraint_support, variable_constraints

# (S, M, F, W, R, I, gap_db, in_ber, r) per operating point; r is the derived component redundancy
OPERATING_POINTS = [
    (669, 3, 725, 21, 0.980, 3, 0.585, 9.86e-4, 13),
    (409, 3, 926, 21, 0.970, 3, 0.650, 1.57e-3, 12),
    (307, 3, 885, 21, 0.960, 4, 0.750, 2.09e-3, 12),
    (307, 3, 717, 17, 0.960, 4, 0.750, 2.09e-3, 12),
    (179, 4, 1634, 36, 0.937, 4, 0.950, 3.25e-3, 11),
    (179, 4, 1089, 24, 0.937, 4, 0.950, 3.25e-3, 11),
    (47, 4, 912, 48, 0.800, 6, 1.850, 1.05e-2, 9),
]

SMALL = build_spec(1, 3, 25)


@pytest.mark.parametrize("row", OPERATING_POINTS)
def test_gap_mapping(row):
    S, M, F, W, R, I, gap, eps, r = row
    rate = float(terminated_rate(S, r, F, W))
    assert abs(epsilon_to_gap(eps, rate) - gap) < 0.005
    assert round(rate, 3) == R


@pytest.mark.parametrize("row", OPERATING_POINTS)
def test_component_redundancy(row):
    S, M, F, W, R, I, gap, eps, r = row
    assert build_spec(1, M, S).r == r


@given(st.floats(0.1, 3.0), st.floats(0.5, 0.98))
@settings(max_examples=200, deadline=None)
def test_gap_round_trip(gap, R):
    assert abs(epsilon_to_gap(gap_to_epsilon(gap, R), R) - gap) < 1e-6


def test_gap_errors():
    with pytest.raises(ValueError):
        epsilon_to_gap(0.6, 0.9)
    with pytest.raises(ValueError):
        gap_to_epsilon(1.0, 1.2)
    with pytest.raises(ValueError):
        ChannelSpec(gap_db=1.0).resolve()
    assert ChannelSpec(gap_db=1.85, R=0.8).resolve() == pytest.approx(1.0525e-2, rel=1e-3)


def test_terminated_rate():
    assert terminated_rate(10, 4, 3, 1) == Fraction(1, 2)
    assert terminated_rate(47, 9, 912, 48) == Fraction(38 * 864, 47 * 864 + 48 * 9)
    with pytest.raises(ValueError):
        terminated_rate(10, 4, 3, 3)


def test_sample_errors_statistics():
    rng = np.random.default_rng(11)
    eps, n = 0.01, 10**6
    pos = sample_errors(eps, n, rng)
    mean, sd = eps * n, (eps * (1 - eps) * n) ** 0.5
    assert abs(len(pos) - mean) < 3 * sd
    assert np.all(np.diff(pos) > 0) and pos[0] >= 0 and pos[-1] < n
    gaps = np.diff(pos)
    assert stats.kstest(gaps - 1, stats.geom(eps, loc=-1).cdf).pvalue > 1e-3 or _geom_chi2(gaps, eps)
    assert len(sample_errors(0.0, n, rng)) == 0
    assert len(sample_errors(1.0, 10, rng)) == 10


def _geom_chi2(gaps, eps):
    # discrete KS is conservative; fall back to a binned chi-square on small gaps
    k = np.arange(1, 200)
    obs = np.array([(gaps == v).sum() for v in k])
    exp = len(gaps) * eps * (1 - eps) ** (k - 1)
    return stats.chisquare(obs, exp * obs.sum() / exp.sum()).pvalue > 1e-3


def test_zero_channel_zero_errors():
    cfg = SimConfig(W=14, I=4, F=40)
    res, bits = simulate_frame(SMALL, 0.0, cfg, np.random.default_rng(0))
    assert res == 0 and bits == 26 * 25 * 17


def test_counted_bits():
    t_info = build_tables(SMALL, SimConfig(W=14, I=4, F=40))
    t_all = build_tables(SMALL, SimConfig(W=14, I=4, F=40, count="all"))
    assert t_info.counted_bits == 26 * 25 * 17
    assert t_all.counted_bits == t_all.frame_bits == 26 * 625 + 14 * 25 * 8
    with pytest.raises(ValueError):
        SimConfig(W=14, I=4, F=40, count="parity")


def test_locate_index_round_trip():
    t = build_tables(SMALL, SimConfig(W=5, I=2, F=12))
    for pos in range(t.frame_bits):
        assert t.index(*t.locate(pos)) == pos
    assert t.index(11, 0, 0, 0) == -1


@pytest.mark.parametrize("backend", backends())
def test_single_errors_corrected(backend):
    cfg = SimConfig(W=6, I=1, F=16, count="all")
    t = build_tables(SMALL, cfg)
    for pos in range(0, t.frame_bits, 37):
        assert decode_positions(t, [pos], backend)[0] == 0


def test_tables_match_variable_constraints():
    t = build_tables(SMALL, SimConfig(W=5, I=1, F=12))
    for x in range(t.X):
        for i in range(t.Sp):
            cons = variable_constraints(SMALL, 0, 3, i, x)
            for k, (c, n, row, pos) in enumerate(cons):
                assert n - 3 == t.v_delta[x * t.M1 + k]
                assert row == t.v_row[(i * t.X + x) * t.M1 + k]
                assert pos == t.v_pos[(i * t.X + x) * t.M1 + k]


def test_python_cython_decode_agree():
    if len(backends()) < 2:
        pytest.skip("compiled kernels unavailable")
    spec = build_spec(2, 2, 5, dts=[(0, 6, 7), (0, 2, 5)], C=2)
    for count in ("info", "all"):
        t = build_tables(spec, SimConfig(W=8, I=5, F=30, count=count))
        for f in range(30):
            pos = sample_errors(0.03, t.frame_bits, frame_rng(5, 0, f))
            a = decode_positions(t, pos, "python")
            b = decode_positions(t, pos, "cython")
            assert a == b


def test_debug_syndrome_consistency():
    py = kernels.backend("python")
    t = build_tables(SMALL, SimConfig(W=6, I=3, F=20, debug=True))
    for f in range(3):
        pos = sample_errors(0.01, t.frame_bits, frame_rng(2, 0, f))
        py.decode_frame(t, pos)


def test_report_csv_round_trip():
    cfg = SimConfig(W=10, I=3, F=30, min_bits=5 * 10**4, seed=4)
    rep = run_campaign(SMALL, [0.02, ChannelSpec(gap_db=1.0, R=0.6)], cfg)
    text = rep.to_csv()
    back = SimReport.from_csv(text)
    assert back.to_csv() == text
    assert [p.bit_errors for p in back.points] == [p.bit_errors for p in rep.points]


def test_campaign_deterministic_across_workers():
    cfg = SimConfig(W=10, I=3, F=30, min_bits=3 * 10**4, seed=9)
    a = run_campaign(SMALL, [0.03, 0.04], cfg, workers=1).to_csv(include_wall=False)
    b = run_campaign(SMALL, [0.03, 0.04], cfg, workers=2).to_csv(include_wall=False)
    assert a == b


def test_ber_monotone_in_epsilon():
    cfg = SimConfig(W=10, I=4, F=40, min_bits=2 * 10**5, min_errors=200, max_bits=2 * 10**6, seed=1)
    rep = run_campaign(SMALL, [0.03, 0.045, 0.06], cfg)
    bers = [p.ber for p in rep.points]
    assert bers[0] < bers[1] < bers[2]


def test_error_free_point_is_upper_bound():
    cfg = SimConfig(W=10, I=4, F=30, min_bits=10**4)
    p = run_campaign(SMALL, [1e-4], cfg).points[0]
    assert p.bit_errors == 0 and p.is_upper_bound and p.ber == 1.0 / p.bits


def _round2(v):
    d = Decimal(v)
    q = Decimal(1).scaleb(d.adjusted() - 1)
    return d.quantize(q, rounding=ROUND_HALF_UP)


def test_complexity_metrics():
    latency, per_iter, score = complexity_metrics(7, 25, 1, 162, 1, 1)
    assert (latency, score) == (708750, 4050)
    assert _round2(latency) == Decimal("7.1e5") and _round2(score) == Decimal("4.1e3")
    assert per_iter == 162 * 25
    assert complexity_metrics(1, 10, 1, 5, 2, 3)[2] == 2 * 5 * 10 * 9
    assert spec_complexity(SMALL, SimConfig(W=14, I=20, F=42)) == (14 * 625, 14 * 25, 20 * 14 * 25)


def test_throughput():
    if kernels.BACKEND != "cython":
        pytest.skip("throughput target applies to the compiled kernels")
    spec = build_spec(1, 4, 47)
    cfg = SimConfig(W=48, I=6, F=300)
    t = build_tables(spec, cfg)
    frames = [sample_errors(1e-3, t.frame_bits, frame_rng(0, 0, f)) for f in range(4)]
    t0 = time.perf_counter()
    for pos in frames:
        kernels.decode_frame(t, pos)
    rate = 4 * t.frame_bits / (time.perf_counter() - t0)
    assert rate >= 1e8


def _reference_decode(spec, t, errpos):
    """Straightforward decoder on an explicit error array, syndromes recomputed from scratch."""
    L, Sp, X, r = spec.L, spec.Sp, t.X, t.r
    term0 = t.F - t.W
    errs = np.zeros((t.F, spec.C, Sp, X), dtype=np.uint8)
    for pos in errpos:
        errs[t.locate(int(pos))] ^= 1

    def where(block, j):
        l = (-block) % L
        return (block + l) // L, (L - 1 - l) * Sp + j

    for tn in range(t.F):
        ws = max(0, tn - t.W + 1)
        for _ in range(t.I):
            changed = 0
            for s in range(ws, tn + 1):
                for c in range(spec.C):
                    for i in range(Sp):
                        sup = constraint_support(spec, s * L, i, c)
                        hot = []
                        for p, (cc, block, i2, j2) in enumerate(sup):
                            tr, x = where(block, j2)
                            if tr >= 0 and errs[tr, cc, i2, x]:
                                hot.append(p)
                        out = hamming.decode(spec.component, hamming.syndrome_of(spec.component, hot))
                        if out.kind != "correct":
                            continue
                        cc, block, i2, j2 = sup[out.position]
                        tr, x = where(block, j2)
                        if tr < ws or (tr >= term0 and x < X - r):
                            continue
                        errs[tr, cc, i2, x] ^= 1
                        changed += 1
            if changed == 0:
                break
    return int(errs[:term0, :, :, : X - r].sum())


@pytest.mark.parametrize(
    "spec, cfg, eps",
    [
        (build_spec(2, 2, 5, dts=[(0, 6, 7), (0, 2, 5)], C=2), SimConfig(W=6, I=4, F=20), 0.04),
        (build_spec(1, 3, 13), SimConfig(W=8, I=3, F=24), 0.05),
    ],
)
def test_kernel_matches_reference_decoder(spec, cfg, eps):
    t = build_tables(spec, cfg)
    nonzero = 0
    for f in range(12):
        pos = sample_errors(eps, t.frame_bits, frame_rng(21, 0, f))
        got = kernels.decode_frame(t, pos)[0]
        assert got == _reference_decode(spec, t, pos)
        nonzero += got > 0
    assert nonzero > 0
