"""Syndrome-domain Monte-Carlo simulation over the binary symmetric channel.

Only constraint syndromes and error positions are tracked.  A frame is ``F``
rectangles per chain; the last ``W`` carry zero information and transmit
only their ``r`` parity columns.  The sliding window covers the newest ``W``
rectangles.  After each new rectangle arrives, up to ``I`` iterations run;
an iteration visits every in-window span oldest first, then chain, then row,
decoding nonzero syndromes.  Iterations stop early once one makes no
correction (the next would change nothing).  A correction is skipped when it
points outside the window or at a never-transmitted termination bit.
Residual errors are counted as rectangles leave the window and at the end of
the frame, on information bits by default (``count="info"``) or on every
transmitted bit (``count="all"``).
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from . import hamming, kernels
from .staircase import CodeSpec

_STD = NormalDist()


# --- channel ----------------------------------------------------------------


def _q(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _check_rate(R: float) -> None:
    if not 0.0 < R < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {R}")


def shannon_limit_ebn0(R: float) -> float:
    """Linear Eb/N0 at which the hard-decision BPSK channel has capacity ``R``."""
    _check_rate(R)
    lo, hi = 1e-6, 1e3
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if 1.0 - _h2(_q(math.sqrt(2.0 * R * mid))) < R:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def gap_to_epsilon(gap_db: float, R: float) -> float:
    x = shannon_limit_ebn0(R) * 10 ** (gap_db / 10)
    return _q(math.sqrt(2.0 * R * x))


def epsilon_to_gap(eps: float, R: float) -> float:
    _check_rate(R)
    if not 0.0 < eps < 0.5:
        raise ValueError("crossover probability must lie in (0, 1/2)")
    z = -_STD.inv_cdf(eps)
    x = z * z / (2.0 * R)
    return 10 * math.log10(x / shannon_limit_ebn0(R))


@dataclass(frozen=True)
class ChannelSpec:
    """Crossover probability given directly or as a gap (dB) at rate ``R``."""

    epsilon: float | None = None
    gap_db: float | None = None
    R: float | None = None

    def resolve(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        if self.gap_db is None or self.R is None:
            raise ValueError("need epsilon or (gap_db, R)")
        return gap_to_epsilon(self.gap_db, self.R)

    def gap(self, R: float | None = None) -> float | None:
        if self.gap_db is not None:
            return self.gap_db
        R = R if R is not None else self.R
        if R is None or not self.epsilon:
            return None
        return epsilon_to_gap(self.epsilon, R)


def terminated_rate(S: int, r: int, F: int, W: int) -> Fraction:
    """Rate of a frame of ``F`` blocks whose last ``W`` carry only parity."""
    if F <= W:
        raise ValueError("need F > W")
    return Fraction((S - r) * (F - W), S * (F - W) + W * r)


def sample_errors(eps: float, n_bits: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted positions of i.i.d. Bernoulli(eps) errors via geometric gaps."""
    if eps <= 0.0 or n_bits <= 0:
        return np.zeros(0, dtype=np.int64)
    if eps >= 1.0:
        return np.arange(n_bits, dtype=np.int64)
    mean = eps * n_bits
    out = []
    pos = -1
    while True:
        chunk = int(mean + 6 * math.sqrt(mean) + 16)
        gaps = rng.geometric(eps, size=chunk)
        p = pos + np.cumsum(gaps)
        if p[-1] >= n_bits:
            out.append(p[p < n_bits])
            break
        out.append(p)
        pos = int(p[-1])
    return np.concatenate(out).astype(np.int64)


# --- configuration and decoder tables ----------------------------------------


@dataclass(frozen=True)
class SimConfig:
    W: int
    I: int
    F: int
    seed: int = 0
    min_bits: int = 10**6
    min_errors: int = 0
    max_bits: int | None = None
    batch: int = 8
    debug: bool = False
    count: str = "info"

    def __post_init__(self):
        if self.count not in ("info", "all"):
            raise ValueError("count must be 'info' or 'all'")
        if self.I < 1:
            raise ValueError("need I >= 1")
        if not 0 < self.W < self.F:
            raise ValueError("need 0 < W < F")


@dataclass
class SimTables:
    """Flat integer tables consumed by the decoding kernels."""

    C: int
    Sp: int
    X: int
    r: int
    M1: int
    n: int
    F: int
    W: int
    I: int
    RS: int
    maxd: int
    v_row: np.ndarray
    v_pos: np.ndarray
    v_delta: np.ndarray
    col: np.ndarray
    c_row: np.ndarray
    c_x: np.ndarray
    c_delta: np.ndarray
    c_shift: np.ndarray
    dec: np.ndarray
    debug: bool = False
    info_only: bool = True

    @property
    def frame_bits(self) -> int:
        """Transmitted bits per frame."""
        return (self.F - self.W) * self.C * self.Sp * self.X + self.W * self.C * self.Sp * self.r

    @property
    def counted_bits(self) -> int:
        """Bits per frame over which residual errors are counted."""
        if self.info_only:
            return (self.F - self.W) * self.C * self.Sp * (self.X - self.r)
        return self.frame_bits

    def locate(self, pos: int) -> tuple[int, int, int, int]:
        """Transmitted-bit index -> ``(rect, chain, row, column)``."""
        full = self.C * self.Sp * self.X
        term0 = self.F - self.W
        if pos < term0 * full:
            t, q = divmod(pos, full)
            row_id, x = divmod(q, self.X)
        else:
            q = pos - term0 * full
            t, q = divmod(q, self.C * self.Sp * self.r)
            t += term0
            row_id, xo = divmod(q, self.r)
            x = self.X - self.r + xo
        c, i = divmod(row_id, self.Sp)
        return t, c, i, x

    def index(self, t: int, c: int, i: int, x: int) -> int:
        """Inverse of :meth:`locate`; ``-1`` for a bit that is never transmitted."""
        full = self.C * self.Sp * self.X
        term0 = self.F - self.W
        if t < term0:
            return t * full + (c * self.Sp + i) * self.X + x
        if x < self.X - self.r:
            return -1
        return term0 * full + (t - term0) * self.C * self.Sp * self.r + (c * self.Sp + i) * self.r + x - (self.X - self.r)


def build_tables(spec: CodeSpec, cfg: SimConfig) -> SimTables:
    L, Sp, M1, K = spec.L, spec.Sp, spec.M + 1, spec.K
    X = spec.width
    n = spec.component.n
    fwd = spec.net.forward_tables
    inv = spec.net.inverse_tables
    marks = spec.uniform.marks
    v_row = np.empty(Sp * X * M1, dtype=np.int64)
    v_pos = np.empty(Sp * X * M1, dtype=np.int64)
    v_delta = np.empty(X * M1, dtype=np.int64)
    for x in range(X):
        l, j = L - 1 - x // Sp, x % Sp
        for k in range(M1):
            d = spec.delay(l, k)
            kp = marks.index(L * d + l)
            v_delta[x * M1 + k] = d
            for i in range(Sp):
                q = int(inv[k, i * Sp + j])
                i2, j2 = divmod(q, Sp)
                v_row[(i * X + x) * M1 + k] = i2
                v_pos[(i * X + x) * M1 + k] = (K - 1 - kp) * Sp + j2
    c_row = np.empty(Sp * n, dtype=np.int64)
    c_x = np.empty(Sp * n, dtype=np.int64)
    c_delta = np.empty(n, dtype=np.int64)
    c_shift = np.empty(n, dtype=np.int64)
    for p in range(n):
        kp, j2 = K - 1 - p // Sp, p % Sp
        l, kb = spec.uniform.assignment[kp]
        k = spec.perm_assign[kp]
        c_delta[p] = spec.delay(l, kb)
        c_shift[p] = 0 if kp < L else 1
        for i2 in range(Sp):
            q = int(fwd[k, i2 * Sp + j2])
            i, j = divmod(q, Sp)
            c_row[i2 * n + p] = i
            c_x[i2 * n + p] = (L - 1 - l) * Sp + j
    maxd = spec.max_delay
    return SimTables(
        C=spec.C,
        Sp=Sp,
        X=X,
        r=spec.r,
        M1=M1,
        n=n,
        F=cfg.F,
        W=cfg.W,
        I=cfg.I,
        RS=cfg.W + maxd + 1,
        maxd=maxd,
        v_row=v_row,
        v_pos=v_pos,
        v_delta=v_delta,
        col=hamming.column_table(spec.component),
        c_row=c_row,
        c_x=c_x,
        c_delta=c_delta,
        c_shift=c_shift,
        dec=hamming.decode_table(spec.component),
        debug=cfg.debug,
        info_only=cfg.count == "info",
    )


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    """Independent stream for one frame of one sweep point."""
    return np.random.default_rng([seed, point, frame])


def decode_positions(tables: SimTables, errpos, backend: str | None = None) -> tuple[int, int]:
    """Decode one frame with the given error positions; ``(residual, corrections)``."""
    mod = kernels if backend is None else kernels.backend(backend)
    return mod.decode_frame(tables, np.asarray(errpos, dtype=np.int64))


def simulate_frame(spec_or_tables, eps: float, cfg: SimConfig | None = None, rng=None):
    """One terminated frame; returns ``(residual_bit_errors, counted_bits)``.

    With the default ``count="info"`` only information bits are scored;
    ``count="all"`` scores every transmitted bit.
    """
    tables = spec_or_tables
    if isinstance(spec_or_tables, CodeSpec):
        tables = build_tables(spec_or_tables, cfg)
    rng = rng if rng is not None else np.random.default_rng()
    pos = sample_errors(eps, tables.frame_bits, rng)
    residual, _ = kernels.decode_frame(tables, pos)
    return residual, tables.counted_bits


# --- campaigns ----------------------------------------------------------------


@dataclass
class PointResult:
    gap_db: float | None
    epsilon: float
    bits: int
    bit_errors: int
    frames: int
    seed: int
    wall_s: float

    @property
    def ber(self) -> float:
        """Measured BER; for error-free points the upper bound ``1 / bits``."""
        if self.bits == 0:
            return float("nan")
        return self.bit_errors / self.bits if self.bit_errors else 1.0 / self.bits

    @property
    def is_upper_bound(self) -> bool:
        return self.bit_errors == 0


CSV_FIELDS = ("gap_db", "epsilon", "bits", "bit_errors", "ber", "frames", "seed", "wall_s")


@dataclass
class SimReport:
    points: list[PointResult] = field(default_factory=list)
    spec: dict | None = None
    config: dict | None = None
    backend: str = kernels.BACKEND

    def to_csv(self, include_wall: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for p in self.points:
            w.writerow(
                [
                    "" if p.gap_db is None else f"{p.gap_db:.4f}",
                    f"{p.epsilon:.6e}",
                    p.bits,
                    p.bit_errors,
                    f"{p.ber:.6e}",
                    p.frames,
                    p.seed,
                    f"{p.wall_s:.3f}" if include_wall else "",
                ]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SimReport":
        rows = list(csv.DictReader(io.StringIO(text)))
        pts = []
        for row in rows:
            pts.append(
                PointResult(
                    gap_db=float(row["gap_db"]) if row["gap_db"] else None,
                    epsilon=float(row["epsilon"]),
                    bits=int(row["bits"]),
                    bit_errors=int(row["bit_errors"]),
                    frames=int(row["frames"]),
                    seed=int(row["seed"]),
                    wall_s=float(row["wall_s"]) if row["wall_s"] else 0.0,
                )
            )
        return cls(points=pts)


_WORKER_TABLES: SimTables | None = None


def _init_worker(tables: SimTables) -> None:
    global _WORKER_TABLES
    _WORKER_TABLES = tables


def _run_frame(job) -> tuple[int, int]:
    eps, seed, point, frame = job
    return simulate_frame(_WORKER_TABLES, eps, rng=frame_rng(seed, point, frame))


def default_workers() -> int:
    return max(1, int(os.environ.get("HOSC_THREADS", "1")))


def run_campaign(
    spec: CodeSpec,
    channels: Sequence[ChannelSpec | float],
    cfg: SimConfig,
    workers: int | None = None,
    progress=None,
) -> SimReport:
    """Simulate every channel point until its stopping rule is met.

    Frames run in fixed batches of ``cfg.batch``; the stopping rule (at least
    ``min_bits`` bits and ``min_errors`` errors, or ``max_bits`` bits) is
    checked between batches, so results do not depend on ``workers``.
    """
    workers = workers or default_workers()
    tables = build_tables(spec, cfg)
    R = float(terminated_rate(spec.S, spec.r, cfg.F, cfg.W))
    report = SimReport(spec=spec.to_dict(), config=asdict(cfg))
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(tables,)) if workers > 1 else None
    if pool is None:
        _init_worker(tables)
    try:
        for point, ch in enumerate(channels):
            ch = ch if isinstance(ch, ChannelSpec) else ChannelSpec(epsilon=float(ch))
            eps = ch.resolve()
            t0 = time.perf_counter()
            bits = errors = frames = 0
            while True:
                jobs = [(eps, cfg.seed, point, frames + q) for q in range(cfg.batch)]
                results = pool.map(_run_frame, jobs) if pool else map(_run_frame, jobs)
                for res, nb in results:
                    errors += res
                    bits += nb
                frames += cfg.batch
                if progress is not None:
                    progress(point, frames, bits, errors)
                if cfg.max_bits is not None and bits >= cfg.max_bits:
                    break
                if bits >= cfg.min_bits and errors >= cfg.min_errors:
                    break
            gap = ch.gap_db if ch.gap_db is not None else (ch.gap(R) if R else None)
            report.points.append(
                PointResult(gap, eps, bits, errors, frames, cfg.seed, time.perf_counter() - t0)
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return report


def complexity_metrics(L: int, Sp: int, C: int, W: int, I: int, t: int = 1) -> tuple[int, int, int]:
    """``(latency_bits, decodings_per_iteration, score)``."""
    return W * C * Sp * Sp * L, W * C * Sp, I * W * C * Sp * t * t


def spec_complexity(spec: CodeSpec, cfg: SimConfig) -> tuple[int, int, int]:
    return complexity_metrics(spec.L, spec.Sp, spec.C, cfg.W, cfg.I, spec.component.t)
