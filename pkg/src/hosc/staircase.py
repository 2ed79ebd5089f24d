"""Higher-order staircase codes: parameters, constraint structure and encoding.

Time advances in rectangles of ``L`` blocks, each ``Sp x Sp``.  Rectangle
``t`` holds blocks ``B_{tL-L+1} .. B_{tL}`` left to right, so rectangle column
``x`` lies in block offset ``l = L - 1 - x // Sp`` (block ``B_{tL-l}``) at
block column ``x % Sp``.  The constraint for row ``i`` of span ``n = tL``
reads row ``i`` of ``Pi_{k}(B_{n - d_{k'}})`` for every mark ``d_{k'}`` of the
uniform ruler, most delayed block first.  Its last ``L*Sp`` positions are the
current rectangle row, whose last ``r`` columns hold the parity.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import hamming
from .nets import NetFamily, make_family, verify_net
from .rulers import DifferenceTriangleSet, UniformRuler, is_dts, uniform_ruler


class SpecError(ValueError):
    """Raised when code parameters violate a construction precondition."""


@dataclass(frozen=True, eq=False)
class CodeSpec:
    L: int
    M: int
    Sp: int
    C: int
    dts: DifferenceTriangleSet
    net: NetFamily
    component: hamming.ExtHammingSpec
    uniform: UniformRuler = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "uniform", uniform_ruler(self.dts))

    @property
    def S(self) -> int:
        return self.L * self.Sp

    @property
    def K(self) -> int:
        """Order of the uniform ruler, ``L (M + 1)``."""
        return self.L * (self.M + 1)

    @property
    def r(self) -> int:
        return self.component.r

    @property
    def rate(self) -> float:
        return 1 - self.r / self.S

    @property
    def width(self) -> int:
        """Columns of a rectangle, ``L * Sp``."""
        return self.L * self.Sp

    @cached_property
    def perm_assign(self) -> tuple[int, ...]:
        return tuple(k for _, k in self.uniform.assignment)

    @cached_property
    def lengths(self) -> tuple[int, ...]:
        return tuple(r.length for r in self.dts.rulers)

    @property
    def max_delay(self) -> int:
        """Largest rectangle delay ``max_l d_M^(l)``."""
        return max(self.lengths)

    def delay(self, l: int, k: int) -> int:
        return self.dts.rulers[l].marks[k]

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "M": self.M,
            "Sp": self.Sp,
            "C": self.C,
            "dts": self.dts.as_lists(),
            "net": {"kind": self.net.kind, "variant": self.net.variant},
            "component": self.component.to_dict(),
        }


def build_spec(
    L: int,
    M: int,
    Sp: int,
    C: int = 1,
    dts=None,
    net_kind: str = "zmod",
    net_variant: str = "standard",
    component: hamming.ExtHammingSpec | None = None,
    validate: bool = True,
) -> CodeSpec:
    """Assemble and check a code.

    With ``component=None`` the component is the affine extended Hamming
    code shortened to length ``(M+1) L Sp`` from the smallest parent.  The
    DTS rulers are ordered by descending length (stable).  ``validate=False``
    skips the DTS and net checks, which is only useful to build
    counterexamples.
    """
    if L < 1 or M < 1 or Sp < 1 or C < 1:
        raise SpecError("L, M, Sp and C must be positive")
    if dts is None:
        from .dts_catalog import catalog_lookup

        dts = catalog_lookup(L, M)
        if dts is None:
            raise SpecError(f"no catalog DTS for (L, M) = ({L}, {M}); pass one explicitly")
    if not isinstance(dts, DifferenceTriangleSet):
        dts = DifferenceTriangleSet(dts)
    dts = dts.normalized().sorted_by_length()
    if dts.L != L or dts.M != M:
        raise SpecError(f"DTS has shape ({dts.L}, {dts.M}), expected ({L}, {M})")
    if validate and not is_dts(dts):
        raise SpecError("rulers do not form a DTS")
    kind = "trivial" if Sp == 1 else net_kind
    try:
        net = make_family(kind, M, Sp, net_variant)
    except ValueError as exc:
        raise SpecError(f"net condition violated: {exc}") from None
    if validate and not verify_net(net, brute_force_limit=0):
        raise SpecError("permutation family is not a net")
    n = (M + 1) * L * Sp
    if component is None:
        try:
            component = hamming.auto_component(n)
        except hamming.HammingError as exc:
            raise SpecError(str(exc)) from None
    if component.n != n:
        raise SpecError(f"component length {component.n} != (M+1) L Sp = {n}")
    if component.r > L * Sp:
        raise SpecError(f"need r <= S: r = {component.r}, S = {L * Sp}")
    if not hamming.systematize_check(component):
        raise SpecError("component permutation is not systematizing")
    return CodeSpec(L=L, M=M, Sp=Sp, C=C, dts=dts, net=net, component=component)


def stall_bound(M: int, t: int) -> int:
    """Smallest weight an uncorrectable error can have: ``(M + 1) t + 1``."""
    return (M + 1) * t + 1


def memory_metrics(spec: CodeSpec) -> tuple[int, int]:
    """(encoding, decoding) memory in bits."""
    area = spec.C * spec.Sp * spec.Sp
    return area * sum(spec.lengths), area * (1 + spec.L * spec.max_delay)


def span_layout(spec: CodeSpec) -> str:
    """Constraint span, most delayed block first, e.g. ``(B^T_{n-1} | B_n)``."""
    parts = []
    for kp in range(spec.K - 1, -1, -1):
        d = spec.uniform.marks[kp]
        k = spec.perm_assign[kp]
        if k == 0 or spec.Sp == 1:
            sym = "B"
        elif k == 1:
            sym = "Bᵀ"
        elif spec.M == 2:
            sym = "B^π"
        else:
            sym = f"B^(π{k})"
        parts.append(f"{sym}_n" if d == 0 else f"{sym}_{{n−{d}}}")
    return "(" + " | ".join(parts) + ")"


def component_position(spec: CodeSpec, kp: int, j: int) -> int:
    return (spec.K - 1 - kp) * spec.Sp + j


def constraint_support(spec: CodeSpec, n: int, row: int, chain: int = 0):
    """Variables ``(chain, block, row, col)`` of a constraint, in component order."""
    if n % spec.L:
        raise ValueError("spans are multiples of L")
    out = []
    Sp = spec.Sp
    for kp in range(spec.K - 1, -1, -1):
        d = spec.uniform.marks[kp]
        k = spec.perm_assign[kp]
        c = chain if kp < spec.L else (chain - 1) % spec.C
        for j in range(Sp):
            i2, j2 = spec.net.apply(k, row, j) if Sp > 1 else (0, 0)
            out.append((c, n - d, i2, j2))
    return out


def variable_constraints(spec: CodeSpec, chain: int, block: int, row: int, col: int):
    """The ``M + 1`` constraints ``(chain, span, row, position)`` containing a variable."""
    L = spec.L
    l = (-block) % L
    t = (block + l) // L
    out = []
    for k in range(spec.M + 1):
        d = spec.delay(l, k)
        kp = spec.uniform.marks.index(L * d + l)
        i2, j2 = spec.net.invert(k, row, col) if spec.Sp > 1 else (0, 0)
        c = chain if k == 0 else (chain + 1) % spec.C
        out.append((c, (t + d) * L, i2, component_position(spec, kp, j2)))
    return out


def check_scattering(spec: CodeSpec, window_spans: int | None = None) -> bool:
    """Any two constraints among ``window_spans`` consecutive spans share <= 1 variable."""
    last = spec.uniform.marks[-1]
    if window_spans is None:
        window_spans = 2 * (last + 1)
    owners: dict[tuple, list[int]] = defaultdict(list)
    cid = 0
    for t in range(window_spans):
        for c in range(spec.C):
            for i in range(spec.Sp):
                for v in constraint_support(spec, t * spec.L, i, c):
                    owners[v].append(cid)
                cid += 1
    shared: dict[tuple[int, int], int] = defaultdict(int)
    for ids in owners.values():
        ids = sorted(set(ids))
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                key = (ids[a], ids[b])
                shared[key] += 1
                if shared[key] > 1:
                    return False
    return True


class EncoderState:
    """Per chain and block offset ``l``, the last ``d_M^(l)`` blocks at that offset."""

    def __init__(self, spec: CodeSpec):
        self.spec = spec
        self.t = 0
        zero = np.zeros((spec.Sp, spec.Sp), dtype=np.uint8)
        self.buffers = [
            [deque([zero] * spec.lengths[l], maxlen=spec.lengths[l]) for l in range(spec.L)]
            for _ in range(spec.C)
        ]
        self._encoder = hamming.SystematicEncoder(spec.component)

    def past_block(self, chain: int, l: int, delay: int) -> np.ndarray:
        """Block at offset ``l`` of rectangle ``t - delay`` (``delay >= 1``)."""
        return self.buffers[chain][l][-delay]


def encode_rectangle(spec: CodeSpec, state: EncoderState, info) -> np.ndarray:
    """Encode one rectangle per chain; returns ``(C, Sp, L*Sp)`` bits.

    ``info`` has shape ``(C, Sp, L*Sp - r)``.
    """
    info = np.asarray(info, dtype=np.uint8)
    X, r, Sp = spec.width, spec.r, spec.Sp
    if info.shape != (spec.C, Sp, X - r):
        raise ValueError(f"info must have shape {(spec.C, Sp, X - r)}, got {info.shape}")
    older = spec.K - spec.L
    rect = np.zeros((spec.C, Sp, X), dtype=np.uint8)
    rect[:, :, : X - r] = info
    # gather the delayed parts: for k' >= L, row i of Pi_k(block) with block from chain c-1
    perms = [spec.net.forward_tables[k] for k in range(spec.M + 1)] if Sp > 1 else None
    for c in range(spec.C):
        src = (c - 1) % spec.C
        past = np.zeros((Sp, older * Sp), dtype=np.uint8)
        for kp in range(spec.L, spec.K):
            l, kb = spec.uniform.assignment[kp]
            k = spec.perm_assign[kp]
            blk = state.past_block(src, l, spec.delay(l, kb))
            permuted = blk.reshape(-1)[perms[k]].reshape(Sp, Sp) if Sp > 1 else blk
            p0 = (spec.K - 1 - kp) * Sp
            past[:, p0 : p0 + Sp] = permuted
        for i in range(Sp):
            word = np.concatenate([past[i], rect[c, i, : X - r]])
            rect[c, i, X - r :] = state._encoder.encode_parity(word)
    for c in range(spec.C):
        for l in range(spec.L):
            if spec.lengths[l]:
                x0 = (spec.L - 1 - l) * Sp
                state.buffers[c][l].append(rect[c, :, x0 : x0 + Sp].copy())
    state.t += 1
    return rect


def rect_blocks(spec: CodeSpec, rect: np.ndarray) -> np.ndarray:
    """Split ``(C, Sp, L*Sp)`` into ``(C, L, Sp, Sp)``, oldest block first."""
    C, Sp = spec.C, spec.Sp
    return rect.reshape(C, Sp, spec.L, Sp).transpose(0, 2, 1, 3).copy()


def block_lookup(spec: CodeSpec, rects: Sequence[np.ndarray]):
    """Return ``get(chain, block, row, col)`` over encoded rectangles ``rects[t]``.

    Blocks before the first rectangle read as zero.
    """

    def get(c, block, i, j):
        l = (-block) % spec.L
        t = (block + l) // spec.L
        if t < 0:
            return 0
        return int(rects[t][c, i, (spec.L - 1 - l) * spec.Sp + j])

    return get
