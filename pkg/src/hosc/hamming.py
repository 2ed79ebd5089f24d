"""Shortened extended Hamming component codes with systematizing permutations.

Column ``j`` of the parent parity-check matrix (length ``2**(r-1)``) is the
``r``-bit integer ``2*tau(j) + 1``: the top ``r - 1`` bits hold ``tau(j)``
MSB-first and the lowest bit is the all-ones parity row.  A code shortened in
its first ``s`` positions keeps parent columns ``s .. 2**(r-1) - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class HammingError(ValueError):
    pass


# (r - 1) -> (a, b, a^-1) for affine systematizing permutations tau(j) = a*j + b.
AFFINE_TABLE = {
    3: (1, 1, 1),
    4: (3, 0, 11),
    5: (3, 0, 11),
    6: (3, 3, 43),
    7: (5, 5, 77),
    8: (9, 11, 57),
    9: (19, 19, 27),
    10: (27, 27, 531),
    11: (53, 53, 541),
    12: (89, 89, 2025),
    13: (163, 170, 4875),
    14: (301, 308, 13989),
    15: (553, 553, 14873),
    16: (1065, 1155, 55321),
}

# i -> (d, s) for the Boolean permutations c_i = b_i + prod_{u<d} (s_u + b_u).
BOOLEAN_TABLE = {
    2: (2, 0),
    3: (2, 0),
    4: (3, 0),
    5: (3, 1),
    6: (3, 2),
    7: (2, 0),
    8: (4, 0),
    9: (4, 1),
    10: (4, 2),
    11: (4, 3),
    12: (4, 4),
    13: (4, 5),
    14: (4, 6),
    15: (3, 0),
}


class Outcome(NamedTuple):
    kind: str  # "no_error", "correct" or "detected"
    position: int = -1


NO_ERROR = Outcome("no_error")
DETECTED = Outcome("detected")


@dataclass(frozen=True)
class ExtHammingSpec:
    """Shortened extended Hamming code.

    ``perm`` is ``"natural"``, ``"affine"`` (uses ``a``, ``b``) or
    ``"boolean"`` (uses ``BOOLEAN_TABLE`` rows ``2 .. r-2``).
    """

    r: int
    shortening: int = 0
    perm: str = "affine"
    a: int = 1
    b: int = 0
    t: int = 1

    def __post_init__(self):
        if self.r < 2:
            raise HammingError("need r >= 2")
        if not 0 <= self.shortening < self.parent_length:
            raise HammingError(f"shortening {self.shortening} out of range")
        if self.perm == "affine" and self.a % 2 == 0:
            raise HammingError("affine multiplier must be odd")
        if self.perm == "boolean" and self.r - 1 > 16:
            raise HammingError("boolean parameters only cover r - 1 <= 16")
        if self.perm not in ("natural", "affine", "boolean"):
            raise HammingError(f"unknown permutation {self.perm!r}")

    @property
    def m(self) -> int:
        return self.r - 1

    @property
    def parent_length(self) -> int:
        return 1 << (self.r - 1)

    @property
    def n(self) -> int:
        return self.parent_length - self.shortening

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def a_inv(self) -> int:
        return pow(self.a, -1, self.parent_length)

    def to_dict(self) -> dict:
        d = {"r": self.r, "shortening": self.shortening, "perm": self.perm}
        if self.perm == "affine":
            d.update(a=self.a, b=self.b)
        return d


def affine_spec(r: int, shortening: int = 0, a: int | None = None, b: int | None = None):
    """Affine spec, taking ``(a, b)`` from the built-in table when omitted."""
    if a is None or b is None:
        if r - 1 not in AFFINE_TABLE:
            raise HammingError(f"no tabulated affine parameters for r - 1 = {r - 1}")
        a, b, _ = AFFINE_TABLE[r - 1]
    return ExtHammingSpec(r=r, shortening=shortening, perm="affine", a=a, b=b)


def _boolean_forward(m: int, j: int) -> int:
    bits = [(j >> u) & 1 for u in range(m)]
    out = j
    for i in range(2, m):
        d, s = BOOLEAN_TABLE[i]
        prod = 1
        for u in range(d):
            prod &= ((s >> u) & 1) ^ bits[u]
        out ^= prod << i
    return out


def _boolean_inverse(m: int, c: int) -> int:
    bits = [(c >> u) & 1 for u in range(m)]
    for i in range(2, m):
        d, s = BOOLEAN_TABLE[i]
        prod = 1
        for u in range(d):
            prod &= ((s >> u) & 1) ^ bits[u]
        bits[i] ^= prod
    return sum(bit << u for u, bit in enumerate(bits))


def _parent_tau(spec: ExtHammingSpec, j: int) -> int:
    if spec.perm == "natural":
        return j
    if spec.perm == "affine":
        return (spec.a * j + spec.b) % spec.parent_length
    return _boolean_forward(spec.m, j)


def _parent_tau_inv(spec: ExtHammingSpec, y: int) -> int:
    if spec.perm == "natural":
        return y
    if spec.perm == "affine":
        return spec.a_inv * (y - spec.b) % spec.parent_length
    return _boolean_inverse(spec.m, y)


def tau(spec: ExtHammingSpec, j: int) -> int:
    """Permutation seen by the shortened code (affine offset becomes ``b + a*s``)."""
    return _parent_tau(spec, (j + spec.shortening) % spec.parent_length)


def tau_inv(spec: ExtHammingSpec, y: int) -> int:
    return (_parent_tau_inv(spec, y) - spec.shortening) % spec.parent_length


def column(spec: ExtHammingSpec, j: int) -> int:
    if not 0 <= j < spec.n:
        raise IndexError(f"column {j} outside [0, {spec.n})")
    return 2 * tau(spec, j) + 1


def column_bits(spec: ExtHammingSpec, j: int) -> list[int]:
    """Column ``j`` top-to-bottom as a list of ``r`` bits."""
    c = column(spec, j)
    return [(c >> (spec.r - 1 - q)) & 1 for q in range(spec.r)]


def syndrome_of(spec: ExtHammingSpec, positions: Iterable[int]) -> int:
    s = 0
    for j in positions:
        s ^= column(spec, j)
    return s


def decode(spec: ExtHammingSpec, syndrome: int) -> Outcome:
    if syndrome == 0:
        return NO_ERROR
    if syndrome & 1 == 0:
        return DETECTED
    pos = tau_inv(spec, syndrome >> 1)
    return Outcome("correct", pos) if pos < spec.n else DETECTED


def column_table(spec: ExtHammingSpec) -> np.ndarray:
    return np.array([column(spec, j) for j in range(spec.n)], dtype=np.int64)


def decode_table(spec: ExtHammingSpec) -> np.ndarray:
    """``tab[s]`` = corrected position, ``-1`` for detected, ``-2`` for zero."""
    tab = np.full(1 << spec.r, -1, dtype=np.int64)
    tab[0] = -2
    for j, c in enumerate(column_table(spec)):
        tab[c] = j
    return tab


# --- GF(2) helpers -------------------------------------------------------


def gf2_rank(vectors: Iterable[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for x in basis:
            v = min(v, v ^ x)
        if v:
            basis.append(v)
    return len(basis)


def gf2_solve_columns(cols: list[int], width: int) -> list[int] | None:
    """For square ``cols`` (ints of ``width`` bits) return, for each unit
    vector ``e_b``, the subset mask of columns summing to it; ``None`` if
    singular."""
    n = len(cols)
    rows = [(cols[q], 1 << q) for q in range(n)]  # (value, combination mask)
    pivots: dict[int, tuple[int, int]] = {}
    for v, mask in rows:
        for bit in sorted(pivots, reverse=True):
            if (v >> bit) & 1:
                pv, pm = pivots[bit]
                v ^= pv
                mask ^= pm
        if v == 0:
            return None
        top = v.bit_length() - 1
        for bit, (pv, pm) in list(pivots.items()):
            if (pv >> top) & 1:
                pivots[bit] = (pv ^ v, pm ^ mask)
        pivots[top] = (v, mask)
    if sorted(pivots) != list(range(width)):
        return None
    return [pivots[b][1] for b in range(width)]


def tail_columns(spec: ExtHammingSpec) -> list[int]:
    return [column(spec, j) for j in range(spec.n - spec.r, spec.n)]


def systematize_check(spec: ExtHammingSpec) -> bool:
    if spec.n < spec.r:
        return False
    return gf2_rank(tail_columns(spec)) == spec.r


def find_affine(r: int) -> tuple[int, int]:
    """Smallest odd ``a``, then smallest ``b``, giving a systematizing permutation."""
    if r - 1 < 3:
        raise HammingError("need r - 1 >= 3")
    N = 1 << (r - 1)
    tail = range(N - r, N)
    for a in range(1, N, 2):
        for b in range(N):
            if gf2_rank(2 * ((a * j + b) % N) + 1 for j in tail) == r:
                return a, b
    raise HammingError(f"no systematizing affine permutation for r = {r}")


class SystematicEncoder:
    """Systematic encoder: info in positions ``[0, n-r)``, parity in ``[n-r, n)``."""

    def __init__(self, spec: ExtHammingSpec):
        solved = gf2_solve_columns(tail_columns(spec), spec.r)
        if solved is None:
            raise HammingError("last r columns are not invertible")
        self.spec = spec
        self._unit = solved
        self._cols = column_table(spec)

    def parity_mask(self, syndrome: int) -> int:
        """Bit ``q`` set means parity position ``n - r + q`` is one."""
        out = 0
        b = 0
        while syndrome:
            if syndrome & 1:
                out ^= self._unit[b]
            syndrome >>= 1
            b += 1
        return out

    def encode_parity(self, info_bits) -> np.ndarray:
        spec = self.spec
        info = np.asarray(info_bits, dtype=np.uint8)
        if info.shape != (spec.k,):
            raise HammingError(f"expected {spec.k} info bits, got {info.shape}")
        s = 0
        for j in np.flatnonzero(info):
            s ^= int(self._cols[j])
        mask = self.parity_mask(s)
        return np.array([(mask >> q) & 1 for q in range(spec.r)], dtype=np.uint8)


def encode_parity(spec: ExtHammingSpec, info_bits) -> np.ndarray:
    return SystematicEncoder(spec).encode_parity(info_bits)


def auto_component(length: int) -> ExtHammingSpec:
    """Affine-permuted code shortened to ``length`` from the smallest parent."""
    m = max(3, (length - 1).bit_length())
    return affine_spec(m + 1, (1 << m) - length)
