"""(M+1, S)-nets realised as families of linear maps on index pairs.

Each permutation of ``[S] x [S]`` is ``(i, j) -> (a*i + c*j, b*i + d*j)`` for
an invertible 2x2 matrix over a ring of size ``S``.  A family forms a net iff
``c*d' - d*c'`` is a unit for every pair of distinct matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .galois import GF, prime_power


class NetConditionError(ValueError):
    """Raised when the requested family cannot form a net."""


def lpf(S: int) -> int:
    """Least prime factor of ``S``."""
    if S < 2:
        raise ValueError("lpf needs S >= 2")
    d = 2
    while d * d <= S:
        if S % d == 0:
            return d
        d += 1
    return S


class Zmod:
    kind = "zmod"

    def __init__(self, S: int):
        self.S = S

    def add(self, x, y):
        return (x + y) % self.S

    def sub(self, x, y):
        return (x - y) % self.S

    def neg(self, x):
        return (-x) % self.S

    def mul(self, x, y):
        return (x * y) % self.S

    def is_unit(self, x):
        return gcd(x % self.S, self.S) == 1

    def inv(self, x):
        return pow(x % self.S, -1, self.S) if self.S > 1 else 0

    def to_elem(self, idx):
        return idx

    def to_index(self, x):
        return x


class FieldRing:
    """GF(q) with index ``0 -> 0`` and index ``u >= 1 -> alpha**(u-1)``."""

    kind = "field"

    def __init__(self, q: int):
        self.S = q
        self.gf = GF(q)
        self.add = self.gf.add
        self.sub = self.gf.sub
        self.neg = self.gf.neg
        self.mul = self.gf.mul
        self.inv = self.gf.inv
        self.is_unit = self.gf.is_unit

    def to_elem(self, idx):
        return 0 if idx == 0 else self.gf.exp[idx - 1]

    def to_index(self, x):
        return 0 if x == 0 else self.gf.log[x] + 1


@dataclass(frozen=True)
class NetFamily:
    """``M + 1`` linear permutations; matrix ``k`` is ``(a, b, c, d)`` in ring elements."""

    kind: str
    S: int
    variant: str
    matrices: tuple[tuple[int, int, int, int], ...]
    ring: object = field(repr=False, compare=False)

    @property
    def M(self) -> int:
        return len(self.matrices) - 1

    def apply(self, k: int, i: int, j: int) -> tuple[int, int]:
        R = self.ring
        a, b, c, d = self.matrices[k]
        x, y = R.to_elem(i), R.to_elem(j)
        return (
            R.to_index(R.add(R.mul(a, x), R.mul(c, y))),
            R.to_index(R.add(R.mul(b, x), R.mul(d, y))),
        )

    def invert(self, k: int, i: int, j: int) -> tuple[int, int]:
        R = self.ring
        a, b, c, d = self.matrices[k]
        det_inv = R.inv(R.sub(R.mul(a, d), R.mul(b, c)))
        x, y = R.to_elem(i), R.to_elem(j)
        # (x, y) * adj(A) / det with adj = [[d, -b], [-c, a]]
        u = R.add(R.mul(d, x), R.mul(R.neg(c), y))
        v = R.add(R.mul(R.neg(b), x), R.mul(a, y))
        return R.to_index(R.mul(det_inv, u)), R.to_index(R.mul(det_inv, v))

    @cached_property
    def forward_tables(self) -> np.ndarray:
        """``tab[k, i*S + j] = i2*S + j2`` where ``(i2, j2) = pi_k(i, j)``."""
        S = self.S
        tab = np.empty((self.M + 1, S * S), dtype=np.int64)
        for k in range(self.M + 1):
            for i in range(S):
                for j in range(S):
                    i2, j2 = self.apply(k, i, j)
                    tab[k, i * S + j] = i2 * S + j2
        return tab

    @cached_property
    def inverse_tables(self) -> np.ndarray:
        fwd = self.forward_tables
        inv = np.empty_like(fwd)
        for k in range(fwd.shape[0]):
            inv[k, fwd[k]] = np.arange(fwd.shape[1])
        return inv

    def permute_block(self, k: int, block: np.ndarray) -> np.ndarray:
        """``Pi_k(B)`` with ``Pi_k(B)[i, j] = B[pi_k(i, j)]``."""
        return block.reshape(-1)[self.forward_tables[k]].reshape(self.S, self.S)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "S": self.S, "M": self.M, "variant": self.variant}


def _family(ring, kind, variant, mats) -> NetFamily:
    return NetFamily(kind=kind, S=ring.S, variant=variant, matrices=tuple(mats), ring=ring)


def zmod_family(M: int, S: int, variant: str = "standard") -> NetFamily:
    """Identity plus ``M`` maps over Z_S; needs ``M <= lpf(S)``.

    ``standard``: ``pi_k(i, j) = (j, i + (k-1) j)``.
    ``involution``: ``pi_k(i, j) = (-(k-1) i + j, (1-(k-1)^2) i + (k-1) j)``.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    if S == 1:
        return trivial_family(M)
    if M > lpf(S):
        raise NetConditionError(f"M={M} exceeds lpf({S})={lpf(S)}")
    R = Zmod(S)
    mats = [(1, 0, 0, 1)]
    for k in range(1, M + 1):
        z = (k - 1) % S
        if variant == "standard":
            mats.append((0, 1, 1, z))
        elif variant == "involution":
            mats.append(((-z) % S, (1 - z * z) % S, 1, z))
        else:
            raise ValueError(f"unknown variant {variant!r}")
    return _family(R, "zmod", variant, mats)


def fq_family(M: int, q: int) -> NetFamily:
    """Identity plus ``(0 1; 1 z)`` for ``z`` in ``0, 1, alpha, ..., alpha^(M-2)``."""
    if prime_power(q) is None:
        raise ValueError(f"{q} is not a prime power")
    if M > q:
        raise NetConditionError(f"M={M} exceeds field order {q}")
    R = FieldRing(q)
    mats = [(1, 0, 0, 1)]
    for k in range(1, M + 1):
        z = 0 if k == 1 else R.gf.alpha_pow(k - 2)
        mats.append((0, 1, 1, z))
    return _family(R, "field", "standard", mats)


def trivial_family(M: int) -> NetFamily:
    """``M + 1`` copies of the identity on the single point ``(0, 0)``."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    return _family(Zmod(1), "trivial", "trivial", [(1, 0, 0, 1)] * (M + 1))


def make_family(kind: str, M: int, S: int, variant: str = "standard") -> NetFamily:
    if kind == "trivial" or S == 1:
        if S != 1:
            raise NetConditionError("the trivial family needs S = 1")
        return trivial_family(M)
    if kind == "zmod":
        return zmod_family(M, S, variant)
    if kind == "field":
        return fq_family(M, S)
    raise ValueError(f"unknown net kind {kind!r}")


def determinant_condition(family: NetFamily) -> bool:
    R = family.ring
    for a, b, c, d in family.matrices:
        if not R.is_unit(R.sub(R.mul(a, d), R.mul(b, c))):
            return False
    mats = family.matrices
    for x in range(len(mats)):
        for y in range(x + 1, len(mats)):
            c1, d1 = mats[x][2], mats[x][3]
            c2, d2 = mats[y][2], mats[y][3]
            if not R.is_unit(R.sub(R.mul(c1, d2), R.mul(d1, c2))):
                return False
    return True


def brute_force_net(family: NetFamily) -> bool:
    """Lines of distinct partitions meet in exactly one point (S^2 points)."""
    S = family.S
    inv = family.inverse_tables
    if any(len(np.unique(row)) != S * S for row in family.forward_tables):
        return False
    line_of = inv // S  # line_of[k, point] = row i' of Pi_k containing the point
    for x in range(inv.shape[0]):
        for y in range(x + 1, inv.shape[0]):
            pairs = line_of[x] * S + line_of[y]
            if len(np.unique(pairs)) != S * S:
                return False
    return True


def verify_net(family: NetFamily, brute_force_limit: int = 64) -> bool:
    ok = determinant_condition(family)
    if family.S <= brute_force_limit:
        bf = brute_force_net(family)
        if bf != ok:
            raise AssertionError("determinant criterion disagrees with brute force")
    return ok
