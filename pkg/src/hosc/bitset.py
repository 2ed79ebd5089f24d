"""Fixed-width bitsets built from 64-bit limbs (limb 0 holds bits 0..63)."""

from __future__ import annotations

MASK64 = (1 << 64) - 1


class WideBitset:
    __slots__ = ("limbs",)

    def __init__(self, nlimbs: int = 4, limbs=None):
        self.limbs = list(limbs) if limbs is not None else [0] * nlimbs

    @property
    def width(self) -> int:
        return 64 * len(self.limbs)

    @classmethod
    def from_int(cls, value: int, nlimbs: int = 4) -> "WideBitset":
        return cls(nlimbs, [(value >> (64 * q)) & MASK64 for q in range(nlimbs)])

    def to_int(self) -> int:
        out = 0
        for q, w in enumerate(self.limbs):
            out |= w << (64 * q)
        return out

    def copy(self) -> "WideBitset":
        return WideBitset(limbs=self.limbs)

    def __eq__(self, other) -> bool:
        return isinstance(other, WideBitset) and self.limbs == other.limbs

    def __repr__(self) -> str:
        return f"WideBitset({self.to_int():#x})"

    def shl(self, k: int) -> "WideBitset":
        n = len(self.limbs)
        if k >= 64 * n:
            return WideBitset(n)
        q, s = divmod(k, 64)
        out = [0] * n
        for i in range(n - 1, q - 1, -1):
            v = self.limbs[i - q] << s
            if s and i - q - 1 >= 0:
                v |= self.limbs[i - q - 1] >> (64 - s)
            out[i] = v & MASK64
        return WideBitset(limbs=out)

    def shr(self, k: int) -> "WideBitset":
        n = len(self.limbs)
        if k >= 64 * n:
            return WideBitset(n)
        q, s = divmod(k, 64)
        out = [0] * n
        for i in range(n - q):
            v = self.limbs[i + q] >> s
            if s and i + q + 1 < n:
                v |= (self.limbs[i + q + 1] << (64 - s)) & MASK64
            out[i] = v
        return WideBitset(limbs=out)

    def __and__(self, other: "WideBitset") -> "WideBitset":
        return WideBitset(limbs=[a & b for a, b in zip(self.limbs, other.limbs)])

    def __or__(self, other: "WideBitset") -> "WideBitset":
        return WideBitset(limbs=[a | b for a, b in zip(self.limbs, other.limbs)])

    def andnot(self, other: "WideBitset") -> "WideBitset":
        return WideBitset(limbs=[a & ~b & MASK64 for a, b in zip(self.limbs, other.limbs)])

    def is_zero(self) -> bool:
        return not any(self.limbs)

    def test(self, i: int) -> bool:
        return bool((self.limbs[i >> 6] >> (i & 63)) & 1)

    def set(self, i: int) -> None:
        self.limbs[i >> 6] |= 1 << (i & 63)

    def clear(self, i: int) -> None:
        self.limbs[i >> 6] &= ~(1 << (i & 63)) & MASK64

    def highest(self) -> int:
        for q in range(len(self.limbs) - 1, -1, -1):
            if self.limbs[q]:
                return 64 * q + self.limbs[q].bit_length() - 1
        return -1

    def popcount(self) -> int:
        return sum(bin(w).count("1") for w in self.limbs)

    def members(self) -> list[int]:
        v = self.to_int()
        out = []
        while v:
            low = v & -v
            out.append(low.bit_length() - 1)
            v ^= low
        return out
