"""Small finite fields GF(p^m) backed by log/antilog tables.

Elements are integers in ``[0, q)`` whose base-``p`` digits are the
polynomial coefficients (lowest digit = constant term).  The modulus is the
lexicographically smallest primitive monic polynomial of degree ``m``, where
polynomials are ordered by the integer formed from their lower coefficients;
for ``m = 1`` the primitive element is the smallest primitive root mod ``p``.
"""

from __future__ import annotations

from functools import lru_cache


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` and ``p`` prime, else ``None``."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    return (p, m) if rest == 1 else None


class GF:
    def __init__(self, q: int):
        pm = prime_power(q)
        if pm is None:
            raise ValueError(f"{q} is not a prime power")
        self.q = q
        self.p, self.m = pm
        self.poly, self.exp, self.log = _tables(self.p, self.m)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def add(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        if self.m == 1:
            return (x + y) % self.p
        out, place = 0, 1
        while x or y:
            out += ((x % self.p + y % self.p) % self.p) * place
            x //= self.p
            y //= self.p
            place *= self.p
        return out

    def neg(self, x: int) -> int:
        if self.p == 2:
            return x
        out, place = 0, 1
        while x:
            out += ((-(x % self.p)) % self.p) * place
            x //= self.p
            place *= self.p
        return out

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self.exp[(self.log[x] + self.log[y]) % (self.q - 1)]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(-self.log[x]) % (self.q - 1)]

    def is_unit(self, x: int) -> bool:
        return x != 0

    def alpha_pow(self, e: int) -> int:
        return self.exp[e % (self.q - 1)]


def _poly_mulx_mod(v: list[int], poly: list[int], p: int) -> list[int]:
    # v has m coefficients (low first); poly is monic of degree m (m+1 coefs)
    m = len(v)
    top = v[-1]
    shifted = [0] + v[:-1]
    return [(shifted[i] - top * poly[i]) % p for i in range(m)]


def _digits_to_int(v: list[int], p: int) -> int:
    out = 0
    for c in reversed(v):
        out = out * p + c
    return out


@lru_cache(maxsize=None)
def _tables(p: int, m: int):
    q = p**m
    if m == 1:
        g = next(g for g in range(1, p) if _order_mod(g, p) == p - 1) if p > 2 else 1
        exp = [0] * (q - 1)
        x = 1
        for e in range(q - 1):
            exp[e] = x
            x = x * g % p
        poly = (g,)
    else:
        for low in range(1, p**m):
            coefs = [(low // p**i) % p for i in range(m)] + [1]
            exp = _powers_of_x(coefs, p, m)
            if exp is not None:
                poly = tuple(coefs)
                break
        else:  # pragma: no cover - every field has a primitive polynomial
            raise RuntimeError(f"no primitive polynomial for GF({p}^{m})")
    log = [0] * q
    for e, v in enumerate(exp):
        log[v] = e
    return poly, exp, log


def _order_mod(g: int, p: int) -> int:
    x, k = g % p, 1
    while x != 1:
        x = x * g % p
        k += 1
    return k


def _powers_of_x(coefs: list[int], p: int, m: int) -> list[int] | None:
    q = p**m
    v = [1] + [0] * (m - 1)
    out = []
    seen = set()
    for _ in range(q - 1):
        n = _digits_to_int(v, p)
        if n in seen or n == 0:
            return None
        seen.add(n)
        out.append(n)
        v = _poly_mulx_mod(v, coefs, p)
    return out if _digits_to_int(v, p) == 1 else None
