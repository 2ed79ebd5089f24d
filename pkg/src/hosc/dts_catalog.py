"""Known DTSs: embedded tables, Skolem/O'Keefe families and the combining construction."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .rulers import (
    DifferenceTriangleSet,
    Ruler,
    is_dts,
    is_perfect,
    normalize,
    sum_of_lengths,
)

CATALOG_SHA256 = "b58cebcdba4aa841bb790b68c372dc3af633fe74c9ee210809895c1fce16f442"

# The embedded affine group of degree 4: column k is rho_k, i.e. rho_k(i) = _F4_ARRAY[i][k].
_F4_ARRAY = (
    (0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3),
    (1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0),
    (2, 3, 0, 1, 3, 2, 1, 0, 1, 0, 3, 2),
    (3, 2, 1, 0, 1, 0, 3, 2, 2, 3, 0, 1),
)


class CatalogIntegrityError(RuntimeError):
    pass


class UnsupportedDegreeError(ValueError):
    pass


class NotPerfectError(ValueError):
    pass


def _catalog_text() -> str:
    text = resources.files("hosc").joinpath("data/catalog.txt").read_text()
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != CATALOG_SHA256:
        raise CatalogIntegrityError(f"catalog checksum mismatch: {digest}")
    return text


@lru_cache(maxsize=None)
def embedded_tables() -> dict[tuple[int, int], tuple[DifferenceTriangleSet, ...]]:
    """All embedded tables keyed by ``(L, M)``; ``(4, 4)`` has two Pareto entries."""
    out: dict[tuple[int, int], list] = {}
    key, rows = None, []

    def flush():
        if key is not None:
            out.setdefault(key, []).append(DifferenceTriangleSet(rows))

    for line in _catalog_text().splitlines():
        if line.startswith("=="):
            flush()
            L, M = map(int, line[2:].split())
            key, rows = (L, M), []
        elif line.strip():
            rows.append([int(x) for x in line.split()])
    flush()
    for (L, M), lst in out.items():
        for d in lst:
            if d.L != L or d.M != M:
                raise CatalogIntegrityError(f"entry ({L},{M}) has shape ({d.L},{d.M})")
    return {k: tuple(v) for k, v in out.items()}


def _family(L: int) -> list[tuple[int, int, int]]:
    m, rem = divmod(L, 4)
    R: list[tuple[int, int, int]] = []
    if rem == 0:
        R += [(0, 4 * m - 1, 10 * m), (0, 2 * m - 1, 8 * m - 1), (0, 1, 5 * m + 1)]
        R += [(0, 4 * m - 2 * i, 12 * m - i) for i in range(0, 2 * m)]
        R += [(0, 4 * m - 1 - 2 * i, 8 * m - 1 - i) for i in range(1, m)]
        R += [(0, 2 * m - 3 - 2 * i, 7 * m - 1 - i) for i in range(0, m - 2)]
    elif rem == 1:
        R += [(0, 4 * m + 1, 10 * m + 3), (0, 2 * m - 1, 8 * m + 2), (0, 1, 5 * m + 3)]
        R += [(0, 4 * m - 2 * i, 12 * m + 3 - i) for i in range(0, 2 * m)]
        R += [(0, 4 * m + 1 - 2 * i, 8 * m + 2 - i) for i in range(1, m + 1)]
        R += [(0, 2 * m - 1 - 2 * i, 7 * m + 2 - i) for i in range(1, m - 1)]
    elif rem == 2:
        R += [(0, 4 * m + 1, 10 * m + 4), (0, 2 * m + 1, 10 * m + 5)]
        R += [(0, 4 * m + 2, 12 * m + 7), (0, 1, 11 * m + 6)]
        R += [(0, 4 * m + 2 - 2 * i, 8 * m + 4 - i) for i in range(1, 2 * m + 1)]
        R += [(0, 4 * m + 1 - 2 * i, 12 * m + 6 - i) for i in range(1, m)]
        R += [(0, 2 * m + 1 - 2 * i, 11 * m + 5 - i) for i in range(1, m)]
    else:
        R += [(0, 2 * m + 3, 7 * m + 6), (0, 1, 5 * m + 5), (0, 2 * m + 1, 8 * m + 6)]
        R += [(0, 4 * m + 2, 10 * m + 8), (0, 4 * m + 3, 12 * m + 10)]
        R += [(0, 4 * m + 2 - 2 * i, 12 * m + 9 - i) for i in range(1, 2 * m + 1)]
        R += [(0, 4 * m + 3 - 2 * i, 8 * m + 6 - i) for i in range(1, m)]
        R += [(0, 2 * m + 1 - 2 * i, 7 * m + 6 - i) for i in range(1, m)]
    return R


def skolem_okeefe(L: int) -> DifferenceTriangleSet:
    """Optimal (L, 2)-DTS: embedded table for ``L <= 7``, parametric families beyond."""
    if L < 1:
        raise ValueError("L must be positive")
    if L <= 7:
        return embedded_tables()[(L, 2)][0]
    rulers = [normalize(r) for r in _family(L)]
    return DifferenceTriangleSet(rulers).sorted_by_length()


def trivial_m1(L: int) -> DifferenceTriangleSet:
    """``{(0, L), (0, L-1), ..., (0, 1)}``, optimal for both objectives."""
    return DifferenceTriangleSet([(0, L - i) for i in range(L)])


def catalog_lookup(L: int, M: int, pareto: str = "scope") -> DifferenceTriangleSet | None:
    """Best known (L, M)-DTS, or ``None``.

    For ``(4, 4)`` two tables are embedded; ``pareto="scope"`` returns the
    smaller scope (41, sum 153) and ``pareto="sum"`` the smaller sum (42, 150).
    """
    if L < 1:
        return None
    if M == 1:
        return trivial_m1(L)
    if M == 2:
        return skolem_okeefe(L)
    entries = embedded_tables().get((L, M))
    if not entries:
        return None
    if len(entries) == 1:
        return entries[0]
    if pareto == "scope":
        return min(entries, key=lambda d: (max(r.length for r in d), sum_of_lengths(d)))
    if pareto == "sum":
        return min(entries, key=lambda d: (sum_of_lengths(d), max(r.length for r in d)))
    raise ValueError(f"unknown pareto choice {pareto!r}")


def catalog_entries() -> list[tuple[int, int, DifferenceTriangleSet]]:
    return [(L, M, d) for (L, M), ds in sorted(embedded_tables().items()) for d in ds]


@dataclass(frozen=True)
class Sharply2TransitiveGroup:
    degree: int
    perms: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.perms)


def affine_group(degree: int) -> Sharply2TransitiveGroup:
    """Affine maps ``x -> a*x + b`` on ``[degree]``; degree 4 uses the embedded array."""
    if degree == 4:
        perms = tuple(tuple(_F4_ARRAY[i][k] for i in range(4)) for k in range(12))
    elif degree in (2, 3, 5, 7, 11, 13):
        p = degree
        perms = tuple(
            tuple((a * x + b) % p for x in range(p)) for a in range(1, p) for b in range(p)
        )
    else:
        raise UnsupportedDegreeError(f"no affine group implemented for degree {degree}")
    return Sharply2TransitiveGroup(degree, perms)


def is_sharply_2_transitive(group: Sharply2TransitiveGroup) -> bool:
    pairs = [(w, x) for w in range(group.degree) for x in range(group.degree) if w != x]
    for w, x in pairs:
        for y, z in pairs:
            hits = sum(1 for g in group.perms if g[w] == y and g[x] == z)
            if hits != 1:
                return False
    return True


def combine(X, Y) -> DifferenceTriangleSet:
    """Combine perfect (L1, M)- and (L2, M)-DTSs into a perfect (L1*L2*M*(M+1)+L1+L2, M)-DTS.

    Output order: ``Y``, the scaled ``X``, then the mixed rulers in ``(i, j, k)``
    order; every ruler is normalized on its own.
    """
    X = X if isinstance(X, DifferenceTriangleSet) else DifferenceTriangleSet(X)
    Y = Y if isinstance(Y, DifferenceTriangleSet) else DifferenceTriangleSet(Y)
    if X.M != Y.M:
        raise ValueError("inputs must share M")
    if not (is_perfect(X) and is_perfect(Y)):
        raise NotPerfectError("combine needs perfect inputs")
    M = X.M
    group = affine_group(M + 1)
    scale = Y.L * M * (M + 1) + 1
    out: list[Ruler] = list(Y.rulers)
    out += [Ruler(scale * m for m in x) for x in X.rulers]
    for x, y, rho in itertools.product(X.rulers, Y.rulers, group.perms):
        out.append(Ruler(scale * x[u] + y[rho[u]] for u in range(M + 1)))
    result = DifferenceTriangleSet(normalize(r) for r in out)
    assert is_dts(result)
    return result


def predicted_combined_sum(L2: int, M: int, S1: int, S2: int) -> int:
    return (L2 * M * (M + 1) + 1) ** 2 * S1 + S2


def verify_catalog() -> list[str]:
    """Re-check every embedded entry; returns a list of problems (empty if fine)."""
    problems = []
    for L, M, d in catalog_entries():
        if not is_dts(d):
            problems.append(f"({L},{M}) is not a DTS")
    return problems
