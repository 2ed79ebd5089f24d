"""Rulers, difference triangle sets and their memory objectives.

A ruler is an ordered tuple of integer marks.  An ``(L, M)``-DTS is a set of
``L`` Golomb rulers of order ``M + 1`` whose distance sets are pairwise
disjoint.  The scope (largest ruler length) and the sum of ruler lengths
measure decoding and encoding memory of the resulting staircase code.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


class InvalidRulerError(ValueError):
    """Raised for rulers with repeated marks."""


class NotGolombError(ValueError):
    """Raised when a ruler repeats a distance."""


class MustNormalizeError(ValueError):
    """Raised when an operation needs normalized rulers."""


class UnsupportedBoundError(ValueError):
    """Raised for degree parameters without a known lower bound."""


class DtsParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Ruler:
    marks: tuple[int, ...]

    def __init__(self, marks: Iterable[int]):
        object.__setattr__(self, "marks", tuple(int(m) for m in marks))

    @property
    def order(self) -> int:
        return len(self.marks)

    @property
    def length(self) -> int:
        return max(self.marks) - min(self.marks)

    @property
    def is_normalized(self) -> bool:
        m = self.marks
        return len(m) > 0 and m[0] == 0 and all(a < b for a, b in zip(m, m[1:]))

    def __iter__(self):
        return iter(self.marks)

    def __len__(self) -> int:
        return len(self.marks)

    def __getitem__(self, k: int) -> int:
        return self.marks[k]


@dataclass(frozen=True)
class DifferenceTriangleSet:
    rulers: tuple[Ruler, ...]

    def __init__(self, rulers: Iterable[Ruler | Sequence[int]]):
        rs = tuple(r if isinstance(r, Ruler) else Ruler(r) for r in rulers)
        if not rs:
            raise ValueError("a DTS needs at least one ruler")
        orders = {r.order for r in rs}
        if len(orders) != 1:
            raise ValueError(f"rulers of mixed order {sorted(orders)}")
        if rs[0].order < 2:
            raise ValueError("rulers need at least two marks")
        object.__setattr__(self, "rulers", rs)

    @property
    def L(self) -> int:
        return len(self.rulers)

    @property
    def M(self) -> int:
        return self.rulers[0].order - 1

    def as_lists(self) -> list[list[int]]:
        return [list(r.marks) for r in self.rulers]

    def normalized(self) -> "DifferenceTriangleSet":
        return DifferenceTriangleSet(normalize(r) for r in self.rulers)

    def sorted_by_length(self) -> "DifferenceTriangleSet":
        """Rulers in descending order of length; ties keep their original order."""
        return DifferenceTriangleSet(sorted(self.rulers, key=lambda r: -r.length))

    def __iter__(self):
        return iter(self.rulers)

    def __len__(self) -> int:
        return len(self.rulers)


def _as_ruler(ruler: Ruler | Sequence[int]) -> Ruler:
    return ruler if isinstance(ruler, Ruler) else Ruler(ruler)


def _as_dts(dts) -> DifferenceTriangleSet:
    return dts if isinstance(dts, DifferenceTriangleSet) else DifferenceTriangleSet(dts)


def normalize(ruler: Ruler | Sequence[int]) -> Ruler:
    """Sort the marks and shift so the least mark is zero."""
    ruler = _as_ruler(ruler)
    marks = sorted(ruler.marks)
    if len(set(marks)) != len(marks):
        raise InvalidRulerError(f"repeated marks in {ruler.marks}")
    return Ruler(m - marks[0] for m in marks)


def distance_set(ruler: Ruler | Sequence[int]) -> frozenset[int]:
    ruler = _as_ruler(ruler)
    diffs = [abs(a - b) for a, b in combinations(ruler.marks, 2)]
    dset = frozenset(diffs)
    if len(dset) != len(diffs) or 0 in dset:
        raise NotGolombError(f"ruler {ruler.marks} repeats a distance")
    return dset


def is_golomb(ruler: Ruler | Sequence[int]) -> bool:
    try:
        distance_set(ruler)
    except NotGolombError:
        return False
    return True


def is_dts(dts) -> bool:
    """True iff every ruler is Golomb and the distance sets are disjoint."""
    dts = _as_dts(dts)
    seen: set[int] = set()
    for r in dts.rulers:
        try:
            d = distance_set(r)
        except NotGolombError:
            return False
        if seen & d:
            return False
        seen |= d
    return True


def scope(dts) -> int:
    return max(r.length for r in _as_dts(dts).rulers)


def sum_of_lengths(dts) -> int:
    return sum(r.length for r in _as_dts(dts).rulers)


def is_perfect(dts) -> bool:
    dts = _as_dts(dts)
    top = dts.L * (dts.M + 1) * dts.M // 2
    if scope(dts) != top or not is_dts(dts):
        return False
    union = set().union(*(distance_set(r) for r in dts.rulers))
    return union == set(range(1, top + 1))


def lower_bounds(L: int, M: int) -> tuple[int, int]:
    """Lower bounds on (scope, sum-of-lengths) of any (L, M)-DTS, for M <= 4."""
    if L < 1:
        raise ValueError("L must be positive")
    if M == 1:
        return L, L * (L + 1) // 2
    if M == 2:
        if L % 4 in (0, 1):
            return 3 * L, 3 * L * (3 * L + 1) // 4
        return 3 * L + 1, (9 * L * L + 3 * L + 2) // 4
    if M == 3:
        return 6 * L, 5 * L * L + L
    if M == 4:
        if L % 2 == 0:
            return 10 * L, (18 * L * L + 3 * L) // 2
        return 10 * L + 1, (18 * L * L + 3 * L + 1) // 2
    raise UnsupportedBoundError(f"no lower bound implemented for M={M}")


@dataclass(frozen=True)
class UniformRuler:
    """The order ``L(M+1)`` ruler built from the DTS rows ``L*X_l + l``.

    ``assignment[k]`` is the ``(l, k_base)`` pair with
    ``marks[k] == L * dts[l][k_base] + l``.
    """

    marks: tuple[int, ...]
    assignment: tuple[tuple[int, int], ...]
    L: int

    def residue_counts(self) -> list[int]:
        counts = [0] * self.L
        for m in self.marks:
            counts[m % self.L] += 1
        return counts

    def to_dts(self) -> DifferenceTriangleSet:
        M1 = len(self.marks) // self.L
        rows = [[0] * M1 for _ in range(self.L)]
        for m, (l, k) in zip(self.marks, self.assignment):
            rows[l][k] = (m - l) // self.L
        return DifferenceTriangleSet(rows)


def uniform_ruler(dts, canonical: bool = False) -> UniformRuler:
    """Interleave the rulers of a normalized DTS into an L-uniform ruler.

    Row ``l`` of the DTS lands in residue class ``l`` mod ``L``.  The caller's
    row order is kept unless ``canonical`` is set, in which case rulers are
    first sorted by descending length.
    """
    dts = _as_dts(dts)
    if canonical:
        dts = dts.sorted_by_length()
    for r in dts.rulers:
        if not r.is_normalized:
            raise MustNormalizeError(f"ruler {r.marks} is not normalized")
    L = dts.L
    entries = sorted(
        (L * d + l, l, k) for l, r in enumerate(dts.rulers) for k, d in enumerate(r.marks)
    )
    return UniformRuler(
        marks=tuple(e[0] for e in entries),
        assignment=tuple((e[1], e[2]) for e in entries),
        L=L,
    )


def parse_dts(text: str) -> DifferenceTriangleSet:
    """Parse the plain-text layout: one ruler per line, ``#`` starts a comment."""
    rulers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            marks = [int(tok) for tok in line.replace(",", " ").split()]
        except ValueError as exc:
            raise DtsParseError(lineno, f"bad mark ({exc})") from None
        if rulers and len(marks) != len(rulers[0][1]):
            raise DtsParseError(lineno, f"expected {len(rulers[0][1])} marks, got {len(marks)}")
        rulers.append((lineno, marks))
    if not rulers:
        raise DtsParseError(0, "no rulers found")
    if len(rulers[0][1]) < 2:
        raise DtsParseError(rulers[0][0], "rulers need at least two marks")
    return DifferenceTriangleSet(m for _, m in rulers)


def format_dts(dts, comment: str | None = None) -> str:
    dts = _as_dts(dts)
    width = max(len(str(m)) for r in dts.rulers for m in r.marks)
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for r in dts.rulers:
        lines.append(" ".join(str(m).rjust(width) for m in r.marks))
    return "\n".join(lines) + "\n"
