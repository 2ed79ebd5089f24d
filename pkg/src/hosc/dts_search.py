"""Stochastic local search for DTSs with small scope or sum of lengths.

Rulers are grown one mark at a time.  Each insertion is a constant number of
wide-bitset operations: every ruler keeps its marks (``nat``) and their
mirror image about its largest mark (``rev``), so the distances from a
candidate mark to all existing marks are one shift of either set.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .bitset import WideBitset
from .rulers import DifferenceTriangleSet, UnsupportedBoundError, is_dts, lower_bounds

__all__ = [
    "WideBitset",
    "SearchState",
    "MarkModel",
    "InsufficientSamplesError",
    "try_insert_mark",
    "backtrack",
    "fit_mark_model",
    "search",
    "pipeline_search",
]

SearchState = kernels.SearchState


class InsufficientSamplesError(ValueError):
    pass


def try_insert_mark(state, ruler: int, mark: int) -> bool:
    """Conditional mark insertion; the state is untouched on rejection."""
    return state.try_insert(ruler, mark)


def backtrack(state, action: str, ruler: int, mark: int | None = None):
    """Apply ``"delete_mark"`` or ``"delete_ruler"`` and return the state."""
    if action == "delete_mark":
        state.delete_mark(ruler, mark)
    elif action == "delete_ruler":
        state.delete_ruler(ruler)
    else:
        raise ValueError(f"unknown action {action!r}")
    return state


@dataclass(frozen=True)
class MarkModel:
    """Gaussian law of the ``i``-th smallest mark of a ruler."""

    means: tuple[float, ...]
    variances: tuple[float, ...]

    @property
    def stds(self) -> tuple[float, ...]:
        return tuple(math.sqrt(v) for v in self.variances)


def fit_mark_model(
    samples: Iterable, scale: float = 1.0, sum_threshold: float | None = None
) -> MarkModel:
    """Per-index mean and (population) variance over the rulers of ``samples``.

    Samples whose sum of lengths is not below ``sum_threshold`` are dropped.
    Means are multiplied by ``scale`` and variances by ``scale**2``.
    """
    dts_list = [s if isinstance(s, DifferenceTriangleSet) else DifferenceTriangleSet(s) for s in samples]
    if sum_threshold is not None:
        dts_list = [d for d in dts_list if sum(r.length for r in d) < sum_threshold]
    if len(dts_list) < 2:
        raise InsufficientSamplesError("need at least two samples after filtering")
    rows = np.array([sorted(r.marks) for d in dts_list for r in d.normalized()], dtype=float)
    mu = rows.mean(axis=0) * scale
    var = rows.var(axis=0) * scale * scale
    return MarkModel(tuple(float(m) for m in mu), tuple(float(v) for v in var))


def _to_dts(rulers) -> DifferenceTriangleSet:
    dts = DifferenceTriangleSet(rulers).sorted_by_length()
    assert is_dts(dts), "search produced an invalid DTS"
    return dts


def _one_run(args):
    L, M, T, seed, budget, means, stds, use_model, A, B, sum_limit = args
    return kernels.run_search(L, M, T, seed, budget, means, stds, use_model, A, B, sum_limit)


def search(
    L: int,
    M: int,
    T: int,
    objective: str = "scope",
    model: MarkModel | None = None,
    budget: int = 10**7,
    seed: int = 0,
    A: int = 200,
    B: int = 20,
    threads: int = 1,
    on_improve=None,
) -> DifferenceTriangleSet | None:
    """Find an (L, M)-DTS of scope at most ``T`` within ``budget`` mark attempts.

    ``objective="scope_then_sum"`` keeps searching for sets with a strictly
    smaller sum of lengths until the budget runs out (or the sum lower bound
    is met) and returns the best.  With ``threads > 1`` independent restarts
    with seeds ``seed, seed+1, ...`` run in parallel and the best result wins.
    """
    if objective not in ("scope", "scope_then_sum"):
        raise ValueError(f"unknown objective {objective!r}")
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(
                pool.map(
                    _search_worker,
                    [(L, M, T, objective, model, budget, seed + q, A, B) for q in range(threads)],
                )
            )
        found = [d for d in results if d is not None]
        if not found:
            return None
        return min(found, key=lambda d: (sum(r.length for r in d), max(r.length for r in d)))
    if model is None:
        means = stds = [0.0] * (M + 1)
        use_model = False
    else:
        means, stds, use_model = list(model.means), list(model.stds), True
    try:
        floor_sum = lower_bounds(L, M)[1]
    except UnsupportedBoundError:
        floor_sum = 0
    best = None
    limit = -1
    left = budget
    run_seed = seed
    while left > 0:
        rulers, used = _one_run((L, M, T, run_seed, left, means, stds, use_model, A, B, limit))
        left -= max(used, 1)
        run_seed += 1_000_003
        if rulers is None:
            break
        best = _to_dts(rulers)
        if on_improve is not None:
            on_improve(best)
        if objective == "scope":
            break
        limit = sum(r.length for r in best)
        if limit <= floor_sum:
            break
    return best


def _search_worker(args):
    L, M, T, objective, model, budget, seed, A, B = args
    return search(L, M, T, objective, model, budget, seed, A, B)


def pipeline_search(
    L: int,
    M: int,
    T: int,
    objective: str = "scope",
    seed: int = 0,
    budget: int = 10**8,
    samples: int = 8,
    relax: float = 0.2,
    sample_budget: int = 10**6,
    min_var: float = 1.0,
    on_improve=None,
) -> DifferenceTriangleSet | None:
    """Default three-step procedure.

    1. Uniform search at a relaxed scope ``T' = ceil((1 + relax) T)`` collects
       ``samples`` DTSs.
    2. A mark model is fitted to those whose sum of lengths is below average,
       then rescaled by ``T / T'``.
    3. The model drives the search at scope ``T`` for half the budget; the
       rest goes to a uniform search.  Model variances are floored at
       ``min_var`` so a tight sample cannot exclude every solution.
    """
    T_relaxed = max(T + 1, math.ceil((1 + relax) * T))
    found = []
    s = seed
    for _ in range(samples):
        d = search(L, M, T_relaxed, "scope", None, sample_budget, s)
        s += 7919
        if d is not None:
            found.append(d)
    model = None
    if len(found) >= 2:
        sums = [sum(r.length for r in d) for d in found]
        mean_sum = sum(sums) / len(sums)
        try:
            model = fit_mark_model(found, T / T_relaxed, sum_threshold=mean_sum)
        except InsufficientSamplesError:
            model = fit_mark_model(found, T / T_relaxed)
        model = MarkModel(model.means, tuple(max(v, min_var) for v in model.variances))
    if model is None:
        return search(L, M, T, objective, None, budget, seed + 1, on_improve=on_improve)
    best = search(L, M, T, objective, model, budget // 2, seed + 1, on_improve=on_improve)
    if best is not None and objective == "scope":
        return best
    other = search(L, M, T, objective, None, budget - budget // 2, seed + 2, on_improve=on_improve)
    cands = [d for d in (best, other) if d is not None]
    if not cands:
        return None
    return min(cands, key=lambda d: sum(r.length for r in d))


def timed_pipeline(L: int, M: int, T: int, seed: int, **kw) -> tuple[DifferenceTriangleSet | None, float]:
    t0 = time.perf_counter()
    d = pipeline_search(L, M, T, seed=seed, **kw)
    return d, time.perf_counter() - t0


def naive_insert(rulers: Sequence[set], ruler: int, mark: int) -> bool:
    """Reference insertion by explicit difference comparison (mutates on success)."""
    if mark in rulers[ruler]:
        return False
    new = [abs(mark - x) for x in rulers[ruler]]
    if len(set(new)) != len(new):
        return False
    used = set()
    for q, r in enumerate(rulers):
        xs = sorted(r)
        used |= {b - a for i, a in enumerate(xs) for b in xs[i + 1 :]}
    if used & set(new):
        return False
    rulers[ruler].add(mark)
    return True
