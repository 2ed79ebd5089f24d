"""Pure-Python kernels; semantics match ``_ckernels`` exactly."""

from __future__ import annotations

import math

import numpy as np

from .bitset import MASK64, WideBitset

BACKEND = "python"


# --- xoshiro256** seeded through splitmix64 --------------------------------


class Xoshiro:
    __slots__ = ("s",)

    def __init__(self, seed: int):
        x = seed & MASK64
        s = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & MASK64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
            s.append(z ^ (z >> 31))
        self.s = s

    def next(self) -> int:
        s = self.s
        x = (s[1] * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = ((s[3] << 45) | (s[3] >> 19)) & MASK64
        return result

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` by the multiply-shift map (``n < 2**32``)."""
        return ((self.next() >> 32) * n) >> 32

    def uniform(self) -> float:
        return (self.next() >> 11) * (1.0 / 9007199254740992.0)

    def gauss(self) -> float:
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


# --- conditional mark insertion over wide bitsets ------------------------------------------


class SearchState:
    """Mirrored ruler bitsets plus the shared set of used distances."""

    def __init__(self, L: int, nlimbs: int = 4):
        self.L = L
        self.nlimbs = nlimbs
        self.N = 64 * nlimbs
        self.nat = [WideBitset.from_int(1, nlimbs) for _ in range(L)]
        self.rev = [WideBitset.from_int(1, nlimbs) for _ in range(L)]
        self.largest = [0] * L
        self.count = [1] * L
        self.used = WideBitset(nlimbs)

    def _distances(self, l: int, mark: int):
        nat, rev, big = self.nat[l], self.rev[l], self.largest[l]
        if mark > big:
            left = rev.shl(mark - big)
            right = WideBitset(self.nlimbs)
        else:
            left = rev.shr(big - mark)
            right = nat.shr(mark)
        return left, right

    def try_insert(self, l: int, mark: int) -> bool:
        if not 0 <= mark < self.N:
            raise ValueError(f"mark {mark} outside [0, {self.N})")
        left, right = self._distances(l, mark)
        if not (left & right).is_zero():
            return False
        dist = left | right
        if not (self.used & dist).is_zero():
            return False
        self.nat[l].set(mark)
        if mark > self.largest[l]:
            left.set(0)
            self.rev[l] = left
            self.largest[l] = mark
        else:
            self.rev[l].set(self.largest[l] - mark)
        self.used = self.used | dist
        self.count[l] += 1
        return True

    def delete_mark(self, l: int, mark: int) -> None:
        if mark == 0:
            raise ValueError("mark 0 cannot be deleted")
        if not self.nat[l].test(mark):
            raise ValueError(f"mark {mark} not in ruler {l}")
        big = self.largest[l]
        self.nat[l].clear(mark)
        if mark == big:
            new_big = self.nat[l].highest()
            rev = self.rev[l].copy()
            rev.clear(0)
            self.rev[l] = rev.shr(big - new_big)
            self.largest[l] = new_big
        else:
            self.rev[l].clear(big - mark)
        left, right = self._distances(l, mark)
        dist = left | right
        dist.clear(0)
        self.used = self.used.andnot(dist)
        self.count[l] -= 1

    def delete_ruler(self, l: int) -> None:
        for m in sorted(self.nat[l].members(), reverse=True):
            if m:
                self.delete_mark(l, m)

    def marks(self, l: int) -> list[int]:
        return self.nat[l].members()

    def nat_int(self, l: int) -> int:
        return self.nat[l].to_int()

    def rev_int(self, l: int) -> int:
        return self.rev[l].to_int()

    def used_int(self) -> int:
        return self.used.to_int()

    def largest_mark(self, l: int) -> int:
        return self.largest[l]

    def marks_count(self, l: int) -> int:
        return self.count[l]


def _sample_mark(rng: Xoshiro, T: int, idx: int, means, stds, use_model: bool) -> int:
    if use_model:
        mu, sd = means[idx], stds[idx]
        for _ in range(64):
            v = int(math.floor(mu + sd * rng.gauss() + 0.5))
            if 0 < v <= T:
                return v
    return 1 + rng.below(T)


def run_search(
    L: int,
    M: int,
    T: int,
    seed: int,
    budget: int,
    means,
    stds,
    use_model: bool,
    A: int = 200,
    B: int = 20,
    sum_limit: int = -1,
    nlimbs: int = 4,
):
    """Stochastic local search; returns ``(rulers or None, attempts)``.

    The working ruler is the least filled one (lowest index on ties).  After
    ``A`` consecutive rejections a random nonzero mark of it is deleted;
    after ``B`` deletions with no new record of placed marks, a random other
    partially built ruler is cleared.  With ``sum_limit >= 0`` a completed
    set whose sum of lengths is not below it has its longest ruler cleared.
    """
    if T >= 64 * nlimbs:
        raise ValueError("scope bound exceeds bitset width")
    rng = Xoshiro(seed)
    st = SearchState(L, nlimbs)
    target = L * (M + 1)
    total = L
    best_total = total
    fails = 0
    deletions = 0
    attempts = 0
    while attempts < budget:
        work = min(range(L), key=lambda q: st.count[q])
        if st.count[work] == M + 1:
            s = sum(st.largest)
            if sum_limit < 0 or s < sum_limit:
                return [st.marks(l) for l in range(L)], attempts
            worst = max(range(L), key=lambda q: st.largest[q])
            total -= st.count[worst] - 1
            st.delete_ruler(worst)
            best_total = total
            continue
        mark = _sample_mark(rng, T, st.count[work], means, stds, use_model)
        attempts += 1
        if st.try_insert(work, mark):
            fails = 0
            total += 1
            if total > best_total:
                best_total = total
                deletions = 0
            continue
        fails += 1
        if fails < A:
            continue
        fails = 0
        if st.count[work] > 1:
            ms = st.marks(work)[1:]
            st.delete_mark(work, ms[rng.below(len(ms))])
            total -= 1
        deletions += 1
        if deletions >= B:
            deletions = 0
            others = [q for q in range(L) if q != work and st.count[q] > 1]
            victim = others[rng.below(len(others))] if others else work
            total -= st.count[victim] - 1
            st.delete_ruler(victim)
            best_total = total
    return None, attempts


# --- syndrome-domain sliding-window decoder ---------------------------------


def decode_frame(t, errpos) -> tuple[int, int]:
    """Decode one terminated frame given sorted transmitted-bit error indices.

    ``t`` is a :class:`hosc.simulator.SimTables`.  Returns
    ``(residual_errors, corrections)``.
    """
    residual, corrections, _ = decode_frame_detail(t, errpos)
    return residual, corrections


def decode_frame_detail(t, errpos):
    """Like :func:`decode_frame` but also returns the final ``(F, C, Sp, X)`` error array.

    Residual errors are counted on information bits when ``t.info_only`` is
    set, otherwise on every transmitted bit.
    """
    C, Sp, X, r, M1 = t.C, t.Sp, t.X, t.r, t.M1
    F, W, I = t.F, t.W, t.I
    n = t.n
    RS = t.RS
    v_row, v_pos, v_delta, col = t.v_row, t.v_pos, t.v_delta, t.col
    c_row, c_x, c_delta, c_shift, dec = t.c_row, t.c_x, t.c_delta, t.c_shift, t.dec
    full = C * Sp * X
    term0 = F - W
    errs = np.zeros((F, C, Sp, X), dtype=np.uint8)
    syn = np.zeros((RS, C, Sp), dtype=np.int64)
    nz = [0] * RS

    def xor_syn(u, c, i, v):
        slot = u % RS
        old = syn[slot, c, i]
        new = old ^ v
        syn[slot, c, i] = new
        if old == 0:
            nz[slot] += 1
        elif new == 0:
            nz[slot] -= 1

    def toggle(tr, c, i, x):
        errs[tr, c, i, x] ^= 1
        base = (i * X + x) * M1
        for k in range(M1):
            u = tr + v_delta[x * M1 + k]
            if u >= F:
                continue
            cc = c if k == 0 else (c + 1) % C
            xor_syn(u, cc, v_row[base + k], col[v_pos[base + k]])

    errpos = [int(e) for e in errpos]
    ptr = 0
    residual = 0
    corrections = 0
    syn[:] = 0
    for tn in range(F):
        slot = (tn + t.maxd) % RS
        if tn > 0:
            syn[slot] = 0
            nz[slot] = 0
        if tn < term0:
            lo, hi, width = tn * full, (tn + 1) * full, X
        else:
            lo = term0 * full + (tn - term0) * C * Sp * r
            hi, width = lo + C * Sp * r, r
        while ptr < len(errpos) and errpos[ptr] < hi:
            q = errpos[ptr] - lo
            ptr += 1
            row_id, xo = divmod(q, width)
            c, i = divmod(row_id, Sp)
            x = xo if width == X else X - r + xo
            toggle(tn, c, i, x)
        ws = max(0, tn - W + 1)
        for _ in range(I):
            changed = 0
            for s in range(ws, tn + 1):
                sl = s % RS
                if nz[sl] == 0:
                    continue
                for c in range(C):
                    for i in range(Sp):
                        v = int(syn[sl, c, i])
                        if v == 0:
                            continue
                        p = dec[v]
                        if p < 0:
                            continue
                        tr = s - c_delta[p]
                        if tr < ws:
                            continue
                        x = c_x[i * n + p]
                        if tr >= term0 and x < X - r:
                            continue
                        tc = (c - c_shift[p]) % C
                        toggle(tr, tc, c_row[i * n + p], x)
                        changed += 1
            corrections += changed
            if changed == 0:
                break
        if t.debug:
            _check_syndromes(t, errs, syn, ws, tn)
        out = tn - W + 1
        if out >= 0:
            residual += _count(t, errs, out)
    for tr in range(max(0, F - W + 1), F):
        residual += _count(t, errs, tr)
    return residual, corrections, errs


def _count(t, errs, tr) -> int:
    if not t.info_only:
        return int(errs[tr].sum())
    if tr >= t.F - t.W:
        return 0
    return int(errs[tr, :, :, : t.X - t.r].sum())


def _check_syndromes(t, errs, syn, ws, tn):
    """Recompute in-window syndromes from the error array."""
    C, Sp, X, M1, RS = t.C, t.Sp, t.X, t.M1, t.RS
    ref = {}
    lo = max(0, ws - t.maxd)
    for tr in range(lo, tn + 1):
        for c, i, x in zip(*np.nonzero(errs[tr])):
            base = (i * X + x) * M1
            for k in range(M1):
                u = tr + t.v_delta[x * M1 + k]
                if ws <= u <= tn:
                    cc = c if k == 0 else (c + 1) % C
                    key = (u, cc, t.v_row[base + k])
                    ref[key] = ref.get(key, 0) ^ int(t.col[t.v_pos[base + k]])
    for u in range(ws, tn + 1):
        for c in range(C):
            for i in range(Sp):
                if int(syn[u % RS, c, i]) != ref.get((u, c, i), 0):
                    raise AssertionError(f"syndrome mismatch at span {u} chain {c} row {i}")
