# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; semantics match ``_pykernels`` exactly."""

from libc.math cimport cos, floor, log, sqrt
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memcpy, memset

import numpy as np

BACKEND = "cython"

cdef enum:
    NL = 4          # limbs per bitset; change here to widen the search bitsets
    NBITS = 64 * NL


cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil


# --- xoshiro256** seeded through splitmix64 --------------------------------

cdef struct Rng:
    uint64_t s[4]


cdef inline uint64_t rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef void rng_seed(Rng* g, uint64_t seed) nogil:
    cdef uint64_t x = seed, z
    cdef int q
    for q in range(4):
        x += 0x9E3779B97F4A7C15ULL
        z = x
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        g.s[q] = z ^ (z >> 31)


cdef inline uint64_t rng_next(Rng* g) nogil:
    cdef uint64_t result = rotl(g.s[1] * 5, 7) * 9
    cdef uint64_t t = g.s[1] << 17
    g.s[2] ^= g.s[0]
    g.s[3] ^= g.s[1]
    g.s[1] ^= g.s[2]
    g.s[0] ^= g.s[3]
    g.s[2] ^= t
    g.s[3] = rotl(g.s[3], 45)
    return result


cdef inline uint64_t rng_below(Rng* g, uint64_t n) nogil:
    return ((rng_next(g) >> 32) * n) >> 32


cdef inline double rng_uniform(Rng* g) nogil:
    return <double>(rng_next(g) >> 11) * (1.0 / 9007199254740992.0)


cdef inline double rng_gauss(Rng* g) nogil:
    cdef double u1 = 1.0 - rng_uniform(g)
    cdef double u2 = rng_uniform(g)
    return sqrt(-2.0 * log(u1)) * cos(2.0 * 3.141592653589793 * u2)


class Xoshiro:
    """Python view of the compiled generator (for cross-checks)."""

    def __init__(self, seed):
        self._state = np.zeros(4, dtype=np.uint64)
        cdef Rng g
        rng_seed(&g, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
        for q in range(4):
            self._state[q] = g.s[q]

    def _take(self, kind, n=0):
        cdef Rng g
        cdef int q
        cdef uint64_t iv = 0
        cdef double fv = 0.0
        for q in range(4):
            g.s[q] = self._state[q]
        if kind == 0:
            iv = rng_next(&g)
        elif kind == 1:
            iv = rng_below(&g, n)
        elif kind == 2:
            fv = rng_uniform(&g)
        else:
            fv = rng_gauss(&g)
        for q in range(4):
            self._state[q] = g.s[q]
        return iv if kind < 2 else fv

    def next(self):
        return int(self._take(0))

    def below(self, n):
        return int(self._take(1, n))

    def uniform(self):
        return float(self._take(2))

    def gauss(self):
        return float(self._take(3))


# --- bitset primitives ------------------------------------------------------

cdef inline void bs_zero(uint64_t* a) nogil:
    cdef int q
    for q in range(NL):
        a[q] = 0


cdef inline void bs_shl(const uint64_t* a, int k, uint64_t* out) nogil:
    cdef int q = k >> 6, s = k & 63, i
    cdef uint64_t v
    for i in range(NL):
        out[i] = 0
    if k >= NBITS:
        return
    for i in range(NL - 1, q - 1, -1):
        v = a[i - q] << s
        if s and i - q - 1 >= 0:
            v |= a[i - q - 1] >> (64 - s)
        out[i] = v


cdef inline void bs_shr(const uint64_t* a, int k, uint64_t* out) nogil:
    cdef int q = k >> 6, s = k & 63, i
    cdef uint64_t v
    for i in range(NL):
        out[i] = 0
    if k >= NBITS:
        return
    for i in range(NL - q):
        v = a[i + q] >> s
        if s and i + q + 1 < NL:
            v |= a[i + q + 1] << (64 - s)
        out[i] = v


cdef inline bint bs_intersects(const uint64_t* a, const uint64_t* b) nogil:
    cdef int q
    for q in range(NL):
        if a[q] & b[q]:
            return True
    return False


cdef inline int bs_highest(const uint64_t* a) nogil:
    cdef int q
    for q in range(NL - 1, -1, -1):
        if a[q]:
            return 64 * q + 63 - __builtin_clzll(a[q])
    return -1


cdef inline int bs_popcount(const uint64_t* a) nogil:
    cdef int q, c = 0
    for q in range(NL):
        c += __builtin_popcountll(a[q])
    return c


cdef int bs_select(const uint64_t* a, int rank) nogil:
    """Position of the ``rank``-th set bit (0-based)."""
    cdef int q, c
    cdef uint64_t w
    for q in range(NL):
        c = __builtin_popcountll(a[q])
        if rank < c:
            w = a[q]
            while rank:
                w &= w - 1
                rank -= 1
            return 64 * q + 63 - __builtin_clzll(w & (~w + 1))
        rank -= c
    return -1


def bitset_shl(value, int k):
    """Shift a Python int through the limb code (for tests)."""
    cdef uint64_t a[NL]
    cdef uint64_t out[NL]
    _load(value, a)
    bs_shl(a, k, out)
    return _store(out)


def bitset_shr(value, int k):
    cdef uint64_t a[NL]
    cdef uint64_t out[NL]
    _load(value, a)
    bs_shr(a, k, out)
    return _store(out)


def bitset_width():
    return NBITS


cdef void _load(value, uint64_t* a):
    cdef int q
    for q in range(NL):
        a[q] = (value >> (64 * q)) & 0xFFFFFFFFFFFFFFFF


cdef object _store(const uint64_t* a):
    out = 0
    cdef int q
    for q in range(NL):
        out |= int(a[q]) << (64 * q)
    return out


# --- conditional mark insertion ---------------------------------------------

cdef struct SState:
    int L
    uint64_t* nat
    uint64_t* rev
    int* largest
    int* count
    uint64_t used[NL]


cdef inline void st_distances(SState* st, int l, int mark, uint64_t* left, uint64_t* right) nogil:
    cdef int big = st.largest[l]
    if mark > big:
        bs_shl(st.rev + NL * l, mark - big, left)
        bs_zero(right)
    else:
        bs_shr(st.rev + NL * l, big - mark, left)
        bs_shr(st.nat + NL * l, mark, right)


cdef bint st_try_insert(SState* st, int l, int mark) nogil:
    cdef uint64_t left[NL]
    cdef uint64_t right[NL]
    cdef uint64_t dist[NL]
    cdef int q
    st_distances(st, l, mark, left, right)
    if bs_intersects(left, right):
        return False
    for q in range(NL):
        dist[q] = left[q] | right[q]
    if bs_intersects(st.used, dist):
        return False
    st.nat[NL * l + (mark >> 6)] |= (<uint64_t>1) << (mark & 63)
    if mark > st.largest[l]:
        left[0] |= 1
        memcpy(st.rev + NL * l, left, NL * sizeof(uint64_t))
        st.largest[l] = mark
    else:
        q = st.largest[l] - mark
        st.rev[NL * l + (q >> 6)] |= (<uint64_t>1) << (q & 63)
    for q in range(NL):
        st.used[q] |= dist[q]
    st.count[l] += 1
    return True


cdef void st_delete_mark(SState* st, int l, int mark) nogil:
    cdef uint64_t left[NL]
    cdef uint64_t right[NL]
    cdef uint64_t tmp[NL]
    cdef int big = st.largest[l], new_big, q
    st.nat[NL * l + (mark >> 6)] &= ~((<uint64_t>1) << (mark & 63))
    if mark == big:
        new_big = bs_highest(st.nat + NL * l)
        memcpy(tmp, st.rev + NL * l, NL * sizeof(uint64_t))
        tmp[0] &= ~(<uint64_t>1)
        bs_shr(tmp, big - new_big, st.rev + NL * l)
        st.largest[l] = new_big
    else:
        q = big - mark
        st.rev[NL * l + (q >> 6)] &= ~((<uint64_t>1) << (q & 63))
    st_distances(st, l, mark, left, right)
    left[0] &= ~(<uint64_t>1)
    right[0] &= ~(<uint64_t>1)
    for q in range(NL):
        st.used[q] &= ~(left[q] | right[q])
    st.count[l] -= 1


cdef void st_delete_ruler(SState* st, int l) nogil:
    cdef int m
    while st.count[l] > 1:
        m = st.largest[l]
        st_delete_mark(st, l, m)


cdef class SearchState:
    """Compiled mirror of ``_pykernels.SearchState`` (fixed limb count)."""

    cdef SState st
    cdef object _nat, _rev, _largest, _count
    cdef public int N, nlimbs

    def __init__(self, int L, int nlimbs=NL):
        if nlimbs != NL:
            raise ValueError(f"compiled bitsets have {NL} limbs")
        self.N = NBITS
        self.nlimbs = NL
        self._nat = np.zeros(L * NL, dtype=np.uint64)
        self._rev = np.zeros(L * NL, dtype=np.uint64)
        self._largest = np.zeros(L, dtype=np.intc)
        self._count = np.ones(L, dtype=np.intc)
        cdef uint64_t[::1] nat = self._nat
        cdef uint64_t[::1] rev = self._rev
        cdef int[::1] lg = self._largest
        cdef int[::1] cnt = self._count
        self.st.L = L
        self.st.nat = &nat[0]
        self.st.rev = &rev[0]
        self.st.largest = &lg[0]
        self.st.count = &cnt[0]
        bs_zero(self.st.used)
        for l in range(L):
            nat[NL * l] = 1
            rev[NL * l] = 1

    @property
    def L(self):
        return self.st.L

    def try_insert(self, int l, int mark):
        if not 0 <= mark < NBITS:
            raise ValueError(f"mark {mark} outside [0, {NBITS})")
        return bool(st_try_insert(&self.st, l, mark))

    def delete_mark(self, int l, int mark):
        if mark == 0:
            raise ValueError("mark 0 cannot be deleted")
        if not (self.nat_int(l) >> mark) & 1:
            raise ValueError(f"mark {mark} not in ruler {l}")
        st_delete_mark(&self.st, l, mark)

    def delete_ruler(self, int l):
        st_delete_ruler(&self.st, l)

    def nat_int(self, int l):
        return _store(self.st.nat + NL * l)

    def rev_int(self, int l):
        return _store(self.st.rev + NL * l)

    def used_int(self):
        return _store(self.st.used)

    def largest_mark(self, int l):
        return self.st.largest[l]

    def marks_count(self, int l):
        return self.st.count[l]

    def marks(self, int l):
        v = self.nat_int(l)
        return [i for i in range(NBITS) if (v >> i) & 1]


cdef inline int sample_mark(Rng* g, int T, int idx, const double* means, const double* stds,
                            bint use_model) nogil:
    cdef int tries, v
    if use_model:
        for tries in range(64):
            v = <int>floor(means[idx] + stds[idx] * rng_gauss(g) + 0.5)
            if 0 < v <= T:
                return v
    return 1 + <int>rng_below(g, T)


def run_search(int L, int M, int T, seed, long long budget, means, stds, bint use_model,
               int A=200, int B=20, long long sum_limit=-1, int nlimbs=NL):
    if nlimbs != NL:
        raise ValueError(f"compiled bitsets have {NL} limbs")
    if T >= NBITS:
        raise ValueError("scope bound exceeds bitset width")
    cdef double[::1] mu = np.ascontiguousarray(means, dtype=np.float64)
    cdef double[::1] sd = np.ascontiguousarray(stds, dtype=np.float64)
    state = SearchState(L)
    cdef SearchState so = state
    cdef SState* st = &so.st
    cdef Rng g
    rng_seed(&g, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef long long attempts = 0, s
    cdef int total = L, best_total = L, fails = 0, deletions = 0
    cdef int work, q, worst, victim, nothers, mark, pick
    cdef int others[1024]
    if L > 1024:
        raise ValueError("L too large")
    cdef bint found = False
    with nogil:
        while attempts < budget:
            work = 0
            for q in range(1, L):
                if st.count[q] < st.count[work]:
                    work = q
            if st.count[work] == M + 1:
                s = 0
                for q in range(L):
                    s += st.largest[q]
                if sum_limit < 0 or s < sum_limit:
                    found = True
                    break
                worst = 0
                for q in range(1, L):
                    if st.largest[q] > st.largest[worst]:
                        worst = q
                total -= st.count[worst] - 1
                st_delete_ruler(st, worst)
                best_total = total
                continue
            mark = sample_mark(&g, T, st.count[work], &mu[0], &sd[0], use_model)
            attempts += 1
            if st_try_insert(st, work, mark):
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
                pick = <int>rng_below(&g, st.count[work] - 1)
                st_delete_mark(st, work, bs_select(st.nat + NL * work, pick + 1))
                total -= 1
            deletions += 1
            if deletions >= B:
                deletions = 0
                nothers = 0
                for q in range(L):
                    if q != work and st.count[q] > 1:
                        others[nothers] = q
                        nothers += 1
                if nothers:
                    victim = others[<int>rng_below(&g, nothers)]
                else:
                    victim = work
                total -= st.count[victim] - 1
                st_delete_ruler(st, victim)
                best_total = total
    if found:
        return [state.marks(l) for l in range(L)], attempts
    return None, attempts


# --- syndrome-domain sliding-window decoder ---------------------------------

cdef struct Dec:
    int C, Sp, X, r, M1, n, F, W, RS, RB, maxd, term0, info_only
    const int64_t* v_row
    const int64_t* v_pos
    const int64_t* v_delta
    const int64_t* col
    int64_t* syn
    int64_t* nz
    uint8_t* errs


cdef inline void xor_syn(Dec* d, int64_t u, int c, int64_t i, int64_t v) nogil:
    cdef int64_t slot = u % d.RS
    cdef int64_t idx = (slot * d.C + c) * d.Sp + i
    cdef int64_t old = d.syn[idx]
    cdef int64_t new = old ^ v
    d.syn[idx] = new
    if old == 0:
        d.nz[slot] += 1
    elif new == 0:
        d.nz[slot] -= 1


cdef inline void toggle(Dec* d, int64_t tr, int c, int64_t i, int64_t x) nogil:
    cdef int k, cc
    cdef int64_t u, base
    d.errs[((tr % d.RB) * d.C + c) * d.Sp * d.X + i * d.X + x] ^= 1
    base = (i * d.X + x) * d.M1
    for k in range(d.M1):
        u = tr + d.v_delta[x * d.M1 + k]
        if u >= d.F:
            continue
        cc = c if k == 0 else (c + 1) % d.C
        xor_syn(d, u, cc, d.v_row[base + k], d.col[d.v_pos[base + k]])


cdef int64_t count_slot(Dec* d, int64_t tr) nogil:
    cdef int64_t q, x, size = d.C * d.Sp * d.X, c = 0
    cdef uint8_t* e = d.errs + (tr % d.RB) * size
    if not d.info_only:
        for q in range(size):
            c += e[q]
        return c
    if tr >= d.term0:
        return 0
    for q in range(d.C * d.Sp):
        for x in range(d.X - d.r):
            c += e[q * d.X + x]
    return c


def decode_frame(t, errpos):
    """See ``_pykernels.decode_frame``."""
    if t.debug:
        from . import _pykernels
        return _pykernels.decode_frame(t, errpos)
    cdef int64_t[::1] v_row = t.v_row
    cdef int64_t[::1] v_pos = t.v_pos
    cdef int64_t[::1] v_delta = t.v_delta
    cdef int64_t[::1] col = t.col
    cdef int64_t[::1] c_row = t.c_row
    cdef int64_t[::1] c_x = t.c_x
    cdef int64_t[::1] c_delta = t.c_delta
    cdef int64_t[::1] c_shift = t.c_shift
    cdef int64_t[::1] dec = t.dec
    cdef int64_t[::1] ep = np.ascontiguousarray(errpos, dtype=np.int64)
    cdef Dec d
    d.C = t.C; d.Sp = t.Sp; d.X = t.X; d.r = t.r; d.M1 = t.M1; d.n = t.n
    d.F = t.F; d.W = t.W; d.RS = t.RS; d.RB = t.W + 1; d.maxd = t.maxd
    d.term0 = t.F - t.W
    d.info_only = 1 if t.info_only else 0
    cdef int I = t.I
    syn_arr = np.zeros(d.RS * d.C * d.Sp, dtype=np.int64)
    nz_arr = np.zeros(d.RS, dtype=np.int64)
    err_arr = np.zeros(d.RB * d.C * d.Sp * d.X, dtype=np.uint8)
    cdef int64_t[::1] syn = syn_arr
    cdef int64_t[::1] nzv = nz_arr
    cdef uint8_t[::1] errs = err_arr
    d.v_row = &v_row[0]; d.v_pos = &v_pos[0]; d.v_delta = &v_delta[0]; d.col = &col[0]
    d.syn = &syn[0]; d.nz = &nzv[0]; d.errs = &errs[0]
    cdef int64_t nerr = ep.shape[0], ptr = 0, residual = 0, corrections = 0
    cdef int64_t full = d.C * d.Sp * d.X, lo, hi, width, q, row_id, x, xo, tn, ws, s, sl
    cdef int64_t slot, v, p, tr, out, rowsize = d.C * d.Sp
    cdef int c, i, it, tc
    cdef int64_t changed
    with nogil:
        for tn in range(d.F):
            slot = (tn + d.maxd) % d.RS
            if tn > 0:
                memset(d.syn + slot * rowsize, 0, rowsize * sizeof(int64_t))
                d.nz[slot] = 0
            memset(d.errs + (tn % d.RB) * full, 0, full)
            if tn < d.term0:
                lo = tn * full
                hi = lo + full
                width = d.X
            else:
                lo = d.term0 * full + (tn - d.term0) * rowsize * d.r
                hi = lo + rowsize * d.r
                width = d.r
            while ptr < nerr and ep[ptr] < hi:
                q = ep[ptr] - lo
                ptr += 1
                row_id = q // width
                xo = q % width
                c = <int>(row_id // d.Sp)
                i = <int>(row_id % d.Sp)
                x = xo if width == d.X else d.X - d.r + xo
                toggle(&d, tn, c, i, x)
            ws = tn - d.W + 1
            if ws < 0:
                ws = 0
            for it in range(I):
                changed = 0
                for s in range(ws, tn + 1):
                    sl = s % d.RS
                    if d.nz[sl] == 0:
                        continue
                    for c in range(d.C):
                        for i in range(d.Sp):
                            v = d.syn[(sl * d.C + c) * d.Sp + i]
                            if v == 0:
                                continue
                            p = dec[v]
                            if p < 0:
                                continue
                            tr = s - c_delta[p]
                            if tr < ws:
                                continue
                            x = c_x[i * d.n + p]
                            if tr >= d.term0 and x < d.X - d.r:
                                continue
                            tc = <int>((c - c_shift[p] + d.C) % d.C)
                            toggle(&d, tr, tc, c_row[i * d.n + p], x)
                            changed += 1
                corrections += changed
                if changed == 0:
                    break
            out = tn - d.W + 1
            if out >= 0:
                residual += count_slot(&d, out)
        out = d.F - d.W + 1
        if out < 0:
            out = 0
        for tn in range(out, d.F):
            residual += count_slot(&d, tn)
    return int(residual), int(corrections)
