# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampling kernels; twin of ``_kernel_py``.

Semantics, formula order and draw order must match the pure-Python mirror
bit for bit; see that module's docstring.  Change both files together.
"""

from libc.math cimport exp

import numpy as np

BACKEND = "cython"

ctypedef unsigned long long u64

cdef u64 GAMMA = <u64>0x9E3779B97F4A7C15
cdef u64 MIX1 = <u64>0xBF58476D1CE4E5B9
cdef u64 MIX2 = <u64>0x94D049BB133111EB
cdef double TWO53_INV = 1.0 / 9007199254740992.0


cdef inline u64 _mix(u64 z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline u64 _raw(u64 seed, long long counter) noexcept nogil:
    return _mix(seed + (<u64>(counter + 1)) * GAMMA)


def rng_selftest(seed, long long k):
    """First k raw draws and uniforms of a stream; used for backend parity."""
    cdef u64 s = <u64>seed
    words_arr = np.zeros(k, dtype=np.uint64)
    reals_arr = np.zeros(k, dtype=np.float64)
    cdef u64[::1] words = words_arr
    cdef double[::1] reals = reals_arr
    cdef long long i
    cdef u64 v
    for i in range(k):
        v = _raw(s, i)
        words[i] = v
        reals[i] = <double>(v >> 11) * TWO53_INV
    return words_arr, reals_arr


cdef inline int _below(u64 seed, long long* counter, int k) noexcept nogil:
    cdef int bits = 0
    cdef int tmp = k - 1
    cdef int shift
    cdef u64 v
    while tmp > 0:
        bits += 1
        tmp >>= 1
    if bits == 0:
        counter[0] += 1
        return 0
    shift = 64 - bits
    while True:
        v = _raw(seed, counter[0]) >> shift
        counter[0] += 1
        if v < <u64>k:
            return <int>v


cdef inline int _bit(u64 seed, long long* counter) noexcept nogil:
    cdef u64 v = _raw(seed, counter[0])
    counter[0] += 1
    return <int>(v >> 63)


cdef inline double _double(u64 seed, long long* counter) noexcept nogil:
    cdef u64 v = _raw(seed, counter[0])
    counter[0] += 1
    return <double>(v >> 11) * TWO53_INV


# ---------------------------------------------------------------------------
# BFS over the current edge subset
# ---------------------------------------------------------------------------

cdef double _bfs(const int[::1] adj_off, const int[::1] adj_v, const int[::1] adj_e,
                 const unsigned char[::1] state, const double[::1] log_lam,
                 int start, int target, int skip_edge,
                 long long[::1] visited, long long stamp, int[::1] queue,
                 bint* hit, int* size) noexcept nogil:
    cdef int head = 0, tail = 1, x, y, e, i
    cdef double total
    visited[start] = stamp
    queue[0] = start
    total = log_lam[start]
    hit[0] = start == target
    while head < tail:
        x = queue[head]
        head += 1
        for i in range(adj_off[x], adj_off[x + 1]):
            e = adj_e[i]
            if e == skip_edge or state[e] == 0:
                continue
            y = adj_v[i]
            if visited[y] != stamp:
                visited[y] = stamp
                queue[tail] = y
                tail += 1
                total += log_lam[y]
                if y == target:
                    hit[0] = True
    size[0] = tail
    return total


cdef double _wrc_flip_ratio(const int[::1] eu, const int[::1] ev,
                            const int[::1] adj_off, const int[::1] adj_v,
                            const int[::1] adj_e, const double[::1] p,
                            const double[::1] log_lam,
                            const unsigned char[::1] state, int e,
                            long long[::1] visited, long long* stamp,
                            int[::1] queue) noexcept nogil:
    cdef int a = eu[e], b = ev[e]
    cdef double q = p[e]
    cdef bint adding = state[e] == 0
    cdef int skip = -1 if adding else e
    cdef bint hit = False
    cdef int size = 0
    cdef double sla, slb, pa, pb
    stamp[0] += 1
    sla = _bfs(adj_off, adj_v, adj_e, state, log_lam, a, b, skip,
               visited, stamp[0], queue, &hit, &size)
    if hit:
        return q / (1.0 - q) if adding else (1.0 - q) / q
    stamp[0] += 1
    slb = _bfs(adj_off, adj_v, adj_e, state, log_lam, b, -1, skip,
               visited, stamp[0], queue, &hit, &size)
    pa = exp(sla)
    pb = exp(slb)
    if adding:
        return (q / (1.0 - q)) * ((1.0 + pa * pb) / ((1.0 + pa) * (1.0 + pb)))
    return ((1.0 - q) / q) * (((1.0 + pa) * (1.0 + pb)) / (1.0 + pa * pb))


def wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, int e):
    """Public single-shot version of the flip ratio (tests, phi)."""
    cdef int n = len(adj_off) - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef long long stamp = 0
    return _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam,
                           state, e, visited, &stamp, queue)


# ---------------------------------------------------------------------------
# edge flipping dynamics
# ---------------------------------------------------------------------------

def ef_wrc_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
               const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
               const double[::1] log_lam, unsigned char[::1] state,
               long long steps, seed, long long counter,
               trace=None, long long stride=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef long long stamp = 0
    cdef unsigned char[:, ::1] tr = trace if stride else None
    cdef long long t, row = 0
    cdef int e, i
    cdef double r, ratio
    for t in range(1, steps + 1):
        if _bit(s, &counter) != 0:
            e = _below(s, &counter, m)
            r = _double(s, &counter)
            ratio = _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam,
                                    state, e, visited, &stamp, queue)
            if r < ratio:
                state[e] ^= 1
        if stride and t % stride == 0:
            for i in range(m):
                tr[row, i] = state[i]
            row += 1
    return counter


def ef_sg_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
              const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
              const double[::1] eta, unsigned char[::1] state,
              long long steps, seed, long long counter,
              trace=None, long long stride=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    deg_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] deg = deg_arr
    cdef unsigned char[:, ::1] tr = trace if stride else None
    cdef long long t, row = 0
    cdef int e, i, w, a, b, dz, zcount = 0
    cdef double r, base, fac
    cdef bint adding, accept
    for e in range(m):
        if state[e]:
            deg[eu[e]] += 1
            deg[ev[e]] += 1
    for i in range(n):
        if (deg[i] & 1) and eta[i] == 0.0:
            zcount += 1
    for t in range(1, steps + 1):
        if _bit(s, &counter) != 0:
            e = _below(s, &counter, m)
            r = _double(s, &counter)
            a = eu[e]
            b = ev[e]
            adding = state[e] == 0
            base = p[e] / (1.0 - p[e]) if adding else (1.0 - p[e]) / p[e]
            fac = 1.0
            dz = 0
            for i in range(2):
                w = a if i == 0 else b
                if deg[w] & 1:
                    if eta[w] == 0.0:
                        dz -= 1
                    else:
                        fac /= eta[w]
                else:
                    if eta[w] == 0.0:
                        dz += 1
                    else:
                        fac *= eta[w]
            if zcount + dz > 0:
                accept = False
            elif zcount > 0:
                accept = True
            else:
                accept = r < base * fac
            if accept:
                state[e] ^= 1
                if adding:
                    deg[a] += 1
                    deg[b] += 1
                else:
                    deg[a] -= 1
                    deg[b] -= 1
                zcount += dz
        if stride and t % stride == 0:
            for i in range(m):
                tr[row, i] = state[i]
            row += 1
    return counter


# ---------------------------------------------------------------------------
# single-bond dynamics
# ---------------------------------------------------------------------------

def sb_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
           const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
           const double[::1] log_lam, unsigned char[::1] state,
           long long steps, seed, long long counter,
           trace=None, long long stride=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef long long stamp = 0
    cdef unsigned char[:, ::1] tr = trace if stride else None
    cdef long long t, row = 0
    cdef int e, i, a, b, size = 0
    cdef bint hit = False
    cdef double r, pr, sla, slb, pa, pb
    for t in range(1, steps + 1):
        if _bit(s, &counter) != 0:
            e = _below(s, &counter, m)
            r = _double(s, &counter)
            a = eu[e]
            b = ev[e]
            stamp += 1
            sla = _bfs(adj_off, adj_v, adj_e, state, log_lam, a, b, -1,
                       visited, stamp, queue, &hit, &size)
            if hit:
                pr = p[e]
            else:
                stamp += 1
                slb = _bfs(adj_off, adj_v, adj_e, state, log_lam, b, -1, -1,
                           visited, stamp, queue, &hit, &size)
                pa = exp(sla)
                pb = exp(slb)
                pr = p[e] * (1.0 + pa * pb) / ((1.0 + pa) * (1.0 + pb))
            state[e] = 1 if r < pr else 0
        if stride and t % stride == 0:
            for i in range(m):
                tr[row, i] = state[i]
            row += 1
    return counter


# ---------------------------------------------------------------------------
# Swendsen-Wang dynamics
# ---------------------------------------------------------------------------

cdef long long _half_i_to_r(const int[::1] eu, const int[::1] ev,
                            const double[::1] p, const unsigned char[::1] spins,
                            unsigned char[::1] subset, int m,
                            u64 seed, long long counter) noexcept nogil:
    cdef int e
    cdef double r
    for e in range(m):
        if spins[eu[e]] == spins[ev[e]]:
            r = _double(seed, &counter)
            subset[e] = 1 if r < p[e] else 0
        else:
            subset[e] = 0
    return counter


cdef long long _half_r_to_i(const int[::1] adj_off, const int[::1] adj_v,
                            const int[::1] adj_e, const double[::1] log_lam,
                            const unsigned char[::1] subset,
                            unsigned char[::1] spins, int n,
                            u64 seed, long long counter,
                            long long[::1] visited, long long* stamp,
                            int[::1] queue) noexcept nogil:
    cdef int start, head, tail, x, y, i
    cdef double total, pl, r
    cdef unsigned char val
    stamp[0] += 1
    cdef long long st = stamp[0]
    for start in range(n):
        if visited[start] == st:
            continue
        visited[start] = st
        queue[0] = start
        head = 0
        tail = 1
        total = log_lam[start]
        while head < tail:
            x = queue[head]
            head += 1
            for i in range(adj_off[x], adj_off[x + 1]):
                if subset[adj_e[i]] == 0:
                    continue
                y = adj_v[i]
                if visited[y] != st:
                    visited[y] = st
                    queue[tail] = y
                    tail += 1
                    total += log_lam[y]
        pl = exp(total)
        r = _double(seed, &counter)
        val = 1 if r < pl / (1.0 + pl) else 0
        for i in range(tail):
            spins[queue[i]] = val
    return counter


def sw_ising_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
                 const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
                 const double[::1] log_lam, unsigned char[::1] spins,
                 long long steps, seed, long long counter,
                 trace=None, long long stride=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    subset_arr = np.zeros(m, dtype=np.uint8)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef unsigned char[::1] subset = subset_arr
    cdef long long stamp = 0
    cdef unsigned char[:, ::1] tr = trace if stride else None
    cdef long long t, row = 0
    cdef int i
    for t in range(1, steps + 1):
        counter = _half_i_to_r(eu, ev, p, spins, subset, m, s, counter)
        counter = _half_r_to_i(adj_off, adj_v, adj_e, log_lam, subset, spins,
                               n, s, counter, visited, &stamp, queue)
        if stride and t % stride == 0:
            for i in range(n):
                tr[row, i] = spins[i]
            row += 1
    return counter


def sw_wrc_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
               const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
               const double[::1] log_lam, unsigned char[::1] state,
               long long steps, seed, long long counter,
               trace=None, long long stride=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    spins_arr = np.zeros(n, dtype=np.uint8)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef unsigned char[::1] spins = spins_arr
    cdef long long stamp = 0
    cdef unsigned char[:, ::1] tr = trace if stride else None
    cdef long long t, row = 0
    cdef int i
    for t in range(1, steps + 1):
        counter = _half_r_to_i(adj_off, adj_v, adj_e, log_lam, state, spins,
                               n, s, counter, visited, &stamp, queue)
        counter = _half_i_to_r(eu, ev, p, spins, state, m, s, counter)
        if stride and t % stride == 0:
            for i in range(m):
                tr[row, i] = state[i]
            row += 1
    return counter


# ---------------------------------------------------------------------------
# grand coupling and CFTP
# ---------------------------------------------------------------------------

cdef inline void _phi(const int[::1] eu, const int[::1] ev,
                      const int[::1] adj_off, const int[::1] adj_v,
                      const int[::1] adj_e, const double[::1] p,
                      const double[::1] log_lam, unsigned char[::1] state,
                      int lzy, int e, int b, double r,
                      long long[::1] visited, long long* stamp,
                      int[::1] queue) noexcept nogil:
    cdef double ratio
    if lzy == 0:
        return
    if state[e] == b:
        return
    ratio = _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam,
                            state, e, visited, stamp, queue)
    if r < ratio:
        state[e] = <unsigned char>b


def cftp_run(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
             const int[::1] adj_v, const int[::1] adj_e, const double[::1] p,
             const double[::1] log_lam, seed, int max_pow=30):
    """Doubling CFTP; returns (state, T*, counter) with T* = -1 on failure."""
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef long long stamp = 0

    cdef long long cap = 1
    ell_arr = np.zeros(cap, dtype=np.uint8)
    eidx_arr = np.zeros(cap, dtype=np.int32)
    bval_arr = np.zeros(cap, dtype=np.uint8)
    rval_arr = np.zeros(cap, dtype=np.float64)
    cdef unsigned char[::1] ell = ell_arr
    cdef int[::1] eidx = eidx_arr
    cdef unsigned char[::1] bval = bval_arr
    cdef double[::1] rval = rval_arr

    xmin_arr = np.zeros(m, dtype=np.uint8)
    xmax_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] xmin = xmin_arr
    cdef unsigned char[::1] xmax = xmax_arr

    cdef long long filled = 0, counter = 0, t_cap = 1, j
    cdef int i, rnd
    cdef bint equal
    for rnd in range(max_pow + 1):
        if t_cap > cap:
            cap = t_cap
            ell_arr = np.resize(ell_arr, cap)
            eidx_arr = np.resize(eidx_arr, cap)
            bval_arr = np.resize(bval_arr, cap)
            rval_arr = np.resize(rval_arr, cap)
            ell = ell_arr
            eidx = eidx_arr
            bval = bval_arr
            rval = rval_arr
        while filled < t_cap:
            ell[filled] = <unsigned char>_bit(s, &counter)
            eidx[filled] = _below(s, &counter, m)
            bval[filled] = <unsigned char>_bit(s, &counter)
            rval[filled] = _double(s, &counter)
            filled += 1
        for i in range(m):
            xmin[i] = 0
            xmax[i] = 1
        for j in range(t_cap - 1, -1, -1):
            _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, xmin,
                 ell[j], eidx[j], bval[j], rval[j], visited, &stamp, queue)
            _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, xmax,
                 ell[j], eidx[j], bval[j], rval[j], visited, &stamp, queue)
        equal = True
        for i in range(m):
            if xmin[i] != xmax[i]:
                equal = False
                break
        if equal:
            return xmin_arr, t_cap, counter
        t_cap *= 2
    return xmin_arr, -1, counter


def monotone_trials(const int[::1] eu, const int[::1] ev, const int[::1] adj_off,
                    const int[::1] adj_v, const int[::1] adj_e,
                    const double[::1] p, const double[::1] log_lam,
                    long long trials, seed, long long counter=0):
    cdef u64 s = <u64>seed
    cdef int m = <int>eu.shape[0]
    cdef int n = <int>adj_off.shape[0] - 1
    visited_arr = np.zeros(n, dtype=np.int64)
    queue_arr = np.zeros(n, dtype=np.int32)
    lo_arr = np.zeros(m, dtype=np.uint8)
    hi_arr = np.zeros(m, dtype=np.uint8)
    cdef long long[::1] visited = visited_arr
    cdef int[::1] queue = queue_arr
    cdef unsigned char[::1] lo = lo_arr
    cdef unsigned char[::1] hi = hi_arr
    cdef long long stamp = 0
    cdef long long trial, violations = 0
    cdef int e, a, b, lzy, bb
    cdef double r
    for trial in range(trials):
        for e in range(m):
            a = _bit(s, &counter)
            b = _bit(s, &counter)
            lo[e] = <unsigned char>(a & b)
            hi[e] = <unsigned char>(a | b)
        lzy = _bit(s, &counter)
        e = _below(s, &counter, m)
        bb = _bit(s, &counter)
        r = _double(s, &counter)
        _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, lo,
             lzy, e, bb, r, visited, &stamp, queue)
        _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, hi,
             lzy, e, bb, r, visited, &stamp, queue)
        for e in range(m):
            if lo[e] > hi[e]:
                violations += 1
                break
    return violations, counter
