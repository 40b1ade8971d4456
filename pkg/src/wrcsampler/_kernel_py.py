"""Pure-Python sampling kernels; reference twin of the compiled extension.

Every function here mirrors one in ``_kernel.pyx`` operation for operation.
The two backends must return bit-identical states, counters and samples for
any (seed, counter); keep every formula, draw order and BFS traversal order
in sync when touching either file.

Graphs arrive as flat arrays (edge endpoints ``eu``/``ev`` and a CSR
adjacency ``adj_off``/``adj_v``/``adj_e``); states are uint8 vectors mutated
in place.  All randomness follows the SplitMix64 protocol of ``rng.py``:
one raw draw per primitive, uniform integers by top-bits rejection.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import raw_draw

BACKEND = "python"

_TWO53_INV = 2.0 ** -53


def rng_selftest(seed: int, k: int):
    """First k raw draws and uniforms of a stream; used for backend parity."""
    words = np.zeros(k, dtype=np.uint64)
    reals = np.zeros(k, dtype=np.float64)
    for i in range(k):
        v = raw_draw(seed, i)
        words[i] = v
        reals[i] = (v >> 11) * _TWO53_INV
    return words, reals


# ---------------------------------------------------------------------------
# internal draw helpers (counter passed explicitly, returned advanced)
# ---------------------------------------------------------------------------

def _bit(seed, counter):
    return raw_draw(seed, counter) >> 63, counter + 1


def _double(seed, counter):
    return (raw_draw(seed, counter) >> 11) * _TWO53_INV, counter + 1


def _below(seed, counter, k):
    bits = (k - 1).bit_length()
    if bits == 0:
        return 0, counter + 1
    shift = 64 - bits
    while True:
        v = raw_draw(seed, counter) >> shift
        counter += 1
        if v < k:
            return v, counter


# ---------------------------------------------------------------------------
# BFS over the current edge subset
# ---------------------------------------------------------------------------

class _Scratch:
    """Visited stamps and BFS queue, reused across steps."""

    def __init__(self, n):
        self.visited = np.zeros(n, dtype=np.int64)
        self.stamp = 0
        self.queue = np.zeros(n, dtype=np.int32)


def _bfs(adj_off, adj_v, adj_e, state, log_lam, start, target, skip_edge, sc):
    """Explore start's component in (V, state) ignoring skip_edge.

    Returns (sum of log_lam over the component, target reached?, size).
    Component members sit in sc.queue[:size].  Traversal order is CSR order,
    which both backends share.
    """
    sc.stamp += 1
    stamp = sc.stamp
    visited, queue = sc.visited, sc.queue
    visited[start] = stamp
    queue[0] = start
    head, tail = 0, 1
    total = float(log_lam[start])
    hit = start == target
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
                total += float(log_lam[y])
                if y == target:
                    hit = True
    return total, hit, tail


def _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, e, sc):
    """pi_wrc(state ^ {e}) / pi_wrc(state), from local component structure."""
    a, b = eu[e], ev[e]
    q = p[e]
    adding = state[e] == 0
    skip = -1 if adding else e
    sla, hit, _ = _bfs(adj_off, adj_v, adj_e, state, log_lam, a, b, skip, sc)
    if hit:
        return q / (1.0 - q) if adding else (1.0 - q) / q
    slb, _, _ = _bfs(adj_off, adj_v, adj_e, state, log_lam, b, -1, skip, sc)
    pa = math.exp(sla)
    pb = math.exp(slb)
    if adding:
        return (q / (1.0 - q)) * ((1.0 + pa * pb) / ((1.0 + pa) * (1.0 + pb)))
    return ((1.0 - q) / q) * (((1.0 + pa) * (1.0 + pb)) / (1.0 + pa * pb))


def wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, e):
    """Public single-shot version of the flip ratio (tests, phi)."""
    sc = _Scratch(len(adj_off) - 1)
    return _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, e, sc)


# ---------------------------------------------------------------------------
# edge flipping dynamics (lazy Metropolis, flip proposal)
# ---------------------------------------------------------------------------

def ef_wrc_run(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state,
               steps, seed, counter, trace=None, stride=0):
    """Run the WRC edge-flipping chain in place; returns the new counter.

    Draws per step: one lazy bit; on active steps a uniform edge and a
    uniform real, acceptance by r < ratio (strict).  If trace is given, the
    state after steps stride, 2*stride, ... is copied into its rows.
    """
    m = len(eu)
    sc = _Scratch(len(adj_off) - 1)
    row = 0
    for t in range(1, steps + 1):
        lazy_bit, counter = _bit(seed, counter)
        if lazy_bit != 0:
            e, counter = _below(seed, counter, m)
            r, counter = _double(seed, counter)
            ratio = _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e,
                                    p, log_lam, state, e, sc)
            if r < ratio:
                state[e] ^= 1
        if stride and t % stride == 0:
            trace[row, :] = state
            row += 1
    return counter


def ef_sg_run(eu, ev, adj_off, adj_v, adj_e, p, eta, state,
              steps, seed, counter, trace=None, stride=0):
    """Subgraph-world edge-flipping chain.

    Acceptance cancels factors shared by the two states: with zy (zx) the
    number of odd vertices carrying eta = 0 after (before) the flip, a
    proposal is rejected when zy > 0, accepted outright when zx > 0 > zy = 0,
    and otherwise Metropolis on the endpoint eta factors.
    """
    m = len(eu)
    n = len(adj_off) - 1
    deg = np.zeros(n, dtype=np.int64)
    for e in range(m):
        if state[e]:
            deg[eu[e]] += 1
            deg[ev[e]] += 1
    zcount = sum(1 for v in range(n) if (deg[v] & 1) and eta[v] == 0.0)
    row = 0
    for t in range(1, steps + 1):
        lazy_bit, counter = _bit(seed, counter)
        if lazy_bit != 0:
            e, counter = _below(seed, counter, m)
            r, counter = _double(seed, counter)
            a, b = eu[e], ev[e]
            adding = state[e] == 0
            base = p[e] / (1.0 - p[e]) if adding else (1.0 - p[e]) / p[e]
            fac = 1.0
            dz = 0
            for w in (a, b):
                if deg[w] & 1:  # odd now, becomes even
                    if eta[w] == 0.0:
                        dz -= 1
                    else:
                        fac /= eta[w]
                else:  # becomes odd
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
                d = 1 if adding else -1
                deg[a] += d
                deg[b] += d
                zcount += dz
        if stride and t % stride == 0:
            trace[row, :] = state
            row += 1
    return counter


# ---------------------------------------------------------------------------
# single-bond dynamics
# ---------------------------------------------------------------------------

def sb_run(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state,
           steps, seed, counter, trace=None, stride=0):
    """Lazy single-bond chain; connectivity is tested in the current state
    (an edge already present connects its own endpoints)."""
    m = len(eu)
    sc = _Scratch(len(adj_off) - 1)
    row = 0
    for t in range(1, steps + 1):
        lazy_bit, counter = _bit(seed, counter)
        if lazy_bit != 0:
            e, counter = _below(seed, counter, m)
            r, counter = _double(seed, counter)
            a, b = eu[e], ev[e]
            sla, hit, _ = _bfs(adj_off, adj_v, adj_e, state, log_lam, a, b, -1, sc)
            if hit:
                pr = p[e]
            else:
                slb, _, _ = _bfs(adj_off, adj_v, adj_e, state, log_lam, b, -1, -1, sc)
                pa = math.exp(sla)
                pb = math.exp(slb)
                pr = p[e] * (1.0 + pa * pb) / ((1.0 + pa) * (1.0 + pb))
            state[e] = 1 if r < pr else 0
        if stride and t % stride == 0:
            trace[row, :] = state
            row += 1
    return counter


# ---------------------------------------------------------------------------
# Swendsen-Wang dynamics
# ---------------------------------------------------------------------------

def _half_i_to_r(eu, ev, p, spins, subset, m, seed, counter):
    """Independent coins on monochromatic edges, in edge index order."""
    for e in range(m):
        if spins[eu[e]] == spins[ev[e]]:
            r, counter = _double(seed, counter)
            subset[e] = 1 if r < p[e] else 0
        else:
            subset[e] = 0
    return counter


def _half_r_to_i(adj_off, adj_v, adj_e, log_lam, subset, spins, n, seed, counter, sc):
    """One spin coin per component, components in minimum-vertex order."""
    sc.stamp += 1
    stamp = sc.stamp
    visited, queue = sc.visited, sc.queue
    for start in range(n):
        if visited[start] == stamp:
            continue
        visited[start] = stamp
        queue[0] = start
        head, tail = 0, 1
        total = float(log_lam[start])
        while head < tail:
            x = queue[head]
            head += 1
            for i in range(adj_off[x], adj_off[x + 1]):
                if subset[adj_e[i]] == 0:
                    continue
                y = adj_v[i]
                if visited[y] != stamp:
                    visited[y] = stamp
                    queue[tail] = y
                    tail += 1
                    total += float(log_lam[y])
        pl = math.exp(total)
        r, counter = _double(seed, counter)
        val = 1 if r < pl / (1.0 + pl) else 0
        for i in range(tail):
            spins[queue[i]] = val
    return counter


def sw_ising_run(eu, ev, adj_off, adj_v, adj_e, p, log_lam, spins,
                 steps, seed, counter, trace=None, stride=0):
    m = len(eu)
    n = len(adj_off) - 1
    sc = _Scratch(n)
    subset = np.zeros(m, dtype=np.uint8)
    row = 0
    for t in range(1, steps + 1):
        counter = _half_i_to_r(eu, ev, p, spins, subset, m, seed, counter)
        counter = _half_r_to_i(adj_off, adj_v, adj_e, log_lam, subset, spins,
                               n, seed, counter, sc)
        if stride and t % stride == 0:
            trace[row, :] = spins
            row += 1
    return counter


def sw_wrc_run(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state,
               steps, seed, counter, trace=None, stride=0):
    m = len(eu)
    n = len(adj_off) - 1
    sc = _Scratch(n)
    spins = np.zeros(n, dtype=np.uint8)
    row = 0
    for t in range(1, steps + 1):
        counter = _half_r_to_i(adj_off, adj_v, adj_e, log_lam, state, spins,
                               n, seed, counter, sc)
        counter = _half_i_to_r(eu, ev, p, spins, state, m, seed, counter)
        if stride and t % stride == 0:
            trace[row, :] = state
            row += 1
    return counter


# ---------------------------------------------------------------------------
# grand coupling and CFTP
# ---------------------------------------------------------------------------

def _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, lzy, e, b, r, sc):
    """One grand-coupling update in place: set edge e to b, accept if
    r < min(1, ratio).  A no-op record (lzy = 0 or b equal to the current
    value) leaves the state untouched."""
    if lzy == 0:
        return
    if state[e] == b:
        return
    ratio = _wrc_flip_ratio(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, e, sc)
    if r < ratio:
        state[e] = b


def phi_apply(eu, ev, adj_off, adj_v, adj_e, p, log_lam, state, lzy, e, b, r):
    """Public phi on a copy; returns the new state."""
    out = np.array(state, dtype=np.uint8, copy=True)
    sc = _Scratch(len(adj_off) - 1)
    _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, out, lzy, e, b, r, sc)
    return out


def _tape_record(seed, counter, m):
    """Draw one randomness record (lazy bit, edge, value bit, real).

    All four components are always drawn so a record's content never depends
    on how it is consumed.
    """
    lzy, counter = _bit(seed, counter)
    e, counter = _below(seed, counter, m)
    b, counter = _bit(seed, counter)
    r, counter = _double(seed, counter)
    return lzy, e, b, r, counter


def cftp_run(eu, ev, adj_off, adj_v, adj_e, p, log_lam, seed, max_pow=30):
    """Coupling from the past for the WRC flipping dynamics.

    Doubling schedule T = 1, 2, 4, ..., 2**max_pow; each round replays the
    same backward tape (record j drives the step from time -(j+1)) into the
    all-empty and all-full bounding chains.  Returns (state, T*, counter);
    T* = -1 flags no coalescence by the largest T.
    """
    m = len(eu)
    n = len(adj_off) - 1
    sc = _Scratch(n)
    cap = 1
    ell = np.zeros(cap, dtype=np.uint8)
    eidx = np.zeros(cap, dtype=np.int32)
    bval = np.zeros(cap, dtype=np.uint8)
    rval = np.zeros(cap, dtype=np.float64)
    filled = 0
    counter = 0
    xmin = np.zeros(m, dtype=np.uint8)
    xmax = np.zeros(m, dtype=np.uint8)
    t_cap = 1
    for _ in range(max_pow + 1):
        if t_cap > cap:
            cap = t_cap
            ell = np.resize(ell, cap)
            eidx = np.resize(eidx, cap)
            bval = np.resize(bval, cap)
            rval = np.resize(rval, cap)
        while filled < t_cap:
            lzy, e, b, r, counter = _tape_record(seed, counter, m)
            ell[filled] = lzy
            eidx[filled] = e
            bval[filled] = b
            rval[filled] = r
            filled += 1
        xmin[:] = 0
        xmax[:] = 1
        for j in range(t_cap - 1, -1, -1):
            _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, xmin,
                 ell[j], eidx[j], bval[j], rval[j], sc)
            _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, xmax,
                 ell[j], eidx[j], bval[j], rval[j], sc)
        if np.array_equal(xmin, xmax):
            return xmin, t_cap, counter
        t_cap *= 2
    return xmin, -1, counter


def monotone_trials(eu, ev, adj_off, adj_v, adj_e, p, log_lam, trials, seed,
                    counter=0):
    """Random comparable pairs and records; counts order violations of phi.

    Per trial: per-edge bit pairs (a, b) give the pair (a&b, a|b), then one
    full record.  Returns (violations, counter).
    """
    m = len(eu)
    sc = _Scratch(len(adj_off) - 1)
    lo = np.zeros(m, dtype=np.uint8)
    hi = np.zeros(m, dtype=np.uint8)
    violations = 0
    for _ in range(trials):
        for e in range(m):
            a, counter = _bit(seed, counter)
            b, counter = _bit(seed, counter)
            lo[e] = a & b
            hi[e] = a | b
        lzy, e, b, r, counter = _tape_record(seed, counter, m)
        _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, lo, lzy, e, b, r, sc)
        _phi(eu, ev, adj_off, adj_v, adj_e, p, log_lam, hi, lzy, e, b, r, sc)
        for e in range(m):
            if lo[e] > hi[e]:
                violations += 1
                break
    return violations, counter
