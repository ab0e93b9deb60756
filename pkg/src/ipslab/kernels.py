"""Numba kernels for the heavy Monte Carlo paths.

Every kernel is a pure function of its arguments including a uint64 stream
seed (splitmix64 inside), so replicas are reproducible and independent of
thread count.  Kernels release the GIL; the estimators module runs them
from a thread pool.
"""

import math

import numpy as np
from numba import njit

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True, nogil=True, inline="always")
def _u01(s):
    """splitmix64 step; returns (state, uniform in [0,1))."""
    s = s + _GOLD
    z = s
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return s, (z >> _S11) * _INV53


@njit(cache=True, nogil=True, inline="always")
def _exp1(s):
    s, u = _u01(s)
    return s, -math.log1p(-u)


@njit(cache=True, nogil=True, inline="always")
def _randint(s, n):
    s, u = _u01(s)
    k = int(u * n)
    if k >= n:
        k = n - 1
    return s, k


# -- mean-field density chains --------------------------------------------------
# family ids follow meanfield.FAMILIES:
# 0 ising, 1 contact, 2 voter, 3 voter_speed, 4 coop_death, 5 coop_rw,
# 6 biased_voter_death, 7 np_two_alpha

@njit(cache=True, nogil=True)
def meanfield_chain(family, N, params, x0, T, sample_ts, seed):
    beta = params[0]
    lam = params[1]
    b = params[2]
    s_bias = params[3]
    d_death = params[4]
    a01 = params[5]
    a10 = params[6]
    jump = 2.0 / N if family == 0 else 1.0 / N
    lo = -1.0 if family == 0 else 0.0
    hi = 1.0
    n_out = sample_ts.shape[0]
    out = np.empty(n_out, dtype=np.float64)
    ptr = 0
    x = x0
    t = 0.0
    state = seed
    while ptr < n_out:
        if family == 0:
            ep = math.exp(0.5 * beta * x)
            em = math.exp(-0.5 * beta * x)
            rp = N * (1.0 - x) / 2.0 * ep / (ep + em)
            rm = N * (1.0 + x) / 2.0 * em / (ep + em)
        elif family == 1:
            rp = lam * N * x * (1.0 - x)
            rm = N * x
        elif family == 2:
            rp = N * x * (1.0 - x)
            rm = rp
        elif family == 3:
            rp = N * N * x * (1.0 - x)
            rm = rp
        elif family == 4:
            rp = b * N * x * x * (1.0 - x)
            rm = N * x
        elif family == 5:
            rp = b * N * x * x * (1.0 - x)
            rm = x * max(N * x - 1.0, 0.0)
        elif family == 6:
            rp = N * N * x * (1.0 - x) + s_bias * N * x * (1.0 - x)
            rm = N * N * x * (1.0 - x) + d_death * N * x
        else:
            rp = N * (1.0 - x) * x * ((1.0 - x) + a01 * x)
            rm = N * x * (1.0 - x) * (x + a10 * (1.0 - x))
        rate = rp + rm
        if rate <= 0.0:
            t_next = np.inf
        else:
            state, e = _exp1(state)
            t_next = t + e / rate
        while ptr < n_out and sample_ts[ptr] < t_next:
            out[ptr] = x
            ptr += 1
        if t_next > T:
            while ptr < n_out:
                out[ptr] = x
                ptr += 1
            break
        t = t_next
        state, u = _u01(state)
        if u * rate < rp:
            x += jump
        else:
            x -= jump
        if x < lo:
            x = lo
        if x > hi:
            x = hi
    return out


# -- contact process on a ring ---------------------------------------------------

@njit(cache=True, nogil=True)
def contact_ring_coupled(L, lams, delta, T, seed, single):
    """Nested coupling of contact processes at every rate in `lams`.

    All processes share death events and branching events carry a uniform
    rate mark, so the realized processes are pointwise ordered in lambda.
    Starts from a single infected origin (single=True) or all ones.
    Returns (survived flags, final counts, truncated flag).
    """
    k = lams.shape[0]
    lam_env = lams[k - 1]
    per_site = delta + 2.0 * lam_env
    x = np.zeros((k, L), dtype=np.uint8)
    cnt = np.zeros(k, dtype=np.int64)
    inf_list = np.empty(L, dtype=np.int64)
    pos = np.full(L, -1, dtype=np.int64)
    origin = L // 2
    n_env = 0
    if single:
        for p in range(k):
            x[p, origin] = 1
            cnt[p] = 1
        inf_list[0] = origin
        pos[origin] = 0
        n_env = 1
    else:
        for p in range(k):
            for i in range(L):
                x[p, i] = 1
            cnt[p] = L
        for i in range(L):
            inf_list[i] = i
            pos[i] = i
        n_env = L
    truncated = 0
    half = L // 2
    state = seed
    t = 0.0
    while n_env > 0:
        state, e = _exp1(state)
        t += e / (n_env * per_site)
        if t > T:
            break
        state, idx = _randint(state, n_env)
        i = inf_list[idx]
        state, u = _u01(state)
        if u * per_site < delta:
            # shared death event at i
            for p in range(k):
                if x[p, i] == 1:
                    x[p, i] = 0
                    cnt[p] -= 1
            last = inf_list[n_env - 1]
            inf_list[idx] = last
            pos[last] = idx
            pos[i] = -1
            n_env -= 1
        else:
            state, u = _u01(state)
            if u < 0.5:
                j = i + 1 if i + 1 < L else 0
            else:
                j = i - 1 if i > 0 else L - 1
            state, u = _u01(state)
            mark = u * lam_env
            for p in range(k - 1, -1, -1):
                if lams[p] < mark:
                    break
                if x[p, i] == 1 and x[p, j] == 0:
                    x[p, j] = 1
                    cnt[p] += 1
                    if p == k - 1:
                        inf_list[n_env] = j
                        pos[j] = n_env
                        n_env += 1
                        if single:
                            disp = j - origin
                            if disp < 0:
                                disp = -disp
                            if L - disp < disp:
                                disp = L - disp
                            if disp >= half:
                                truncated = 1
    survived = np.empty(k, dtype=np.uint8)
    for p in range(k):
        survived[p] = 1 if cnt[p] > 0 else 0
    return survived, cnt, truncated


@njit(cache=True, nogil=True)
def contact_ring_density(L, lam, delta, T, sample_ts, seed, x0):
    """Single contact process from x0; densities at sample times + final state."""
    per_site = delta + 2.0 * lam
    x = np.zeros(L, dtype=np.uint8)
    inf_list = np.empty(L, dtype=np.int64)
    pos = np.full(L, -1, dtype=np.int64)
    n_inf = 0
    for i in range(L):
        if x0[i] == 1:
            x[i] = 1
            inf_list[n_inf] = i
            pos[i] = n_inf
            n_inf += 1
    n_out = sample_ts.shape[0]
    out = np.empty(n_out, dtype=np.int64)
    ptr = 0
    t = 0.0
    state = seed
    while True:
        if n_inf > 0:
            state, e = _exp1(state)
            t_next = t + e / (n_inf * per_site)
        else:
            t_next = np.inf
        while ptr < n_out and sample_ts[ptr] < t_next:
            out[ptr] = n_inf
            ptr += 1
        if ptr >= n_out:
            break
        if t_next > T:
            while ptr < n_out:
                out[ptr] = n_inf
                ptr += 1
            break
        t = t_next
        state, idx = _randint(state, n_inf)
        i = inf_list[idx]
        state, u = _u01(state)
        if u * per_site < delta:
            x[i] = 0
            last = inf_list[n_inf - 1]
            inf_list[idx] = last
            pos[last] = idx
            pos[i] = -1
            n_inf -= 1
        else:
            state, u = _u01(state)
            if u < 0.5:
                j = i + 1 if i + 1 < L else 0
            else:
                j = i - 1 if i > 0 else L - 1
            if x[j] == 0:
                x[j] = 1
                inf_list[n_inf] = j
                pos[j] = n_inf
                n_inf += 1
    return out, x


# -- contact-voter mixture on a ring ----------------------------------------------

@njit(cache=True, nogil=True)
def covo_ring_final(L, lam, gamma, T, seed, x0, stop_on_zero):
    """Contact-voter model by full uniformization; returns (final state,
    1 if the process hit the empty configuration)."""
    c = 1.0 + 2.0 * lam + 2.0 * gamma
    x = x0.copy()
    n1 = 0
    for i in range(L):
        n1 += x[i]
    t = 0.0
    state = seed
    extinct = 1 if n1 == 0 else 0
    while True:
        if extinct == 1 and stop_on_zero:
            break
        state, e = _exp1(state)
        t += e / (L * c)
        if t > T:
            break
        state, i = _randint(state, L)
        state, u = _u01(state)
        r = u * c
        jr = i + 1 if i + 1 < L else 0
        jl = i - 1 if i > 0 else L - 1
        if r < 1.0:
            if x[i] == 1:
                x[i] = 0
                n1 -= 1
        elif r < 1.0 + lam:
            if x[i] == 1 and x[jr] == 0:
                x[jr] = 1
                n1 += 1
        elif r < 1.0 + 2.0 * lam:
            if x[i] == 1 and x[jl] == 0:
                x[jl] = 1
                n1 += 1
        elif r < 1.0 + 2.0 * lam + gamma:
            if x[jr] != x[i]:
                n1 += 1 if x[i] == 1 else -1
                x[jr] = x[i]
        else:
            if x[jl] != x[i]:
                n1 += 1 if x[i] == 1 else -1
                x[jl] = x[i]
        if n1 == 0:
            extinct = 1
    return x, extinct


@njit(cache=True, nogil=True)
def covo_ring_overlap(L, lam, gamma, T, seed, y):
    x0 = np.ones(L, dtype=np.uint8)
    x, _ = covo_ring_final(L, lam, gamma, T, seed, x0, False)
    ov = 0
    for i in range(L):
        if x[i] == 1 and y[i] == 1:
            ov += 1
    return ov


@njit(cache=True, nogil=True)
def covo_ring_extinct(L, lam, gamma, T, seed, y0):
    _, extinct = covo_ring_final(L, lam, gamma, T, seed, y0.copy(), True)
    return extinct


# -- spin dynamics on a frozen-boundary square ------------------------------------

@njit(cache=True, nogil=True)
def glauber2d_frozen(L, beta, T, burn, seed, boundary_value):
    """Two-state spin dynamics on an L x L box, outer shell pinned.

    Starts from all spins equal to the boundary value.  Returns the
    time-averaged center spin over (burn, T].
    """
    x = np.full(L * L, boundary_value, dtype=np.int8)
    n_side = L - 2
    n_int = n_side * n_side
    # total set-up + set-down rate is 2 per interior site
    tanh_tab = np.empty(5, dtype=np.float64)
    for k in range(5):
        m = 2 * k - 4
        tanh_tab[k] = 0.5 * (1.0 + math.tanh(0.5 * beta * m))
    center = (L // 2) * L + (L // 2)
    t = 0.0
    acc = 0.0
    state = seed
    total = 2.0 * n_int
    while True:
        state, e = _exp1(state)
        t_next = t + e / total
        if t_next > T:
            t_next = T
        if t_next > burn:
            t0 = t if t > burn else burn
            acc += x[center] * (t_next - t0)
        if t_next >= T:
            break
        t = t_next
        state, idx = _randint(state, n_int)
        r = 1 + idx // n_side
        c = 1 + idx % n_side
        i = r * L + c
        mag = x[i - L] + x[i + L] + x[i - 1] + x[i + 1]
        state, u = _u01(state)
        if u < tanh_tab[(mag + 4) // 2]:
            x[i] = 1
        else:
            x[i] = -1
    return acc / (T - burn)


# -- voter models ------------------------------------------------------------------

@njit(cache=True, nogil=True)
def voter_ring_final(L, T, seed, x0):
    """Nearest-neighbor voter model on a ring; per-site update rate 1."""
    x = x0.copy()
    t = 0.0
    state = seed
    while True:
        state, e = _exp1(state)
        t += e / L
        if t > T:
            break
        state, j = _randint(state, L)
        state, u = _u01(state)
        if u < 0.5:
            i = j + 1 if j + 1 < L else 0
        else:
            i = j - 1 if j > 0 else L - 1
        x[j] = x[i]
    return x


@njit(cache=True, nogil=True)
def voter3d_final(L, T, seed, x0):
    """Nearest-neighbor voter model on an L^3 torus; update rate 1 per site."""
    n = L * L * L
    x = x0.copy()
    t = 0.0
    state = seed
    while True:
        state, e = _exp1(state)
        t += e / n
        if t > T:
            break
        state, j = _randint(state, n)
        a = j // (L * L)
        rem = j % (L * L)
        b = rem // L
        c = rem % L
        state, d = _randint(state, 6)
        if d == 0:
            a2, b2, c2 = (a + 1) % L, b, c
        elif d == 1:
            a2, b2, c2 = (a - 1) % L, b, c
        elif d == 2:
            a2, b2, c2 = a, (b + 1) % L, c
        elif d == 3:
            a2, b2, c2 = a, (b - 1) % L, c
        elif d == 4:
            a2, b2, c2 = a, b, (c + 1) % L
        else:
            a2, b2, c2 = a, b, (c - 1) % L
        x[j] = x[(a2 * L + b2) * L + c2]
    return x
