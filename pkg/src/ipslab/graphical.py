"""Poisson event streams and the stochastic flow they generate.

An event stream is a realization of the Poisson point set on
(map instances) x (0, T]: global event times arrive at the model's total
rate and each event picks an instance with probability proportional to its
rate.  Evolving a configuration applies the chosen maps in time order;
running the arrows backward gives relevance sets and duals.
"""

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from . import localmaps as lm
from .rng import make_rng


@dataclass
class EventStream:
    model: object
    T: float
    times: np.ndarray      # strictly increasing, in (0, T]
    ids: np.ndarray        # instance index per event
    seed: object = None

    def __len__(self):
        return len(self.times)

    def restrict(self, s, u):
        """Events with times in (s, u]."""
        lo = bisect_right(self.times, s)
        hi = bisect_right(self.times, u)
        return EventStream(self.model, self.T, self.times[lo:hi],
                           self.ids[lo:hi], self.seed)

    def rows(self):
        """(time, map_kind, site_params...) rows for the event CSV dump."""
        out = []
        for t, k in zip(self.times, self.ids):
            m = self.model.instances[k]
            out.append((float(t), m.kind) + tuple(m.sites))
        return out


def sample_events(model, T, seed=None, rng=None):
    """Global-clock sampling: Poisson(r*T) times, categorical instances."""
    if rng is None:
        rng = make_rng(seed)
    r = model.total_rate
    n = rng.poisson(r * T) if r > 0 and T > 0 else 0
    times = np.sort(rng.random(n)) * T
    probs = model.rates / r if r > 0 else None
    ids = rng.choice(len(model.instances), size=n, p=probs) if n else np.empty(0, np.int64)
    return EventStream(model, T, times.astype(np.float64), ids.astype(np.int64), seed)


def sample_events_per_instance(model, T, seed=None, rng=None):
    """Independent Poisson process per instance; same law as sample_events."""
    if rng is None:
        rng = make_rng(seed)
    times_all, ids_all = [], []
    for k, r in enumerate(model.rates):
        n = rng.poisson(r * T)
        times_all.append(rng.random(n) * T)
        ids_all.append(np.full(n, k, dtype=np.int64))
    times = np.concatenate(times_all) if times_all else np.empty(0)
    ids = np.concatenate(ids_all) if ids_all else np.empty(0, np.int64)
    order = np.argsort(times, kind="stable")
    return EventStream(model, T, times[order], ids[order], seed)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list          # configurations at `times`
    model: object


def _check_alphabet(model, x):
    from .lattice import validate_config
    validate_config(model.lattice, x, model.alphabet)


def evolve(x0, events, sample_times):
    """Apply the event maps in time order; record states at sample_times.

    States are right-continuous: the state at a sample time u includes all
    events with time <= u.
    """
    model = events.model
    _check_alphabet(model, x0)
    pinned = model.lattice.pinned if model.lattice.pinned.any() else None
    x = np.array(x0, dtype=np.int8)
    sample_times = np.asarray(sample_times, dtype=np.float64)
    if len(sample_times) and (sample_times.min() < 0 or sample_times.max() > events.T):
        raise ValueError("sample times outside [0, T]")
    if (np.diff(sample_times) < 0).any():
        raise ValueError("sample times must be nondecreasing")
    out = []
    k = 0
    for u in sample_times:
        hi = bisect_right(events.times, u)
        while k < hi:
            lm.apply_map(model.instances[events.ids[k]], x, pinned)
            k += 1
        out.append(x.copy())
    return Trajectory(sample_times, out, model)


def evolve_states(x0, events):
    """All intermediate states: states[k] is the state after k events."""
    model = events.model
    _check_alphabet(model, x0)
    pinned = model.lattice.pinned if model.lattice.pinned.any() else None
    x = np.array(x0, dtype=np.int8)
    states = [x.copy()]
    for k in range(len(events)):
        lm.apply_map(model.instances[events.ids[k]], x, pinned)
        states.append(x.copy())
    return states


def evolve_fliprate(model, x0, T, sample_times, seed=None, rng=None):
    """Uniformized evolution of a state-dependent flip-rate model.

    Each dynamic site carries a rate-1 clock; at a ring the new value is
    drawn from the model's flip distribution (which may keep the old one).
    """
    if rng is None:
        rng = make_rng(seed)
    _check_alphabet(model, x0)
    lat = model.lattice
    dyn = lat.unpinned
    alphabet = np.asarray(model.alphabet, dtype=np.int8)
    x = np.array(x0, dtype=np.int8)
    rate = float(len(dyn))
    sample_times = np.asarray(sample_times, dtype=np.float64)
    out = []
    t = 0.0
    ptr = 0
    while True:
        t_next = t + rng.exponential(1.0 / rate) if rate > 0 else np.inf
        while ptr < len(sample_times) and sample_times[ptr] < t_next:
            out.append(x.copy())
            ptr += 1
        if ptr >= len(sample_times) or t_next > T:
            break
        t = t_next
        i = int(dyn[rng.integers(len(dyn))])
        p = model.flip_distribution(x, i)
        x[i] = alphabet[rng.choice(len(alphabet), p=p)]
    while ptr < len(sample_times):
        out.append(x.copy())
        ptr += 1
    return Trajectory(sample_times, out, model)


# -- backward relevance -------------------------------------------------------

def relevance_set(events, A, u, s):
    """Sites at time s whose value can influence the sites A at time u.

    Backward sweep over the events in (s, u]: at an event with map m, each
    tracked site in D(m) is replaced by its relevance set.
    """
    if not 0 <= s <= u:
        raise ValueError("need 0 <= s <= u")
    model = events.model
    xi = set(int(a) for a in A)
    lo = bisect_right(events.times, s)
    hi = bisect_right(events.times, u)
    for k in range(hi - 1, lo - 1, -1):
        m = model.instances[events.ids[k]]
        dom = lm.domain(m)
        hit = [i for i in dom if i in xi]
        if hit:
            for i in hit:
                xi.discard(i)
            for i in hit:
                xi.update(lm.relevance(m, i))
    return frozenset(xi)


def relevance_profile(events, A, u, s_list):
    """|zeta^{A,u}_s| for several s in one backward sweep."""
    model = events.model
    s_list = sorted(s_list, reverse=True)
    xi = set(int(a) for a in A)
    sizes = {}
    k = bisect_right(events.times, u) - 1
    for s in s_list:
        while k >= 0 and events.times[k] > s:
            m = model.instances[events.ids[k]]
            dom = lm.domain(m)
            hit = [i for i in dom if i in xi]
            if hit:
                for i in hit:
                    xi.discard(i)
                for i in hit:
                    xi.update(lm.relevance(m, i))
            k -= 1
        sizes[s] = len(xi)
    return sizes


# -- open paths in additive representations ------------------------------------

def _check_encodable(model, mode):
    flag = "additive" if mode == "additive" else "cancellative"
    for m in set(model.instances):
        if not lm.classify(m)[flag]:
            raise ValueError(f"map {m} is not {flag}")


def open_path_reach(events, sources, t, _arrowcache=None):
    """Sites reachable from sources x {0} by open paths up to time t.

    Encodes each event as arrows plus blocking symbols and sweeps forward:
    at an event, a site keeps its token unless blocked, and receives one
    along every arrow from a tokened site.  Only valid when every map in
    the model is additive.
    """
    model = events.model
    _check_encodable(model, "additive")
    cache = _arrowcache if _arrowcache is not None else {}
    reach = set(int(i) for i in sources)
    hi = bisect_right(events.times, t)
    for k in range(hi):
        mid = int(events.ids[k])
        if mid not in cache:
            cache[mid] = lm.arrows_blocks(model.instances[mid])
        arrows, blocks = cache[mid]
        if not reach.intersection(lm.support(model.instances[mid])):
            continue
        incoming = [j for i, j in arrows if i in reach]
        for b in blocks:
            reach.discard(b)
        reach.update(incoming)
    return frozenset(reach)


# -- duals driven by the same events -------------------------------------------

def dual_evolve(events, y0, mode="additive", dual_instances=None):
    """Run the reversed-arrow flow over the same event times.

    Returns states[k] = dual configuration after consuming the last k
    events (in descending time order), so states[n] corresponds to dual
    time t when the stream has n events on (0, t].
    """
    from .duality import dual_map
    model = events.model
    if dual_instances is None:
        dual_instances = [dual_map(m, mode) for m in model.instances]
    pinned = model.lattice.pinned if model.lattice.pinned.any() else None
    y = np.array(y0, dtype=np.int8)
    states = [y.copy()]
    for k in range(len(events) - 1, -1, -1):
        lm.apply_map(dual_instances[events.ids[k]], y, pinned)
        states.append(y.copy())
    return states


# -- couplings -----------------------------------------------------------------

@dataclass
class CouplingSpec:
    """Two models driven by shared randomness.

    pair[k] is the instance of model_b applied together with instance k of
    model_a (-1 for none); extras are instances of model_b with their own
    rates, applied to b alone.  `check(xa, xb)` is the order assertion,
    evaluated after every event.
    """
    model_a: object
    model_b: object
    pair: np.ndarray
    extra_ids: np.ndarray
    extra_rates: np.ndarray
    check: object

    def __post_init__(self):
        self.pair = np.asarray(self.pair, dtype=np.int64)
        self.extra_ids = np.asarray(self.extra_ids, dtype=np.int64)
        self.extra_rates = np.asarray(self.extra_rates, dtype=np.float64)
        if (self.extra_rates < 0).any():
            raise ValueError("extra rates must be nonnegative")


@dataclass
class CouplingResult:
    ok: bool
    n_events: int
    violation_time: float = None
    xa: np.ndarray = None
    xb: np.ndarray = None


def coupled_evolve(spec, x0a, x0b, T, seed=None, rng=None):
    """Evolve both models on merged shared + extra events, checking order."""
    if rng is None:
        rng = make_rng(seed)
    a, b = spec.model_a, spec.model_b
    pin_a = a.lattice.pinned if a.lattice.pinned.any() else None
    pin_b = b.lattice.pinned if b.lattice.pinned.any() else None
    rates = np.concatenate([a.rates, spec.extra_rates])
    total = rates.sum()
    n = rng.poisson(total * T)
    times = np.sort(rng.random(n)) * T
    which = rng.choice(len(rates), size=n, p=rates / total) if n else []
    xa = np.array(x0a, dtype=np.int8)
    xb = np.array(x0b, dtype=np.int8)
    na = len(a.instances)
    if not spec.check(xa, xb):
        return CouplingResult(False, 0, 0.0, xa, xb)
    for t, k in zip(times, which):
        if k < na:
            lm.apply_map(a.instances[k], xa, pin_a)
            if spec.pair[k] >= 0:
                lm.apply_map(b.instances[spec.pair[k]], xb, pin_b)
        else:
            lm.apply_map(b.instances[spec.extra_ids[k - na]], xb, pin_b)
        if not spec.check(xa, xb):
            return CouplingResult(False, int(n), float(t), xa, xb)
    return CouplingResult(True, int(n), None, xa, xb)


# -- ready-made couplings ------------------------------------------------------

def _instance_index(model):
    return {(m.kind, m.sites): k for k, m in enumerate(model.instances)}


def coupling_contact_rates(lat, lam, lam2, delta=1.0):
    """Contact processes with lam <= lam2 sharing events (X <= X')."""
    from .models import contact
    if lam > lam2:
        raise ValueError("need lam <= lam2")
    a = contact(lat, lam, delta)
    b = contact(lat, lam2, delta)
    idx_b = _instance_index(b)
    pair = np.array([idx_b[(m.kind, m.sites)] for m in a.instances])
    extra_ids, extra_rates = [], []
    if lam2 > lam:
        for k, m in enumerate(b.instances):
            if m.kind == "bra":
                extra_ids.append(k)
                extra_rates.append(lam2 - lam)
    return CouplingSpec(a, b, pair, np.array(extra_ids), np.array(extra_rates),
                        lambda xa, xb: bool(np.all(xa <= xb)))


def coupling_ann_coal(lat):
    """Annihilating walks below coalescing walks on shared jump events."""
    from .models import annihilating_rw, coalescing_rw
    a = annihilating_rw(lat)
    b = coalescing_rw(lat)
    idx_b = _instance_index(b)
    pair = np.array([idx_b[("rw", m.sites)] for m in a.instances])
    return CouplingSpec(a, b, pair, np.array([], dtype=int), np.array([]),
                        lambda xa, xb: bool(np.all(xa <= xb)))


def adjacent_pairs(x):
    """x^(2): indicator of two adjacent occupied sites on a ring."""
    return (x & np.roll(x, -1)).astype(np.int8)


def coupling_coop_doubledeath(lat, lam):
    """Cooperative branching X dominating a double-death contact process Y.

    Shared events: coop_{i,i+s,i+2s} pairs with the adjacent-pair branching
    it induces, death_i with the double death clearing the two pairs that
    contain i.  The order assertion is Y <= X^(2).
    """
    from .models import coop_branch_1d, contact_double_death
    a = coop_branch_1d(lat, lam)
    b = contact_double_death(lat, lam)
    L = lat.n_sites
    idx_b = _instance_index(b)
    pair = np.empty(len(a.instances), dtype=np.int64)
    for k, m in enumerate(a.instances):
        if m.kind == "coop":
            i, mid, tgt = m.sites
            sig = 1 if (i + 1) % L == mid else -1
            if sig == 1:
                pair[k] = idx_b[("bra", (i, (i + 1) % L))]
            else:
                pair[k] = idx_b[("bra", ((i - 1) % L, (i - 2) % L))]
        else:  # death_i clears pair indices i-1 and i
            i = m.sites[0]
            pair[k] = idx_b[("death2", tuple(sorted(((i - 1) % L, i))))]
    return CouplingSpec(a, b, pair, np.array([], dtype=int), np.array([]),
                        lambda xa, xb: bool(np.all(xb <= adjacent_pairs(xa))))


def coupling_dim_embed(lat1, lat2, lam, delta=1.0):
    """1d contact process embedded in the first row of a 2d torus."""
    from .models import contact
    if lat1.kind != "torus" or lat1.dim != 1 or lat2.dim != 2:
        raise ValueError("expects a ring and a 2d torus")
    L = lat1.n_sites
    if lat2.sides[1] != L:
        raise ValueError("row length mismatch")
    a = contact(lat1, lam, delta)
    b = contact(lat2, lam, delta)
    embed = [lat2.site((0, i)) for i in range(L)]
    idx_b = _instance_index(b)
    pair = np.empty(len(a.instances), dtype=np.int64)
    for k, m in enumerate(a.instances):
        if m.kind == "bra":
            i, j = m.sites
            pair[k] = idx_b[("bra", (embed[i], embed[j]))]
        else:
            pair[k] = idx_b[("death", (embed[m.sites[0]],))]
    shared_b = set(int(p) for p in pair)
    extra_ids = [k for k in range(len(b.instances)) if k not in shared_b]
    extra_rates = [b.rates[k] for k in extra_ids]
    row = np.array(embed)

    def check(xa, xb):
        return bool(np.all(xa <= xb[row]))

    return CouplingSpec(a, b, pair, np.array(extra_ids), np.array(extra_rates), check)
