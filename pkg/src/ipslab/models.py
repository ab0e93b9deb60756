"""Model builders: rate-weighted families of local maps.

Two generator encodings coexist.  Most models are fixed-rate map families
(ModelSpec); the q-state spin dynamics is kept in state-dependent flip-rate
form (FlipRateModel) and sampled by uniformization, because writing it as a
fixed-rate family is only convenient for two states.  The two-state spin
model is built BOTH ways and cross-validated in the tests.

Rate conventions follow the generators they implement:
  contact            bra_ij at rate lam per ordered edge, death_i at delta
  voter              vot_ij at rate 1/|N0| per ordered edge
  biased_voter       voter plus bra_ij at rate s/|N0|
  contact_voter      bra at lam, vot at gamma per ordered edge, death at 1
  ising_glauber      threshold spin maps m+-_{i,L} with telescoping rates
  coalescing_rw etc. rate 1/|N0| per ordered edge
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import localmaps as lm
from .lattice import ALPHA01, ALPHAPM, regular_degree


@dataclass
class ModelSpec:
    name: str
    lattice: object
    alphabet: tuple
    instances: list
    rates: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rates = np.asarray(self.rates, dtype=np.float64)
        if len(self.instances) != len(self.rates):
            raise ValueError("instances and rates length mismatch")
        if (self.rates < 0).any() or not np.isfinite(self.rates).all():
            raise ValueError("rates must be nonnegative and finite")

    @property
    def total_rate(self):
        return float(self.rates.sum())

    def __repr__(self):
        return (f"ModelSpec({self.name}, {self.lattice.kind}, "
                f"{len(self.instances)} instances, total rate {self.total_rate:g})")


@dataclass
class FlipRateModel:
    """State-dependent single-site flip rates, sampled by uniformization.

    Each site updates at rate 1; at an update the new value is drawn from
    flip_distribution(x, i), which may put mass on the current value.
    """
    name: str
    lattice: object
    alphabet: tuple
    params: dict

    def flip_distribution(self, x, i):
        raise NotImplementedError

    @property
    def total_rate(self):
        return float(len(self.lattice.unpinned))


def _ordered_edges(lat):
    for i in range(lat.n_sites):
        for j in lat.neighbor_lists[i]:
            yield i, int(j)


def _dynamic(lat, m):
    """Keep an instance only if it can write at least one unpinned site."""
    return any(not lat.pinned[i] for i in lm.domain(m))


def _spec(name, lat, alphabet, pairs, params):
    inst, rates = [], []
    for m, r in pairs:
        if r > 0 and _dynamic(lat, m):
            inst.append(m)
            rates.append(r)
    return ModelSpec(name, lat, alphabet, inst, np.array(rates), params)


# -- two-state models ---------------------------------------------------------

def contact(lat, lam, delta=1.0):
    """Infection at rate lam per ordered edge, recovery at rate delta."""
    if lam < 0 or delta < 0:
        raise ValueError("rates must be nonnegative")
    pairs = [(lm.bra(i, j), lam) for i, j in _ordered_edges(lat)]
    pairs += [(lm.death(i), delta) for i in range(lat.n_sites)]
    return _spec("contact", lat, ALPHA01, pairs, {"lam": lam, "delta": delta})


def voter(lat):
    deg = regular_degree(lat)
    pairs = [(lm.vot(i, j), 1.0 / deg) for i, j in _ordered_edges(lat)]
    return _spec("voter", lat, ALPHA01, pairs, {})


def biased_voter(lat, s):
    if s < 0:
        raise ValueError("bias must be nonnegative")
    deg = regular_degree(lat)
    pairs = [(lm.vot(i, j), 1.0 / deg) for i, j in _ordered_edges(lat)]
    pairs += [(lm.bra(i, j), s / deg) for i, j in _ordered_edges(lat)]
    return _spec("biased_voter", lat, ALPHA01, pairs, {"s": s})


def contact_voter(lat, lam, gamma):
    """Mixture of contact and voter dynamics (death rate pinned to 1)."""
    if lam < 0 or gamma < 0:
        raise ValueError("rates must be nonnegative")
    pairs = [(lm.bra(i, j), lam) for i, j in _ordered_edges(lat)]
    pairs += [(lm.vot(i, j), gamma) for i, j in _ordered_edges(lat)]
    pairs += [(lm.death(i), 1.0) for i in range(lat.n_sites)]
    return _spec("contact_voter", lat, ALPHA01, pairs, {"lam": lam, "gamma": gamma})


def coalescing_rw(lat):
    deg = regular_degree(lat)
    pairs = [(lm.rw(i, j), 1.0 / deg) for i, j in _ordered_edges(lat)]
    return _spec("coalescing_rw", lat, ALPHA01, pairs, {})


def annihilating_rw(lat):
    deg = regular_degree(lat)
    pairs = [(lm.ann(i, j), 1.0 / deg) for i, j in _ordered_edges(lat)]
    return _spec("annihilating_rw", lat, ALPHA01, pairs, {})


def exclusion(lat):
    deg = regular_degree(lat)
    pairs = [(lm.excl(i, j), 1.0 / deg) for i, j in _ordered_edges(lat)]
    return _spec("exclusion", lat, ALPHA01, pairs, {})


def babp(lat, lam):
    """Biased annihilating branching process: branching plus killing.

    The defining display carries a typographical duplication (":=" twice);
    read as the sum of the branching term at rate lam and the killing term
    at rate 1.
    """
    pairs = [(lm.bra(i, j), lam) for i, j in _ordered_edges(lat)]
    pairs += [(lm.kill(i, j), 1.0) for i, j in _ordered_edges(lat)]
    return _spec("babp", lat, ALPHA01, pairs, {"lam": lam})


def annihilating_branching(lat, lam=1.0, delta=1.0):
    """Cancellative model: mod-2 branching plus deaths."""
    pairs = [(lm.bran(i, j), lam) for i, j in _ordered_edges(lat)]
    pairs += [(lm.death(i), delta) for i in range(lat.n_sites)]
    return _spec("annihilating_branching", lat, ALPHA01, pairs,
                 {"lam": lam, "delta": delta})


def _ring_check(lat):
    if lat.dim != 1 or lat.kind != "torus":
        raise ValueError("this builder is one-dimensional (ring)")


def coop_branch_1d(lat, lam):
    """Cooperative branching on a ring: pairs spawn outward, deaths at 1."""
    _ring_check(lat)
    L = lat.n_sites
    pairs = []
    for i in range(L):
        for sig in (1, -1):
            pairs.append((lm.coop(i, (i + sig) % L, (i + 2 * sig) % L), lam))
    pairs += [(lm.death(i), 1.0) for i in range(L)]
    return _spec("coop_branch_1d", lat, ALPHA01, pairs, {"lam": lam})


def contact_double_death(lat, lam):
    """Contact process whose deaths clear two adjacent sites at once."""
    _ring_check(lat)
    L = lat.n_sites
    pairs = []
    for i in range(L):
        for sig in (1, -1):
            pairs.append((lm.bra(i, (i + sig) % L), lam))
    pairs += [(lm.death2(i, (i + 1) % L), 1.0) for i in range(L)]
    return _spec("contact_double_death", lat, ALPHA01, pairs, {"lam": lam})


def neuhauser_pacala(lat, alpha):
    """Balancing-selection voter variant, in voter + rebel map form.

    Site i copies a uniform neighbor at rate alpha, and flips whenever an
    unordered pair of its neighbors disagrees, at rate (1-alpha)/|N_i|^2
    per pair.  At alpha = 1 this is the standard voter model.  The flip
    rates reproduce   0->1: f1 (f0 + alpha f1),  1->0: f0 (f1 + alpha f0).
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha in [0,1]")
    deg = regular_degree(lat)
    pairs = []
    for i in range(lat.n_sites):
        if lat.pinned[i]:
            continue
        nbrs = lat.neighbor_lists[i]
        for j in nbrs:
            pairs.append((lm.vot(int(j), i), alpha / deg))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                pairs.append((lm.rebel(int(nbrs[a]), int(nbrs[b]), i),
                              (1.0 - alpha) / deg ** 2))
    return _spec("neuhauser_pacala", lat, ALPHA01, pairs, {"alpha": alpha})


def threshold_voter(lat):
    """Threshold voter model via even-subset mod-2 maps.

    Site i flips at rate 1 whenever its neighborhood (including itself) is
    not unanimous; represented as maps m_{delta,i} over the even subsets of
    N_i + {i}, each at rate 2^(1-|N_i|).
    """
    deg = regular_degree(lat)
    rate = 2.0 ** (1 - deg)
    pairs = []
    for i in range(lat.n_sites):
        if lat.pinned[i]:
            continue
        pool = sorted(set(int(j) for j in lat.neighbor_lists[i]) | {i})
        for mask in range(1 << len(pool)):
            subset = [pool[k] for k in range(len(pool)) if (mask >> k) & 1]
            if len(subset) % 2 == 0 and subset:
                pairs.append((lm.threshold_map(i, subset), rate))
            elif not subset:
                continue  # empty subset is the identity map
    return _spec("threshold_voter", lat, ALPHA01, pairs, {})


# -- spin models --------------------------------------------------------------

def glauber_rate_up(beta, mag):
    """Total rate of setting a spin to +1 at neighborhood magnetization mag."""
    return 1.0 + math.tanh(0.5 * beta * mag)


def ising_glauber(lat, beta):
    """Two-state spin dynamics as a fixed-rate family of threshold maps.

    For each site, levels L = -N, -N+2, ..., N get maps that set the spin
    up (down) when the neighbor magnetization reaches L, with telescoping
    rates so the total set-to-+1 rate at magnetization M is 1 + tanh(bM/2).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    N = regular_degree(lat)
    th = lambda v: math.tanh(0.5 * beta * v)
    pairs = []
    for i in range(lat.n_sites):
        if lat.pinned[i]:
            continue
        neigh = lat.neighbor_lists[i]
        for L in range(-N, N + 1, 2):
            r_up = (1.0 + th(-N)) if L == -N else th(L) - th(L - 2)
            r_dn = (1.0 - th(N)) if L == N else th(L + 2) - th(L)
            pairs.append((lm.glauber_plus(i, L, neigh), r_up))
            pairs.append((lm.glauber_minus(i, L, neigh), r_dn))
    return _spec("ising_glauber", lat, ALPHAPM, pairs, {"beta": beta})


class PottsGlauber(FlipRateModel):
    """q-state spin dynamics in direct flip-rate form.

    At an update of site i, the new value sigma is drawn with probability
    exp(beta * n_sigma) / sum_tau exp(beta * n_tau) where n_sigma counts
    neighbors of i in state sigma.
    """

    def __init__(self, lat, q, beta):
        if q < 2:
            raise ValueError("q >= 2")
        super().__init__("potts_glauber", lat, tuple(range(1, q + 1)),
                         {"q": q, "beta": beta})
        self.q = q
        self.beta = beta

    def flip_distribution(self, x, i):
        counts = np.zeros(self.q)
        for j in self.lattice.neighbor_lists[i]:
            counts[x[j] - 1] += 1
        w = np.exp(self.beta * (counts - counts.max()))
        return w / w.sum()


def potts_glauber(lat, q, beta):
    return PottsGlauber(lat, q, beta)


# -- cooperative variants on the complete graph --------------------------------

def coop_death_complete(lat, b):
    """Cooperative branching over unconstrained ordered triples + deaths.

    Triple sums include the i = i' diagonal (a plain branching event), so
    the density jump rate is exactly b*N*x^2*(1-x).
    """
    if lat.kind != "complete":
        raise ValueError("complete graph expected")
    n = lat.n_sites
    r = b / n ** 2
    pairs = []
    for i in range(n):
        for i2 in range(n):
            for j in range(n):
                if j != i and j != i2:
                    pairs.append((lm.coop(i, i2, j), r))
    pairs += [(lm.death(i), 1.0) for i in range(n)]
    return _spec("coop_death", lat, ALPHA01, pairs, {"b": b})


def coop_rw_complete(lat, b):
    """Cooperative branching + coalescing walk moves on the complete graph."""
    if lat.kind != "complete":
        raise ValueError("complete graph expected")
    n = lat.n_sites
    pairs = []
    r = b / n ** 2
    for i in range(n):
        for i2 in range(n):
            for j in range(n):
                if j != i and j != i2:
                    pairs.append((lm.coop(i, i2, j), r))
    for i in range(n):
        for j in range(n):
            if i != j:
                pairs.append((lm.rw(i, j), 1.0 / n))
    return _spec("coop_rw", lat, ALPHA01, pairs, {"b": b})


# -- summability constants ----------------------------------------------------

def summability_constants(model):
    """K0, K, K1 from the rate/relevance sums, maximized over sites.

    K0 sums the rates of maps writing a site; K weights each by
    |R_i(m)| - 1 (negative K certifies ergodicity); K1 by |R_i(m)|.
    Relevance sets are the definition-true ones from the maps module.
    """
    lat = model.lattice
    k0 = np.zeros(lat.n_sites)
    kk = np.zeros(lat.n_sites)
    k1 = np.zeros(lat.n_sites)
    for m, r in zip(model.instances, model.rates):
        for i in lm.domain(m):
            if lat.pinned[i]:
                continue
            nrel = len(lm.relevance(m, i))
            k0[i] += r
            kk[i] += r * (nrel - 1)
            k1[i] += r * nrel
    dyn = ~lat.pinned
    return {"K0": float(k0[dyn].max()), "K": float(kk[dyn].max()),
            "K1": float(k1[dyn].max())}
