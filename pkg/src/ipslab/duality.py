"""Dual maps, duality functions, and exact duality checks.

Additive duality uses the disjointness indicator psi_0, cancellative
duality the mod-2 overlap parity, and both are special cases of
psi_q(x,y) = q^<x,y>.  Dual maps come from reversing the arrows of the
arrow/block encoding; generator-level q-duality is checked on small
lattices by assembling the full generator matrix, and pathwise duality is
asserted exactly along simulated event streams.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import localmaps as lm
from . import graphical
from .rng import make_rng


# -- duality functions ---------------------------------------------------------

def overlap(x, y):
    return int(np.sum((np.asarray(x) != 0) & (np.asarray(y) != 0)))


def psi0(x, y):
    """Disjointness indicator 1{x ^ y = 0}."""
    return 1 if overlap(x, y) == 0 else 0


def parity(x, y):
    """Mod-2 overlap <<x, y>>."""
    return overlap(x, y) & 1


def psi_q(x, y, q):
    """q^<x,y> with the convention 0^0 = 1."""
    if not -1 <= q < 1:
        raise ValueError("q in [-1, 1)")
    n = overlap(x, y)
    if q == 0:
        return 1.0 if n == 0 else 0.0
    return float(q) ** n


# -- dual maps -----------------------------------------------------------------

_CATALOG_FACTORIES = {
    "vot": lambda s: lm.vot(*s),
    "bra": lambda s: lm.bra(*s),
    "death": lambda s: lm.death(*s),
    "death2": lambda s: lm.death2(*s),
    "rw": lambda s: lm.rw(*s),
    "ann": lambda s: lm.ann(*s),
    "excl": lambda s: lm.excl(*s),
    "kill": lambda s: lm.kill(*s),
    "bran": lambda s: lm.bran(*s),
}


def dual_map(m, mode="additive", verify=True, match=True):
    """Dual of an additive (cancellative) map: arrows reversed, blocks kept.

    The defining relation -- disjointness (parity) of the image against y
    equals disjointness (parity) of x against the dual image -- is verified
    by exhaustion over the joint support.  When the dual coincides with a
    catalog map it is returned in catalog form.
    """
    if mode not in ("additive", "cancellative"):
        raise ValueError("mode is 'additive' or 'cancellative'")
    flags = lm.classify(m)
    if not flags["additive" if mode == "additive" else "cancellative"]:
        raise ValueError(f"{m} is not {mode}")
    arrows, blocks = lm.arrows_blocks(m)
    rev = tuple((j, i) for i, j in arrows)
    dual = (lm.encoded_additive(rev, blocks) if mode == "additive"
            else lm.encoded_cancellative(rev, blocks))
    if verify:
        _verify_map_duality(m, dual, mode)
    if match:
        matched = match_catalog(dual)
        if matched is not None:
            return matched
    return dual


def match_catalog(m):
    """Catalog map with the same action as m, if any (two-site kinds)."""
    sup = lm.support(m)
    if len(sup) > 3:
        return None
    candidates = []
    if len(sup) == 1:
        candidates.append(lm.death(sup[0]))
    for a in sup:
        for b in sup:
            if a == b:
                continue
            for kind in ("vot", "bra", "rw", "ann", "excl", "kill", "bran", "death2"):
                candidates.append(_CATALOG_FACTORIES[kind]((a, b)))
    for cand in candidates:
        if lm.maps_equal(m, cand):
            return cand
    return None


def _verify_map_duality(m, dual, mode):
    psi = psi0 if mode == "additive" else parity
    sup = sorted(set(lm.support(m)) | set(lm.support(dual)))
    n = len(sup)
    if n > 12:
        raise ValueError("joint support too large for exhaustive verification")
    top = (max(sup) + 1) if sup else 1
    for xb in range(1 << n):
        x = np.zeros(top, dtype=np.int8)
        for k, s in enumerate(sup):
            x[s] = (xb >> k) & 1
        mx = lm.applied(m, x)
        for yb in range(1 << n):
            y = np.zeros(top, dtype=np.int8)
            for k, s in enumerate(sup):
                y[s] = (yb >> k) & 1
            if psi(mx, y) != psi(x, lm.applied(dual, y)):
                raise AssertionError(f"duality relation fails for {m} at x={x}, y={y}")


def dual_model(model, mode="additive"):
    """Same rates, dualized instances."""
    from .models import ModelSpec
    duals = [dual_map(m, mode, verify=False) for m in model.instances]
    return ModelSpec(model.name + "_dual", model.lattice, model.alphabet,
                     duals, model.rates.copy(), dict(model.params))


# -- generator matrices ---------------------------------------------------------

MAX_STATES = 4096


def _enumerate_states(n_sites, alphabet):
    n_states = len(alphabet) ** n_sites
    if n_states > MAX_STATES:
        raise ValueError(f"state space size {n_states} exceeds {MAX_STATES}")
    states = []
    for code in range(n_states):
        x = np.empty(n_sites, dtype=np.int8)
        c = code
        for i in range(n_sites):
            x[i] = alphabet[c % len(alphabet)]
            c //= len(alphabet)
        states.append(x)
    return states


def _state_code(x, alphabet):
    lookup = {v: k for k, v in enumerate(alphabet)}
    code = 0
    for i in range(len(x) - 1, -1, -1):
        code = code * len(alphabet) + lookup[int(x[i])]
    return code


def generator_matrix(model, exact=False):
    """Dense generator over the full configuration space (rows sum to 0).

    With exact=True the entries are Fractions of the given rates (rates
    must then be integers or Fractions).
    """
    alphabet = model.alphabet
    states = _enumerate_states(model.lattice.n_sites, alphabet)
    pinned = model.lattice.pinned if model.lattice.pinned.any() else None
    n = len(states)
    if exact:
        G = [[Fraction(0) for _ in range(n)] for _ in range(n)]
    else:
        G = np.zeros((n, n))
    for m, r in zip(model.instances, model.rates):
        rr = Fraction(r).limit_denominator(10 ** 12) if exact else r
        for code, x in enumerate(states):
            y = lm.applied(m, x, pinned)
            code2 = _state_code(y, alphabet)
            if code2 != code:
                if exact:
                    G[code][code2] += rr
                    G[code][code] -= rr
                else:
                    G[code, code2] += rr
                    G[code, code] -= rr
    return G, states


def psi_q_matrix(states, q, exact=False):
    n = len(states)
    if exact:
        qf = Fraction(q).limit_denominator(10 ** 12)
        return [[qf ** overlap(states[a], states[b]) for b in range(n)]
                for a in range(n)]
    M = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            M[a, b] = psi_q(states[a], states[b], q)
    return M


def generator_duality_residual(G, Gp, Psi):
    """max |G Psi - Psi Gp^T| over all configuration pairs."""
    if isinstance(G, np.ndarray):
        if G.shape != Psi.shape or Gp.shape != Psi.shape:
            raise ValueError("dimension mismatch")
        return float(np.abs(G @ Psi - Psi @ Gp.T).max())
    n = len(G)
    worst = Fraction(0)
    for a in range(n):
        for b in range(n):
            lhs = sum(G[a][c] * Psi[c][b] for c in range(n))
            rhs = sum(Psi[a][c] * Gp[b][c] for c in range(n))
            worst = max(worst, abs(lhs - rhs))
    return worst


# -- pathwise duality -----------------------------------------------------------

@dataclass
class PathwiseReport:
    passed: bool
    n_seeds: int
    mode: str
    counterexample: dict = None


def pathwise_duality_assert(model, mode, T, seeds, x0_law, y0_law, master_seed=0,
                            dual_instances=None):
    """Exact pathwise duality along simulated event streams.

    For every seed, with X run forward and the dual Y run down the reversed
    stream, psi(X after k events, Y after n-k dual events) must not depend
    on k.  x0_law / y0_law are callables rng -> configuration.
    """
    psi = psi0 if mode == "additive" else parity
    if dual_instances is None:
        dual_instances = [dual_map(m, mode, verify=False) for m in model.instances]
    for s in range(seeds):
        rng = make_rng(master_seed, s)
        x0 = x0_law(rng)
        y0 = y0_law(rng)
        events = graphical.sample_events(model, T, rng=rng)
        xs = graphical.evolve_states(x0, events)
        ys = graphical.dual_evolve(events, y0, mode, dual_instances)
        n = len(events)
        vals = [psi(xs[k], ys[n - k]) for k in range(n + 1)]
        if any(v != vals[0] for v in vals):
            k_bad = next(k for k, v in enumerate(vals) if v != vals[0])
            return PathwiseReport(False, s + 1, mode, {
                "seed": s, "k": k_bad, "x0": x0, "y0": y0,
                "events": events.rows(),
            })
    return PathwiseReport(True, seeds, mode)


# -- contact-voter extinction identity -------------------------------------------

@dataclass
class ExtinctionIdentity:
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    q: float

    @property
    def gap_sigmas(self):
        se = max(np.hypot(self.lhs_se, self.rhs_se), 1e-12)
        return abs(self.lhs - self.rhs) / se


def covo_extinction_identity(lam, gamma, L, y_sites, T, replicas, master_seed=0):
    """Both sides of the upper-invariant-law identity for the contact-voter
    model on a ring: the q-moment of the law started from all ones against
    the extinction probability started from y, q = gamma/(gamma+lam).
    """
    from .kernels import covo_ring_overlap, covo_ring_extinct
    from .rng import kernel_seeds
    q = gamma / (gamma + lam)
    y = np.zeros(L, dtype=np.uint8)
    y[list(y_sites)] = 1
    seeds1 = kernel_seeds(master_seed, replicas, 1)
    seeds2 = kernel_seeds(master_seed, replicas, 2)
    vals = np.empty(replicas)
    ext = np.empty(replicas)
    for k in range(replicas):
        ov = covo_ring_overlap(L, lam, gamma, T, seeds1[k], y)
        vals[k] = q ** ov
        ext[k] = covo_ring_extinct(L, lam, gamma, T, seeds2[k], y)
    return ExtinctionIdentity(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(replicas)),
                              float(ext.mean()), float(ext.std(ddof=1) / np.sqrt(replicas)),
                              q)
