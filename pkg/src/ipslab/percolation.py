"""Oriented bond percolation and the contact-process comparison.

Bonds live on the upward arrow set of Z^d restricted to a box: from each
site one bond per axis, open independently with probability p.  Survival
is measured as reaching l1-level n.  The contact comparison builds the
block good events of a one-dimensional graphical representation: a bond is
open when an infection arrow leaves the block's column soon enough and no
recovery mark cuts the implied space-time path.
"""

import math
from dataclasses import dataclass

import numpy as np

from .rng import make_rng, kernel_seeds
from .estimators import wilson_ci


@dataclass
class BondField:
    d: int
    box: tuple               # sites per axis: coordinates 0..box[a]-1
    p: float
    open_bonds: dict         # axis -> bool array of shape box (last row unused)
    seed: object = None

    def is_open(self, i, axis):
        return bool(self.open_bonds[axis][tuple(i)])

    def rows(self):
        out = []
        for axis, arr in self.open_bonds.items():
            for idx in np.ndindex(*arr.shape):
                out.append(tuple(int(v) for v in idx) + (axis, int(arr[idx])))
        return out


def sample_bond_field(d, box, p, seed=None, rng=None):
    if not 0 <= p <= 1:
        raise ValueError("p in [0,1]")
    if rng is None:
        rng = make_rng(seed)
    if np.isscalar(box):
        box = (int(box),) * d
    open_bonds = {a: rng.random(box) < p for a in range(d)}
    return BondField(d, tuple(box), p, open_bonds, seed)


def reachable(field, origin=None):
    """Sites reachable from the origin along open upward bonds (BFS)."""
    origin = tuple([0] * field.d) if origin is None else tuple(origin)
    box = field.box
    seen = {origin}
    frontier = [origin]
    while frontier:
        nxt = []
        for site in frontier:
            for a in range(field.d):
                if site[a] + 1 >= box[a]:
                    continue
                if field.open_bonds[a][site]:
                    tgt = tuple(site[k] + (1 if k == a else 0) for k in range(field.d))
                    if tgt not in seen:
                        seen.add(tgt)
                        nxt.append(tgt)
        frontier = nxt
    return seen


def survives_to_level(field, n, origin=None):
    """Does an open path from the origin reach l1-level n?"""
    for site in reachable(field, origin):
        if sum(site) >= n:
            return True
    return False


def _survival_2d_batch(p, n, replicas, rng):
    """Vectorized level sweep for d=2: all replicas at once.

    reach[r, i] flags site (i, level - i) wet at the current level; bonds
    are generated lazily per level.
    """
    reach = np.zeros((replicas, n + 1), dtype=bool)
    reach[:, 0] = True
    for level in range(n):
        width = level + 1
        b_ax0 = rng.random((replicas, width)) < p   # (i,j) -> (i+1,j)
        b_ax1 = rng.random((replicas, width)) < p   # (i,j) -> (i,j+1)
        nxt = np.zeros((replicas, n + 1), dtype=bool)
        cur = reach[:, :width]
        nxt[:, 1:width + 1] |= cur & b_ax0
        nxt[:, :width] |= cur & b_ax1
        reach = nxt
        if not reach.any():
            break
    return reach.any(axis=1)


def percolation_theta(d, p, n, replicas, master_seed=0):
    """Estimated probability of reaching level n, with a Wilson CI."""
    if n < 1 or replicas < 1:
        raise ValueError("n, replicas >= 1")
    rng = make_rng(master_seed, 41)
    if d == 2:
        flags = _survival_2d_batch(p, n, replicas, rng)
        wins = int(flags.sum())
    else:
        wins = 0
        for k in range(replicas):
            field = sample_bond_field(d, (n + 1,) * d, p, rng=rng)
            if survives_to_level(field, n):
                wins += 1
    lo, hi = wilson_ci(wins, replicas)
    return {"p": p, "n": n, "replicas": replicas,
            "survived_fraction": wins / replicas, "ci_low": lo, "ci_high": hi}


def peierls_bound(p, m):
    """Tail sum over blocking contours: sum_{n >= 2m} n 3^n (1-p)^(n/2).

    Converges exactly when 3 sqrt(1-p) < 1, i.e. p > 8/9; the value bounds
    the probability that no infinite open path leaves the m-box.  Uses the
    closed form of the derived geometric series.
    """
    if not 0 <= p <= 1 or m < 0:
        raise ValueError("need p in [0,1], m >= 0")
    r = 3.0 * math.sqrt(1.0 - p)
    if r >= 1.0:
        return math.inf
    N = 2 * m
    # sum_{n>=N} n r^n = r^N (N - (N-1) r) / (1-r)^2
    return r ** N * (N - (N - 1) * r) / (1.0 - r) ** 2


def peierls_bound_direct(p, m, terms=10000):
    """Direct partial summation, for cross-checking the closed form."""
    r = 3.0 * math.sqrt(1.0 - p)
    if r >= 1.0:
        return math.inf
    return float(sum(n * r ** n for n in range(2 * m, 2 * m + terms)))


def minimal_percolating_m(p, threshold=1.0):
    """Smallest m with peierls_bound(p, m) < threshold, certifying that the
    m-box reaches infinity with positive probability."""
    if peierls_bound(p, 0) == math.inf:
        return None
    m = 0
    while peierls_bound(p, m) >= threshold:
        m += 1
        if m > 10 ** 6:
            return None
    return m


# -- contact process to percolation comparison ---------------------------------

@dataclass
class GoodEventField:
    """Block good events of a 1d contact graphical representation.

    Level ell uses times (ell*T, (ell+1)*T]; block columns at level ell
    are the kappa of matching parity.  chi_plus[ell, b] says the block at
    column kappa(ell, b) connects to column kappa+1, chi_minus to kappa-1.
    """
    lam: float
    T: float
    levels: int
    width: int
    kappa0: int
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    arrow_times: dict        # (col, +1/-1) -> sorted times
    death_times: dict        # col -> sorted times

    def kappa(self, level, b):
        return self.kappa0 + 2 * b + (level % 2)

    @property
    def p_theory(self):
        return (1.0 - math.exp(-self.lam * self.T)) * math.exp(-self.T)

    def empirical_p(self):
        return float((self.chi_plus.mean() + self.chi_minus.mean()) / 2.0)

    def bond_rows(self):
        out = []
        for ell in range(self.levels):
            for b in range(self.width):
                out.append((ell, b, +1, int(self.chi_plus[ell, b])))
                out.append((ell, b, -1, int(self.chi_minus[ell, b])))
        return out


def contact_to_percolation(lam, T_block, levels, width, master_seed=0):
    """Simulate the graphical representation and evaluate the good events.

    Good event toward kappa +/- 1: the first arrow out of the block column
    in that direction comes before T_block, with no recovery marks on the
    column before the arrow nor on the target column after it.
    """
    rng = make_rng(master_seed, 43)
    ncols = 2 * width + 4
    total_T = levels * T_block
    arrow_times = {}
    death_times = {}
    for c in range(ncols):
        death_times[c] = np.sort(rng.random(rng.poisson(total_T)) * total_T)
        for sig in (+1, -1):
            n = rng.poisson(lam * total_T)
            arrow_times[(c, sig)] = np.sort(rng.random(n) * total_T)
    chi_p = np.zeros((levels, width), dtype=np.uint8)
    chi_m = np.zeros((levels, width), dtype=np.uint8)
    for ell in range(levels):
        t0 = ell * T_block
        t1 = t0 + T_block
        for b in range(width):
            kap = 2 + 2 * b + (ell % 2)
            for sig, chi in ((+1, chi_p), (-1, chi_m)):
                arr = arrow_times[(kap, sig)]
                k = np.searchsorted(arr, t0, side="right")
                if k >= len(arr) or arr[k] >= t1:
                    continue
                tau = arr[k]
                own = death_times[kap]
                if np.searchsorted(own, tau, side="right") - np.searchsorted(own, t0, side="right") > 0:
                    continue
                tgt = death_times[kap + sig]
                if np.searchsorted(tgt, t1, side="right") - np.searchsorted(tgt, tau, side="right") > 0:
                    continue
                chi[ell, b] = 1
    return GoodEventField(lam, T_block, levels, width, 2, chi_p, chi_m,
                          arrow_times, death_times)


def verify_open_bond_paths(field, max_checks=None):
    """Independent check: every open bond admits an open contact path.

    Sweeps all arrows and recovery marks of the bond's time slab in time
    order, propagating reachability from the block column, and demands the
    target column be reachable at the end of the slab.  Returns the number
    of bonds checked; raises on the first violation.
    """
    checked = 0
    for ell in range(field.levels):
        t0 = ell * field.T
        t1 = t0 + field.T
        for b in range(field.width):
            kap = field.kappa(ell, b) - field.kappa0 + 2
            for sig, chi in ((+1, field.chi_plus), (-1, field.chi_minus)):
                if not chi[ell, b]:
                    continue
                if not _contact_reaches(field, kap, kap + sig, t0, t1):
                    raise AssertionError(
                        f"open bond without open path: level {ell}, block {b}, dir {sig}")
                checked += 1
                if max_checks is not None and checked >= max_checks:
                    return checked
    return checked


def _contact_reaches(field, src, tgt, t0, t1):
    cols = sorted(field.death_times)
    events = []
    for c in cols:
        dt = field.death_times[c]
        for t in dt[(dt > t0) & (dt <= t1)]:
            events.append((t, 0, c, 0))
        for sig in (+1, -1):
            at = field.arrow_times[(c, sig)]
            for t in at[(at > t0) & (at <= t1)]:
                events.append((t, 1, c, sig))
    events.sort()
    reach = {src}
    for t, kind, c, sig in events:
        if kind == 0:
            reach.discard(c)
        else:
            if c in reach and 0 <= c + sig < len(cols):
                reach.add(c + sig)
    return tgt in reach


def dependence_scan(field, distance=3):
    """Chi-square independence statistics among bonds of one level.

    Same-block sibling bonds share the column's early recovery marks and
    should be correlated; bonds `distance` blocks apart share nothing and
    should pass independence at the 1% level.
    """
    from scipy.stats import chi2_contingency
    a = field.chi_plus[:, :-distance].ravel()
    b = field.chi_minus[:, distance:].ravel()
    table_far = _pair_table(a, b)
    res_far = chi2_contingency(table_far)
    sib = _pair_table(field.chi_plus.ravel(), field.chi_minus.ravel())
    res_sib = chi2_contingency(sib)
    corr = np.corrcoef(field.chi_plus.ravel(), field.chi_minus.ravel())[0, 1]
    return {"far_pvalue": float(res_far.pvalue),
            "sibling_pvalue": float(res_sib.pvalue),
            "sibling_corr": float(corr)}


def _pair_table(a, b):
    tab = np.zeros((2, 2))
    for va in (0, 1):
        for vb in (0, 1):
            tab[va, vb] = np.sum((a == va) & (b == vb))
    return np.maximum(tab, 0.5)
