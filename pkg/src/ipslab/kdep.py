"""Domination of K-dependent Bernoulli fields by i.i.d. fields.

A K-dependent field (each variable independent of everything outside a
size-K neighborhood) with success probability >= p is coupled below by an
i.i.d. Bernoulli(p_tilde) field, p_tilde = (1 - (1-p)^(1/K))^2, via
thinning with rate r = 1 - (1-p)^(1/K) followed by a sequential
uniform-threshold construction whose conditional probabilities never drop
below p_tilde.

The construction is made fully constructive by restricting to fields whose
variables are deterministic functions of independent finite-alphabet
window variables; the conditional probabilities are then computed exactly
by a forward filter that enumerates the posterior over the live window
variables.  Two such fields are provided: the product chain chi_n =
phi_n phi_{n+1}, and the block good-event field of a one-dimensional
contact graphical representation with binned first-arrow / first-recovery
/ last-recovery summaries.
"""

import math
from dataclasses import dataclass

import numpy as np

from .rng import make_rng


def kdep_parameters(p, K):
    """(r, p_tilde) of the domination; requires p_tilde >= 1/4.

    p = 1 degenerates to r = p_tilde = 1 (nothing is thinned away).
    """
    if not 0 < p <= 1:
        raise ValueError("p in (0,1]")
    r = 1.0 - (1.0 - p) ** (1.0 / K)
    pt = r * r
    if pt < 0.25:
        raise ValueError(f"p_tilde = {pt:.4f} < 1/4: the domination needs "
                         f"p >= 1 - 2^-K = {1 - 2.0 ** -K:.4f}")
    return r, pt


@dataclass
class KdepResult:
    p: float
    K: int
    r: float
    p_tilde: float
    chi: np.ndarray
    chi_prime: np.ndarray
    chi_tilde: np.ndarray
    conditionals: np.ndarray

    @property
    def min_conditional(self):
        return float(self.conditionals.min())

    def layers_ordered(self):
        return bool(np.all(self.chi_tilde <= self.chi_prime)
                    and np.all(self.chi_prime <= self.chi))

    def chisq_pvalue(self):
        """Chi-square on disjoint consecutive pairs of chi_tilde against the
        i.i.d. Bernoulli(p_tilde) pair law."""
        from scipy.stats import chi2
        x = self.chi_tilde
        n2 = len(x) // 2
        a, b = x[0:2 * n2:2], x[1:2 * n2:2]
        counts = np.array([np.sum((a == va) & (b == vb))
                           for va in (0, 1) for vb in (0, 1)], dtype=float)
        pt = self.p_tilde
        probs = np.array([(1 - pt) ** 2, (1 - pt) * pt, pt * (1 - pt), pt * pt])
        expected = probs * n2
        stat = float(((counts - expected) ** 2 / expected).sum())
        return float(chi2.sf(stat, df=3))


# -- field 1: the product chain chi_n = phi_n phi_{n+1} ---------------------------

@dataclass
class ProductChainField:
    """phi_n i.i.d. Bernoulli(sqrt(p)); chi_n = phi_n phi_{n+1}; K = 3."""
    p: float
    n: int

    @property
    def K(self):
        return 3

    def sample_chi(self, rng):
        s = math.sqrt(self.p)
        phi = (rng.random(self.n + 1) < s).astype(np.uint8)
        return (phi[:-1] & phi[1:]).astype(np.uint8)

    def conditionals(self, chi_prime, r):
        """Exact P[chi'_n = 1 | chi'_0..chi'_{n-1}], by filtering the
        posterior of the forward variable phi_n."""
        s = math.sqrt(self.p)
        out = np.empty(self.n)
        p1 = s
        for k in range(self.n):
            pg = p1 * s
            out[k] = r * pg
            if chi_prime[k]:
                p1 = 1.0
            else:
                p1 = s * (1.0 - r * p1) / (1.0 - r * pg)
        return out


# -- field 2: contact good events with binned windows ------------------------------

@dataclass
class ContactBlockField:
    """Binned good-event field of a 1d contact graphical representation.

    Per block: A+- = bin of the first outgoing arrow (0 = none in the
    window), F = bin of the first recovery mark on the block column; per
    column shared between adjacent blocks: L = bin of the last recovery
    mark.  A bond is open when the arrow exists, the own column is clean
    up to it, and the shared column is clean from it on; the bin
    tie-breaking is strict, so the open probability is
    (1 - exp(-lam T)) exp(-T (B+1)/B), increasing to the unbinned value.
    Sibling bonds share F, facing bonds of adjacent blocks share L: K = 3.
    """
    lam: float
    T: float
    bins: int
    levels: int
    width: int

    @property
    def K(self):
        return 3

    @property
    def p(self):
        B = self.bins
        return (1.0 - math.exp(-self.lam * self.T)) * math.exp(-self.T * (B + 1) / B)

    @property
    def n(self):
        return 2 * self.levels * self.width

    def _priors(self):
        B, T, lam = self.bins, self.T, self.lam
        pa = np.empty(B + 1)
        pf = np.empty(B + 1)
        pl = np.empty(B + 1)
        pa[0] = math.exp(-lam * T)
        pf[0] = math.exp(-T)
        pl[0] = math.exp(-T)
        for b in range(1, B + 1):
            pa[b] = math.exp(-lam * T * (b - 1) / B) - math.exp(-lam * T * b / B)
            pf[b] = math.exp(-T * (b - 1) / B) - math.exp(-T * b / B)
            pl[b] = math.exp(-T * (B - b) / B) - math.exp(-T * (B - b + 1) / B)
        return pa, pf, pl

    def _g_tables(self):
        """g as boolean arrays: gm over (Lleft, F, A), gp over (F, A, Lright)."""
        B = self.bins
        if (B + 1) ** 3 > 10 ** 6:
            raise ValueError("window joint too large for exact enumeration")
        idx = np.arange(B + 1)
        A = idx[None, None, :]
        F = idx[None, :, None]
        Lf = idx[:, None, None]
        ok_own = (F == 0) | (F > A)
        ok_shared = (Lf == 0) | (Lf < A)
        gm = (A > 0) & ok_own & ok_shared
        gp = np.moveaxis(gm, 0, 2)   # (F, A, Lright)
        return gm.astype(float), gp.astype(float)

    def sample_chi(self, rng):
        """chi in filter order: levels outer, blocks inner, (minus, plus)."""
        pa, pf, pl = self._priors()
        B, W = self.bins, self.width
        chi = np.empty(self.n, dtype=np.uint8)
        k = 0
        for _ in range(self.levels):
            Lv = rng.choice(B + 1, size=W + 1, p=pl)
            Fv = rng.choice(B + 1, size=W, p=pf)
            Am = rng.choice(B + 1, size=W, p=pa)
            Ap = rng.choice(B + 1, size=W, p=pa)
            for b in range(W):
                chi[k] = _g_scalar(Lv[b], Fv[b], Am[b])
                chi[k + 1] = _g_scalar(Lv[b + 1], Fv[b], Ap[b])
                k += 2
        return chi

    def conditionals(self, chi_prime, r):
        """Exact conditionals by a per-level forward filter.

        Levels use disjoint time slabs and are independent, so the filter
        state (a posterior over the pending shared column summary, then
        over the block's own column summary) resets per level.
        """
        pa, pf, pl = self._priors()
        gm, gp = self._g_tables()
        W = self.width
        out = np.empty(self.n)
        k = 0
        for _ in range(self.levels):
            q = pl.copy()                       # posterior over left shared column
            for b in range(W):
                w = q[:, None, None] * pf[None, :, None] * pa[None, None, :]
                pg = float((w * gm).sum())
                out[k] = r * pg
                lik = r * gm if chi_prime[k] else 1.0 - r * gm
                w = w * lik
                qf = w.sum(axis=(0, 2))
                qf /= qf.sum()
                k += 1
                w = qf[:, None, None] * pa[None, :, None] * pl[None, None, :]
                pg = float((w * gp).sum())
                out[k] = r * pg
                lik = r * gp if chi_prime[k] else 1.0 - r * gp
                w = w * lik
                q = w.sum(axis=(0, 1))
                q /= q.sum()
                k += 1
        return out


def _g_scalar(lv, fv, av):
    return 1 if (av > 0 and (fv == 0 or fv > av) and (lv == 0 or lv < av)) else 0


# -- the coupling --------------------------------------------------------------------

def kdep_couple(field, master_seed=0):
    """Three coupled layers chi >= chi' >= chi_tilde on one realization.

    chi is simulated from the field's window variables; chi' thins it with
    i.i.d. Bernoulli(r) marks; the uniforms U_n are reconstructed
    consistently with the exact conditionals (U_n < p'_n iff chi'_n = 1),
    and chi_tilde_n = 1{U_n < p_tilde} is i.i.d. Bernoulli(p_tilde)
    because the conditionals are exact.
    """
    r, pt = kdep_parameters(field.p, field.K)
    rng = make_rng(master_seed, 47)
    chi = field.sample_chi(rng)
    psi = (rng.random(len(chi)) < r).astype(np.uint8)
    chi_prime = chi & psi
    cond = field.conditionals(chi_prime, r)
    if cond.min() < pt - 1e-12:
        raise AssertionError(f"conditional {cond.min()} below p_tilde {pt}")
    v = rng.random(len(chi))
    u = np.where(chi_prime == 1, v * cond, cond + v * (1.0 - cond))
    chi_tilde = (u < pt).astype(np.uint8)
    return KdepResult(field.p, field.K, r, pt, chi, chi_prime, chi_tilde, cond)
