"""Monte Carlo observables.

Replica plans derive every replica's randomness from (master seed, replica
index), results are collected in replica order, and aggregation uses
numpy's pairwise summation, so estimates are bit-identical regardless of
the worker-pool size.  Survival at a finite horizon on a finite ring is a
biased proxy for the true survival probability; every output row carries
the horizon, the box size, and the truncation fraction instead of
extrapolating.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .rng import kernel_seeds, make_rng


@dataclass
class ReplicaPlan:
    """Common bookkeeping for replica-based estimators."""
    replicas: int
    T: float
    master_seed: int = 0
    threads: int = 1
    sample_times: tuple = ()


def _map_replicas(fn, n, threads):
    """fn(k) for k = 0..n-1, results in index order."""
    if threads <= 1:
        return [fn(k) for k in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def wilson_ci(successes, n, z=1.96):
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# -- contact process survival ------------------------------------------------------

@dataclass
class SurvivalEstimate:
    lam: float
    L: int
    T: float
    replicas: int
    theta_hat: float
    ci_lo: float
    ci_hi: float
    truncated_frac: float


def survival_estimate(lam, L, T, replicas, master_seed=0, delta=1.0, threads=1):
    """Fraction of single-seed replicas still infected at the horizon."""
    if L % 2 == 0:
        raise ValueError("ring size should be odd so the origin is centered")
    rows = theta_curve([lam], L, T, replicas, master_seed, delta, threads)
    return rows[0]


def theta_curve(lams, L, T, replicas, master_seed=0, delta=1.0, threads=1):
    """Coupled survival estimates along a sorted rate grid.

    All rates ride the same nested branching marks, so the estimated curve
    is exactly nondecreasing in lambda, not just on average.
    """
    lams = np.sort(np.asarray(lams, dtype=np.float64))
    seeds = kernel_seeds(master_seed, replicas, 11)

    def run(k):
        return kernels.contact_ring_coupled(L, lams, delta, T, seeds[k], True)

    res = _map_replicas(run, replicas, threads)
    surv = np.stack([r[0] for r in res]).astype(np.int64)   # (replicas, k)
    trunc = np.array([r[2] for r in res], dtype=np.int64)
    out = []
    for ki, lam in enumerate(lams):
        wins = int(surv[:, ki].sum())
        lo, hi = wilson_ci(wins, replicas)
        out.append(SurvivalEstimate(float(lam), L, T, replicas,
                                    wins / replicas, lo, hi,
                                    float(trunc.mean())))
    return out


def lambda_c_estimate(bracket, tol, L, T, replicas, master_seed=0,
                      pilot=0.08, threads=1):
    """Bracket of the critical rate from one coupled grid scan.

    The grid spans the bracket at resolution tol; because the coupled
    curve is exactly monotone, the pilot-threshold crossing is a genuine
    interval and no re-simulation per refinement step is needed.
    """
    lo, hi = bracket
    if not lo < hi:
        raise ValueError("empty bracket")
    grid = np.arange(lo, hi + tol / 2, tol)
    rows = theta_curve(grid, L, T, replicas, master_seed, 1.0, threads)
    below = [r.lam for r in rows if r.theta_hat <= pilot]
    above = [r.lam for r in rows if r.theta_hat > pilot]
    if not below or not above:
        raise RuntimeError(f"no crossing of pilot {pilot} inside {bracket}; "
                           f"curve {[r.theta_hat for r in rows]}")
    return (max(below), min(above)), rows


# -- densities ----------------------------------------------------------------------

@dataclass
class DensityCurve:
    model: str
    t: np.ndarray
    mean: np.ndarray
    ci: np.ndarray
    extinct_frac: np.ndarray


def invariant_density(lam, L, t_grid, replicas, from_state="ones",
                      master_seed=0, delta=1.0, threads=1):
    """Mean occupation of the contact process along a time grid."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    T = float(t_grid.max())
    seeds = kernel_seeds(master_seed, replicas, 13)
    if from_state == "ones":
        x0 = np.ones(L, dtype=np.uint8)
    elif from_state == "zeros":
        x0 = np.zeros(L, dtype=np.uint8)
    else:
        x0 = np.asarray(from_state, dtype=np.uint8)

    def run(k):
        counts, _ = kernels.contact_ring_density(L, lam, delta, T, t_grid,
                                                 seeds[k], x0)
        return counts

    counts = np.stack(_map_replicas(run, replicas, threads)) / L
    mean = counts.mean(axis=0)
    se = counts.std(axis=0, ddof=1) / math.sqrt(replicas)
    return DensityCurve("contact", t_grid, mean, 1.96 * se,
                        (counts == 0).mean(axis=0))


# -- spin magnetization ---------------------------------------------------------------

BETA_C_2D = math.log(1.0 + math.sqrt(2.0))


def onsager_magnetization(beta):
    """Closed-form spontaneous magnetization of the planar two-state model."""
    if beta <= BETA_C_2D:
        return 0.0
    return (1.0 - math.sinh(beta) ** -4) ** 0.125


@dataclass
class MagnetizationEstimate:
    beta: float
    L: int
    m_hat: float
    ci: float
    onsager: float


def magnetization_frozen_boundary(beta, L, T, replicas, master_seed=0, threads=1):
    """Center-spin average on a +1 frozen-boundary box, burn-in T/2."""
    seeds = kernel_seeds(master_seed, replicas, 17)

    def run(k):
        return kernels.glauber2d_frozen(L, beta, T, T / 2, seeds[k], np.int8(1))

    vals = np.array(_map_replicas(run, replicas, threads))
    return MagnetizationEstimate(beta, L, float(vals.mean()),
                                 1.96 * float(vals.std(ddof=1) / math.sqrt(replicas)),
                                 onsager_magnetization(beta))


# -- voter clustering -----------------------------------------------------------------

@dataclass
class ClusteringStats:
    t: float
    agreement: float
    disagreement: float
    cluster_sizes: np.ndarray = None


def clustering_stats(dim, L, p, t_list, replicas, master_seed=0, threads=1):
    """Neighbor agreement statistics of the voter model from product(p).

    dim=1 runs on a ring (cluster sizes are run lengths of the final
    states), dim=3 on an L^3 torus (disagreement along positive-axis
    edges).
    """
    out = []
    for ti, t in enumerate(t_list):
        seeds = kernel_seeds(master_seed, replicas, 19, ti)

        def run(k):
            rng = make_rng(master_seed, 23, ti, k)
            if dim == 1:
                x0 = (rng.random(L) < p).astype(np.uint8)
                return kernels.voter_ring_final(L, float(t), seeds[k], x0)
            if dim == 3:
                x0 = (rng.random(L ** 3) < p).astype(np.uint8)
                return kernels.voter3d_final(L, float(t), seeds[k], x0)
            raise ValueError("dim is 1 or 3")

        finals = _map_replicas(run, replicas, threads)
        agree = []
        sizes = []
        for x in finals:
            if dim == 1:
                same = x == np.roll(x, -1)
                agree.append(same.mean())
                sizes.extend(_run_lengths(x))
            else:
                g = x.reshape(L, L, L)
                d = [(g != np.roll(g, -1, axis=a)).mean() for a in range(3)]
                agree.append(1.0 - float(np.mean(d)))
        agree = float(np.mean(agree))
        out.append(ClusteringStats(float(t), agree, 1.0 - agree,
                                   np.array(sizes) if dim == 1 else None))
    return out


def _run_lengths(x):
    """Cyclic run lengths of a ring configuration."""
    L = len(x)
    if np.all(x == x[0]):
        return [L]
    brk = np.flatnonzero(x != np.roll(x, 1))
    return list(np.diff(np.append(brk, brk[0] + L)))


# -- convergence from homogeneous initial laws -----------------------------------------

@dataclass
class HomconResult:
    decision: str          # "pass", "fail", or "degenerate"
    z_scores: dict
    density_ones: float
    density_prod: float


def homogeneous_convergence_test(lam, p, T, L, replicas, master_seed=0,
                                 threads=1, alpha=0.01):
    """Compare time-T laws from product(p) and from all ones.

    Two-sample z-tests on the density and on the pair correlations at
    distances 1 and 2; passes when none is significant at level alpha.
    If both arms are essentially extinct the comparison is vacuous and is
    reported as the degenerate regime.
    """
    grid = np.array([T])
    stats = {}
    for arm, init in (("ones", None), ("prod", p)):
        seeds = kernel_seeds(master_seed, replicas, 29, 0 if init is None else 1)

        def run(k):
            rng = make_rng(master_seed, 31, arm == "prod", k)
            x0 = (np.ones(L, dtype=np.uint8) if init is None
                  else (rng.random(L) < init).astype(np.uint8))
            _, x = kernels.contact_ring_density(L, lam, 1.0, T, grid, seeds[k], x0)
            return x

        finals = np.stack(_map_replicas(run, replicas, threads)).astype(np.float64)
        dens = finals.mean(axis=1)
        pair1 = (finals * np.roll(finals, -1, axis=1)).mean(axis=1)
        pair2 = (finals * np.roll(finals, -2, axis=1)).mean(axis=1)
        stats[arm] = (dens, pair1, pair2)

    from scipy.stats import norm
    zcrit = norm.ppf(1 - alpha / 2)
    names = ("density", "pair_dist1", "pair_dist2")
    z_scores = {}
    for name, a, b in zip(names, stats["ones"], stats["prod"]):
        se = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
        z_scores[name] = float((a.mean() - b.mean()) / se) if se > 0 else 0.0
    d_ones = float(stats["ones"][0].mean())
    d_prod = float(stats["prod"][0].mean())
    if d_ones < 2.0 / L and d_prod < 2.0 / L:
        return HomconResult("degenerate", z_scores, d_ones, d_prod)
    decision = "pass" if all(abs(z) < zcrit for z in z_scores.values()) else "fail"
    return HomconResult(decision, z_scores, d_ones, d_prod)


# -- extinction versus unbounded growth -------------------------------------------------

def extinction_growth_histogram(lam, L, T, cutoffs, replicas, master_seed=0,
                                threads=1):
    """Among surviving single-seed replicas, the frequency of |X_T| > N
    for each cutoff N: survivors are either extinct or large."""
    lams = np.array([lam])
    seeds = kernel_seeds(master_seed, replicas, 37)

    def run(k):
        s, cnt, _ = kernels.contact_ring_coupled(L, lams, 1.0, T, seeds[k], True)
        return int(cnt[0])

    counts = np.array(_map_replicas(run, replicas, threads))
    surv = counts[counts > 0]
    rows = []
    for N in cutoffs:
        frac = float((surv > N).mean()) if len(surv) else 0.0
        rows.append({"cutoff": int(N), "frac_above": frac,
                     "survivors": int(len(surv)), "replicas": replicas})
    return rows
