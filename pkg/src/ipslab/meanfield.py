"""Complete-graph limits: drift/variance functions, ODE flows, fixed
points, reduced density chains, and the Wright-Fisher diffusion.

Families and their drifts (x is the density, or the magnetization for the
spin family):

  ising               tanh(beta x / 2) - x                 on [-1, 1]
  contact             lam x (1-x) - x                      on [0, 1]
  voter               0   (ordinary scale; qvar 2x(1-x)/N)
  voter_speed         0   (sped-up scale;  qvar 2x(1-x))
  coop_death          b x^2 (1-x) - x
  coop_rw             b x^2 (1-x) - x^2
  biased_voter_death  s x (1-x) - d x   (sped-up voter noise underneath)
  np_two_alpha        x (1-x) ((1-a10) + (a01+a10-2) x)

The cooperative and two-parameter families' drifts are derived from the
jump rates of their density chains and validated against chain simulation
in the tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import kernel_seeds, make_rng

FAMILIES = ("ising", "contact", "voter", "voter_speed", "coop_death",
            "coop_rw", "biased_voter_death", "np_two_alpha")

_FAMILY_IDS = {name: k for k, name in enumerate(FAMILIES)}


@dataclass(frozen=True)
class DriftSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    @property
    def interval(self):
        return (-1.0, 1.0) if self.family == "ising" else (0.0, 1.0)

    def _check(self, x):
        lo, hi = self.interval
        if not lo <= x <= hi:
            raise ValueError(f"x={x} outside {self.interval}")


def drift(spec, x):
    spec._check(x)
    p = spec.params
    f = spec.family
    if f == "ising":
        return math.tanh(0.5 * p["beta"] * x) - x
    if f == "contact":
        return p["lam"] * x * (1 - x) - x
    if f in ("voter", "voter_speed"):
        return 0.0
    if f == "coop_death":
        return p["b"] * x * x * (1 - x) - x
    if f == "coop_rw":
        return p["b"] * x * x * (1 - x) - x * x
    if f == "biased_voter_death":
        return p["s"] * x * (1 - x) - p["d"] * x
    if f == "np_two_alpha":
        a01, a10 = p["a01"], p["a10"]
        return x * (1 - x) * ((1 - a10) + (a01 + a10 - 2) * x)
    raise AssertionError


def qvar(spec, N, x):
    """Quadratic-variation function of the finite-N density chain."""
    spec._check(x)
    p = spec.params
    f = spec.family
    if f == "ising":
        return (2.0 / N) * (1 - x * math.tanh(0.5 * p["beta"] * x))
    if f == "contact":
        return (p["lam"] * x * (1 - x) + x) / N
    if f == "voter":
        return 2.0 * x * (1 - x) / N
    if f == "voter_speed":
        return 2.0 * x * (1 - x)
    if f == "coop_death":
        return (p["b"] * x * x * (1 - x) + x) / N
    if f == "coop_rw":
        return (p["b"] * x * x * (1 - x) + x * x) / N
    if f == "biased_voter_death":
        return 2.0 * x * (1 - x) + (p["s"] * x * (1 - x) + p["d"] * x) / N
    if f == "np_two_alpha":
        a01, a10 = p["a01"], p["a10"]
        up = x * (1 - x) * ((1 - x) + a01 * x)
        dn = x * (1 - x) * (x + a10 * (1 - x))
        return (up + dn) / N
    raise AssertionError


def integrate_ode(spec, x0, T, step=1e-3):
    """Classical fixed-step 4th-order integration of dx/dt = drift(x).

    The trajectory is clamped to the invariant interval; a clamp larger
    than 1e-9 is reported as an error, since the drift points inward at
    the boundary for every family.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    spec._check(x0)
    lo, hi = spec.interval
    n = int(math.ceil(T / step))
    ts = np.empty(n + 1)
    xs = np.empty(n + 1)
    ts[0], xs[0] = 0.0, x0
    x = x0
    t = 0.0
    for k in range(n):
        h = min(step, T - t)
        k1 = drift(spec, x)
        k2 = drift(spec, _clamp_strict(x + 0.5 * h * k1, lo, hi))
        k3 = drift(spec, _clamp_strict(x + 0.5 * h * k2, lo, hi))
        k4 = drift(spec, _clamp_strict(x + h * k3, lo, hi))
        x = x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if x < lo or x > hi:
            if min(abs(x - lo), abs(x - hi)) > 1e-9:
                raise FloatingPointError(f"ODE left the invariant interval: x={x}")
            x = min(max(x, lo), hi)
        t += h
        ts[k + 1], xs[k + 1] = t, x
    return ts, xs


def _clamp_strict(x, lo, hi):
    return min(max(x, lo), hi)


def ode_at(spec, x0, T, step=1e-3):
    return float(integrate_ode(spec, x0, T, step)[1][-1])


def fixed_points(spec, grid_step=1e-3, tol=1e-10):
    """Zeros of the drift by sign-change scan plus bisection.

    Stability from the drift's sign on both sides (inward = stable);
    boundary roots are classified from the inward side alone.
    """
    lo, hi = spec.interval
    xs = np.linspace(lo, hi, int(round((hi - lo) / grid_step)) + 1)
    vals = np.array([drift(spec, float(x)) for x in xs])
    roots = []
    for k in range(len(xs) - 1):
        a, b = float(xs[k]), float(xs[k + 1])
        fa, fb = vals[k], vals[k + 1]
        if fa == 0.0 and (not roots or abs(roots[-1] - a) > 2 * grid_step):
            roots.append(a)
        if fa * fb < 0:
            roots.append(_bisect(lambda x: drift(spec, x), a, b, tol))
    if vals[-1] == 0.0 and (not roots or abs(roots[-1] - hi) > 2 * grid_step):
        roots.append(hi)
    out = []
    eps = max(10 * tol, 1e-7)
    for r in roots:
        left = drift(spec, max(r - eps, lo)) if r - eps >= lo else None
        right = drift(spec, min(r + eps, hi)) if r + eps <= hi else None
        if left is None:
            stab = "stable" if right < 0 else "unstable"
        elif right is None:
            stab = "stable" if left > 0 else "unstable"
        elif left > 0 and right < 0:
            stab = "stable"
        elif left < 0 and right > 0:
            stab = "unstable"
        else:
            stab = "semistable"
        out.append((float(r), stab))
    return out


def _bisect(f, a, b, tol):
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if b - a < tol:
            return m
        if fm == 0.0:
            return m
        if (fa < 0) == (fm < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def upper_fixed_point(spec):
    """Largest stable fixed point (the long-run value from high initial
    densities)."""
    pts = [r for r, s in fixed_points(spec) if s == "stable"]
    return max(pts) if pts else 0.0


def critical_exponent_fit(family, param_name, param_crit, base_params=None,
                          span=0.2, npoints=12):
    """Log-log slope of the upper fixed point just above the critical point.

    Points are log-spaced in (param - crit) in [1e-4, span]; close to the
    critical point the local slope approaches the exponent.
    """
    base = dict(base_params or {})
    eps = np.logspace(-4, math.log10(span), npoints)
    logs_x, logs_y = [], []
    for e in eps:
        base[param_name] = param_crit + e
        spec = DriftSpec(family, dict(base))
        y = upper_fixed_point(spec)
        if y > 0:
            logs_x.append(math.log(e))
            logs_y.append(math.log(y))
    if len(logs_x) < 3:
        raise RuntimeError("not enough supercritical points for the fit")
    slope = np.polyfit(logs_x, logs_y, 1)[0]
    return float(slope)


# -- reduced density chains -----------------------------------------------------

@dataclass(frozen=True)
class ReducedChain:
    """Autonomous one-dimensional jump chain of the density/magnetization.

    The chain lives on the grid {lo, lo+jump, ..., hi}; the jump rates are
    exact finite-N counts, so the chain is distributed exactly like the
    density functional of the full complete-graph process.
    """
    spec: DriftSpec
    N: int

    @property
    def jump(self):
        return 2.0 / self.N if self.spec.family == "ising" else 1.0 / self.N

    def rates(self, x):
        p = self.spec.params
        N = self.N
        f = self.spec.family
        if f == "ising":
            d = math.exp(0.5 * p["beta"] * x) + math.exp(-0.5 * p["beta"] * x)
            rp = N * (1 - x) / 2 * math.exp(0.5 * p["beta"] * x) / d
            rm = N * (1 + x) / 2 * math.exp(-0.5 * p["beta"] * x) / d
        elif f == "contact":
            rp = p["lam"] * N * x * (1 - x)
            rm = N * x
        elif f == "voter":
            rp = rm = N * x * (1 - x)
        elif f == "voter_speed":
            rp = rm = N * N * x * (1 - x)
        elif f == "coop_death":
            rp = p["b"] * N * x * x * (1 - x)
            rm = N * x
        elif f == "coop_rw":
            rp = p["b"] * N * x * x * (1 - x)
            rm = x * max(N * x - 1.0, 0.0)
        elif f == "biased_voter_death":
            rp = N * N * x * (1 - x) + p["s"] * N * x * (1 - x)
            rm = N * N * x * (1 - x) + p["d"] * N * x
        elif f == "np_two_alpha":
            rp = N * (1 - x) * x * ((1 - x) + p["a01"] * x)
            rm = N * x * (1 - x) * (x + p["a10"] * (1 - x))
        else:
            raise AssertionError
        return rp, rm


def reduced_chain(family, N, params=None):
    if N < 2:
        raise ValueError("N >= 2")
    return ReducedChain(DriftSpec(family, dict(params or {})), N)


def simulate_chain(chain, x0, T, sample_times, seed):
    """Exponential-clock simulation; returns the chain at the sample grid."""
    from .kernels import meanfield_chain
    fam = _FAMILY_IDS[chain.spec.family]
    p = chain.spec.params
    params = np.array([p.get("beta", 0.0), p.get("lam", 0.0), p.get("b", 0.0),
                       p.get("s", 0.0), p.get("d", 0.0), p.get("a01", 0.0),
                       p.get("a10", 0.0)], dtype=np.float64)
    sample_times = np.asarray(sample_times, dtype=np.float64)
    return meanfield_chain(fam, chain.N, params, float(x0), float(T),
                           sample_times, np.uint64(seed))


def chain_paths(family, params, N, x0, T, replicas, master_seed=0, n_grid=200):
    """Replica paths of the reduced chain on a uniform grid.

    Returns (grid, array of shape (replicas, len(grid))) for the
    (t, N, replica, value) CSV schema.
    """
    chain = reduced_chain(family, N, params)
    grid = np.linspace(0.0, T, n_grid + 1)
    seeds = kernel_seeds(master_seed, replicas, N, 5)
    paths = np.stack([simulate_chain(chain, x0, T, grid, seeds[k])
                      for k in range(replicas)])
    return grid, paths


def sign_flip_epochs(N=50, beta=3.0, T=20000.0, master_seed=0, dt=0.5):
    """Metastable sign changes of the small-N spin chain magnetization.

    The chain hugs one of the two stable magnetizations and hops between
    them on long timescales; returns the hop epochs detected on a dt grid
    (qualitative diagnostic, no waiting-time asymptotics).
    """
    chain = reduced_chain("ising", N, {"beta": beta})
    grid = np.arange(0.0, T + dt / 2, dt)
    path = simulate_chain(chain, 2 * round(0.1 * N / 2) / N, T, grid,
                          kernel_seeds(master_seed, 1, 6)[0])
    sign = np.sign(path)
    prev = 0.0
    epochs = []
    for t, s in zip(grid, sign):
        if s != 0 and prev != 0 and s != prev:
            epochs.append(float(t))
        if s != 0:
            prev = s
    return epochs, grid, path


def to_ode_check(family, params, N_list, x0, T, eps, replicas=100,
                 master_seed=0, n_grid=200):
    """Fraction of chain replicas staying eps-close to the ODE flow, per N."""
    spec = DriftSpec(family, dict(params))
    grid = np.linspace(0.0, T, n_grid + 1)
    ts, xs = integrate_ode(spec, x0, T, step=min(1e-3, T / 1000))
    ref = np.interp(grid, ts, xs)
    out = {}
    for N in N_list:
        chain = reduced_chain(family, N, params)
        x0N = round(x0 * N) / N if family != "ising" else round(x0 * N / 2) * 2 / N
        seeds = kernel_seeds(master_seed, replicas, N)
        good = 0
        for k in range(replicas):
            path = simulate_chain(chain, x0N, T, grid, seeds[k])
            if np.max(np.abs(path - ref)) <= eps:
                good += 1
        out[N] = good / replicas
    return out


# -- Wright-Fisher diffusion ----------------------------------------------------

def wright_fisher(x0, T, step, seed, paths=1, rng=None):
    """Euler-Maruyama for dX = sqrt(2 X (1-X)) dB with absorption at 0, 1."""
    if step <= 0:
        raise ValueError("step must be positive")
    if not 0 <= x0 <= 1:
        raise ValueError("x0 in [0,1]")
    if rng is None:
        rng = make_rng(seed)
    n = int(math.ceil(T / step))
    x = np.full(paths, float(x0))
    alive = np.ones(paths, dtype=bool)
    for _ in range(n):
        z = rng.standard_normal(paths)
        x[alive] += np.sqrt(np.maximum(2 * x[alive] * (1 - x[alive]), 0.0) * step) * z[alive]
        np.clip(x, 0.0, 1.0, out=x)
        alive &= (x > 0) & (x < 1)
    return x


def wf_compare(N, T, samples, master_seed=0, step=1e-3):
    """KS distance between sped-up voter densities at T and WF samples."""
    from scipy.stats import ks_2samp
    chain = reduced_chain("voter_speed", N)
    seeds = kernel_seeds(master_seed, samples, 7)
    x0 = 0.5
    grid = np.array([T])
    chain_vals = np.array([simulate_chain(chain, x0, T, grid, seeds[k])[0]
                           for k in range(samples)])
    wf_vals = wright_fisher(x0, T, step, None, paths=samples,
                            rng=make_rng(master_seed, 8))
    res = ks_2samp(chain_vals, wf_vals)
    return {"ks": float(res.statistic), "pvalue": float(res.pvalue),
            "chain_mean": float(chain_vals.mean()), "wf_mean": float(wf_vals.mean())}
