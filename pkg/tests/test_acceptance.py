"""Acceptance suite: one test per criterion, one printed verdict line each.

Scales and tolerances are pinned here; every random quantity derives from
master seed 0, so the suite is deterministic.  Run with

    pytest tests/test_acceptance.py -v -s
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from ipslab import (duality, estimators as est, graphical, kdep, lattice,
                    localmaps as lm, meanfield as mf, models,
                    percolation as perc)
from ipslab.rng import make_rng

SEED = 0


def verdict(num, name, ok, detail=""):
    line = f"ACCEPTANCE {num:2d} {name}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    assert ok, line


def test_01_pathwise_additive_duality():
    ring = lattice.build_lattice("ring", sides=(20,))
    model = models.contact(ring, 2.0, 1.0)
    rep = duality.pathwise_duality_assert(
        model, "additive", 5.0, 1000,
        lambda rng: lattice.product_config(ring, 0.5, rng),
        lambda rng: lattice.single(ring, rng.integers(20)), SEED)
    verdict(1, "pathwise additive duality (contact ring-20)", rep.passed,
            f"{rep.n_seeds}/1000 seeds exact")


def test_02_pathwise_cancellative_duality():
    ring = lattice.build_lattice("ring", sides=(20,))
    model = models.annihilating_branching(ring, 1.0, 1.0)
    rep = duality.pathwise_duality_assert(
        model, "cancellative", 5.0, 1000,
        lambda rng: lattice.product_config(ring, 0.5, rng),
        lambda rng: lattice.single(ring, rng.integers(20)), SEED)
    verdict(2, "pathwise cancellative duality (bran+death ring-20)",
            rep.passed, f"{rep.n_seeds}/1000 seeds exact")


def test_03_generator_q_duality():
    k4 = lattice.build_lattice("complete", n=4)
    ok = True
    worst_good, best_bad = 0.0, math.inf
    for lam, gam in ((1.0, 1.0), (2.0, 0.5), (0.5, 3.0)):
        cv = models.contact_voter(k4, lam, gam)
        G, states = duality.generator_matrix(cv)
        q = gam / (gam + lam)
        r_good = duality.generator_duality_residual(
            G, G, duality.psi_q_matrix(states, q))
        r_bad = duality.generator_duality_residual(
            G, G, duality.psi_q_matrix(states, q + 0.05))
        worst_good = max(worst_good, r_good)
        best_bad = min(best_bad, r_bad)
        ok &= r_good < 1e-12 and r_bad > 1e-3
    verdict(3, "contact-voter q-duality (4-site complete graph)", ok,
            f"residual {worst_good:.1e} at q, {best_bad:.1e} at q+0.05")


def test_04_dual_map_table():
    d1 = duality.dual_map(lm.vot(1, 2))
    d2 = duality.dual_map(lm.bra(1, 2))
    d3 = duality.dual_map(lm.death(1))
    d4 = duality.dual_map(lm.excl(1, 2))
    ok = (d1.kind == "rw" and d1.sites == (2, 1)
          and d2.kind == "bra" and d2.sites == (2, 1)
          and d3.kind == "death" and d3.sites == (1,)
          and d4.kind == "excl" and set(d4.sites) == {1, 2})
    verdict(4, "dual-map table (vot'=rw rev, bra'=bra rev, death'=death, "
               "excl'=excl)", ok)


def test_05_mean_field_spin_limit():
    # bisection oracle for the positive root of tanh(1.5 x) = x
    a, b = 0.5, 0.99
    fa = math.tanh(1.5 * a) - a
    while b - a > 1e-10:
        m = 0.5 * (a + b)
        if ((math.tanh(1.5 * m) - m) < 0) == (fa < 0):
            a = m
        else:
            b = m
    root = 0.5 * (a + b)
    _, xs = mf.integrate_ode(mf.DriftSpec("ising", {"beta": 3.0}), 0.1, 40.0)
    ode_ok = abs(root - 0.8586) <= 1e-4 and abs(xs[-1] - root) < 1e-6
    frac = mf.to_ode_check("ising", {"beta": 3.0}, [10000], 0.1, 10.0, 0.1,
                           replicas=100, master_seed=SEED)[10000]
    verdict(5, "mean-field spin chain tracks the ODE", frac >= 0.95 and ode_ok,
            f"{frac:.0%} of replicas within 0.1; limit {xs[-1]:.6f} vs "
            f"root {root:.6f}")


def test_06_mean_field_contact_fixed_points_and_exponents():
    pts = mf.fixed_points(mf.DriftSpec("contact", {"lam": 2.0}))
    fp_ok = (len(pts) == 2 and abs(pts[0][0]) < 1e-10
             and pts[0][1] == "unstable"
             and abs(pts[1][0] - 0.5) < 1e-10 and pts[1][1] == "stable")
    c_spin = mf.critical_exponent_fit("ising", "beta", 2.0)
    c_cont = mf.critical_exponent_fit("contact", "lam", 1.0)
    exp_ok = abs(c_spin - 0.5) <= 0.05 and abs(c_cont - 1.0) <= 0.05
    verdict(6, "mean-field fixed points and critical exponents",
            fp_ok and exp_ok,
            f"fps {pts}; c_spin {c_spin:.3f}, c_contact {c_cont:.3f}")


def test_07_survival_curve_and_critical_bracket():
    rows = est.theta_curve([1.0, 2.0], 401, 200.0, 2000, SEED, threads=4)
    t1, t2 = rows[0].theta_hat, rows[1].theta_hat
    (lo, hi), curve = est.lambda_c_estimate((1.4, 1.9), 0.05, 401, 200.0,
                                            2000, SEED, pilot=0.08, threads=4)
    th = [r.theta_hat for r in curve]
    mono = all(a <= b for a, b in zip(th, th[1:]))
    ok = (t1 <= 0.02 and 0.50 <= t2 <= 0.72
          and 1.4 <= lo < hi <= 1.9 and mono)
    verdict(7, "survival curve and critical-rate bracket", ok,
            f"theta(1.0)={t1:.4f}, theta(2.0)={t2:.4f}, "
            f"bracket ({lo:.2f},{hi:.2f}), trunc {rows[1].truncated_frac:.1%}")


def test_08_onsager_check():
    m_hi = est.magnetization_frozen_boundary(1.2, 64, 80.0, 24, SEED, threads=4)
    m_lo = est.magnetization_frozen_boundary(0.4, 64, 80.0, 24, SEED, threads=4)
    ok = abs(m_hi.m_hat - 0.97361) <= 0.05 and m_lo.m_hat <= 0.15
    verdict(8, "planar spin magnetization vs closed form", ok,
            f"beta=1.2: {m_hi.m_hat:.4f} (target 0.97361); "
            f"beta=0.4: {m_lo.m_hat:.4f}")


def test_09_voter_clustering():
    s1 = est.clustering_stats(1, 200, 0.5, [500.0], 200, SEED, threads=4)[0]
    s3 = est.clustering_stats(3, 16, 0.5, [250.0], 24, SEED, threads=4)[0]
    ok = s1.agreement >= 0.9 and s3.disagreement >= 0.05
    verdict(9, "voter clustering in 1d, coexistence in 3d", ok,
            f"1d agreement {s1.agreement:.3f}, 3d disagreement "
            f"{s3.disagreement:.3f}")


def test_10_exponential_relevance_bound():
    ring = lattice.build_lattice("ring", sides=(101,))
    model = models.contact(ring, 0.3, 1.0)
    K = models.summability_constants(model)["K"]
    sizes = {1.0: [], 2.0: [], 5.0: []}
    for s in range(5000):
        ev = graphical.sample_events(model, 5.0, seed=(SEED, 101, s))
        prof = graphical.relevance_profile(ev, [50], 5.0, [4.0, 3.0, 0.0])
        sizes[1.0].append(prof[4.0])
        sizes[2.0].append(prof[3.0])
        sizes[5.0].append(prof[0.0])
    bound_ok = True
    detail = []
    for t, v in sizes.items():
        v = np.array(v)
        lim = math.exp(K * t) + 3 * v.std(ddof=1) / math.sqrt(len(v))
        bound_ok &= v.mean() <= lim
        detail.append(f"t={t:g}: {v.mean():.4f}<={lim:.4f}")
    # forward check: sites outside zeta cannot influence the target
    exact_ok = True
    rng = make_rng(SEED, 102)
    for s in range(100):
        ev = graphical.sample_events(model, 3.0, seed=(SEED, 103, s))
        zeta = graphical.relevance_set(ev, [50], 3.0, 1.0)
        xa = lattice.product_config(ring, 0.5, rng)
        xb = xa.copy()
        for i in range(101):
            if i not in zeta:
                xb[i] ^= 1
        sa = graphical.evolve(xa, ev.restrict(1.0, 3.0), [3.0]).states[0]
        sb = graphical.evolve(xb, ev.restrict(1.0, 3.0), [3.0]).states[0]
        exact_ok &= bool(sa[50] == sb[50])
    verdict(10, "exponential bound on relevance sets", bound_ok and exact_ok,
            "; ".join(detail) + f"; forward check exact on 100 seeds")


def test_11_monotone_couplings():
    ring = lattice.build_lattice("ring", sides=(31,))
    rng = make_rng(SEED, 111)
    results = {}

    spec = graphical.coupling_contact_rates(ring, 1.5, 2.0)
    results["rate"] = all(
        graphical.coupled_evolve(spec, lattice.ones(ring), lattice.ones(ring),
                                 5.0, seed=(SEED, 112, k)).ok
        for k in range(500))

    spec = graphical.coupling_ann_coal(ring)
    ok = True
    for k in range(500):
        xb = lattice.product_config(ring, 0.6, rng)
        xa = (xb & lattice.product_config(ring, 0.6, rng)).astype(np.int8)
        ok &= graphical.coupled_evolve(spec, xa, xb, 5.0, seed=(SEED, 113, k)).ok
    results["ann<=coal"] = ok

    spec = graphical.coupling_coop_doubledeath(ring, 2.0)
    ok = True
    for k in range(500):
        xa = lattice.product_config(ring, 0.8, rng)
        ok &= graphical.coupled_evolve(spec, xa, graphical.adjacent_pairs(xa),
                                       5.0, seed=(SEED, 114, k)).ok
    results["pair-dom"] = ok

    ring15 = lattice.build_lattice("ring", sides=(15,))
    torus = lattice.build_lattice("torus", sides=(15, 15))
    spec = graphical.coupling_dim_embed(ring15, torus, 1.5)
    row = np.array([torus.site((0, i)) for i in range(15)])
    ok = True
    for k in range(500):
        xa = lattice.product_config(ring15, 0.5, rng)
        xb = lattice.product_config(torus, 0.5, rng)
        xb[row] |= xa
        ok &= graphical.coupled_evolve(spec, xa, xb, 3.0, seed=(SEED, 115, k)).ok
    results["dim-embed"] = ok

    verdict(11, "monotone couplings hold at every event", all(results.values()),
            str(results))


def test_12_oriented_percolation():
    sub = perc.percolation_theta(2, 0.45, 100, 2000, SEED)
    sup = perc.percolation_theta(2, 0.92, 100, 2000, SEED)
    peierls_ok = (perc.peierls_bound(0.85, 1) == math.inf
                  and perc.peierls_bound(8 / 9, 1) == math.inf
                  and perc.peierls_bound(0.90, 1) < math.inf
                  and perc.peierls_bound(0.95, 5) < 1.0)
    ok = (sub["survived_fraction"] <= 0.01
          and sup["survived_fraction"] >= 0.5 and peierls_ok)
    verdict(12, "oriented percolation bounds", ok,
            f"theta(0.45)={sub['survived_fraction']:.4f}, "
            f"theta(0.92)={sup['survived_fraction']:.3f}, "
            f"series finite iff p > 8/9")


def test_13_kdep_domination():
    details = []
    ok = True
    for name, field in (
            ("phi-chain", kdep.ProductChainField(0.9, 100000)),
            ("contact-blocks", kdep.ContactBlockField(100.0, 0.1, 10, 100, 500))):
        res = kdep.kdep_couple(field, SEED)
        layers = res.layers_ordered()
        cond = res.min_conditional >= res.p_tilde - 1e-12
        pval = res.chisq_pvalue()
        ok &= layers and cond and pval > 0.01
        details.append(f"{name}: n={len(res.chi)}, min_cond="
                       f"{res.min_conditional:.4f}>=p~={res.p_tilde:.4f}, "
                       f"chi2 p={pval:.3f}")
    verdict(13, "K-dependent field dominated by i.i.d. field", ok,
            "; ".join(details))


def test_14_contact_to_percolation():
    field = perc.contact_to_percolation(10.0, 0.3, 100, 500, SEED)
    emp, theory = field.empirical_p(), field.p_theory
    n_bonds = 2 * 100 * 500
    freq_ok = abs(emp - theory) <= 0.01 and n_bonds >= 100000
    verified = 0
    for w in range(100):
        small = perc.contact_to_percolation(10.0, 0.3, 4, 4, (SEED, 141, w))
        verified += perc.verify_open_bond_paths(small)
    verdict(14, "contact good events vs percolation bonds",
            freq_ok and verified > 0,
            f"freq {emp:.4f} vs {theory:.4f} over {n_bonds} bonds; "
            f"{verified} open bonds path-verified on 100 windows")


def test_15_determinism_across_threads(tmp_path):
    import hashlib
    from ipslab import cli
    digests = set()
    for th in (1, 4, 8):
        out = tmp_path / f"th{th}"
        code = cli.main(["theta-curve", "--lambdas", "1.0,1.6,2.0",
                         "--L", "201", "--T", "50", "--replicas", "200",
                         "--seed", "5", "--threads", str(th),
                         "--out", str(out), "--no-plot"])
        assert code == 0
        digests.add(hashlib.sha256((out / "theta_curve.csv").read_bytes()).hexdigest())
    verdict(15, "byte-identical outputs across 1/4/8 threads",
            len(digests) == 1, f"{len(digests)} distinct digest(s)")
