from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipslab import duality, graphical, lattice, localmaps as lm, models
from ipslab.rng import make_rng


def ring(n):
    return lattice.build_lattice("ring", sides=(n,))


# -- duality functions ---------------------------------------------------------

def test_psi_q_special_cases():
    x = np.array([1, 0, 1, 1], dtype=np.int8)
    y = np.array([0, 0, 1, 1], dtype=np.int8)
    assert duality.psi_q(x, y, 0.0) == 0.0
    assert duality.psi_q(x, np.zeros(4, np.int8), 0.0) == 1.0
    assert duality.psi_q(x, y, -1.0) == 1.0       # overlap 2, parity even
    assert duality.psi0(x, y) == 0
    assert duality.parity(x, y) == 0
    assert duality.psi_q(x, y, 0.5) == 0.25
    with pytest.raises(ValueError):
        duality.psi_q(x, y, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255),
       st.floats(-1.0, 0.99))
def test_psi_q_multiplicative_on_disjoint_supports(xb, yb, zb, q):
    x = np.array([(xb >> k) & 1 for k in range(8)], dtype=np.int8)
    y = np.array([(yb >> k) & 1 for k in range(8)], dtype=np.int8)
    z = np.array([(zb >> k) & 1 for k in range(8)], dtype=np.int8)
    z[y == 1] = 0  # make supports disjoint
    yz = y | z
    lhs = duality.psi_q(x, yz, q)
    rhs = duality.psi_q(x, y, q) * duality.psi_q(x, z, q)
    assert lhs == pytest.approx(rhs, abs=1e-12)


# -- dual maps -----------------------------------------------------------------

def test_dual_map_table():
    d = duality.dual_map(lm.vot(1, 2))
    assert d.kind == "rw" and d.sites == (2, 1)
    d = duality.dual_map(lm.bra(1, 2))
    assert d.kind == "bra" and d.sites == (2, 1)
    d = duality.dual_map(lm.death(1))
    assert d.kind == "death" and d.sites == (1,)
    d = duality.dual_map(lm.excl(1, 2))
    assert d.kind == "excl" and set(d.sites) == {1, 2}
    d = duality.dual_map(lm.bran(1, 2), "cancellative")
    assert d.kind == "bran" and d.sites == (2, 1)


def test_dual_map_requires_structure():
    with pytest.raises(ValueError):
        duality.dual_map(lm.coop(0, 1, 2))
    with pytest.raises(ValueError):
        duality.dual_map(lm.ann(0, 1), "additive")


def test_cancellative_dual_defining_relation_exhaustive():
    m = lm.bran(0, 1)
    d = duality.dual_map(m, "cancellative", verify=True, match=False)
    arrows, blocks = lm.arrows_blocks(m)
    da, db = lm.arrows_blocks(d)
    assert da == tuple((j, i) for i, j in arrows) and db == blocks


def test_dual_map_involution():
    for m in (lm.vot(0, 3), lm.bra(0, 3), lm.rw(0, 3), lm.excl(0, 3),
              lm.death(2)):
        assert lm.maps_equal(duality.dual_map(duality.dual_map(m)), m)
    for m in (lm.bran(0, 3), lm.ann(0, 3), lm.vot(0, 3)):
        d2 = duality.dual_map(duality.dual_map(m, "cancellative"), "cancellative")
        assert lm.maps_equal(d2, m)


def test_dual_model_pairings():
    r4 = ring(4)
    dual_v = duality.dual_model(models.voter(r4), "additive")
    assert all(m.kind == "rw" for m in dual_v.instances)
    dual_c = duality.dual_model(models.contact(r4, 1.0), "additive")
    kinds = sorted(set(m.kind for m in dual_c.instances))
    assert kinds == ["bra", "death"]
    dual_e = duality.dual_model(models.exclusion(r4), "additive")
    assert all(m.kind == "excl" for m in dual_e.instances)


# -- generator matrices -----------------------------------------------------------

def test_generator_single_site_death():
    lat = lattice.build_lattice("complete", n=1)
    pd = models.ModelSpec("d", lat, (0, 1), [lm.death(0)], np.array([1.0]))
    G, states = duality.generator_matrix(pd)
    assert np.allclose(G, [[0, 0], [1, -1]])


def test_generator_rows_sum_zero_all_builders():
    r3 = ring(3)
    for model in (models.contact(r3, 1.3, 0.7), models.voter(r3),
                  models.annihilating_rw(r3), models.exclusion(r3),
                  models.annihilating_branching(r3), models.babp(r3, 0.4)):
        G, _ = duality.generator_matrix(model)
        assert np.abs(G.sum(axis=1)).max() < 1e-14


def test_generator_specific_entry():
    r3 = ring(3)
    c = models.contact(r3, 1.0, 1.0)
    G, states = duality.generator_matrix(c)
    code = {tuple(x): k for k, x in enumerate(states)}
    # exactly one branching instance maps 100 to 110
    assert G[code[(1, 0, 0)], code[(1, 1, 0)]] == pytest.approx(1.0)
    # two instances (bra from each neighbor) map 101 to 111
    assert G[code[(1, 0, 1)], code[(1, 1, 1)]] == pytest.approx(2.0)


def test_state_space_cap():
    with pytest.raises(ValueError):
        duality.generator_matrix(models.contact(ring(13), 1.0))


def test_contact_self_dual_residual():
    r4 = ring(4)
    c = models.contact(r4, 1.0, 1.0)
    G, states = duality.generator_matrix(c)
    Gp, _ = duality.generator_matrix(duality.dual_model(c, "additive"))
    psi = duality.psi_q_matrix(states, 0.0)
    assert duality.generator_duality_residual(G, Gp, psi) < 1e-12


def test_voter_coalescing_residual():
    r4 = ring(4)
    G, states = duality.generator_matrix(models.voter(r4))
    Gp, _ = duality.generator_matrix(models.coalescing_rw(r4))
    psi = duality.psi_q_matrix(states, 0.0)
    assert duality.generator_duality_residual(G, Gp, psi) < 1e-12


def test_annihilating_branching_parity_residual():
    r4 = ring(4)
    m = models.annihilating_branching(r4, 0.8, 1.0)
    G, states = duality.generator_matrix(m)
    Gp, _ = duality.generator_matrix(duality.dual_model(m, "cancellative"))
    # q = -1 gives the signed parity function
    psi = duality.psi_q_matrix(states, -1.0)
    assert duality.generator_duality_residual(G, Gp, psi) < 1e-12


@pytest.mark.parametrize("lam,gam", [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)])
def test_contact_voter_q_duality(lam, gam):
    k4 = lattice.build_lattice("complete", n=4)
    cv = models.contact_voter(k4, lam, gam)
    G, states = duality.generator_matrix(cv)
    q = gam / (gam + lam)
    assert duality.generator_duality_residual(
        G, G, duality.psi_q_matrix(states, q)) < 1e-12
    assert duality.generator_duality_residual(
        G, G, duality.psi_q_matrix(states, q + 0.05)) > 1e-3


def test_asymmetric_contact_dual_swaps_orientation():
    """With oriented rates, the dual carries the reversed edge rates."""
    r3 = ring(3)
    pairs = []
    for i in range(3):
        pairs.append((lm.bra(i, (i + 1) % 3), 2.0))   # clockwise fast
        pairs.append((lm.bra(i, (i - 1) % 3), 0.5))   # counter slow
        pairs.append((lm.death(i), 1.0))
    inst, rates = zip(*pairs)
    m = models.ModelSpec("asym", r3, (0, 1), list(inst), np.array(rates))
    dual = duality.dual_model(m, "additive")
    G, states = duality.generator_matrix(m)
    Gp, _ = duality.generator_matrix(dual)
    psi = duality.psi_q_matrix(states, 0.0)
    assert duality.generator_duality_residual(G, Gp, psi) < 1e-12
    # but the model is NOT self-dual
    assert duality.generator_duality_residual(G, G, psi) > 1e-3


def test_exact_arithmetic_residual_is_zero():
    r3 = ring(3)
    c = models.contact(r3, 1.0, 1.0)
    G, states = duality.generator_matrix(c, exact=True)
    Gp, _ = duality.generator_matrix(duality.dual_model(c, "additive"), exact=True)
    psi = duality.psi_q_matrix(states, 0, exact=True)
    assert duality.generator_duality_residual(G, Gp, psi) == Fraction(0)
    k3 = lattice.build_lattice("complete", n=3)
    cv = models.contact_voter(k3, 1.0, 1.0)   # q = 1/2 exactly
    G, states = duality.generator_matrix(cv, exact=True)
    psi = duality.psi_q_matrix(states, Fraction(1, 2), exact=True)
    assert duality.generator_duality_residual(G, G, psi) == Fraction(0)


# -- pathwise duality --------------------------------------------------------------

def test_pathwise_contact_small():
    model = models.contact(ring(12), 2.0, 1.0)
    rep = duality.pathwise_duality_assert(
        model, "additive", 3.0, 60,
        lambda rng: lattice.product_config(model.lattice, 0.5, rng),
        lambda rng: lattice.single(model.lattice, rng.integers(12)), 0)
    assert rep.passed


def test_pathwise_cancellative_small():
    model = models.annihilating_branching(ring(12), 1.0, 1.0)
    rep = duality.pathwise_duality_assert(
        model, "cancellative", 3.0, 60,
        lambda rng: lattice.product_config(model.lattice, 0.5, rng),
        lambda rng: lattice.single(model.lattice, rng.integers(12)), 1)
    assert rep.passed


def test_pathwise_trivial_empty_dual_start():
    model = models.contact(ring(10), 2.0, 1.0)
    rep = duality.pathwise_duality_assert(
        model, "additive", 2.0, 10,
        lambda rng: lattice.product_config(model.lattice, 0.5, rng),
        lambda rng: lattice.zeros(model.lattice), 2)
    assert rep.passed  # both sides identically one


def test_pathwise_reports_counterexample():
    """A wrong dual (un-reversed voter) must be caught with a dump."""
    model = models.voter(ring(8))
    wrong = [lm.rw(*m.sites) for m in model.instances]  # not reversed
    rep = duality.pathwise_duality_assert(
        model, "additive", 4.0, 200,
        lambda rng: lattice.product_config(model.lattice, 0.5, rng),
        lambda rng: lattice.single(model.lattice, rng.integers(8)), 3,
        dual_instances=wrong)
    assert not rep.passed
    assert rep.counterexample["events"]


def test_covo_extinction_identity_light():
    res = duality.covo_extinction_identity(2.0, 1.0, 51, [25], 40.0, 400, 0)
    assert res.gap_sigmas < 3.0
    # subcritical: both sides near one
    res2 = duality.covo_extinction_identity(0.2, 0.5, 31, [15], 40.0, 200, 1)
    assert res2.lhs > 0.9 and res2.rhs > 0.9


def test_covo_identity_reduces_to_contact_survival():
    """At vanishing opinion-swap rate the identity becomes: upper-law
    density equals the survival probability from a single seed."""
    res = duality.covo_extinction_identity(2.0, 1e-9, 101, [50], 60.0, 600, 2)
    # lhs ~ P[X_T(site)=0 | from ones] = 1 - density; rhs = extinction prob
    assert res.gap_sigmas < 3.5
    assert 0.25 <= 1 - res.lhs <= 0.8  # density in the plausible theta range
