import numpy as np
import pytest

from ipslab import localmaps as lm


def x_of(vals):
    return np.array(vals, dtype=np.int8)


def test_apply_examples():
    # branching fills the target from an occupied source
    x = x_of([1, 0, 0])
    assert lm.applied(lm.bra(0, 1), x)[1] == 1
    # annihilating walk: two particles kill each other
    x = x_of([1, 1, 0])
    y = lm.applied(lm.ann(0, 1), x)
    assert y[0] == 0 and y[1] == 0
    # death on empty state is a fixed point
    x = x_of([0, 0, 0])
    assert (lm.applied(lm.death(1), x) == x).all()
    # exclusion swaps
    y = lm.applied(lm.excl(0, 2), x_of([1, 0, 0]))
    assert y[0] == 0 and y[2] == 1
    # voter copies
    y = lm.applied(lm.vot(0, 1), x_of([1, 0, 0]))
    assert y[1] == 1
    # cooperative branching needs both parents
    assert lm.applied(lm.coop(0, 1, 2), x_of([1, 0, 0]))[2] == 0
    assert lm.applied(lm.coop(0, 1, 2), x_of([1, 1, 0]))[2] == 1
    # killing
    assert lm.applied(lm.kill(0, 1), x_of([1, 1, 0]))[1] == 0
    assert lm.applied(lm.kill(0, 1), x_of([0, 1, 0]))[1] == 1
    # rebel flips on disagreement
    assert lm.applied(lm.rebel(0, 1, 2), x_of([1, 0, 0]))[2] == 1
    assert lm.applied(lm.rebel(0, 1, 2), x_of([1, 1, 0]))[2] == 0


CLOSED_FORMS = [
    (lm.vot(1, 2), (2,), {2: (1,)}),
    (lm.bra(1, 2), (2,), {2: (1, 2)}),
    (lm.death(1), (1,), {1: ()}),
    (lm.death2(1, 4), (1, 4), {1: (), 4: ()}),
    (lm.rw(1, 2), (1, 2), {1: (), 2: (1, 2)}),
    (lm.ann(1, 2), (1, 2), {1: (), 2: (1, 2)}),
    (lm.excl(1, 2), (1, 2), {1: (2,), 2: (1,)}),
    (lm.coop(0, 1, 2), (2,), {2: (0, 1, 2)}),
    (lm.kill(1, 2), (2,), {2: (1, 2)}),
    (lm.bran(1, 2), (2,), {2: (1, 2)}),
    (lm.rebel(0, 1, 2), (2,), {2: (0, 1, 2)}),
    (lm.glauber_plus(0, -4, (1, 2, 3, 4)), (0,), {0: ()}),
    (lm.glauber_minus(0, 4, (1, 2, 3, 4)), (0,), {0: ()}),
    (lm.glauber_plus(0, 0, (1, 2, 3, 4)), (0,), {0: (0, 1, 2, 3, 4)}),
    (lm.glauber_minus(0, -2, (1, 2, 3, 4)), (0,), {0: (0, 1, 2, 3, 4)}),
    (lm.threshold_map(0, (1, 2)), (0,), {0: (0, 1, 2)}),
    (lm.threshold_map(0, (0, 1)), (0,), {0: (1,)}),
]


@pytest.mark.parametrize("m,dom,rel", CLOSED_FORMS, ids=lambda v: repr(v))
def test_relevance_closed_form_equals_bruteforce(m, dom, rel):
    assert lm.domain(m) == dom
    assert lm.domain_bruteforce(m) == dom
    for i in dom:
        assert lm.relevance(m, i) == rel[i]
        assert lm.relevance_bruteforce(m, i) == rel[i]


def test_relevance_off_domain_is_identity():
    m = lm.vot(1, 2)
    assert lm.relevance(m, 5) == (5,)


CLASSIFY_TABLE = [
    (lm.vot(0, 1), True, True, True),
    (lm.bra(0, 1), True, True, False),
    (lm.death(0), True, True, True),
    (lm.rw(0, 1), True, True, False),
    (lm.excl(0, 1), True, True, True),
    (lm.coop(0, 1, 2), True, False, False),
    (lm.ann(0, 1), False, False, True),
    (lm.kill(0, 1), False, False, False),
    (lm.bran(0, 1), False, False, True),
    # threshold-voter maps are cancellative but not monotone (only the
    # assembled model is monotone)
    (lm.rebel(0, 1, 2), False, False, True),
    (lm.threshold_map(0, (1, 2)), False, False, True),
    # spin threshold maps: monotone, and for levels strictly inside the
    # magnetization range not expressible by OR/XOR of singletons
    (lm.glauber_plus(0, 4, (1, 2, 3, 4)), True, False, False),
    (lm.glauber_minus(0, 0, (1, 2, 3, 4)), True, False, False),
]


@pytest.mark.parametrize("m,mono,add,canc", CLASSIFY_TABLE, ids=lambda v: repr(v))
def test_classify_table(m, mono, add, canc):
    flags = lm.classify(m)
    assert flags == {"monotone": mono, "additive": add, "cancellative": canc}


def test_additive_implies_monotone_across_catalog():
    for m, *_ in CLASSIFY_TABLE:
        flags = lm.classify(m)
        if flags["additive"]:
            assert flags["monotone"]


def test_vot_excl_both_additive_and_cancellative():
    for m in (lm.vot(0, 1), lm.excl(0, 1)):
        flags = lm.classify(m)
        assert flags["additive"] and flags["cancellative"]


def test_threshold_map_needs_even_subset():
    with pytest.raises(ValueError):
        lm.threshold_map(0, (1,))


def test_classify_rejects_large_support():
    m = lm.glauber_plus(0, 2, tuple(range(1, 25)))
    with pytest.raises(ValueError):
        lm.classify(m)


def test_arrows_blocks_encoding():
    assert lm.arrows_blocks(lm.vot(1, 2)) == (((1, 2),), (2,))
    assert lm.arrows_blocks(lm.bra(1, 2)) == (((1, 2),), ())
    assert lm.arrows_blocks(lm.death(1)) == ((), (1,))
    assert lm.arrows_blocks(lm.rw(1, 2)) == (((1, 2),), (1,))
    assert lm.arrows_blocks(lm.excl(1, 2)) == (((1, 2), (2, 1)), (1, 2))
    assert lm.arrows_blocks(lm.bran(1, 2)) == (((1, 2),), ())


def test_encoded_maps_roundtrip():
    arrows, blocks = lm.arrows_blocks(lm.rw(1, 2))
    enc = lm.encoded_additive(arrows, blocks)
    assert lm.maps_equal(enc, lm.rw(1, 2))
    arrows, blocks = lm.arrows_blocks(lm.ann(1, 2))
    encx = lm.encoded_cancellative(arrows, blocks)
    assert lm.maps_equal(encx, lm.ann(1, 2))


def test_apply_reads_only_support():
    # perturbing a site outside the support never changes the image
    m = lm.coop(0, 1, 2)
    x = x_of([1, 1, 0, 1])
    y = x.copy()
    y[3] ^= 1
    assert (lm.applied(m, x)[:3] == lm.applied(m, y)[:3]).all()


def test_pinned_writes_dropped():
    pinned = np.array([False, True, False])
    x = x_of([1, 0, 0])
    out = lm.apply_map(lm.bra(0, 1), x.copy(), pinned)
    assert out[1] == 0
