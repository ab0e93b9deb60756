"""Catalog of local maps.

A local map rewrites finitely many sites (its domain D) reading finitely
many sites.  For each site i in the domain, the relevance set R_i collects
the sites whose value can change the new value at i; it is computed here
both from a closed form per catalog entry and by brute-force perturbation
over the map's support, and the two must agree.

Additive and cancellative maps also carry an arrow/block encoding: an
arrow i->j means m(1_i)(j)=1 (i != j), a block at i means m(1_i)(i)=0.
Duals are built from this encoding by reversing arrows.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

MAX_SUPPORT = 20  # exhaustive classification cutoff


@dataclass(frozen=True)
class LocalMap:
    kind: str
    sites: tuple = ()
    level: int = 0                # glauber threshold
    delta: tuple = ()             # threshold-voter subset
    neigh: tuple = ()             # glauber neighborhood of sites[0]
    arrows: tuple = ()            # encoded maps
    blocks: tuple = ()            # encoded maps

    def __repr__(self):
        extra = ""
        if self.kind in ("glb+", "glb-"):
            extra = f", L={self.level}"
        if self.kind == "thr":
            extra = f", delta={self.delta}"
        if self.kind in ("enc+", "encx"):
            return f"{self.kind}(arrows={self.arrows}, blocks={self.blocks})"
        return f"{self.kind}{self.sites}{extra}"


# -- constructors -------------------------------------------------------------

def vot(i, j):
    """Copy the state at i onto j."""
    return LocalMap("vot", (i, j))


def bra(i, j):
    """Branching: a particle at i puts a particle at j."""
    return LocalMap("bra", (i, j))


def death(i):
    return LocalMap("death", (i,))


def death2(i, j):
    """Double death: clears both i and j."""
    return LocalMap("death2", tuple(sorted((i, j))))


def rw(i, j):
    """Coalescing walk step: particle at i jumps onto j, merging."""
    return LocalMap("rw", (i, j))


def ann(i, j):
    """Annihilating walk step: particle at i jumps onto j, killing both."""
    return LocalMap("ann", (i, j))


def excl(i, j):
    """Exclusion: swap the states of i and j."""
    return LocalMap("excl", (i, j))


def coop(i, j, k):
    """Cooperative branching: particles at both i and j fill k."""
    return LocalMap("coop", (i, j, k))


def kill(i, j):
    """A particle at i kills the particle at j."""
    return LocalMap("kill", (i, j))


def bran(i, j):
    """Annihilating branching: j receives x(i) mod-2."""
    return LocalMap("bran", (i, j))


def rebel(i, j, k):
    """k changes state whenever i and j disagree."""
    return LocalMap("rebel", (i, j, k))


def glauber_plus(i, level, neigh):
    """Set spin i to +1 when the neighborhood magnetization is >= level."""
    return LocalMap("glb+", (i,), level=int(level), neigh=tuple(int(n) for n in neigh))


def glauber_minus(i, level, neigh):
    """Set spin i to -1 when the neighborhood magnetization is <= level."""
    return LocalMap("glb-", (i,), level=int(level), neigh=tuple(int(n) for n in neigh))


def threshold_map(i, delta):
    """Flip i by the mod-2 sum of the sites in delta (|delta| even)."""
    delta = tuple(sorted(int(d) for d in delta))
    if len(delta) % 2:
        raise ValueError("threshold map needs an even-size subset")
    return LocalMap("thr", (i,), delta=delta)


def encoded_additive(arrows, blocks):
    arrows = tuple(sorted(set((int(a), int(b)) for a, b in arrows)))
    if any(a == b for a, b in arrows):
        raise ValueError("self-arrows are expressed by the absence of a block")
    return LocalMap("enc+", arrows=arrows, blocks=tuple(sorted(set(int(b) for b in blocks))))


def encoded_cancellative(arrows, blocks):
    # mod-2 semantics: a doubled arrow cancels
    counts = {}
    for a, b in arrows:
        key = (int(a), int(b))
        counts[key] = counts.get(key, 0) ^ 1
    arrows = tuple(sorted(k for k, c in counts.items() if c))
    if any(a == b for a, b in arrows):
        raise ValueError("self-arrows are expressed by the absence of a block")
    return LocalMap("encx", arrows=arrows, blocks=tuple(sorted(set(int(b) for b in blocks))))


# -- semantics ----------------------------------------------------------------

def alphabet_of(m):
    from .lattice import ALPHA01, ALPHAPM
    return ALPHAPM if m.kind in ("glb+", "glb-") else ALPHA01


def apply_map(m, x, pinned=None):
    """Apply m to x in place (writes to pinned sites are dropped)."""
    k = m.kind
    s = m.sites

    def w(i, v):
        if pinned is None or not pinned[i]:
            x[i] = v

    if k == "vot":
        w(s[1], x[s[0]])
    elif k == "bra":
        w(s[1], x[s[0]] | x[s[1]])
    elif k == "death":
        w(s[0], 0)
    elif k == "death2":
        w(s[0], 0)
        w(s[1], 0)
    elif k == "rw":
        w(s[1], x[s[0]] | x[s[1]])
        w(s[0], 0)
    elif k == "ann":
        w(s[1], x[s[0]] ^ x[s[1]])
        w(s[0], 0)
    elif k == "excl":
        xi, xj = x[s[0]], x[s[1]]
        w(s[0], xj)
        w(s[1], xi)
    elif k == "coop":
        if x[s[0]] and x[s[1]]:
            w(s[2], 1)
    elif k == "kill":
        if x[s[0]]:
            w(s[1], 0)
    elif k == "bran":
        w(s[1], x[s[0]] ^ x[s[1]])
    elif k == "rebel":
        w(s[2], x[s[0]] ^ x[s[1]] ^ x[s[2]])
    elif k == "glb+":
        mag = 0
        for n in m.neigh:
            mag += x[n]
        if mag >= m.level:
            w(s[0], 1)
    elif k == "glb-":
        mag = 0
        for n in m.neigh:
            mag += x[n]
        if mag <= m.level:
            w(s[0], -1)
    elif k == "thr":
        v = x[s[0]]
        for d in m.delta:
            v ^= x[d]
        w(s[0], v)
    elif k == "enc+":
        new = {}
        for j in m.blocks:
            new[j] = 0
        for a, b in m.arrows:
            new[b] = new.get(b, x[b]) | x[a]
        for j, v in new.items():
            w(j, v)
    elif k == "encx":
        new = {}
        for j in m.blocks:
            new[j] = 0
        for a, b in m.arrows:
            new[b] = new.get(b, x[b]) ^ x[a]
        for j, v in new.items():
            w(j, v)
    else:
        raise ValueError(f"unknown map kind {k!r}")
    return x


def applied(m, x, pinned=None):
    """Functional apply: returns a new array."""
    return apply_map(m, np.array(x, dtype=np.int8), pinned)


def domain(m):
    """Sites whose value the map can change (exact closed form)."""
    k, s = m.kind, m.sites
    if k in ("vot", "bra", "kill", "bran"):
        return (s[1],)
    if k in ("death", "glb+", "glb-", "thr"):
        return (s[0],)
    if k in ("death2", "rw", "ann", "excl"):
        return tuple(sorted(s[:2]))
    if k in ("coop", "rebel"):
        return (s[2],)
    if k in ("enc+", "encx"):
        dom = set(m.blocks)
        dom.update(b for _, b in m.arrows)
        return tuple(sorted(dom))
    raise ValueError(k)


def reads(m):
    """Sites the update rule consults."""
    k, s = m.kind, m.sites
    if k == "vot":
        return (s[0],)
    if k in ("bra", "rw", "ann", "excl", "kill", "bran"):
        return tuple(sorted(s[:2]))
    if k in ("death", "death2"):
        return ()
    if k in ("coop",):
        return tuple(sorted(s[:2]))
    if k == "rebel":
        return tuple(sorted(s))
    if k in ("glb+", "glb-"):
        return tuple(sorted(set(m.neigh) | {s[0]}))
    if k == "thr":
        return tuple(sorted(set(m.delta) | {s[0]}))
    if k in ("enc+", "encx"):
        r = set(a for a, _ in m.arrows)
        r.update(b for _, b in m.arrows if b not in m.blocks)
        return tuple(sorted(r))
    raise ValueError(k)


def support(m):
    return tuple(sorted(set(domain(m)) | set(reads(m))))


def relevance(m, i):
    """Closed-form relevance set R_i(m); R_i = {i} off the domain."""
    k, s = m.kind, m.sites
    if i not in domain(m):
        return (i,)
    if k == "vot":
        return (s[0],)
    if k in ("bra", "kill", "bran"):
        return tuple(sorted(s[:2]))
    if k in ("death", "death2"):
        return ()
    if k in ("rw", "ann"):
        return () if i == s[0] else tuple(sorted(s[:2]))
    if k == "excl":
        return (s[1],) if i == s[0] else (s[0],)
    if k in ("coop", "rebel"):
        return tuple(sorted(s))
    if k == "glb+":
        # the always-acting level has no dependence at all; otherwise the
        # kept-as-is branch makes the site's own spin relevant too
        if m.level <= -len(m.neigh):
            return ()
        return tuple(sorted(set(m.neigh) | {s[0]}))
    if k == "glb-":
        if m.level >= len(m.neigh):
            return ()
        return tuple(sorted(set(m.neigh) | {s[0]}))
    if k == "thr":
        return tuple(sorted(set(m.delta) ^ {s[0]}))
    if k in ("enc+", "encx"):
        rel = set(a for a, b in m.arrows if b == i)
        if i not in m.blocks:
            rel.add(i)
        return tuple(sorted(rel))
    raise ValueError(k)


# -- brute-force validation and classification --------------------------------

def _assignments(sites, alphabet):
    for values in product(alphabet, repeat=len(sites)):
        yield dict(zip(sites, values))


def _image_at(m, assign, i, alphabet):
    """m(x)(i) for x given on the support (zero/lowest elsewhere)."""
    top = max(max(assign, default=0), i, *(support(m) or (0,)))
    x = np.full(top + 1, alphabet[0], dtype=np.int8)
    for j, v in assign.items():
        x[j] = v
    return int(apply_map(m, x)[i])


def relevance_bruteforce(m, i):
    """R_i(m) from the definition: perturb one site, watch the image at i."""
    alphabet = alphabet_of(m)
    sup = sorted(set(support(m)) | {i})
    rel = []
    for j in sup:
        for assign in _assignments([t for t in sup if t != j], alphabet):
            images = set()
            for v in alphabet:
                a = dict(assign)
                a[j] = v
                images.add(_image_at(m, a, i, alphabet))
            if len(images) > 1:
                rel.append(j)
                break
    return tuple(rel)


def domain_bruteforce(m):
    alphabet = alphabet_of(m)
    sup = support(m)
    dom = []
    for i in sup:
        for assign in _assignments(sup, alphabet):
            if _image_at(m, assign, i, alphabet) != assign[i]:
                dom.append(i)
                break
    return tuple(dom)


def classify(m):
    """Brute-force {monotone, additive, cancellative} flags.

    Additivity and cancellativity are checked against the {0,1} coding
    (spin maps are relabeled -1 -> 0), using the singleton decompositions
    m(x) = OR / XOR of m(1_i); monotonicity via single-site increases.
    """
    sup = support(m)
    n = len(sup)
    if n > MAX_SUPPORT:
        raise ValueError(f"support size {n} exceeds enumeration cutoff {MAX_SUPPORT}")
    alphabet = alphabet_of(m)
    lo, hi = alphabet[0], alphabet[-1]
    pos = {s: k for k, s in enumerate(sup)}

    def image(bits):
        assign = {s: (hi if (bits >> pos[s]) & 1 else lo) for s in sup}
        out = 0
        for s in sup:
            if _image_at(m, assign, s, alphabet) == hi:
                out |= 1 << pos[s]
        return out

    images = [image(bits) for bits in range(1 << n)]
    singles = [images[1 << k] for k in range(n)]

    monotone = True
    for bits in range(1 << n):
        for k in range(n):
            if not (bits >> k) & 1:
                if images[bits] & ~images[bits | (1 << k)]:
                    monotone = False
                    break
        if not monotone:
            break

    additive = images[0] == 0
    cancellative = images[0] == 0
    for bits in range(1 << n):
        if not (additive or cancellative):
            break
        acc_or = 0
        acc_xor = 0
        for k in range(n):
            if (bits >> k) & 1:
                acc_or |= singles[k]
                acc_xor ^= singles[k]
        if images[bits] != acc_or:
            additive = False
        if images[bits] != acc_xor:
            cancellative = False
    return {"monotone": monotone, "additive": additive, "cancellative": cancellative}


def arrows_blocks(m):
    """Arrow/block encoding from the action on singletons.

    Only meaningful for additive or cancellative maps (the encoding
    determines the map through OR resp. XOR of the singleton images).
    """
    sup = support(m)
    alphabet = alphabet_of(m)
    if alphabet != (0, 1):
        raise ValueError("arrow/block encoding is defined on {0,1} maps")
    arrows = []
    blocks = []
    for i in sup:
        img = applied(m, _embed(sup, {i: 1}))
        for j in sup:
            if j != i and img[j] == 1:
                arrows.append((i, j))
        if img[i] == 0:
            blocks.append(i)
    return tuple(sorted(arrows)), tuple(sorted(blocks))


def _embed(sup, assign):
    top = max(sup) if sup else 0
    x = np.zeros(top + 1, dtype=np.int8)
    for j, v in assign.items():
        x[j] = v
    return x


def maps_equal(m1, m2):
    """Truth-table equality over the joint support (same alphabet assumed)."""
    if alphabet_of(m1) != alphabet_of(m2):
        return False
    alphabet = alphabet_of(m1)
    sup = sorted(set(support(m1)) | set(support(m2)))
    if len(sup) > MAX_SUPPORT:
        raise ValueError("joint support too large for truth-table comparison")
    for assign in _assignments(sup, alphabet):
        for i in sup:
            if _image_at(m1, assign, i, alphabet) != _image_at(m2, assign, i, alphabet):
                return False
    return True
