"""Finite lattices and configurations.

Kinds: periodic torus (any dimension, interaction range R measured in the
l1 or sup norm), frozen-boundary box (outer shell of width R pinned to a
fixed value), complete graph (optionally counting a site as its own
neighbor, the convention used by mean-field models), and ring (shorthand
for a 1d torus).  Site indexing is row-major over coordinates and stable
across runs; all file output speaks coordinates, never raw indices.
"""

from dataclasses import dataclass

import numpy as np

KINDS = ("torus", "frozen-box", "complete", "ring")


@dataclass(frozen=True)
class Lattice:
    kind: str
    dim: int
    sides: tuple
    R: int
    norm: str                      # "l1" or "sup"
    include_self: bool
    boundary_value: object         # frozen-box only
    n_sites: int
    coords: np.ndarray             # (n_sites, dim) int
    neighbor_lists: tuple          # tuple of sorted int arrays
    pinned: np.ndarray             # bool per site

    def __repr__(self):
        return (f"Lattice({self.kind}, sides={self.sides}, R={self.R}, "
                f"norm={self.norm}, n={self.n_sites})")

    @property
    def unpinned(self):
        return np.flatnonzero(~self.pinned)

    def site(self, coord):
        """Row-major index of a coordinate tuple."""
        idx = 0
        for c, s in zip(coord, self.sides):
            if not 0 <= c < s:
                raise ValueError(f"coordinate {coord} outside box {self.sides}")
            idx = idx * s + c
        return idx

    def coord(self, i):
        return tuple(int(c) for c in self.coords[i])


def _ball_offsets(dim, R, norm):
    """Nonzero offsets within distance R of the origin."""
    rng = range(-R, R + 1)
    offsets = []
    for off in np.ndindex(*(2 * R + 1,) * dim):
        off = tuple(o - R for o in off)
        if all(o == 0 for o in off):
            continue
        dist = sum(abs(o) for o in off) if norm == "l1" else max(abs(o) for o in off)
        if dist <= R:
            offsets.append(off)
    return offsets


def build_lattice(kind, d=1, sides=None, n=None, R=1, norm="l1",
                  include_self=False, boundary_value=None):
    """Build a lattice with materialized neighbor lists.

    torus/frozen-box take `sides` (int or per-axis tuple); complete takes
    `n`; ring takes sides=(L,).  Torus sides must be at least 2R+1 so the
    neighbor multiset does not wrap onto itself.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown lattice kind {kind!r}")
    if kind == "ring":
        kind, d = "torus", 1
    if kind == "complete":
        if n is None or n < 1:
            raise ValueError("complete graph needs n >= 1")
        nbrs = []
        for i in range(n):
            js = list(range(n)) if include_self else [j for j in range(n) if j != i]
            nbrs.append(np.asarray(js, dtype=np.int64))
        coords = np.arange(n, dtype=np.int64)[:, None]
        return Lattice("complete", 1, (n,), R, norm, include_self, None,
                       n, coords, tuple(nbrs), np.zeros(n, dtype=bool))

    if include_self:
        raise ValueError("include-self is a complete-graph convention only")
    if sides is None:
        raise ValueError(f"{kind} lattice needs sides")
    if np.isscalar(sides):
        sides = (int(sides),) * d
    sides = tuple(int(s) for s in sides)
    d = len(sides)
    if kind == "torus":
        for s in sides:
            if s < 2 * R + 1:
                raise ValueError(f"torus side {s} < 2R+1 = {2 * R + 1}: "
                                 "neighbor multiset would double-count")
    n_sites = int(np.prod(sides))
    coords = np.stack(np.unravel_index(np.arange(n_sites), sides), axis=1).astype(np.int64)
    offsets = _ball_offsets(d, R, norm)
    strides = np.array([int(np.prod(sides[k + 1:])) for k in range(d)], dtype=np.int64)

    nbrs = []
    if kind == "torus":
        for i in range(n_sites):
            c = coords[i]
            js = sorted(int(((c + off) % sides) @ strides) for off in offsets)
            nbrs.append(np.asarray(js, dtype=np.int64))
        pinned = np.zeros(n_sites, dtype=bool)
    else:  # frozen-box: no wrap, outer shell of width R pinned
        if boundary_value is None:
            raise ValueError("frozen-box needs a boundary_value")
        for i in range(n_sites):
            c = coords[i]
            js = []
            for off in offsets:
                cc = c + off
                if np.all(cc >= 0) and np.all(cc < sides):
                    js.append(int(cc @ strides))
            nbrs.append(np.asarray(sorted(js), dtype=np.int64))
        pinned = np.zeros(n_sites, dtype=bool)
        for i in range(n_sites):
            c = coords[i]
            pinned[i] = any(c[k] < R or c[k] >= sides[k] - R for k in range(d))
        if not (~pinned).any():
            raise ValueError("frozen-box has no interior sites")
    return Lattice(kind, d, sides, R, norm, False, boundary_value,
                   n_sites, coords, tuple(nbrs), pinned)


def neighbors(lat, i):
    """Sorted neighbor indices of site i."""
    return lat.neighbor_lists[i]


def regular_degree(lat, dynamic_only=True):
    """Common neighborhood size |N_i|; raises if the lattice is not regular.

    On a frozen-box only the interior sites are required to agree.
    """
    sites = lat.unpinned if dynamic_only else range(lat.n_sites)
    degs = {len(lat.neighbor_lists[i]) for i in sites}
    if len(degs) != 1:
        raise ValueError(f"lattice is not regular: degrees {sorted(degs)}")
    return degs.pop()


# -- configurations ----------------------------------------------------------
# Configurations are plain int8 arrays; the alphabet travels with the model.

ALPHA01 = (0, 1)
ALPHAPM = (-1, 1)


def zeros(lat):
    return np.zeros(lat.n_sites, dtype=np.int8)


def ones(lat, value=1):
    return np.full(lat.n_sites, value, dtype=np.int8)


def single(lat, i, one=1, zero=0):
    x = np.full(lat.n_sites, zero, dtype=np.int8)
    x[i] = one
    return x


def product_config(lat, p, rng, one=1, zero=0):
    """i.i.d. sites: `one` with probability p, else `zero`."""
    x = np.where(rng.random(lat.n_sites) < p, one, zero).astype(np.int8)
    return x


def with_boundary(lat, x):
    """Overwrite pinned sites with the lattice's frozen boundary value."""
    if lat.boundary_value is not None:
        x = x.copy()
        x[lat.pinned] = lat.boundary_value
    return x


def validate_config(lat, x, alphabet):
    x = np.asarray(x)
    if x.shape != (lat.n_sites,):
        raise ValueError(f"configuration length {x.shape} != site count {lat.n_sites}")
    if not np.isin(x, np.asarray(alphabet)).all():
        raise ValueError(f"configuration values outside alphabet {alphabet}")
    return x


def config_rows(lat, x):
    """(coords..., state) tuples for CSV output."""
    return [tuple(lat.coords[i]) + (int(x[i]),) for i in range(lat.n_sites)]
