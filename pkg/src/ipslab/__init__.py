"""ipslab: a simulation lab for interacting particle systems.

Finite-lattice particle systems (contact process, voter models, Glauber
spin dynamics, random walks, and friends) built from local maps applied at
Poisson-distributed times, plus the machinery the construction buys for
free: backward relevance sets, additive/cancellative duality, monotone
couplings, mean-field limits, and comparison with oriented percolation.
"""

__version__ = "0.1.0"

from . import lattice, localmaps, models, graphical, duality, meanfield
from . import estimators, percolation, kdep

__all__ = [
    "lattice",
    "localmaps",
    "models",
    "graphical",
    "duality",
    "meanfield",
    "estimators",
    "percolation",
    "kdep",
]
