"""hypervol: volumes of simple hyperbolic polyhedra and quantum spin-network
invariants of their trivalent 1-skeleta."""

__version__ = "0.1.0"
