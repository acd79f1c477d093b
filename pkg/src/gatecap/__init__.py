"""Entanglement and assisted classical capacities of bipartite unitary gates."""

__version__ = "0.1.0"
