"""
Topology package: agent network, base combination weights, expected
combination matrix and its Perron eigenvector.

- network_builder.py: graphs (networkx), Metropolis/uniform weights, sampling probabilities
- validator.py: structural invariants of a NetworkSpec
- combination.py: E[A_T] and the Perron vector
"""

from topology.combination import CombinationMoments
from topology.network_builder import NetworkBuilder
from topology.validator import NetworkValidator

__all__ = ["CombinationMoments", "NetworkBuilder", "NetworkValidator"]
