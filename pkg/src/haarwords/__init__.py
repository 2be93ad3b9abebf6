"""Exact Haar-unitary word integrals via Weingarten calculus, with
Monte Carlo strong-convergence experiments and free-group random walks.
"""

__version__ = "0.1.0"
