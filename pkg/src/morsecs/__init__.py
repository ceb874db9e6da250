"""Numerics for the one-dimensional Morse oscillator in its ladder-operator
formulation: the pseudo-number-state basis, tridiagonal Hamiltonian matrices,
coherent states labeled by the open unit disk, and the associated unitary
displacement operator, each paired with an independent numerical cross-check.
"""

__version__ = "0.1.0"
