"""Driven qubit-chain laboratory: exact engines, spectroscopy, and braiding.

Modules:

* ``model``   chain parameters and exact Pauli-string algebra
* ``ffsim``   free-fermion engine (2N x 2N orthogonal dynamics)
* ``svsim``   dense statevector oracle and operator-space brute force
* ``spectro`` Fourier components, wavefunction reconstruction, phase labels
* ``discriminator`` two-point correlator test for trivial vs topological modes
* ``braid``   fast-approximate-swap channel and angle optimization
* ``circuits`` gate-level compilation of the measurement and braid gadgets
* ``cli``     batch experiment runner (``mflab`` entry point)
"""

__version__ = "0.1.0"
