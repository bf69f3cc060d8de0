"""Restricted representation theory of a non-graded Hamiltonian Lie algebra.

Builds H(2;(1,1);Phi(1)) and its minimal p-envelope over F_p (p >= 5),
realizes every restricted induced module from the gl2 head as explicit
matrices, computes maximal vectors, composition series and the simple-module
catalog, restricts to a rank-one Witt subalgebra, and exposes the whole
verification battery through a CLI (``hamrep``).
"""

__version__ = "0.1.0"
