"""Desk-scale machinery for almost complex structures.

Subpackages cover orthonormal-basis linear algebra over C (cxlinalg),
flag fibers and their coordinate charts (flags), the directed manifold of
flagged points with its torsion tensor and affine fiber arithmetic
(zspace), octonion arithmetic on the six-sphere (octonions), the
eigenvalue-splitting embedding of the sphere and its verification suite
(embed), and exact symbolic Chern-class calculus (chern).
"""

__version__ = "0.1.0"
