"""Complex linear algebra over explicit basis matrices.

Subspaces of C^d are stored as orthonormalized basis matrices and compared
through their orthogonal projectors, which makes every operation immune to
the particular basis a caller supplies.  The module provides spans, span
equality, intersections, graphs of linear maps, the +i/-i eigenspace
splitting of a real almost complex matrix, and numerical rank.

All tolerances are relative and configurable per call; the defaults are
tuned for double precision with ambient dimensions up to ~50.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative tolerance for rank decisions in SVD-based factorizations.
TOL_RANK = 1e-9
# Operator-norm tolerance for projector comparisons (subspace equality).
TOL_EQ = 1e-9
# Tolerance on ||J^2 + I|| for accepting J as an almost complex matrix.
TOL_ACS = 1e-10


def numerical_rank(M, tol: float = TOL_RANK) -> int:
    """Number of singular values of M above ``tol * sigma_max``."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def _orthonormal_column_basis(M, tol: float):
    """Thin orthonormal factor of the column span of M, via SVD."""
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    r = int(np.sum(s > tol * s[0]))
    return U[:, :r]


@dataclass(frozen=True, eq=False)
class CSubspace:
    """A complex linear subspace of C^d held as an orthonormal basis matrix.

    ``basis`` has shape (ambient_dim, dim) with orthonormal columns.  Two
    subspaces are considered equal when their projectors differ by less
    than TOL_EQ in operator norm; use :func:`subspace_eq`, not ``==``.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError("basis must be an (ambient_dim, r) matrix")
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, ambient_dim: int) -> "CSubspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace (Hermitian idempotent)."""
        return self.basis @ self.basis.conj().T

    def conj(self) -> "CSubspace":
        """Image of the subspace under entrywise complex conjugation."""
        return CSubspace(self.ambient_dim, np.conj(self.basis))

    def contains(self, other: "CSubspace", tol: float = TOL_EQ) -> bool:
        """True when ``other`` is contained in this subspace."""
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimensions differ")
        if other.dim == 0:
            return True
        resid = other.basis - self.projector() @ other.basis
        return float(np.linalg.norm(resid, 2)) < tol

    def __repr__(self):  # keep array noise out of test output
        return f"CSubspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def span(columns, tol: float = TOL_RANK) -> CSubspace:
    """Canonicalized span of the columns of a complex matrix.

    The result stores the thin orthonormal factor of a rank-revealing SVD,
    so its dimension is the numerical rank of the input.  An input that is
    numerically zero is rejected; use :meth:`CSubspace.zero` to build the
    trivial subspace on purpose.
    """
    M = np.asarray(columns, dtype=complex)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("zero span")
    if not np.linalg.norm(M) > 0.0:
        raise ValueError("zero span")
    return CSubspace(M.shape[0], _orthonormal_column_basis(M, tol))


def subspace_eq(A: CSubspace, B: CSubspace, tol: float = TOL_EQ) -> bool:
    """Projector-norm equality test, independent of basis choice."""
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return float(np.linalg.norm(A.projector() - B.projector(), 2)) < tol


def intersect(A: CSubspace, B: CSubspace, tol: float = TOL_RANK) -> CSubspace:
    """Intersection of two subspaces via the kernel of stacked projectors.

    A vector lies in both subspaces iff it is annihilated by both
    complementary projectors, so the intersection is the kernel of
    ``[[I - P_A], [I - P_B]]``.
    """
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    d = A.ambient_dim
    stacked = np.vstack([np.eye(d) - A.projector(), np.eye(d) - B.projector()])
    _, s, Vh = np.linalg.svd(stacked)
    # Kernel vectors correspond to singular values at the noise floor.
    scale = s[0] if s.size and s[0] > 0 else 1.0
    keep = s <= tol * scale
    basis = Vh[keep].conj().T
    return CSubspace(d, basis)


def orth_complement_in(sub: CSubspace, within: CSubspace,
                       tol: float = TOL_RANK) -> CSubspace:
    """Orthogonal complement of ``sub`` inside ``within``.

    Computed by modified Gram-Schmidt on the residuals of the canonical
    basis of ``within`` against ``sub``, in basis order; the deterministic
    order matters for reproducible frame constructions downstream.
    """
    if sub.ambient_dim != within.ambient_dim:
        raise ValueError("ambient dimensions differ")
    P = sub.projector()
    cols = []
    for j in range(within.dim):
        v = within.basis[:, j] - P @ within.basis[:, j]
        for q in cols:
            v = v - q * np.vdot(q, v)
        nrm = np.linalg.norm(v)
        if nrm > tol:
            cols.append(v / nrm)
    want = within.dim - sub.dim
    if len(cols) != want:
        raise ValueError("complement extraction failed; containment violated?")
    if not cols:
        return CSubspace.zero(sub.ambient_dim)
    return CSubspace(sub.ambient_dim, np.column_stack(cols))


@dataclass(frozen=True, eq=False)
class LinMap:
    """A linear map between two stored subspaces.

    ``matrix`` has shape (codomain.dim, domain.dim) and is expressed with
    respect to the stored orthonormal bases of both subspaces.
    """

    domain: CSubspace
    codomain: CSubspace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError("matrix shape does not match domain/codomain dims")
        object.__setattr__(self, "matrix", m)

    def __call__(self, coeffs):
        """Apply to a coefficient vector in the domain basis; returns an
        ambient vector."""
        return self.codomain.basis @ (self.matrix @ np.asarray(coeffs))


def graph_of(f: LinMap, tol: float = TOL_RANK) -> CSubspace:
    """Graph ``{x + f(x)}`` of a map between complementary subspaces.

    The domain and codomain must intersect trivially in the common ambient
    space; the graph then has the dimension of the domain and meets the
    codomain only in zero.
    """
    T, W = f.domain, f.codomain
    if T.ambient_dim != W.ambient_dim:
        raise ValueError("not complementary")
    if T.dim > 0 and W.dim > 0 and intersect(T, W, tol).dim > 0:
        raise ValueError("not complementary")
    cols = T.basis + W.basis @ f.matrix
    if T.dim == 0:
        return CSubspace.zero(T.ambient_dim)
    return span(cols, tol)


def eig_pm_i(J, tol: float = TOL_ACS):
    """The +i and -i eigenspaces of the complexification of a real J.

    For a real matrix with ``J^2 = -I`` on R^{2m} the complexified ambient
    C^{2m} splits as the column spans of ``I - iJ`` (eigenvalue +i) and
    ``I + iJ`` (eigenvalue -i); the two are complex conjugates of each
    other and each has dimension m.
    """
    J = np.asarray(J)
    if np.iscomplexobj(J) and np.linalg.norm(J.imag) > 0:
        raise ValueError("not an almost complex structure")
    J = J.real.astype(float)
    d = J.shape[0]
    if J.ndim != 2 or J.shape != (d, d) or d % 2 != 0:
        raise ValueError("not an almost complex structure")
    if np.linalg.norm(J @ J + np.eye(d), 2) > tol * max(1.0, np.linalg.norm(J, 2) ** 2):
        raise ValueError("not an almost complex structure")
    plus = span(np.eye(d) - 1j * J)
    minus = span(np.eye(d) + 1j * J)
    if plus.dim != d // 2 or minus.dim != d // 2:
        raise ValueError("not an almost complex structure")
    return plus, minus
