"""Flag fibers of signature (k-n, k) in C^{2k} and their coordinate charts.

A flag here is a 4-tuple (S', S'', Sigma', Sigma'') of subspaces of C^{2k}
with dim S' = dim S'' = k-n, dim Sigma' = dim Sigma'' = k, the containments
S' in Sigma', S'' in Sigma'', and Sigma' + Sigma'' = C^{2k} as a direct
sum.  The space Q of all such flags is the fiber of the flagged manifold
over its base; the general linear group acts transitively on Q.

Coordinate charts on Q are graph coordinates relative to a center flag.
At the standard center, Sigma' is the graph of a map Sigma'_0 -> Sigma''_0
(block zSig1), Sigma'' the graph of a map Sigma''_0 -> Sigma'_0 (zSig2),
and S' is parametrized inside Sigma' by combining the adapted basis of
Sigma' with graph coefficients over the S'_0 block (zS1), so that the
containment S' in Sigma' holds identically in the coordinates; same for
S'' (zS2).  Charts at arbitrary centers are transported from the standard
one by a deterministic group element (see transitivity_witness).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cxlinalg import (
    TOL_ACS,
    TOL_EQ,
    TOL_RANK,
    CSubspace,
    eig_pm_i,
    intersect,
    numerical_rank,
    orth_complement_in,
    span,
)

# Residual tolerance for the structural invariants checked on every Flag.
FLAG_TOL = 1e-8
# Graph solves whose condition number exceeds this reject the flag from
# the chart; graph coordinates blow up near the chart boundary.
COND_LIMIT = 1e8


@dataclass(frozen=True, eq=False)
class Flag:
    """A flag (S', S'', Sigma', Sigma'') of signature (k-n, k) in C^{2k}."""

    n: int
    k: int
    Sp: CSubspace
    Spp: CSubspace
    Sigp: CSubspace
    Sigpp: CSubspace

    def __post_init__(self):
        n, k = self.n, self.k
        if not (k >= n >= 1):
            raise ValueError("need k >= n >= 1")
        d = 2 * k
        for s in (self.Sp, self.Spp, self.Sigp, self.Sigpp):
            if s.ambient_dim != d:
                raise ValueError("subspace ambient dimension must be 2k")
        if self.Sp.dim != k - n or self.Spp.dim != k - n:
            raise ValueError("dim S' and dim S'' must equal k - n")
        if self.Sigp.dim != k or self.Sigpp.dim != k:
            raise ValueError("dim Sigma' and dim Sigma'' must equal k")
        if not self.Sigp.contains(self.Sp, FLAG_TOL):
            raise ValueError("S' not contained in Sigma'")
        if not self.Sigpp.contains(self.Spp, FLAG_TOL):
            raise ValueError("S'' not contained in Sigma''")
        stacked = np.hstack([self.Sigp.basis, self.Sigpp.basis])
        if numerical_rank(stacked, TOL_RANK) != d:
            raise ValueError("Sigma' and Sigma'' do not span C^{2k}")

    def subspaces(self):
        return (self.Sp, self.Spp, self.Sigp, self.Sigpp)

    def __repr__(self):
        return f"Flag(n={self.n}, k={self.k})"


@dataclass(frozen=True, eq=False)
class ZPoint:
    """A point of the flagged manifold: a base point of C^{2k} plus a flag."""

    y: np.ndarray = field(repr=False)
    flag: Flag

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex).reshape(-1)
        if y.shape[0] != 2 * self.flag.k:
            raise ValueError("base point must have 2k components")
        object.__setattr__(self, "y", y)

    def __repr__(self):
        return f"ZPoint(n={self.flag.n}, k={self.flag.k})"


@dataclass(frozen=True, eq=False)
class ChartCoords:
    """Graph coordinates of a flag relative to a chart center.

    Shapes: zS1 is n x (k-n) (entries z_ij, rows i in [0,n), columns
    j in [n,k)), zS2 is n x (k-n) (rows i in [k,n+k), columns j in
    [n+k,2k)), zSig1 is k x k (rows i in [k,2k), columns j in [0,k)), and
    zSig2 is k x k (rows i in [0,k), columns j in [k,2k)).  The total
    number of free entries is 2(k^2 + n(k-n)).
    """

    n: int
    k: int
    zS1: np.ndarray = field(repr=False)
    zS2: np.ndarray = field(repr=False)
    zSig1: np.ndarray = field(repr=False)
    zSig2: np.ndarray = field(repr=False)

    def __post_init__(self):
        n, k = self.n, self.k
        shapes = {"zS1": (n, k - n), "zS2": (n, k - n),
                  "zSig1": (k, k), "zSig2": (k, k)}
        for name, want in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=complex).reshape(want)
            object.__setattr__(self, name, arr)

    @classmethod
    def zero(cls, n: int, k: int) -> "ChartCoords":
        return cls(n, k, np.zeros((n, k - n)), np.zeros((n, k - n)),
                   np.zeros((k, k)), np.zeros((k, k)))

    @classmethod
    def from_vector(cls, n: int, k: int, vec) -> "ChartCoords":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.shape[0] != 2 * (k * k + n * (k - n)):
            raise ValueError("coordinate vector has the wrong length")
        m = n * (k - n)
        return cls(n, k,
                   vec[:m].reshape(n, k - n),
                   vec[m:2 * m].reshape(n, k - n),
                   vec[2 * m:2 * m + k * k].reshape(k, k),
                   vec[2 * m + k * k:].reshape(k, k))

    def to_vector(self) -> np.ndarray:
        """Flatten in the canonical ordering of :func:`index_set`."""
        return np.concatenate([self.zS1.ravel(), self.zS2.ravel(),
                               self.zSig1.ravel(), self.zSig2.ravel()])

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))


@lru_cache(maxsize=None)
def index_set(n: int, k: int):
    """Ordered tuple of admissible (i, j) coordinate pairs, 0-based.

    Blocks in order: zS1, zS2, zSig1, zSig2, each row-major with i outer.
    The cardinality is 2(k^2 + n(k-n)), matching the chart dimension.
    """
    pairs = []
    pairs += [(i, j) for i in range(0, n) for j in range(n, k)]
    pairs += [(i, j) for i in range(k, n + k) for j in range(n + k, 2 * k)]
    pairs += [(i, j) for i in range(k, 2 * k) for j in range(0, k)]
    pairs += [(i, j) for i in range(0, k) for j in range(k, 2 * k)]
    return tuple(pairs)


@lru_cache(maxsize=None)
def index_positions(n: int, k: int):
    """Map from (i, j) pair to its position in the coordinate vector."""
    return {p: a for a, p in enumerate(index_set(n, k))}


def standard_flag(n: int, k: int) -> Flag:
    """The coordinate-aligned flag built from the standard basis of C^{2k}.

    S' is spanned by e_n..e_{k-1}, S'' by e_{n+k}..e_{2k-1}, Sigma' by
    e_0..e_{k-1} and Sigma'' by e_k..e_{2k-1} (0-based indices).
    """
    if not (k >= n >= 1):
        raise ValueError("need k >= n >= 1")
    eye = np.eye(2 * k, dtype=complex)
    return Flag(
        n, k,
        CSubspace(2 * k, eye[:, n:k]),
        CSubspace(2 * k, eye[:, n + k:2 * k]),
        CSubspace(2 * k, eye[:, 0:k]),
        CSubspace(2 * k, eye[:, k:2 * k]),
    )


def flag_from_acs(Jx, Jn=None, tol: float = TOL_ACS) -> Flag:
    """Flag of eigenspaces of a block almost complex matrix.

    ``Jx`` (2n x 2n) acts on the tangent factor, ``Jn`` ((2k-2n) x (2k-2n),
    possibly None when k = n) on the normal factor; the block-diagonal sum
    acts on R^{2k} with the tangent factor first.  Sigma' and Sigma'' are
    the +i and -i eigenspaces of its complexification; S' and S'' cut
    those with the complexified normal factor (the last 2k-2n coordinates).
    """
    Jx = np.asarray(Jx, dtype=float)
    two_n = Jx.shape[0]
    if Jx.shape != (two_n, two_n) or two_n % 2 != 0:
        raise ValueError("not an almost complex structure")
    if Jn is None or np.asarray(Jn).size == 0:
        Jfull = Jx
    else:
        Jn = np.asarray(Jn, dtype=float)
        nu = Jn.shape[0]
        Jfull = np.zeros((two_n + nu, two_n + nu))
        Jfull[:two_n, :two_n] = Jx
        Jfull[two_n:, two_n:] = Jn
    two_k = Jfull.shape[0]
    if two_k % 2 != 0:
        raise ValueError("not an almost complex structure")
    n, k = two_n // 2, two_k // 2
    sig_p, sig_pp = eig_pm_i(Jfull, tol)  # raises on J^2 != -I
    if k == n:
        s_p = CSubspace.zero(2 * k)
        s_pp = CSubspace.zero(2 * k)
    else:
        eye = np.eye(2 * k, dtype=complex)
        normal = CSubspace(2 * k, eye[:, two_n:])
        s_p = intersect(normal, sig_p)
        s_pp = intersect(normal, sig_pp)
    return Flag(n, k, s_p, s_pp, sig_p, sig_pp)


def flag_involution(f: Flag) -> Flag:
    """Entrywise conjugation followed by the primed/double-primed swap."""
    return Flag(f.n, f.k, f.Spp.conj(), f.Sp.conj(),
                f.Sigpp.conj(), f.Sigp.conj())


def involution(p: ZPoint) -> ZPoint:
    """The anti-holomorphic involution fixing the real points.

    Conjugates the base point and all subspace bases entrywise and swaps
    the primed with the double-primed slots.  Fixed points are exactly the
    points with real base, S'' = conj(S') and Sigma'' = conj(Sigma').
    """
    return ZPoint(np.conj(p.y), flag_involution(p.flag))


def _apply_matrix(B, f: Flag) -> Flag:
    B = np.asarray(B, dtype=complex)

    def image(sub: CSubspace) -> CSubspace:
        if sub.dim == 0:
            return CSubspace.zero(sub.ambient_dim)
        return span(B @ sub.basis)

    return Flag(f.n, f.k, image(f.Sp), image(f.Spp),
                image(f.Sigp), image(f.Sigpp))


def gl_act(B, flag: Flag) -> Flag:
    """Image of a flag under an invertible matrix, slot by slot."""
    B = np.asarray(B, dtype=complex)
    if B.shape != (2 * flag.k, 2 * flag.k):
        raise ValueError("matrix must be 2k x 2k")
    if numerical_rank(B) != 2 * flag.k:
        raise ValueError("singular matrix")
    return _apply_matrix(B, flag)


def transitivity_witness(flag: Flag) -> np.ndarray:
    """A group element sending the standard flag to the given flag.

    Columns are adapted bases ordered to match the standard flag's block
    layout: a complement of S' in Sigma' (n columns), the basis of S'
    (k-n columns), a complement of S'' in Sigma'' (n columns), and the
    basis of S'' (k-n columns).  Complements are extracted by
    Gram-Schmidt in canonical basis order, which makes the witness a
    deterministic function of the flag.
    """
    e1 = orth_complement_in(flag.Sp, flag.Sigp)
    e2 = orth_complement_in(flag.Spp, flag.Sigpp)
    return np.hstack([e1.basis, flag.Sp.basis, e2.basis, flag.Spp.basis])


def stabilizer_check(B, n: int, k: int, tol: float = TOL_EQ) -> bool:
    """Membership test for the stabilizer of the standard flag.

    The stabilizer consists of the invertible block-diagonal matrices
    diag(B1, B2) with k x k blocks, where each Bi is block lower
    triangular with respect to the (n, k-n) split (the n x (k-n) upper
    right sub-block vanishes).  Equivalently, acting on the standard flag
    returns the standard flag; the two criteria agree.
    """
    B = np.asarray(B, dtype=complex)
    if B.shape != (2 * k, 2 * k):
        raise ValueError("matrix must be 2k x 2k")
    if numerical_rank(B) != 2 * k:
        raise ValueError("singular matrix")
    scale = float(np.linalg.norm(B, 2))
    blocks = [B[0:n, n:k], B[k:k + n, n + k:2 * k],
              B[k:2 * k, 0:k], B[0:k, k:2 * k]]
    return all(b.size == 0 or float(np.linalg.norm(b, 2)) < tol * scale
               for b in blocks)


def _solve_graph(top, bottom, cond_limit: float):
    """Solve bottom @ inv(top) with a conditioning guard."""
    if top.shape[0] == 0:
        return np.zeros((bottom.shape[0], 0), dtype=complex)
    if np.linalg.cond(top) > cond_limit:
        raise ValueError("chart domain violated")
    return np.linalg.solve(top.T, bottom.T).T


def _decode_standard(Z: ChartCoords) -> Flag:
    n, k = Z.n, Z.k
    # Sigma' and Sigma'' are graphs over the standard half-spaces.
    b_sig1 = np.vstack([np.eye(k, dtype=complex), Z.zSig1])
    b_sig2 = np.vstack([Z.zSig2, np.eye(k, dtype=complex)])
    # S' combines the adapted Sigma' basis with graph coefficients over
    # the S'_0 block, which keeps S' inside Sigma' for every Z.
    k1 = np.vstack([Z.zS1, np.eye(k - n, dtype=complex)])
    k2 = np.vstack([Z.zS2, np.eye(k - n, dtype=complex)])
    d = 2 * k
    sp = CSubspace.zero(d) if k == n else span(b_sig1 @ k1)
    spp = CSubspace.zero(d) if k == n else span(b_sig2 @ k2)
    return Flag(n, k, sp, spp, span(b_sig1), span(b_sig2))


def _encode_standard(flag: Flag, cond_limit: float) -> ChartCoords:
    n, k = flag.n, flag.k
    eye = np.eye(2 * k, dtype=complex)

    # Chart membership: the four transversality conditions against the
    # standard center's coordinate blocks.
    checks = [
        (flag.Sp.basis, eye[:, 0:n]),
        (flag.Spp.basis, eye[:, k:k + n]),
        (flag.Sigp.basis, eye[:, k:2 * k]),
        (flag.Sigpp.basis, eye[:, 0:k]),
    ]
    for sub, block in checks:
        stacked = np.hstack([sub, block])
        if numerical_rank(stacked, TOL_RANK) != stacked.shape[1]:
            raise ValueError("chart domain violated")

    b1 = flag.Sigp.basis
    z_sig1 = _solve_graph(b1[:k, :], b1[k:, :], cond_limit)
    b2 = flag.Sigpp.basis
    z_sig2 = _solve_graph(b2[k:, :], b2[:k, :], cond_limit)

    if k == n:
        z_s1 = np.zeros((n, 0), dtype=complex)
        z_s2 = np.zeros((n, 0), dtype=complex)
    else:
        # Coordinates of S' in the adapted Sigma' frame are its top block;
        # then solve the graph over the S'_0 rows of that frame.
        y1 = flag.Sp.basis[:k, :]
        z_s1 = _solve_graph(y1[n:, :], y1[:n, :], cond_limit)
        y2 = flag.Spp.basis[k:, :]
        z_s2 = _solve_graph(y2[n:, :], y2[:n, :], cond_limit)

    return ChartCoords(n, k, z_s1, z_s2, z_sig1, z_sig2)


def chart_decode(Z: ChartCoords, center: Flag) -> Flag:
    """Flag with the given graph coordinates in the chart at ``center``.

    The chart at a non-standard center is the standard chart transported
    by the deterministic witness of the center.
    """
    if (Z.n, Z.k) != (center.n, center.k):
        raise ValueError("coordinate and center signatures differ")
    flag0 = _decode_standard(Z)
    b0 = transitivity_witness(center)
    return _apply_matrix(b0, flag0)


def chart_encode(flag: Flag, center: Flag,
                 cond_limit: float = COND_LIMIT) -> ChartCoords:
    """Graph coordinates of a flag in the chart at ``center``.

    Raises ValueError("chart domain violated") when the flag fails the
    transversality conditions of the chart domain or when a graph solve
    is too ill conditioned to trust.
    """
    if (flag.n, flag.k) != (center.n, center.k):
        raise ValueError("flag and center signatures differ")
    b0 = transitivity_witness(center)
    moved = _apply_matrix(np.linalg.inv(b0), flag)
    return _encode_standard(moved, cond_limit)
