"""The directed manifold of flagged points over C^{2k}.

A point pairs a base vector with a flag; the distribution of interest is
the corank-n subbundle whose base component is constrained to S' + Sigma''
of the flag.  This module provides the dimension formula, chart-level
tangent vectors, distribution frames, the torsion tensor (closed form at a
chart center, a symbolic bracket oracle, and a finite-difference oracle),
the graph and isotropy loci of n-planes inside the distribution, the
linearized torsion operator on fiber homomorphisms, and the free
transitive fiber translation of the affine bundle structure.

Tangent vectors are stored in chart components: ``x_part`` holds the 2k
coefficients of the base-direction frame of the chart and ``z_part`` the
coefficients of the fiber coordinate directions, ordered as in
:func:`acx.flags.index_set`.  Charts at arbitrary centers are transported
from the standard one by the deterministic witness of the center, so the
components of a tangent vector are invariant under that transport.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cxlinalg import TOL_RANK, CSubspace, LinMap, numerical_rank, span
from .flags import (
    ChartCoords,
    Flag,
    ZPoint,
    _apply_matrix,
    _decode_standard,
    _encode_standard,
    index_positions,
    index_set,
    standard_flag,
    transitivity_witness,
)

# Coefficient of the torsion closed form
#   theta(X, Y)_i = TORSION_COEFF * sum_j (X_j Y_{ij} - Y_j X_{ij}).
# Pinned so that theta(X, Y) is the Lie bracket of the frame extensions of
# X and Y reduced modulo the distribution; the bracket and finite
# difference oracles below recompute that bracket independently.
TORSION_COEFF = -1.0

# How far x components 0..n-1 may deviate from zero before a vector is
# rejected as not lying in the distribution.  Loose enough for vectors
# produced by finite differencing.
MEMBERSHIP_TOL = 1e-6

ISOTROPY_TOL = 1e-8


def dim_N(n: int, k: int) -> int:
    """Complex dimension 2k + 2(k^2 + n(k-n)) of the flagged manifold."""
    if not (k >= n >= 1):
        raise ValueError("need k >= n >= 1")
    return 2 * k + 2 * (k * k + n * (k - n))


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Tangent vector in chart components at ``chart_center``."""

    x_part: np.ndarray = field(repr=False)
    z_part: np.ndarray = field(repr=False)
    chart_center: ZPoint

    def __post_init__(self):
        n, k = self.chart_center.flag.n, self.chart_center.flag.k
        x = np.asarray(self.x_part, dtype=complex).reshape(-1)
        z = np.asarray(self.z_part, dtype=complex).reshape(-1)
        if x.shape[0] != 2 * k:
            raise ValueError("x_part must have 2k components")
        if z.shape[0] != dim_N(n, k) - 2 * k:
            raise ValueError("z_part must have one component per chart pair")
        object.__setattr__(self, "x_part", x)
        object.__setattr__(self, "z_part", z)

    @property
    def nk(self):
        return self.chart_center.flag.n, self.chart_center.flag.k

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x_part, self.z_part])

    def __add__(self, other: "TangentVec") -> "TangentVec":
        _same_chart(self, other)
        return TangentVec(self.x_part + other.x_part,
                          self.z_part + other.z_part, self.chart_center)

    def __sub__(self, other: "TangentVec") -> "TangentVec":
        _same_chart(self, other)
        return TangentVec(self.x_part - other.x_part,
                          self.z_part - other.z_part, self.chart_center)

    def __mul__(self, c):
        return TangentVec(c * self.x_part, c * self.z_part, self.chart_center)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class QuotientVec:
    """Class of a tangent vector modulo the distribution.

    ``coeffs`` are the n coefficients of the first n base-direction frame
    vectors of the chart at ``chart_center``, which represent the quotient.
    """

    coeffs: np.ndarray = field(repr=False)
    chart_center: ZPoint

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != self.chart_center.flag.n:
            raise ValueError("quotient vector must have n coefficients")
        object.__setattr__(self, "coeffs", c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def _same_chart(a, b):
    if a.chart_center is not b.chart_center:
        fa, fb = a.chart_center.flag, b.chart_center.flag
        if (fa.n, fa.k) != (fb.n, fb.k) or not np.allclose(
                a.chart_center.y, b.chart_center.y):
            raise ValueError("tangent vectors live in different charts")


def standard_zpoint(n: int, k: int) -> ZPoint:
    return ZPoint(np.zeros(2 * k, dtype=complex), standard_flag(n, k))


class Chart:
    """The affine-transported chart of the flagged manifold at a point.

    Coordinates of a point p are ``x = Binv (p.y - center.y)`` together
    with the graph coordinates of ``Binv . p.flag`` at the standard flag,
    where B is the deterministic witness of the center flag.  The center
    itself has coordinates zero.
    """

    def __init__(self, center: ZPoint):
        self.center = center
        self.n = center.flag.n
        self.k = center.flag.k
        self.N = dim_N(self.n, self.k)
        self.B = transitivity_witness(center.flag)
        self.Binv = np.linalg.inv(self.B)

    def encode_point(self, p: ZPoint):
        x = self.Binv @ (p.y - self.center.y)
        Z = _encode_standard(_apply_matrix(self.Binv, p.flag), 1e8)
        return x, Z

    def decode_point(self, x, Z: ChartCoords) -> ZPoint:
        y = self.center.y + self.B @ np.asarray(x, dtype=complex)
        return ZPoint(y, _apply_matrix(self.B, _decode_standard(Z)))

    def coords_vector(self, p: ZPoint) -> np.ndarray:
        x, Z = self.encode_point(p)
        return np.concatenate([x, Z.to_vector()])

    def point_from_vector(self, v) -> ZPoint:
        v = np.asarray(v, dtype=complex).reshape(-1)
        two_k = 2 * self.k
        Z = ChartCoords.from_vector(self.n, self.k, v[two_k:])
        return self.decode_point(v[:two_k], Z)

    def tangent(self, x_part, z_part) -> TangentVec:
        return TangentVec(x_part, z_part, self.center)

    def tangent_from_vector(self, v) -> TangentVec:
        v = np.asarray(v, dtype=complex).reshape(-1)
        return self.tangent(v[:2 * self.k], v[2 * self.k:])

    def dpi(self, tv: TangentVec) -> np.ndarray:
        """Ambient C^{2k} image of a tangent vector under the projection."""
        return self.B @ tv.x_part


def frame_coefficients(Z: ChartCoords) -> np.ndarray:
    """The linear coefficient matrix a(w) of the distribution frame.

    ``a`` has shape (k, 2k); column j (for j >= n) holds the coefficients
    of the first k base directions in the frame vector with leading
    direction j.  Entries are the chart coordinates themselves: a[i, j] =
    z_ij whenever (i, j) is an admissible pair with i < k, and 0 otherwise.
    """
    n, k = Z.n, Z.k
    a = np.zeros((k, 2 * k), dtype=complex)
    if k > n:
        a[:n, n:k] = Z.zS1
    a[:k, k:2 * k] = Z.zSig2
    return a


def distribution_frame(w: ZPoint, center: ZPoint | None = None) -> list[TangentVec]:
    """Frame of the distribution at w, expressed in a chart.

    With ``center`` omitted the chart is the one centered at w itself and
    the frame consists of the base coordinate directions n..2k-1 plus all
    fiber coordinate directions.  In a chart centered elsewhere the base
    frame vectors acquire the linear coefficients a(w) of
    :func:`frame_coefficients`.  Always returns N - n vectors.
    """
    if center is None:
        center = w
        n, k = w.flag.n, w.flag.k
        Z = ChartCoords.zero(n, k)
    else:
        chart = Chart(center)
        _, Z = chart.encode_point(w)
    n, k = center.flag.n, center.flag.k
    a = frame_coefficients(Z)
    nz = dim_N(n, k) - 2 * k
    frame = []
    for j in range(n, 2 * k):
        x = np.zeros(2 * k, dtype=complex)
        x[j] = 1.0
        x[:k] += a[:, j]
        frame.append(TangentVec(x, np.zeros(nz, dtype=complex), center))
    for pos in range(nz):
        z = np.zeros(nz, dtype=complex)
        z[pos] = 1.0
        frame.append(TangentVec(np.zeros(2 * k, dtype=complex), z, center))
    return frame


def _check_membership(v: TangentVec, tol: float):
    n = v.chart_center.flag.n
    scale = max(1.0, float(np.linalg.norm(v.to_vector())))
    if float(np.linalg.norm(v.x_part[:n])) > tol * scale:
        raise ValueError("vector is not in the distribution")


def torsion_central(X: TangentVec, Y: TangentVec,
                    membership_tol: float = MEMBERSHIP_TOL) -> QuotientVec:
    """Closed form of the torsion at a chart center.

    For distribution vectors at the center, component i of the class of
    the bracket modulo the distribution is
    ``TORSION_COEFF * sum_{j >= n} (X_j Y_{ij} - Y_j X_{ij})``
    over the admissible pairs (i, j) with i < n.
    """
    _same_chart(X, Y)
    _check_membership(X, membership_tol)
    _check_membership(Y, membership_tol)
    n, k = X.nk
    pos = index_positions(n, k)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n, 2 * k):
            p = pos[(i, j)]
            acc += X.x_part[j] * Y.z_part[p] - Y.x_part[j] * X.z_part[p]
        out[i] = TORSION_COEFF * acc
    return QuotientVec(out, X.chart_center)


def torsion_bracket_oracle(X: TangentVec, Y: TangentVec,
                           membership_tol: float = MEMBERSHIP_TOL) -> QuotientVec:
    """Torsion via the Lie bracket of frame extensions, reduced mod the
    distribution.

    X and Y are extended with constant coefficients in the distribution
    frame; the frame's base coefficients a(w) are degree-1 polynomials in
    the fiber coordinates, so the bracket at the center is computed
    exactly from the symbolic derivatives da_ij / dz_ml = delta_im
    delta_jl.  Independent of :func:`torsion_central`, which never forms
    a bracket.
    """
    _same_chart(X, Y)
    _check_membership(X, membership_tol)
    _check_membership(Y, membership_tol)
    n, k = X.nk
    bracket = np.zeros(2 * k, dtype=complex)
    # Only base components i < k of the frame depend on coordinates, and
    # the coefficient of direction i in frame field j is z_ij itself.
    for apos, (i, j) in enumerate(index_set(n, k)):
        if i < k and j >= n:
            bracket[i] += X.z_part[apos] * Y.x_part[j] - Y.z_part[apos] * X.x_part[j]
    return QuotientVec(bracket[:n], X.chart_center)


def torsion_at(w: ZPoint, zeta: TangentVec, eta: TangentVec,
               membership_tol: float = MEMBERSHIP_TOL) -> QuotientVec:
    """Torsion at an arbitrary point, for vectors in the chart at w.

    The chart at w is the standard chart transported by the affine map
    built from the witness of w's flag; that map carries the distribution
    to the distribution and is the identity on chart components, so the
    central closed form applies to the components directly.  The quotient
    is returned with respect to the first n base frame directions at w.
    """
    for v in (zeta, eta):
        c = v.chart_center
        if c is not w and (not np.allclose(c.y, w.y) or c.flag is not w.flag):
            raise ValueError("vectors must be expressed in the chart at w")
    return torsion_central(zeta, eta, membership_tol)


def quotient_class_ambient(q: QuotientVec) -> np.ndarray:
    """Canonical ambient representative of a quotient class.

    Lifts the class to the ambient C^{2k} through the chart frame and
    projects onto the orthogonal complement of S' + Sigma'' at the chart
    center, which is a basis-free normal form usable for comparisons
    across charts.
    """
    flag = q.chart_center.flag
    B = transitivity_witness(flag)
    v = B[:, :flag.n] @ q.coeffs
    delta = span(np.hstack([flag.Sp.basis, flag.Sigpp.basis])) \
        if flag.Sp.dim else flag.Sigpp
    return v - delta.projector() @ v


# ---------------------------------------------------------------------------
# Finite-difference torsion oracle


def delta_reduced_coords(Z: ChartCoords) -> np.ndarray:
    """Reduced-echelon basis, in chart components, of S' + Sigma'' at the
    point with fiber coordinates Z.

    Returns R of shape (2k, 2k - n) with R[n:, :] the identity; columns
    span the base-direction constraint space of the distribution at that
    point.  Exact, not linearized: it is built from the decoded flag.
    """
    flag0 = _decode_standard(Z)
    cols = [flag0.Sp.basis, flag0.Sigpp.basis] if flag0.Sp.dim else [flag0.Sigpp.basis]
    Bmat = np.hstack(cols)
    n = Z.n
    return Bmat @ np.linalg.inv(Bmat[n:, :])


def distribution_vector(chart: Chart, Z: ChartCoords, t, zc) -> TangentVec:
    """Vector of the distribution at the point with fiber coordinates Z,
    with frame coefficients t (2k - n of them) and fiber part zc."""
    R = delta_reduced_coords(Z)
    return chart.tangent(R @ np.asarray(t, dtype=complex),
                         np.asarray(zc, dtype=complex))


def torsion_fd_oracle(chart: Chart, w_coords, zeta: TangentVec,
                      eta: TangentVec, step: float = 1e-6) -> np.ndarray:
    """Finite-difference bracket of moving-frame extensions, as an ambient
    quotient representative.

    zeta and eta must lie in the distribution at the point w with chart
    coordinates ``w_coords``.  Each is extended to the vector field with
    constant coefficients in the exact moving frame of the distribution
    (see :func:`distribution_vector`); the bracket is estimated by central
    differences of the field components along the two directions and then
    reduced modulo the distribution at w.  Fully independent of the
    closed-form and symbolic routes.
    """
    n, k = chart.n, chart.k
    w_coords = np.asarray(w_coords, dtype=complex).reshape(-1)

    def field(tcoef, zcoef):
        def value(coords):
            Z = ChartCoords.from_vector(n, k, coords[2 * k:])
            R = delta_reduced_coords(Z)
            return np.concatenate([R @ tcoef, zcoef])
        return value

    t_zeta = zeta.x_part[n:]
    t_eta = eta.x_part[n:]
    f_zeta = field(t_zeta, zeta.z_part)
    f_eta = field(t_eta, eta.z_part)
    v_zeta = zeta.to_vector()
    v_eta = eta.to_vector()

    def directional(fld, direction):
        plus = fld(w_coords + step * direction)
        minus = fld(w_coords - step * direction)
        return (plus - minus) / (2.0 * step)

    bracket = directional(f_eta, v_zeta) - directional(f_zeta, v_eta)
    bx = bracket[:2 * k]
    # Reduce modulo the distribution at w and move to the ambient space.
    Zw = ChartCoords.from_vector(n, k, w_coords[2 * k:])
    Rw = delta_reduced_coords(Zw)
    resid = bx - Rw @ bx[n:]
    v = chart.B @ resid
    p = chart.point_from_vector(w_coords)
    delta = span(np.hstack([p.flag.Sp.basis, p.flag.Sigpp.basis])) \
        if p.flag.Sp.dim else p.flag.Sigpp
    return TORSION_COEFF / (-1.0) * (v - delta.projector() @ v)


def transport_tangent(src: Chart, dst: Chart, at_coords, v: TangentVec,
                      step: float = 1e-6) -> TangentVec:
    """Express a tangent vector given in chart ``src`` in chart ``dst``.

    Differentiates the transition map along the straight coordinate line
    through the base point; used by oracles and tests, not by the
    production torsion path.
    """
    at_coords = np.asarray(at_coords, dtype=complex).reshape(-1)
    vv = v.to_vector()
    plus = dst.coords_vector(src.point_from_vector(at_coords + step * vv))
    minus = dst.coords_vector(src.point_from_vector(at_coords - step * vv))
    return dst.tangent_from_vector((plus - minus) / (2.0 * step))


# ---------------------------------------------------------------------------
# Graph locus, isotropy locus, and the linearized torsion operator


def t_rel_subspace(n: int, k: int) -> CSubspace:
    """The fiber-direction coordinate subspace of the chart tangent space."""
    N = dim_N(n, k)
    basis = np.zeros((N, N - 2 * k), dtype=complex)
    basis[2 * k:, :] = np.eye(N - 2 * k)
    return CSubspace(N, basis)


def x_aligned_s_lift(n: int, k: int) -> CSubspace:
    """The n-plane spanned by base frame directions n..2n-1, lifted to the
    chart tangent space with zero fiber part."""
    N = dim_N(n, k)
    basis = np.zeros((N, n), dtype=complex)
    basis[n:2 * n, :] = np.eye(n)
    return CSubspace(N, basis)


def lift_to_tangent(n: int, k: int, xbasis) -> CSubspace:
    """Embed base-direction columns into the chart tangent space."""
    xbasis = np.asarray(xbasis, dtype=complex)
    N = dim_N(n, k)
    basis = np.zeros((N, xbasis.shape[1]), dtype=complex)
    basis[:2 * k, :] = xbasis
    return CSubspace(N, basis)


def _tangent_columns(w: ZPoint, V: CSubspace) -> list[TangentVec]:
    n, k = w.flag.n, w.flag.k
    return [TangentVec(V.basis[:2 * k, j], V.basis[2 * k:, j], w)
            for j in range(V.dim)]


def in_gro(w: ZPoint, V: CSubspace,
           membership_tol: float = MEMBERSHIP_TOL) -> bool:
    """True when the base projection of V is injective.

    V must be an n-plane inside the distribution at w, presented in chart
    components at w; it belongs to the graph locus exactly when its base
    components have full numerical rank n.
    """
    n, k = w.flag.n, w.flag.k
    if V.dim != n:
        raise ValueError("V must have dimension n")
    if V.ambient_dim != dim_N(n, k):
        raise ValueError("V must live in the chart tangent space")
    for col in _tangent_columns(w, V):
        _check_membership(col, membership_tol)
    return numerical_rank(V.basis[:2 * k, :], TOL_RANK) == n


def is_isotropic(w: ZPoint, V: CSubspace, tol: float = ISOTROPY_TOL,
                 membership_tol: float = MEMBERSHIP_TOL) -> bool:
    """True when the torsion at w vanishes on V x V."""
    n, k = w.flag.n, w.flag.k
    if V.dim != n:
        raise ValueError("V must have dimension n")
    cols = _tangent_columns(w, V)
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            if torsion_at(w, cols[a], cols[b], membership_tol).norm() > tol:
                return False
    return True


def theta_matrix(w: ZPoint, V: CSubspace,
                 membership_tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Matrix of the linearized torsion operator at (w, V).

    V is an n-plane inside the base constraint space at w, lifted to the
    chart tangent space with zero fiber part.  The operator sends a fiber
    homomorphism f (from V to the fiber directions) to the restriction of
    the torsion to the graph of f; rows are indexed by (pair (a, b) with
    a < b, quotient component i), columns by (basis vector m of V, fiber
    coordinate position).  Row count n*n(n-1)/2, column count
    n*(N - 2k).
    """
    n, k = w.flag.n, w.flag.k
    N = dim_N(n, k)
    if V.ambient_dim != N or V.dim != n:
        raise ValueError("V must be an n-plane in the chart tangent space")
    if float(np.linalg.norm(V.basis[2 * k:, :])) > membership_tol:
        raise ValueError("V must be lifted with zero fiber part")
    if float(np.linalg.norm(V.basis[:n, :])) > membership_tol:
        raise ValueError("V must lie in the base constraint space")
    nz = N - 2 * k
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rows = len(pairs) * n
    cols = n * nz
    out = np.zeros((rows, cols), dtype=complex)
    X = V.basis[:2 * k, :]
    for ppos, (i, j) in enumerate(index_set(n, k)):
        if i >= n or j < n:
            continue
        for m in range(n):
            col = m * nz + ppos
            for pr, (a, b) in enumerate(pairs):
                # theta(X^a + f X^a, X^b + f X^b) with f = elementary
                # (m -> fiber direction ppos); only quotient slot i sees it.
                val = 0.0 + 0.0j
                if b == m:
                    val += X[j, a]
                if a == m:
                    val -= X[j, b]
                if val != 0.0:
                    out[pr * n + i, col] += TORSION_COEFF * val
    return out


def theta_apply(w: ZPoint, V: CSubspace, fmat,
                membership_tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Evaluate the linearized torsion operator by restricting the torsion
    to the graph of f, pair by pair.  Cross-checks :func:`theta_matrix`."""
    n, k = w.flag.n, w.flag.k
    fmat = np.asarray(fmat, dtype=complex)
    cols = _tangent_columns(w, V)
    graph_cols = [TangentVec(c.x_part, c.z_part + fmat[:, m], w)
                  for m, c in enumerate(cols)]
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    out = np.zeros(len(pairs) * n, dtype=complex)
    for pr, (a, b) in enumerate(pairs):
        q = torsion_at(w, graph_cols[a], graph_cols[b], membership_tol)
        out[pr * n:(pr + 1) * n] = q.coeffs
    return out


def theta_kernel_dim(w: ZPoint, V: CSubspace) -> int:
    """Dimension of the kernel of the linearized torsion operator."""
    n, k = w.flag.n, w.flag.k
    mat = theta_matrix(w, V)
    return n * (dim_N(n, k) - 2 * k) - numerical_rank(mat, TOL_RANK)


# ---------------------------------------------------------------------------
# Affine fiber arithmetic


def fiber_translate(f: LinMap, G: CSubspace, n: int, k: int,
                    tol: float = 1e-8) -> CSubspace:
    """Translate a graph in the affine fiber by a fiber homomorphism.

    The fiber over S consists of the graphs of maps from the lift of S to
    the fiber directions; ``(f, graph of g) -> graph of (f + g)`` is a
    free transitive action.  ``f.domain`` must be the lifted S (zero
    fiber part) and ``f.codomain`` a fiber-direction subspace.
    """
    N = dim_N(n, k)
    if G.ambient_dim != N or f.domain.ambient_dim != N:
        raise ValueError("ambient must be the chart tangent space")
    two_k = 2 * k
    TG, ZG = G.basis[:two_k, :], G.basis[two_k:, :]
    if numerical_rank(TG, TOL_RANK) != G.dim:
        raise ValueError("not a graph over S")
    Sx = f.domain.basis[:two_k, :]
    C, *_ = np.linalg.lstsq(Sx, TG, rcond=None)
    if float(np.linalg.norm(Sx @ C - TG)) > tol * max(1.0, float(np.linalg.norm(TG))):
        raise ValueError("not a graph over S")
    fz = f.codomain.basis[two_k:, :] @ f.matrix @ C
    return span(np.vstack([TG, ZG + fz]))


def fiber_decode(G: CSubspace, S_lift: CSubspace, n: int, k: int,
                 tol: float = 1e-8) -> np.ndarray:
    """Matrix of the map whose graph is G, over the lifted S.

    Expressed with respect to the stored basis of ``S_lift`` and the fiber
    coordinate units; inverse of building the graph with
    :func:`acx.cxlinalg.graph_of` against :func:`t_rel_subspace`.
    """
    N = dim_N(n, k)
    if G.ambient_dim != N or S_lift.ambient_dim != N:
        raise ValueError("ambient must be the chart tangent space")
    two_k = 2 * k
    TG, ZG = G.basis[:two_k, :], G.basis[two_k:, :]
    Sx = S_lift.basis[:two_k, :]
    C, *_ = np.linalg.lstsq(Sx, TG, rcond=None)
    if float(np.linalg.norm(Sx @ C - TG)) > tol * max(1.0, float(np.linalg.norm(TG))):
        raise ValueError("not a graph over S")
    return ZG @ np.linalg.inv(C)
