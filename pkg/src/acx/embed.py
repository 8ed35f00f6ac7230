"""The eigenvalue-splitting embedding of the six-sphere into the flagged
manifold over C^8, with its verification suite.

A point u of the sphere of unit imaginary octonions is sent to the flagged
point whose base is u itself (as a real vector of C^8) and whose flag
collects the +i/-i eigenspaces of the complexified block structure built
from right octonion multiplication on the tangent space and a quarter-turn
rotation of the normal plane span{u, e0}.  The image lies in the real
points, is transverse to the distribution, and the antiholomorphic part
of the differential lifts the sphere into the graph locus, where the
restricted torsion reproduces the octonion integrability obstruction.

All differentials are second-order central finite differences of chart
coordinates along sphere geodesics; the step is a parameter everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cxlinalg import CSubspace, eig_pm_i, intersect, numerical_rank, span
from .flags import Flag, ZPoint, flag_from_acs, gl_act
from .octonions import (
    J_O,
    Octonion,
    S6Point,
    inner,
    nijenhuis,
    project_tangent,
    right_mult_matrix,
)
from .zspace import Chart, TangentVec, dim_N, torsion_at

FD_STEP = 1e-5
# Constant relating the octonion obstruction to the restricted torsion.
THETA_FACTOR = 4.0


def tangent_frame(p: S6Point) -> np.ndarray:
    """Deterministic orthonormal frame of the tangent space at p.

    Projects the imaginary units e1..e7 onto the tangent space and
    orthonormalizes them in order, dropping the single dependent
    direction; columns are vectors of R^8.
    """
    u = p.u.coeffs
    cols = []
    for j in range(1, 8):
        v = np.zeros(8)
        v[j] = 1.0
        v -= np.dot(v, u) * u
        for q in cols:
            v -= np.dot(q, v) * q
        nrm = np.linalg.norm(v)
        if nrm > 1e-7:
            cols.append(v / nrm)
    if len(cols) != 6:
        raise ValueError("tangent frame extraction failed")
    return np.column_stack(cols)


def normal_acs_s6(p: S6Point) -> np.ndarray:
    """Quarter-turn complex structure of the normal plane span{u, e0}.

    In the ordered basis (u, e0) the matrix is constant: u goes to e0 and
    e0 to -u; it squares to -I and is an isometry of the plane.
    """
    return np.array([[0.0, -1.0], [1.0, 0.0]])


def diagonal_JN(Jx, nu_dim: int) -> np.ndarray:
    """Normal complex structure of a diagonal-style embedding.

    On R^{2 nu_dim} + R^{2n} it acts as (zeta, eta) -> (-eta, zeta) on the
    doubled factor and as the negative of ``Jx`` on the tangent factor.
    """
    Jx = np.asarray(Jx, dtype=float)
    two_n = Jx.shape[0]
    if np.linalg.norm(Jx @ Jx + np.eye(two_n)) > 1e-10 * max(1.0, np.linalg.norm(Jx) ** 2):
        raise ValueError("not an almost complex structure")
    nu = int(nu_dim)
    out = np.zeros((2 * nu + two_n, 2 * nu + two_n))
    out[:nu, nu:2 * nu] = -np.eye(nu)
    out[nu:2 * nu, :nu] = np.eye(nu)
    out[2 * nu:, 2 * nu:] = -Jx
    return out


def ambient_acs(p: S6Point) -> np.ndarray:
    """The 8x8 real block structure at p, assembled in the standard basis.

    Acts by right octonion multiplication on tangent vectors and by the
    quarter turn of :func:`normal_acs_s6` on span{u, e0}.
    """
    u = p.u.coeffs
    e0 = np.zeros(8)
    e0[0] = 1.0
    P_norm = np.outer(u, u) + np.outer(e0, e0)
    P_tan = np.eye(8) - P_norm
    return right_mult_matrix(p.u) @ P_tan + np.outer(e0, u) - np.outer(u, e0)


@dataclass(frozen=True, eq=False)
class EmbeddingFrame:
    """Embedded point together with its frame-adapted block data.

    ``Jx`` is the sphere structure in the orthonormal tangent frame, ``Jn``
    the 2x2 normal structure in the ordered basis (u, e0), and ``frame``
    the 8x8 change of basis whose columns are the tangent frame followed
    by u and e0.
    """

    u: S6Point
    zpoint: ZPoint
    Jx: np.ndarray = field(repr=False)
    Jn: np.ndarray = field(repr=False)
    frame: np.ndarray = field(repr=False)


def F_s6(p: S6Point) -> ZPoint:
    """The embedded flagged point over u.

    Base point u as a real vector of C^8; the flag collects the eigenspace
    splitting of the complexified ambient block structure, cut with the
    complexified normal plane for the small subspaces.  Dimensions are
    (1, 1, 4, 4) and the point is fixed by the involution.
    """
    J = ambient_acs(p)
    u = p.u.coeffs
    e0 = np.zeros(8)
    e0[0] = 1.0
    sig_p, sig_pp = eig_pm_i(J)
    normal = span(np.column_stack([u, e0]).astype(complex))
    s_p = intersect(normal, sig_p)
    s_pp = intersect(normal, sig_pp)
    flag = Flag(3, 4, s_p, s_pp, sig_p, sig_pp)
    return ZPoint(u.astype(complex), flag)


def embedding_frame(p: S6Point) -> EmbeddingFrame:
    """Frame-adapted data of the embedded point.

    The flag of the returned point equals the frame conjugate of
    ``flag_from_acs(Jx, Jn)``, which ties the ambient construction of
    :func:`F_s6` to the split-basis one.
    """
    fr = tangent_frame(p)
    G = np.column_stack([fr, p.u.coeffs, _e0()])
    R = right_mult_matrix(p.u)
    Jx = fr.T @ R @ fr
    Jn = normal_acs_s6(p)
    return EmbeddingFrame(p, F_s6(p), Jx, Jn, G)


def _e0():
    e0 = np.zeros(8)
    e0[0] = 1.0
    return e0


def _geodesic(p: S6Point, zeta: Octonion, t: float) -> S6Point:
    """Unit-speed-scaled geodesic through p with initial velocity zeta."""
    nz = zeta.norm()
    if nz == 0.0:
        return p
    u = p.u.coeffs
    d = zeta.coeffs / nz
    v = np.cos(nz * t) * u + np.sin(nz * t) * d
    return S6Point(Octonion(v / np.linalg.norm(v)))


@dataclass(frozen=True, eq=False)
class SphereDifferential:
    """Finite-difference differential of the embedding at a point.

    ``columns[a]`` is the image of frame vector a as a tangent vector in
    the chart centered at the embedded point; ``apply`` extends by real
    linearity to arbitrary tangent octonions.
    """

    p: S6Point
    chart: Chart
    frame: np.ndarray = field(repr=False)
    columns: tuple = field(repr=False)
    step: float

    def apply(self, zeta: Octonion) -> TangentVec:
        t = self.frame.T @ zeta.coeffs
        out = self.columns[0] * t[0]
        for a in range(1, 6):
            out = out + self.columns[a] * t[a]
        return out

    def base_image(self, zeta: Octonion) -> np.ndarray:
        """Ambient C^8 image of apply(zeta) under the bundle projection."""
        return self.chart.dpi(self.apply(zeta))


def dF(p: S6Point, h: float = FD_STEP, chart: Chart | None = None) -> SphereDifferential:
    """Central finite differences of chart coordinates along geodesics.

    Falls back to h/10 once if a stencil point leaves the chart domain.
    """
    if chart is None:
        chart = Chart(F_s6(p))
    fr = tangent_frame(p)

    def column(direction, step):
        zeta = Octonion(direction)
        plus = chart.coords_vector(F_s6(_geodesic(p, zeta, step)))
        minus = chart.coords_vector(F_s6(_geodesic(p, zeta, -step)))
        return chart.tangent_from_vector((plus - minus) / (2.0 * step))

    cols = []
    for a in range(6):
        try:
            cols.append(column(fr[:, a], h))
        except ValueError:
            cols.append(column(fr[:, a], h / 10.0))
    return SphereDifferential(p, chart, fr, tuple(cols), h)


@dataclass(frozen=True, eq=False)
class SphereDbar:
    """The antiholomorphic part of the differential.

    apply(zeta) = (dF(zeta) + i dF(J zeta)) / 2 with i acting on chart
    components; conjugate linear over the sphere structure.
    """

    differential: SphereDifferential

    def apply(self, zeta: Octonion) -> TangentVec:
        d = self.differential
        return 0.5 * (d.apply(zeta) + 1j * d.apply(J_O(d.p, zeta)))


def dbar_F(p: S6Point, h: float = FD_STEP,
           differential: SphereDifferential | None = None) -> SphereDbar:
    return SphereDbar(differential if differential is not None else dF(p, h))


def lift_Ftilde(p: S6Point, h: float = FD_STEP,
                dbar: SphereDbar | None = None) -> CSubspace:
    """Image of the antiholomorphic differential as a complex 3-plane.

    Lives inside the distribution at the embedded point (the first three
    base components vanish up to finite-difference noise) and projects
    injectively to the base, so it is a point of the graph locus.
    """
    if dbar is None:
        dbar = dbar_F(p, h)
    d = dbar.differential
    cols = np.column_stack([dbar.apply(Octonion(d.frame[:, a])).to_vector()
                            for a in range(6)])
    sub = span(cols)
    if sub.dim != 3:
        raise ValueError("degenerate lift")
    return sub


def structure_adapted_basis(p: S6Point) -> list[Octonion]:
    """Real tangent basis grouped into three structure-stable planes.

    Returns [v1, J v1, v2, J v2, v3, J v3]; each consecutive pair spans a
    complex line of the sphere structure.  Built by Gram-Schmidt over the
    deterministic frame, projecting away each completed plane (the
    structure is an isometry, so planes and their complements are stable).
    """
    fr = tangent_frame(p)
    basis: list[Octonion] = []
    for a in range(6):
        v = fr[:, a].copy()
        for q in basis:
            v -= np.dot(q.coeffs, v) * q.coeffs
        nrm = np.linalg.norm(v)
        if nrm < 1e-7:
            continue
        v1 = Octonion(v / nrm)
        v2 = J_O(p, v1)
        basis.extend([v1, v2])
        if len(basis) == 6:
            break
    if len(basis) != 6:
        raise ValueError("adapted basis extraction failed")
    return basis


def transversality_rank(p: S6Point, h: float = FD_STEP,
                        differential: SphereDifferential | None = None,
                        drop: int | None = None) -> int:
    """Real rank of the span of the embedded tangent plus the distribution.

    Stacks the differential images of a structure-adapted real tangent
    basis (as real vectors of the realified chart tangent space) with a
    real basis of the distribution; full transversality is rank 2 N.
    ``drop`` omits one complex tangent line (a vector and its structure
    rotation), which lowers the rank by exactly 2.
    """
    d = differential if differential is not None else dF(p, h)
    n, k = 3, 4
    N = dim_N(n, k)

    def realify(vec):
        return np.concatenate([vec.real, vec.imag])

    adapted = structure_adapted_basis(d.p)
    rows = [realify(d.apply(v).to_vector()) for a, v in enumerate(adapted)
            if drop is None or a // 2 != drop]
    for j in range(n, N):
        unit = np.zeros(N, dtype=complex)
        unit[j] = 1.0
        rows.append(realify(unit))
        rows.append(realify(1j * unit))
    return numerical_rank(np.vstack(rows), 1e-7)


def transversality_check(p: S6Point, h: float = FD_STEP,
                         differential: SphereDifferential | None = None) -> bool:
    """True when the embedded tangent and the distribution span the whole
    real tangent space of the flagged manifold (rank 2 N)."""
    return transversality_rank(p, h, differential) == 2 * dim_N(3, 4)


def verify_4theta(p: S6Point, zeta: Octonion, eta: Octonion,
                  h: float = FD_STEP,
                  differential: SphereDifferential | None = None):
    """Compare the octonion obstruction with the restricted torsion.

    lhs is the closed-form obstruction; rhs applies the torsion at the
    embedded point to the antiholomorphic images of zeta and eta, maps the
    quotient class back to the sphere through the transversality
    identification (solve the differential on its image, over the reals),
    and scales by THETA_FACTOR.  Returns (lhs, rhs, relative residual).
    """
    d = differential if differential is not None else dF(p, h)
    db = SphereDbar(d)
    w = d.chart.center
    lhs = nijenhuis(p, zeta, eta)
    q = torsion_at(w, db.apply(zeta), db.apply(eta))
    n = 3
    M = np.column_stack([d.columns[a].x_part[:n] for a in range(6)])
    A = np.vstack([M.real, M.imag])
    b = np.concatenate([q.coeffs.real, q.coeffs.imag])
    t = np.linalg.solve(A, b)
    mapped = Octonion(d.frame @ t)
    rhs = THETA_FACTOR * mapped
    residual = (lhs - rhs).norm() / max(lhs.norm(), 1e-12)
    return lhs, rhs, residual
