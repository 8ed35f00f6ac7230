"""Octonion arithmetic and the induced almost complex structure on the
six-sphere of unit imaginary octonions.

The multiplication table is the Cayley-Dickson double of the quaternions
with e4 as the doubling unit: writing an octonion as a quaternion pair
(a, b), the product is (a, b)(c, d) = (ac - conj(d) b, da + b conj(c)).
Units e1, e2, e3 are the quaternion imaginaries and e4..e7 = e0*, e1*,
e2*, e3* their doubles (e_{4+l} = e_l e4).  Any other table differs by an
algebra automorphism and changes only concrete component values, never
the identities checked here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TANGENT_TOL = 1e-10


def _quaternion_table() -> np.ndarray:
    t = np.zeros((4, 4, 4))
    t[0, 0, 0] = 1.0
    for i in (1, 2, 3):
        t[0, i, i] = t[i, 0, i] = 1.0
        t[i, i, 0] = -1.0
    for (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        t[a, b, c] = 1.0
        t[b, a, c] = -1.0
    return t


def _octonion_table() -> np.ndarray:
    """Structure tensor T with e_a e_b = sum_c T[a, b, c] e_c."""
    q = _quaternion_table()

    def qmul(x, y):
        return np.einsum("a,b,abc->c", x, y, q)

    def qconj(x):
        return np.array([x[0], -x[1], -x[2], -x[3]])

    t = np.zeros((8, 8, 8))
    eye = np.eye(4)
    for a in range(8):
        for b in range(8):
            x1 = eye[a] if a < 4 else np.zeros(4)
            x2 = eye[a - 4] if a >= 4 else np.zeros(4)
            y1 = eye[b] if b < 4 else np.zeros(4)
            y2 = eye[b - 4] if b >= 4 else np.zeros(4)
            z1 = qmul(x1, y1) - qmul(qconj(y2), x2)
            z2 = qmul(y2, x1) + qmul(x2, qconj(y1))
            t[a, b, :4] = z1
            t[a, b, 4:] = z2
    return t


_TABLE = _octonion_table()


@dataclass(frozen=True)
class Octonion:
    """An octonion as 8 real coefficients over the units e0..e7."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if c.shape[0] != 8:
            raise ValueError("octonion needs 8 coefficients")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def unit(cls, j: int) -> "Octonion":
        c = np.zeros(8)
        c[j] = 1.0
        return cls(c)

    @classmethod
    def from_imaginary(cls, v7) -> "Octonion":
        return cls(np.concatenate([[0.0], np.asarray(v7, dtype=float)]))

    def conj(self) -> "Octonion":
        c = -self.coeffs.copy()
        c[0] = self.coeffs[0]
        return Octonion(c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def real(self) -> float:
        return float(self.coeffs[0])

    def imag_part(self) -> np.ndarray:
        return self.coeffs[1:].copy()

    def __add__(self, other):
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self):
        return Octonion(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return mul(self, other)
        return Octonion(float(other) * self.coeffs)

    __rmul__ = __mul__

    def __repr__(self):
        terms = [f"{c:+.3g}*e{j}" for j, c in enumerate(self.coeffs) if c != 0.0]
        return "Octonion(" + (" ".join(terms) or "0") + ")"


def mul(a: Octonion, b: Octonion) -> Octonion:
    """Bilinear product over the fixed Cayley-Dickson table."""
    return Octonion(np.einsum("a,b,abc->c", a.coeffs, b.coeffs, _TABLE))


def inner(u: Octonion, v: Octonion) -> float:
    """Re(u conj(v)); equals the Euclidean dot product in R^8."""
    return float(np.dot(u.coeffs, v.coeffs))


def right_mult_matrix(u: Octonion) -> np.ndarray:
    """Matrix of v -> v u on R^8."""
    return np.einsum("abc,b->ca", _TABLE, u.coeffs)


@dataclass(frozen=True)
class S6Point:
    """A unit-length imaginary octonion."""

    u: Octonion

    def __post_init__(self):
        if abs(self.u.real) > TANGENT_TOL:
            raise ValueError("point is not imaginary")
        if abs(inner(self.u, self.u) - 1.0) > 1e-9:
            raise ValueError("point is not unit length")


def is_tangent(p: S6Point, zeta: Octonion, tol: float = TANGENT_TOL) -> bool:
    scale = max(1.0, zeta.norm())
    return abs(zeta.real) <= tol * scale and abs(inner(zeta, p.u)) <= tol * scale


def project_tangent(p: S6Point, v: Octonion) -> Octonion:
    """Orthogonal projection of v onto the tangent space at p.

    Never applied implicitly; callers that want to sanitize inputs must
    do so explicitly through this function.
    """
    c = v.coeffs.copy()
    c[0] = 0.0
    w = Octonion(c)
    return w - inner(w, p.u) * p.u


def _require_tangent(p: S6Point, zeta: Octonion):
    if not is_tangent(p, zeta):
        raise ValueError("vector is not tangent to the sphere at this point")


def J_O(p: S6Point, zeta: Octonion) -> Octonion:
    """Right multiplication by the base point: the almost complex
    structure of the sphere applied to a tangent vector."""
    _require_tangent(p, zeta)
    return mul(zeta, p.u)


# The closed-form octonion combination below determines the Nijenhuis
# tensor only up to the normalization of the Lie bracket; this constant
# pins the convention N = [z,e] - [Jz,Je] + J([z,Je] + [Jz,e]), under
# which the tensor equals 4 times the restricted distribution torsion of
# the embedded sphere (see acx.embed.verify_4theta).
NIJENHUIS_SCALE = 2.0


def nijenhuis(p: S6Point, zeta: Octonion, eta: Octonion) -> Octonion:
    """Closed-form integrability obstruction at p.

    Evaluates (zeta (eta u) - (zeta u) eta) - (eta (zeta u) - (eta zeta) u),
    takes its tangential part at p, and scales by NIJENHUIS_SCALE.  The
    raw combination differs from a tensor by the normal term
    -2<zeta, eta> u (purely radial, no tangential content); the tangential
    part is antisymmetric in (zeta, eta), tangent to the sphere at p, and
    nonzero for generic inputs, witnessing non-integrability.
    """
    _require_tangent(p, zeta)
    _require_tangent(p, eta)
    u = p.u
    first = mul(zeta, mul(eta, u)) - mul(mul(zeta, u), eta)
    second = mul(eta, mul(zeta, u)) - mul(mul(eta, zeta), u)
    return NIJENHUIS_SCALE * project_tangent(p, first - second)


def random_point(rng) -> S6Point:
    v = rng.normal(size=7)
    return S6Point(Octonion.from_imaginary(v / np.linalg.norm(v)))


def random_tangent(rng, p: S6Point, scale: float = 1.0) -> Octonion:
    return scale * project_tangent(p, Octonion(rng.normal(size=8)))
