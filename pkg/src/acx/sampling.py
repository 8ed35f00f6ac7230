"""Seeded random generators for flags, points, and distribution data.

Shared by the command line suites and the test suite so that every
randomized check is reproducible from a single integer seed.
"""

from __future__ import annotations

import numpy as np

from .cxlinalg import CSubspace, numerical_rank
from .flags import Flag, ZPoint, gl_act, standard_flag
from .zspace import TangentVec, dim_N, standard_zpoint


def complex_normal(rng, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_invertible(rng, d: int, max_tries: int = 8) -> np.ndarray:
    for _ in range(max_tries):
        B = complex_normal(rng, d, d)
        if numerical_rank(B) == d and np.linalg.cond(B) < 1e6:
            return B
    raise RuntimeError("failed to sample a well conditioned invertible matrix")


def random_flag(n: int, k: int, rng) -> Flag:
    """Random flag as a group translate of the standard one; the action is
    transitive, so this covers the whole fiber."""
    return gl_act(random_invertible(rng, 2 * k), standard_flag(n, k))


def random_zpoint(n: int, k: int, rng) -> ZPoint:
    return ZPoint(complex_normal(rng, 2 * k), random_flag(n, k, rng))


def random_coords_vector(n: int, k: int, rng, scale: float = 0.5) -> np.ndarray:
    return scale * complex_normal(rng, 2 * (k * k + n * (k - n)))


def random_stabilizer_member(n: int, k: int, rng) -> np.ndarray:
    """Random member of the stabilizer of the standard flag: block diagonal
    with two k x k blocks, each lower block triangular for the (n, k-n)
    split."""
    def block():
        b = np.zeros((k, k), dtype=complex)
        b[:n, :n] = random_invertible(rng, n)
        if k > n:
            b[n:, n:] = random_invertible(rng, k - n)
            b[n:, :n] = complex_normal(rng, k - n, n)
        return b

    out = np.zeros((2 * k, 2 * k), dtype=complex)
    out[:k, :k] = block()
    out[k:, k:] = block()
    return out


def random_central_distribution_vector(w0: ZPoint, rng) -> TangentVec:
    """Random distribution vector at a chart center: base components below
    n vanish, everything else is free."""
    n, k = w0.flag.n, w0.flag.k
    x = complex_normal(rng, 2 * k)
    x[:n] = 0.0
    z = complex_normal(rng, dim_N(n, k) - 2 * k)
    return TangentVec(x, z, w0)


def random_delta_lift(w0: ZPoint, rng) -> CSubspace:
    """Random n-plane in the base constraint space at a chart center,
    lifted with zero fiber part.

    Drawn as the graph of a Gaussian map over the base directions
    n..2n-1, which stays inside the graph locus with probability one.
    """
    n, k = w0.flag.n, w0.flag.k
    N = dim_N(n, k)
    basis = np.zeros((N, n), dtype=complex)
    basis[n:2 * n, :] = np.eye(n)
    if 2 * k > 2 * n:
        basis[2 * n:2 * k, :] = complex_normal(rng, 2 * (k - n), n)
    return CSubspace(N, basis)


def standard_center(n: int, k: int) -> ZPoint:
    return standard_zpoint(n, k)
