"""Numerov integration kernels for ``psi'' = (V - E) psi`` on a uniform grid."""

import numpy as np

from ._accel import BACKEND, njit

__all__ = ["BACKEND", "shoot", "match_wronskian", "count_nodes"]

_BIG = 1e150


@njit(cache=True, nogil=True)
def _shoot(q, h2, start, stop, step, psi):
    """Integrate from ``start`` (psi = 0) towards ``stop`` inclusive.

    ``q`` holds ``E - V`` on the grid.  Returns the number of sign changes.
    The partial solution is rescaled in place whenever it grows too large.
    """
    n = q.shape[0]
    for i in range(n):
        psi[i] = 0.0
    psi[start] = 0.0
    psi[start + step] = 1e-20
    nodes = 0
    # First step: psi'' at the boundary point is extrapolated linearly from
    # the two neighbours instead of being taken as q * psi = 0.  This keeps
    # fourth order when V psi has a finite nonzero limit there (1/x ends).
    i = start + step
    j = i + step
    psi[j] = (2.0 - h2 * q[i]) * psi[i]
    if psi[j] * psi[i] < 0.0:
        nodes += 1
    fm = 1.0 + h2 * q[i] / 12.0
    f0 = 1.0 + h2 * q[j] / 12.0
    i = j
    while i != stop:
        j = i + step
        fp = 1.0 + h2 * q[j] / 12.0
        psi[j] = ((12.0 - 10.0 * f0) * psi[i] - fm * psi[i - step]) / fp
        if psi[j] * psi[i] < 0.0:
            nodes += 1
        if abs(psi[j]) > 1e150:
            k = start
            while k != j + step:
                psi[k] *= 1e-150
                k += step
        fm = f0
        f0 = fp
        i = j
    return nodes


def shoot(q, h2, start, stop):
    """Solution array and node count, marching from ``start`` to ``stop``."""
    psi = np.zeros_like(q)
    step = 1 if stop > start else -1
    nodes = _shoot(q, h2, start, stop, step, psi)
    return psi, nodes


def count_nodes(q, h2, start, stop):
    return shoot(q, h2, start, stop)[1]


def match_wronskian(q, h2, start, stop, m):
    """Scale-free discrete Wronskian of the left and right solutions at ``m``."""
    left, _ = shoot(q, h2, start, m + 1)
    right, _ = shoot(q, h2, stop, m)
    a0, a1 = left[m], left[m + 1]
    b0, b1 = right[m], right[m + 1]
    norm = np.hypot(a0, a1) * np.hypot(b0, b1)
    return (a0 * b1 - a1 * b0) / norm
