"""Vector-time evaluation of a multivariate Lévy process.

For a nonnegative time vector t, the random vector
(X_1(t_1), ..., X_n(t_n)) is infinitely divisible. Its exponent is a
weighted sum of the process exponent over projections determined by the
sorted order of t, and it can be sampled exactly by accumulating
independent increments of X over the sorted gaps, keeping component j
alive only while t_j has not yet been reached.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .levy import LevyLaw, LevySpecError

Array = np.ndarray


@dataclass(frozen=True)
class OrderedTime:
    """A time vector together with its stable sort permutation and gaps.

    perm[k] is the original index of the (k+1)-th smallest coordinate;
    deltas[k] = t_(k+1) - t_(k) with t_(0) = 0.
    """

    t: Array
    perm: Array
    deltas: Array


def order_times(t) -> OrderedTime:
    """Sort a nonnegative time vector; ties broken by ascending index."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise LevySpecError("time vector must be coordinatewise >= 0")
    perm = np.argsort(t, kind="stable")
    sorted_t = t[perm]
    deltas = np.diff(sorted_t, prepend=0.0)
    return OrderedTime(t=t, perm=perm, deltas=deltas)


def vector_time_exponent(psi: LevyLaw, t, theta) -> complex:
    """Exponent of X at the vector time t:

    sum_k (t_(k) - t_(k-1)) * Psi(theta restricted to the coordinates
    whose times have not yet elapsed).

    Invariant under the tie-breaking choice of the sort.
    """
    theta = np.asarray(theta, dtype=float)
    ot = order_times(t)
    n = ot.t.shape[0]
    if theta.shape != (n,) or psi.dim != n:
        raise LevySpecError("theta, t and process dimensions disagree")
    total = 0.0 + 0.0j
    for k in range(n):
        if ot.deltas[k] == 0.0:
            continue
        proj = np.zeros(n)
        alive = ot.perm[k:]
        proj[alive] = theta[alive]
        total += ot.deltas[k] * psi.exponent(proj)
    return total


def vector_time_cf(psi: LevyLaw, t, theta) -> complex:
    """Characteristic function of X at the vector time t; modulus <= 1."""
    return complex(np.exp(vector_time_exponent(psi, t, theta)))


def sample_subordinate_at(x: LevyLaw, t, rng: np.random.Generator,
                          size: int | None = None) -> Array:
    """Draw from the law of (X_1(t_1), ..., X_n(t_n)).

    Accumulates independent increments of one X over the sorted gaps of
    t, projecting each onto the still-alive coordinates. Returns shape
    (n,) when size is None, else (size, n). Zero gaps are skipped.
    """
    squeeze = size is None
    m = 1 if squeeze else size
    ot = order_times(t)
    n = ot.t.shape[0]
    if x.dim != n:
        raise LevySpecError("process dimension differs from time vector")
    out = np.zeros((m, n))
    for k in range(n):
        if ot.deltas[k] == 0.0:
            continue
        alive = ot.perm[k:]
        w = x.sample(ot.deltas[k], rng, m)
        out[:, alive] += w[:, alive]
    return out[0] if squeeze else out
