"""Doubly constrained gravity distribution balanced by iterative proportional fitting."""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, InputError
from .tripends import TripEnds

DEFAULT_MU = 0.1  # per minute


def gravity_distribute(
    ends: TripEnds,
    impedance,
    tol: float = 1e-9,
    mu: float = DEFAULT_MU,
    max_iterations: int = 10_000,
) -> np.ndarray:
    """OD matrix T_ij = a_i * b_j * P_i * A_j * exp(-mu * c_ij).

    Row and column factors are fitted alternately until the largest absolute
    deviation of both margins from their targets is below ``tol``. Raises
    ``ConvergenceError`` (with the achieved error) if that takes more than
    ``max_iterations`` sweeps.
    """
    prod = ends.productions
    attr = ends.attractions
    cost = np.asarray(impedance, dtype=float)
    n = len(prod)
    if cost.shape != (n, len(attr)):
        raise InputError(f"impedance must be {n}x{len(attr)}, got {cost.shape}")
    if not np.all(np.isfinite(cost)) or np.any(cost <= 0):
        raise InputError("impedance must be finite and positive")
    if not np.isclose(prod.sum(), attr.sum(), rtol=1e-12, atol=0.0):
        raise InputError(f"trip ends not balanced: {prod.sum()} vs {attr.sum()}")

    # Row-wise shift keeps exp() in range; the shift is absorbed by the row factor.
    deterrence = np.exp(-mu * (cost - cost.min(axis=1, keepdims=True)))
    trips = prod[:, None] * attr[None, :] * deterrence

    err = np.inf
    for _ in range(max_iterations):
        row = trips.sum(axis=1)
        scale = np.divide(prod, row, out=np.zeros_like(prod), where=row > 0)
        trips *= scale[:, None]
        col = trips.sum(axis=0)
        scale = np.divide(attr, col, out=np.zeros_like(attr), where=col > 0)
        trips *= scale[None, :]
        err = max(
            float(np.abs(trips.sum(axis=1) - prod).max(initial=0.0)),
            float(np.abs(trips.sum(axis=0) - attr).max(initial=0.0)),
        )
        if err < tol:
            return trips
    raise ConvergenceError(f"{ends.purpose}: IPF did not converge in {max_iterations} sweeps", err)
