"""Rectangular power-flow evaluation, the residual objective, and Newton-Raphson.

Voltages are carried as separate real/imaginary per-unit vectors (mu, omega).
The residual is the sum of squared active/reactive mismatches over the
non-slack buses; Newton-Raphson drives exactly that mismatch vector to zero
with the analytic rectangular Jacobian and serves as the classical reference
for the combinatorial backends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, JacobianSingularError, NewtonDivergedError
from .grid import GridModel


@dataclass
class VoltageState:
    """Bus voltages in rectangular per-unit coordinates."""

    mu: np.ndarray
    omega: np.ndarray

    def __post_init__(self) -> None:
        self.mu = np.asarray(self.mu, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        if self.mu.shape != self.omega.shape or self.mu.ndim != 1:
            raise DimensionError("mu and omega must be 1-d vectors of equal length")

    def copy(self) -> "VoltageState":
        return VoltageState(self.mu.copy(), self.omega.copy())

    def as_complex(self) -> np.ndarray:
        return self.mu + 1j * self.omega


@dataclass
class PowerInjection:
    """Net active/reactive power produced at each bus by a voltage state."""

    p: np.ndarray
    q: np.ndarray


def flat_start(grid: GridModel) -> VoltageState:
    """Flat-start voltages: 1 + j0 everywhere, slack pinned to its setpoint."""
    mu = np.ones(grid.n)
    omega = np.zeros(grid.n)
    mu[0], omega[0] = grid.slack_voltage
    return VoltageState(mu, omega)


def _check_dimensions(grid: GridModel, v: VoltageState) -> None:
    if v.mu.shape[0] != grid.n:
        raise DimensionError(
            f"voltage state has {v.mu.shape[0]} buses, grid has {grid.n}"
        )


def compute_pq(grid: GridModel, v: VoltageState) -> PowerInjection:
    """Net injections P_i, Q_i of a voltage state via the rectangular equations.

    P_i = sum_k mu_i G_ik mu_k + omega_i G_ik omega_k
                + omega_i B_ik mu_k - mu_i B_ik omega_k
    Q_i = sum_k omega_i G_ik mu_k - mu_i G_ik omega_k
                - mu_i B_ik mu_k - omega_i B_ik omega_k
    """
    _check_dimensions(grid, v)
    gm = grid.g @ v.mu
    gw = grid.g @ v.omega
    bm = grid.b @ v.mu
    bw = grid.b @ v.omega
    p = v.mu * gm + v.omega * gw + v.omega * bm - v.mu * bw
    q = v.omega * gm - v.mu * gw - v.mu * bm - v.omega * bw
    return PowerInjection(p, q)


def mismatch(grid: GridModel, v: VoltageState) -> tuple[np.ndarray, np.ndarray]:
    """Active/reactive power mismatches P_i - P_i^G + P_i^D and the Q analogue."""
    injection = compute_pq(grid, v)
    p_spec, q_spec = grid.specified_injections()
    return injection.p - p_spec, injection.q - q_spec


def residual(grid: GridModel, v: VoltageState) -> float:
    """Sum of squared mismatches over the non-slack buses."""
    dp, dq = mismatch(grid, v)
    return float(np.sum(dp[1:] ** 2) + np.sum(dq[1:] ** 2))


def _jacobian(grid: GridModel, v: VoltageState) -> np.ndarray:
    """Analytic Jacobian of the non-slack mismatch vector.

    Rows: [dP_1..dP_{N-1}, dQ_1..dQ_{N-1}];
    columns: [mu_1..mu_{N-1}, omega_1..omega_{N-1}].
    """
    g, b = grid.g, grid.b
    mu, omega = v.mu, v.omega
    a = g @ mu - b @ omega
    c = g @ omega + b @ mu
    # dP_i/dmu_j, dP_i/domega_j, dQ_i/dmu_j, dQ_i/domega_j for all i, j
    dp_dmu = mu[:, None] * g + omega[:, None] * b + np.diag(a)
    dp_dom = omega[:, None] * g - mu[:, None] * b + np.diag(c)
    dq_dmu = omega[:, None] * g - mu[:, None] * b - np.diag(c)
    dq_dom = -mu[:, None] * g - omega[:, None] * b + np.diag(a)
    top = np.hstack([dp_dmu[1:, 1:], dp_dom[1:, 1:]])
    bottom = np.hstack([dq_dmu[1:, 1:], dq_dom[1:, 1:]])
    return np.vstack([top, bottom])


def newton_raphson(grid: GridModel, v0: VoltageState | None = None,
                   tol: float = 1e-10, max_iter: int = 50,
                   on_step: Callable[[int, VoltageState, float], None] | None = None,
                   ) -> VoltageState:
    """Solve the power-flow equations with full Newton steps.

    Returns a state whose residual is at most ``tol``. No damping or step
    control is applied; a singular Jacobian or running out of iterations is
    reported as an error (the last iterate rides along on the latter).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    v = flat_start(grid) if v0 is None else v0.copy()
    _check_dimensions(grid, v)

    for iteration in range(max_iter):
        current = residual(grid, v)
        if current <= tol:
            return v
        jac = _jacobian(grid, v)
        dp, dq = mismatch(grid, v)
        f = np.concatenate([dp[1:], dq[1:]])
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingularError("jacobian singular") from exc
        m = grid.n - 1
        v = VoltageState(
            np.concatenate([[v.mu[0]], v.mu[1:] + step[:m]]),
            np.concatenate([[v.omega[0]], v.omega[1:] + step[m:]]),
        )
        if not (np.all(np.isfinite(v.mu)) and np.all(np.isfinite(v.omega))):
            raise NewtonDivergedError("nr diverged", last_iterate=v)
        if on_step is not None:
            on_step(iteration, v.copy(), residual(grid, v))

    if residual(grid, v) <= tol:
        return v
    raise NewtonDivergedError("nr diverged", last_iterate=v)
