"""Per-iteration quartic spin Hamiltonian and the shrinking increment schedule.

Each bus i owns two spins: index 2i steers the real voltage part and 2i+1
the imaginary part. The slack bus keeps both increments pinned to zero, so
spins 0 and 1 never appear in any term even though they are allocated. The
Hamiltonian is built symbolically by squaring the linear-in-spin mismatch
polynomials, which makes it equal (exactly) to the power-flow residual of
the spin-updated voltages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .grid import GridModel
from .pfcore import VoltageState
from .spinpoly import SpinAssignment, SpinPolynomial


@dataclass(frozen=True)
class IncrementSchedule:
    """Geometric decay endpoints for the voltage increments."""

    it_max: int
    mu_start: float = 0.1
    mu_end: float = 1e-4
    omega_start: float = 0.05
    omega_end: float = 1e-5

    def __post_init__(self) -> None:
        if self.it_max < 1:
            raise ValueError("it_max must be at least 1")
        for name in ("mu_start", "mu_end", "omega_start", "omega_end"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.mu_start <= self.mu_end or self.omega_start <= self.omega_end:
            raise ValueError("schedule must decrease: start > end")


def _interpolate(start: float, end: float, it: int, it_max: int) -> float:
    if it == 0:
        return start
    if it == it_max:
        return end
    return math.exp(math.log(start) + it * (math.log(end) - math.log(start)) / it_max)


def increments(it: int, sched: IncrementSchedule) -> tuple[float, float]:
    """Increment pair (dmu, domega) at iteration ``it``, log-linear in it."""
    if not (0 <= it <= sched.it_max):
        raise ValueError(f"iteration {it} outside [0, {sched.it_max}]")
    return (
        _interpolate(sched.mu_start, sched.mu_end, it, sched.it_max),
        _interpolate(sched.omega_start, sched.omega_end, it, sched.it_max),
    )


def apply_spins(base: VoltageState, s: SpinAssignment, dmu: float,
                domega: float) -> VoltageState:
    """Shift every non-slack voltage component by its spin-signed increment."""
    n = base.mu.shape[0]
    values = s.values if isinstance(s, SpinAssignment) else np.asarray(s)
    if values.shape[0] != 2 * n:
        raise DimensionError(f"expected {2 * n} spins, got {values.shape[0]}")
    mu = base.mu.copy()
    omega = base.omega.copy()
    mu[1:] += values[2::2] * dmu
    omega[1:] += values[3::2] * domega
    return VoltageState(mu, omega)


@dataclass(frozen=True)
class HamiltonianInstance:
    """One iteration's residual objective as a polynomial over 2N spins."""

    poly: SpinPolynomial
    layout: dict[int, tuple[int, int]]
    base: VoltageState
    dmu: float
    domega: float


def build_hamiltonian(grid: GridModel, base: VoltageState, dmu: float,
                      domega: float) -> HamiltonianInstance:
    """Expand the squared-mismatch residual around ``base`` into spin algebra.

    For every spin assignment s the returned polynomial satisfies
    poly(s) == residual(grid, apply_spins(base, s, dmu, domega)).
    """
    n = grid.n
    if base.mu.shape[0] != n:
        raise DimensionError(f"base voltage has {base.mu.shape[0]} buses, grid has {n}")
    if dmu <= 0 or domega <= 0:
        raise ValueError("increments must be positive")
    if (base.mu[0], base.omega[0]) != grid.slack_voltage:
        raise ValueError("base slack entries must match the grid slack voltage")

    n_vars = 2 * n
    mu_polys = [SpinPolynomial.constant(base.mu[0], n_vars)]
    omega_polys = [SpinPolynomial.constant(base.omega[0], n_vars)]
    for k in range(1, n):
        mu_polys.append(
            SpinPolynomial.from_terms(n_vars, [((), base.mu[k]), ((2 * k,), dmu)])
        )
        omega_polys.append(
            SpinPolynomial.from_terms(n_vars, [((), base.omega[k]), ((2 * k + 1,), domega)])
        )

    total = SpinPolynomial.constant(0.0, n_vars)
    for i in range(1, n):
        # current-like sums: a_i = sum_k (G_ik mu_k - B_ik omega_k),
        #                    c_i = sum_k (G_ik omega_k + B_ik mu_k)
        a_i = SpinPolynomial.constant(0.0, n_vars)
        c_i = SpinPolynomial.constant(0.0, n_vars)
        for k in range(n):
            g, b = grid.g[i, k], grid.b[i, k]
            if g != 0.0:
                a_i = a_i + g * mu_polys[k]
                c_i = c_i + g * omega_polys[k]
            if b != 0.0:
                a_i = a_i - b * omega_polys[k]
                c_i = c_i + b * mu_polys[k]
        p_i = mu_polys[i] * a_i + omega_polys[i] * c_i
        q_i = omega_polys[i] * a_i - mu_polys[i] * c_i
        bus = grid.buses[i]
        dp = p_i - (bus.p_gen - bus.p_dem)
        dq = q_i - (bus.q_gen - bus.q_dem)
        total = total + dp * dp + dq * dq

    layout = {i: (2 * i, 2 * i + 1) for i in range(n)}
    return HamiltonianInstance(poly=total, layout=layout, base=base.copy(),
                               dmu=dmu, domega=domega)
