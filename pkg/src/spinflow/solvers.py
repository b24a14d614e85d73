"""Interchangeable minimization backends for spin polynomials.

Three backends share one contract: given a SpinPolynomial, return the best
assignment found, its (recomputed) energy, and run diagnostics.

* exhaustive enumeration, the ground-truth oracle (n <= 24);
* a multi-readout simulated-annealing Ising-machine emulator that works on
  the higher-order polynomial directly via single-flip Metropolis sweeps;
* a QAOA statevector simulator with alternating cost-phase and mixer layers
  and an Adam-driven classical parameter loop.

Bit/spin convention, fixed project wide: measured bit 0 maps to spin +1 and
bit 1 to spin -1. Qubit i corresponds to bit position n-1-i of the basis
index, so basis state 0 is the all +1 assignment.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DimensionError, SolverError
from .spinpoly import SpinAssignment, SpinPolynomial, poly_eval

EXHAUSTIVE_LIMIT = 24
QAOA_QUBIT_LIMIT = 20

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
COST_FD_STEP = 1e-2
MIXER_SHIFT = np.pi / 4


@dataclass
class SolveOutcome:
    """Result of one backend invocation."""

    best: SpinAssignment
    energy: float
    samples_evaluated: int
    elapsed: float
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SaConfig:
    """Simulated-annealing emulator settings.

    ``temp_start``/``temp_end`` default to max|coeff| and 1e-3 * max|coeff|
    of the polynomial being solved when left as None.
    """

    readouts: int = 1000
    sweeps_per_readout: int = 100
    temp_start: float | None = None
    temp_end: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.readouts < 1:
            raise ValueError("readouts must be at least 1")
        if self.sweeps_per_readout < 1:
            raise ValueError("sweeps_per_readout must be at least 1")
        if self.temp_start is not None and self.temp_end is not None:
            if not (self.temp_start > self.temp_end > 0):
                raise ValueError("need temp_start > temp_end > 0")


@dataclass(frozen=True)
class QaoaConfig:
    """QAOA simulator settings (depth, classical loop, sampling)."""

    depth_p: int = 2
    steps: int = 100
    learning_rate: float = 0.1
    shots: int = 1000
    seed: int = 0
    exact_expectation: bool = False

    def __post_init__(self) -> None:
        if self.depth_p < 1:
            raise ValueError("depth_p must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


# ------------------------------------------------------------------ helpers

def bits_to_spins(bits: np.ndarray) -> np.ndarray:
    """Measured bits to spins: 0 -> +1, 1 -> -1."""
    return (1 - 2 * np.asarray(bits, dtype=np.int8)).astype(np.int8)


def spins_to_bits(spins: np.ndarray) -> np.ndarray:
    """Spins to measured bits: +1 -> 0, -1 -> 1."""
    return ((1 - np.asarray(spins, dtype=np.int8)) // 2).astype(np.int8)


def _parity(values: np.ndarray) -> np.ndarray:
    """Bitwise parity of each entry (XOR fold)."""
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def _assignment_energies(poly: SpinPolynomial, minus_on_set: bool) -> np.ndarray:
    """Energy of every assignment, indexed by basis integer.

    Bit n-1-i of the index carries variable i. With ``minus_on_set`` a set
    bit means spin -1 (the measurement convention); otherwise a set bit
    means +1, which makes ascending index order the lexicographic order of
    assignments with -1 < +1.
    """
    n = poly.n_vars
    size = 1 << n
    codes = np.arange(size, dtype=np.int64)
    energies = np.zeros(size)
    for term, coeff in poly.terms.items():
        mask = 0
        for i in term:
            mask |= 1 << (n - 1 - i)
        signs = 1.0 - 2.0 * _parity(codes & mask)
        if not minus_on_set and len(term) % 2 == 1:
            signs = -signs
        energies += coeff * signs
    return energies


def _spins_of_code(code: int, n: int, minus_on_set: bool) -> np.ndarray:
    bits = (code >> np.arange(n - 1, -1, -1)) & 1
    spins = bits_to_spins(bits)
    return spins if minus_on_set else -spins


# ------------------------------------------------------------------ exhaustive

def solve_exhaustive(poly: SpinPolynomial) -> SolveOutcome:
    """Enumerate all assignments; ties go to the lexicographically smallest."""
    n = poly.n_vars
    if n > EXHAUSTIVE_LIMIT:
        raise SolverError(f"too large for exhaustive: {n} > {EXHAUSTIVE_LIMIT} spins")
    started = time.perf_counter()
    energies = _assignment_energies(poly, minus_on_set=False)
    code = int(np.argmin(energies))
    best = SpinAssignment(_spins_of_code(code, n, minus_on_set=False))
    return SolveOutcome(
        best=best,
        energy=poly_eval(poly, best),
        samples_evaluated=energies.shape[0],
        elapsed=time.perf_counter() - started,
        extra={},
    )


# ------------------------------------------------------------------ annealer

def _resolved_temperatures(poly: SpinPolynomial, cfg: SaConfig) -> tuple[float, float]:
    if cfg.temp_start is not None and cfg.temp_end is not None:
        return cfg.temp_start, cfg.temp_end
    scale = max((abs(c) for t, c in poly.terms.items() if len(t) >= 1), default=1.0)
    temp_start = cfg.temp_start if cfg.temp_start is not None else scale
    temp_end = cfg.temp_end if cfg.temp_end is not None else 1e-3 * temp_start
    if not (temp_start > temp_end > 0):
        raise ValueError("need temp_start > temp_end > 0")
    return temp_start, temp_end


def solve_sa(poly: SpinPolynomial, cfg: SaConfig | None = None) -> SolveOutcome:
    """Best-of-readouts single-flip Metropolis annealing on the polynomial.

    Every readout is an independent run with its own random stream spawned
    from (seed, readout index); the temperature decays geometrically from
    temp_start to temp_end over the sweeps. The lowest-energy final state
    across readouts is returned.
    """
    cfg = cfg or SaConfig()
    n = poly.n_vars
    started = time.perf_counter()
    if n == 0:
        best = SpinAssignment(np.ones(0, dtype=np.int8))
        return SolveOutcome(best, poly_eval(poly, best), cfg.readouts,
                            time.perf_counter() - started, {})

    temp_start, temp_end = _resolved_temperatures(poly, cfg)
    sweeps = cfg.sweeps_per_readout
    readouts = cfg.readouts
    temperatures = np.geomspace(temp_start, temp_end, sweeps)

    streams = np.random.SeedSequence(cfg.seed).spawn(readouts)
    spins = np.empty((readouts, n), dtype=np.int8)
    uniforms = np.empty((readouts, sweeps, n))
    for r, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        spins[r] = rng.integers(0, 2, size=n, dtype=np.int8) * 2 - 1
        uniforms[r] = rng.random((sweeps, n))

    # per-variable views of the terms touching it: (coeff, other indices)
    touching: list[list[tuple[float, tuple[int, ...]]]] = [[] for _ in range(n)]
    for term, coeff in poly.terms.items():
        for i in term:
            touching[i].append((coeff, term))

    state = spins.astype(np.float64)
    accepted = 0
    attempted = 0
    for sweep in range(sweeps):
        temperature = temperatures[sweep]
        for i in range(n):
            if not touching[i]:
                continue
            local = np.zeros(readouts)
            for coeff, term in touching[i]:
                prod = np.full(readouts, coeff)
                for j in term:
                    prod *= state[:, j]
                local += prod
            delta = -2.0 * local
            accept = (delta <= 0.0) | (
                uniforms[:, sweep, i] < np.exp(-np.maximum(delta, 0.0) / temperature)
            )
            state[accept, i] *= -1.0
            accepted += int(accept.sum())
            attempted += readouts

    final = state.astype(np.int8)
    energies = np.zeros(readouts)
    for term, coeff in poly.terms.items():
        prod = np.full(readouts, coeff)
        for j in term:
            prod *= state[:, j]
        energies += prod
    winner = int(np.argmin(energies))
    best = SpinAssignment(final[winner])
    return SolveOutcome(
        best=best,
        energy=poly_eval(poly, best),
        samples_evaluated=readouts,
        elapsed=time.perf_counter() - started,
        extra={
            "temp_start": temp_start,
            "temp_end": temp_end,
            "sweeps_per_readout": sweeps,
            "acceptance_rate": accepted / attempted if attempted else 0.0,
        },
    )


# ------------------------------------------------------------------ qaoa

def plus_state(n: int) -> np.ndarray:
    state = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=np.complex128)
    return state


def apply_cost_phase(state: np.ndarray, poly: SpinPolynomial, gamma: float) -> np.ndarray:
    """Multiply each basis amplitude by exp(-i gamma E(basis state))."""
    n = poly.n_vars
    if state.shape[0] != (1 << n):
        raise DimensionError(
            f"state has {state.shape[0]} amplitudes, expected {1 << n}"
        )
    energies = _assignment_energies(poly, minus_on_set=True)
    return _phase_with_energies(state, energies, gamma)


def _phase_with_energies(state: np.ndarray, energies: np.ndarray, gamma: float) -> np.ndarray:
    return state * np.exp(-1j * gamma * energies)


def apply_mixer(state: np.ndarray, beta: float, n: int,
                shift_qubit: int | None = None, shift: float = 0.0) -> np.ndarray:
    """Apply exp(-i beta X) to every qubit (one qubit optionally shifted).

    The mixer factorizes into independent single-qubit rotations
    cos(b) I - i sin(b) X, applied axis by axis on the reshaped state.
    """
    out = state
    for qubit in range(n):
        angle = beta + (shift if qubit == shift_qubit else 0.0)
        cos_b = np.cos(angle)
        sin_b = np.sin(angle)
        view = out.reshape(1 << qubit, 2, -1)
        out = np.empty_like(view)
        out[:, 0, :] = cos_b * view[:, 0, :] - 1j * sin_b * view[:, 1, :]
        out[:, 1, :] = cos_b * view[:, 1, :] - 1j * sin_b * view[:, 0, :]
        out = out.reshape(state.shape)
    return out


def _sample_codes(rng: np.random.Generator, probabilities: np.ndarray,
                  shots: int) -> np.ndarray:
    cdf = np.cumsum(probabilities)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(shots), side="right")


class _QaoaCircuit:
    """Statevector preparation and expectation estimation for one polynomial."""

    def __init__(self, poly: SpinPolynomial, cfg: QaoaConfig,
                 rng: np.random.Generator):
        self.n = poly.n_vars
        self.cfg = cfg
        self.rng = rng
        self.energies = _assignment_energies(poly, minus_on_set=True)
        self.initial = plus_state(self.n)
        self.samples_drawn = 0

    def prepare(self, gammas: np.ndarray, betas: np.ndarray,
                shift_layer: int | None = None, shift_qubit: int | None = None,
                shift: float = 0.0) -> np.ndarray:
        state = self.initial
        for layer in range(self.cfg.depth_p):
            state = _phase_with_energies(state, self.energies, gammas[layer])
            if layer == shift_layer:
                state = apply_mixer(state, betas[layer], self.n, shift_qubit, shift)
            else:
                state = apply_mixer(state, betas[layer], self.n)
        return state

    def expectation(self, state: np.ndarray, exact: bool | None = None) -> float:
        probabilities = np.abs(state) ** 2
        use_exact = self.cfg.exact_expectation if exact is None else exact
        if use_exact:
            return float(probabilities @ self.energies)
        codes = _sample_codes(self.rng, probabilities, self.cfg.shots)
        self.samples_drawn += self.cfg.shots
        return float(self.energies[codes].mean())

    def estimate(self, gammas: np.ndarray, betas: np.ndarray, **kwargs) -> float:
        return self.expectation(self.prepare(gammas, betas, **kwargs))


def solve_qaoa(poly: SpinPolynomial, cfg: QaoaConfig | None = None) -> SolveOutcome:
    """Optimize the QAOA ansatz classically, then return the best final sample.

    Gradients: two-term symmetric parameter shift per qubit for the mixer
    angles, central finite differences (step 1e-2) for the cost angles;
    Adam updates with the configured learning rate.
    """
    cfg = cfg or QaoaConfig()
    n = poly.n_vars
    if n > QAOA_QUBIT_LIMIT:
        raise SolverError(f"too many qubits for statevector: {n} > {QAOA_QUBIT_LIMIT}")
    if n == 0:
        best = SpinAssignment(np.ones(0, dtype=np.int8))
        return SolveOutcome(best, poly_eval(poly, best), 0, 0.0, {})

    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    circuit = _QaoaCircuit(poly, cfg, rng)
    p = cfg.depth_p
    gammas = rng.uniform(0.0, 2.0 * np.pi, p)
    betas = rng.uniform(0.0, 2.0 * np.pi, p)

    initial_state = circuit.prepare(gammas, betas)
    initial_exact = circuit.expectation(initial_state, exact=True)
    initial_estimate = circuit.expectation(initial_state)

    params = np.concatenate([gammas, betas])
    first_moment = np.zeros(2 * p)
    second_moment = np.zeros(2 * p)
    for step in range(1, cfg.steps + 1):
        gammas, betas = params[:p], params[p:]
        gradient = np.empty(2 * p)
        for k in range(p):
            plus = gammas.copy()
            minus = gammas.copy()
            plus[k] += COST_FD_STEP
            minus[k] -= COST_FD_STEP
            gradient[k] = (circuit.estimate(plus, betas)
                           - circuit.estimate(minus, betas)) / (2.0 * COST_FD_STEP)
        for k in range(p):
            total = 0.0
            for qubit in range(n):
                up = circuit.estimate(gammas, betas, shift_layer=k,
                                      shift_qubit=qubit, shift=MIXER_SHIFT)
                down = circuit.estimate(gammas, betas, shift_layer=k,
                                        shift_qubit=qubit, shift=-MIXER_SHIFT)
                total += up - down
            gradient[p + k] = total

        first_moment = ADAM_BETA1 * first_moment + (1 - ADAM_BETA1) * gradient
        second_moment = ADAM_BETA2 * second_moment + (1 - ADAM_BETA2) * gradient ** 2
        corrected_first = first_moment / (1 - ADAM_BETA1 ** step)
        corrected_second = second_moment / (1 - ADAM_BETA2 ** step)
        params = params - cfg.learning_rate * corrected_first / (
            np.sqrt(corrected_second) + ADAM_EPS)

    gammas, betas = params[:p], params[p:]
    final_state = circuit.prepare(gammas, betas)
    final_exact = circuit.expectation(final_state, exact=True)
    final_estimate = circuit.expectation(final_state)

    probabilities = np.abs(final_state) ** 2
    codes = _sample_codes(rng, probabilities, cfg.shots)
    circuit.samples_drawn += cfg.shots
    sample_energies = circuit.energies[codes]
    winner = int(codes[np.argmin(sample_energies)])
    best = SpinAssignment(_spins_of_code(winner, n, minus_on_set=True))

    return SolveOutcome(
        best=best,
        energy=poly_eval(poly, best),
        samples_evaluated=circuit.samples_drawn,
        elapsed=time.perf_counter() - started,
        extra={
            "gammas": [float(v) for v in gammas],
            "betas": [float(v) for v in betas],
            "initial_expectation": initial_estimate,
            "final_expectation": final_estimate,
            "initial_expectation_exact": initial_exact,
            "final_expectation_exact": final_exact,
        },
    )
