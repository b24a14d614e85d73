"""Multilinear polynomial algebra over spin and binary variables.

Spin polynomials live on s in {-1,+1}^n with s_i^2 = 1 applied eagerly;
binary polynomials live on x in {0,1}^n with x_i^2 = x_i. The module also
provides the standard spin->binary substitution s_i = 2 x_i - 1 and a
Rosenberg-style pairwise quadratization that turns higher-order binary
polynomials into penalty-augmented QUBO forms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, SolverError

# Coefficients below this magnitude are dropped to keep term maps sparse.
COEFF_EPS = 1e-15

Term = tuple[int, ...]


def _normalize_spin_indices(indices: Iterable[int]) -> Term:
    """Apply s_i^2 = 1: indices appearing an even number of times cancel."""
    counts = Counter(indices)
    return tuple(sorted(i for i, c in counts.items() if c % 2 == 1))


def _check_indices(indices: Term, n_vars: int) -> None:
    for i in indices:
        if not (0 <= i < n_vars):
            raise DimensionError(f"variable index {i} out of range for n={n_vars}")


@dataclass(frozen=True)
class SpinAssignment:
    """A concrete +-1 value for every spin variable."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.int8)
        if values.ndim != 1:
            raise DimensionError("spin assignment must be a 1-d vector")
        if not np.all(np.abs(values) == 1):
            raise ValueError("spin values must be +1 or -1")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class SpinPolynomial:
    """Multilinear real polynomial over spin variables.

    ``terms`` maps sorted duplicate-free index tuples (the empty tuple is
    the constant) to coefficients; zero coefficients are never stored.
    """

    n_vars: int
    terms: Mapping[Term, float] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, n_vars: int,
                   entries: Iterable[tuple[Iterable[int], float]]) -> "SpinPolynomial":
        acc: dict[Term, float] = {}
        for indices, coeff in entries:
            key = _normalize_spin_indices(indices)
            _check_indices(key, n_vars)
            acc[key] = acc.get(key, 0.0) + float(coeff)
        return cls(n_vars, {k: v for k, v in acc.items() if abs(v) > COEFF_EPS})

    @classmethod
    def constant(cls, value: float, n_vars: int) -> "SpinPolynomial":
        return cls.from_terms(n_vars, [((), value)])

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "SpinPolynomial":
        return cls.from_terms(n_vars, [((index,), 1.0)])

    @property
    def degree(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def variables_used(self) -> set[int]:
        used: set[int] = set()
        for term in self.terms:
            used.update(term)
        return used

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = SpinPolynomial.constant(other, self.n_vars)
        if not isinstance(other, SpinPolynomial):
            return NotImplemented
        if self.n_vars != other.n_vars:
            raise DimensionError("polynomials have different variable counts")
        acc = dict(self.terms)
        for key, coeff in other.terms.items():
            acc[key] = acc.get(key, 0.0) + coeff
        return SpinPolynomial(self.n_vars,
                              {k: v for k, v in acc.items() if abs(v) > COEFF_EPS})

    __radd__ = __add__

    def __neg__(self):
        return SpinPolynomial(self.n_vars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            scaled = {k: v * other for k, v in self.terms.items()}
            return SpinPolynomial(self.n_vars,
                                  {k: v for k, v in scaled.items() if abs(v) > COEFF_EPS})
        if not isinstance(other, SpinPolynomial):
            return NotImplemented
        if self.n_vars != other.n_vars:
            raise DimensionError("polynomials have different variable counts")
        acc: dict[Term, float] = {}
        for ta, ca in self.terms.items():
            set_a = frozenset(ta)
            for tb, cb in other.terms.items():
                key = tuple(sorted(set_a ^ frozenset(tb)))
                acc[key] = acc.get(key, 0.0) + ca * cb
        return SpinPolynomial(self.n_vars,
                              {k: v for k, v in acc.items() if abs(v) > COEFF_EPS})

    __rmul__ = __mul__

    def evaluate(self, assignment) -> float:
        values = assignment.values if isinstance(assignment, SpinAssignment) \
            else np.asarray(assignment)
        if values.shape[0] != self.n_vars:
            raise DimensionError(
                f"assignment has {values.shape[0]} spins, polynomial has {self.n_vars}"
            )
        total = 0.0
        for term, coeff in self.terms.items():
            prod = coeff
            for i in term:
                prod *= values[i]
            total += prod
        return float(total)


def poly_add(a: SpinPolynomial, b: SpinPolynomial) -> SpinPolynomial:
    return a + b


def poly_mul(a: SpinPolynomial, b: SpinPolynomial) -> SpinPolynomial:
    return a * b


def poly_eval(p: SpinPolynomial, s) -> float:
    return p.evaluate(s)


@dataclass(frozen=True)
class BinaryPolynomial:
    """Multilinear real polynomial over binary variables x in {0,1}."""

    n_vars: int
    terms: Mapping[Term, float] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, n_vars: int,
                   entries: Iterable[tuple[Iterable[int], float]]) -> "BinaryPolynomial":
        acc: dict[Term, float] = {}
        for indices, coeff in entries:
            key = tuple(sorted(set(indices)))  # x_i^2 = x_i
            _check_indices(key, n_vars)
            acc[key] = acc.get(key, 0.0) + float(coeff)
        return cls(n_vars, {k: v for k, v in acc.items() if abs(v) > COEFF_EPS})

    @property
    def degree(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def evaluate(self, bits) -> float:
        values = np.asarray(bits)
        if values.shape[0] != self.n_vars:
            raise DimensionError(
                f"assignment has {values.shape[0]} bits, polynomial has {self.n_vars}"
            )
        total = 0.0
        for term, coeff in self.terms.items():
            prod = coeff
            for i in term:
                prod *= values[i]
            total += prod
        return float(total)


def spin_to_binary(p: SpinPolynomial) -> BinaryPolynomial:
    """Substitute s_i = 2 x_i - 1 and expand into a binary polynomial."""
    entries: list[tuple[Term, float]] = []
    for term, coeff in p.terms.items():
        size = len(term)
        for k in range(size + 1):
            factor = coeff * (2.0 ** k) * ((-1.0) ** (size - k))
            for subset in combinations(term, k):
                entries.append((subset, factor))
    return BinaryPolynomial.from_terms(p.n_vars, entries)


def binary_to_spin_values(bits: np.ndarray) -> SpinAssignment:
    """Map binary optimization values to spins via s = 2x - 1."""
    return SpinAssignment(2 * np.asarray(bits, dtype=np.int8) - 1)


@dataclass(frozen=True)
class QuboForm:
    """Quadratic binary form produced by quadratization.

    ``aux_registry`` maps each auxiliary variable index (all >= the original
    variable count) to the variable pair whose product it replaces.
    """

    n_total: int
    linear: np.ndarray
    quadratic: Mapping[tuple[int, int], float]
    offset: float
    aux_registry: Mapping[int, tuple[int, int]]
    penalty: float

    @property
    def n_original(self) -> int:
        return self.n_total - len(self.aux_registry)

    def energy(self, bits) -> float:
        x = np.asarray(bits, dtype=float)
        if x.shape[0] != self.n_total:
            raise DimensionError(
                f"assignment has {x.shape[0]} bits, form has {self.n_total}"
            )
        total = self.offset + float(self.linear @ x)
        for (i, j), coeff in self.quadratic.items():
            total += coeff * x[i] * x[j]
        return total


def penalty_default(p: BinaryPolynomial) -> float:
    """Penalty weight 2 * sum(|coeff|) over the non-constant terms."""
    if not p.terms:
        raise ValueError("polynomial has no terms")
    return 2.0 * sum(abs(c) for t, c in p.terms.items() if len(t) >= 1)


def _most_frequent_pair(terms: Mapping[Term, float]) -> tuple[int, int] | None:
    counts: Counter = Counter()
    for term in terms:
        if len(term) >= 3:
            for pair in combinations(term, 2):
                counts[pair] += 1
    if not counts:
        return None
    best_count = max(counts.values())
    return min(pair for pair, c in counts.items() if c == best_count)


def quadratize(p: BinaryPolynomial, penalty: float) -> QuboForm:
    """Reduce a binary polynomial to degree <= 2 by pairwise substitution.

    Repeatedly replaces the most frequent variable pair occurring in terms
    of degree >= 3 (ties broken by lexicographically smallest pair) with a
    fresh auxiliary y, adding penalty * (x_i x_j - 2 x_i y - 2 x_j y + 3 y)
    so that y = x_i x_j at any sufficiently low-energy state.
    """
    if p.degree > 2 and penalty <= 0:
        raise ValueError("penalty must be positive to reduce degree >= 3 terms")

    terms: dict[Term, float] = dict(p.terms)
    aux_registry: dict[int, tuple[int, int]] = {}
    next_aux = p.n_vars

    while True:
        pair = _most_frequent_pair(terms)
        if pair is None:
            break
        i, j = pair
        y = next_aux
        next_aux += 1
        aux_registry[y] = (i, j)

        reduced: dict[Term, float] = {}
        for term, coeff in terms.items():
            if len(term) >= 3 and i in term and j in term:
                term = tuple(sorted((set(term) - {i, j}) | {y}))
            reduced[term] = reduced.get(term, 0.0) + coeff
        for key, coeff in (((i, j), penalty), ((i, y), -2.0 * penalty),
                           ((j, y), -2.0 * penalty), ((y,), 3.0 * penalty)):
            reduced[key] = reduced.get(key, 0.0) + coeff
        terms = {k: v for k, v in reduced.items() if abs(v) > COEFF_EPS}

    linear = np.zeros(next_aux)
    quadratic: dict[tuple[int, int], float] = {}
    offset = 0.0
    for term, coeff in terms.items():
        if len(term) == 0:
            offset += coeff
        elif len(term) == 1:
            linear[term[0]] += coeff
        else:
            quadratic[term] = quadratic.get(term, 0.0) + coeff
    return QuboForm(
        n_total=next_aux,
        linear=linear,
        quadratic=quadratic,
        offset=offset,
        aux_registry=aux_registry,
        penalty=penalty,
    )


def export_qubo(form: QuboForm) -> str:
    """QUBO text export: `# offset <value>` then `i j coeff` lines (i = j linear)."""
    lines = [f"# offset {float(form.offset)!r}"]
    for i in range(form.n_total):
        if form.linear[i] != 0.0:
            lines.append(f"{i} {i} {float(form.linear[i])!r}")
    for (i, j) in sorted(form.quadratic):
        lines.append(f"{i} {j} {float(form.quadratic[(i, j)])!r}")
    return "\n".join(lines) + "\n"
