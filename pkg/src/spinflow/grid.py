"""Grid data model, grid-file ingestion, and admittance-matrix construction.

A grid document is a single JSON object with the keys ``base_mva``,
``buses``, ``branches`` and ``slack_voltage``; every electrical quantity is
in per-unit. Models are canonicalized on load: the slack bus is moved to
index 0 and the remaining buses keep ascending original index order.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .errors import GridFormatError


class BusKind(enum.Enum):
    SLACK = "slack"
    LOAD = "load"


@dataclass(frozen=True)
class Bus:
    """One network node with its fixed per-unit injections."""

    index: int
    kind: BusKind
    p_gen: float = 0.0
    q_gen: float = 0.0
    p_dem: float = 0.0
    q_dem: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_gen", "q_gen", "p_dem", "q_dem"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise GridFormatError(f"bus {self.index}: {name} must be finite")


@dataclass(frozen=True)
class Branch:
    """Series pi-model branch between two buses (per-unit admittance data)."""

    from_bus: int
    to_bus: int
    series_g: float
    series_b: float
    shunt_b_half: float = 0.0

    def __post_init__(self) -> None:
        if self.from_bus == self.to_bus:
            raise GridFormatError(
                f"branch {self.from_bus}-{self.to_bus}: endpoints must differ"
            )

    @classmethod
    def from_impedance(cls, from_bus: int, to_bus: int, r: float, x: float,
                       shunt_b_half: float = 0.0) -> "Branch":
        """Build a branch from series impedance r + jx."""
        y = 1.0 / complex(r, x)
        return cls(from_bus, to_bus, y.real, y.imag, shunt_b_half)


def build_admittance(branches: Iterable[Branch], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the nodal admittance matrix Y = G + jB from branch data.

    Off-diagonal entries are the negated series admittances (summed over
    parallel branches); diagonals collect every incident series admittance
    plus the line-charging shunt halves.
    """
    g = np.zeros((n, n))
    b = np.zeros((n, n))
    for branch in branches:
        i, k = branch.from_bus, branch.to_bus
        if not (0 <= i < n) or not (0 <= k < n):
            raise GridFormatError(
                f"branch {i}-{k}: bus index out of range for {n} buses"
            )
        g[i, k] -= branch.series_g
        g[k, i] -= branch.series_g
        b[i, k] -= branch.series_b
        b[k, i] -= branch.series_b
        g[i, i] += branch.series_g
        g[k, k] += branch.series_g
        b[i, i] += branch.series_b + branch.shunt_b_half
        b[k, k] += branch.series_b + branch.shunt_b_half
    return g, b


@dataclass(frozen=True, eq=False)
class GridModel:
    """Canonical immutable grid: buses, branches, and Y = G + jB.

    The slack bus is always at index 0; ``g`` and ``b`` are symmetric
    N x N matrices and are read-only.
    """

    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    g: np.ndarray
    b: np.ndarray
    slack_voltage: tuple[float, float]
    base_mva: float = 100.0

    def __post_init__(self) -> None:
        slack_count = sum(1 for bus in self.buses if bus.kind is BusKind.SLACK)
        if slack_count != 1:
            word = "no" if slack_count == 0 else "multiple"
            raise GridFormatError(f"buses: {word} slack buses (need exactly one)")
        if self.buses[0].kind is not BusKind.SLACK:
            raise GridFormatError("buses: slack bus must be at index 0")
        for pos, bus in enumerate(self.buses):
            if bus.index != pos:
                raise GridFormatError(f"buses[{pos}]: index {bus.index} not canonical")
        n = len(self.buses)
        if self.g.shape != (n, n) or self.b.shape != (n, n):
            raise GridFormatError("g/b: admittance matrices must be N x N")
        self.g.setflags(write=False)
        self.b.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.buses)

    def specified_injections(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-bus scheduled net injections (P_gen - P_dem, Q_gen - Q_dem)."""
        p = np.array([bus.p_gen - bus.p_dem for bus in self.buses])
        q = np.array([bus.q_gen - bus.q_dem for bus in self.buses])
        return p, q


def make_grid(buses: Sequence[Bus], branches: Sequence[Branch],
              slack_voltage: tuple[float, float] = (1.0, 0.0),
              base_mva: float = 100.0) -> GridModel:
    """Canonicalize bus order, remap branch endpoints, and build Y.

    Accepts buses in any order with unique (not necessarily contiguous)
    indices; the slack bus moves to position 0 and the rest follow in
    ascending original index order.
    """
    seen: set[int] = set()
    for bus in buses:
        if bus.index in seen:
            raise GridFormatError(f"buses: duplicate bus index {bus.index}")
        seen.add(bus.index)

    slack = [bus for bus in buses if bus.kind is BusKind.SLACK]
    if len(slack) == 0:
        raise GridFormatError("buses: no slack bus (need exactly one)")
    if len(slack) > 1:
        raise GridFormatError("buses: multiple slack buses (need exactly one)")
    others = sorted(
        (bus for bus in buses if bus.kind is not BusKind.SLACK),
        key=lambda bus: bus.index,
    )
    ordered = [slack[0], *others]
    position = {bus.index: pos for pos, bus in enumerate(ordered)}

    canonical_buses = tuple(
        Bus(pos, bus.kind, bus.p_gen, bus.q_gen, bus.p_dem, bus.q_dem)
        for pos, bus in enumerate(ordered)
    )
    canonical_branches = []
    for branch in branches:
        if branch.from_bus not in position or branch.to_bus not in position:
            raise GridFormatError(
                f"branch {branch.from_bus}-{branch.to_bus}: unknown bus index"
            )
        canonical_branches.append(
            Branch(position[branch.from_bus], position[branch.to_bus],
                   branch.series_g, branch.series_b, branch.shunt_b_half)
        )
    g, b = build_admittance(canonical_branches, len(canonical_buses))
    return GridModel(
        buses=canonical_buses,
        branches=tuple(canonical_branches),
        g=g,
        b=b,
        slack_voltage=(float(slack_voltage[0]), float(slack_voltage[1])),
        base_mva=float(base_mva),
    )


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise GridFormatError(f"{context}: missing field '{key}'")
    return mapping[key]


def _number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise GridFormatError(f"{context}: expected a number, got {value!r}")
    return float(value)


def parse_grid_document(doc: dict) -> GridModel:
    """Build a canonical GridModel from an already-decoded grid document."""
    if not isinstance(doc, dict):
        raise GridFormatError("document: expected a JSON object")
    raw_buses = _require(doc, "buses", "document")
    raw_branches = doc.get("branches", [])
    if not isinstance(raw_buses, list) or not raw_buses:
        raise GridFormatError("buses: expected a non-empty array")
    if not isinstance(raw_branches, list):
        raise GridFormatError("branches: expected an array")

    buses = []
    for pos, entry in enumerate(raw_buses):
        context = f"buses[{pos}]"
        if not isinstance(entry, dict):
            raise GridFormatError(f"{context}: expected an object")
        kind_text = str(_require(entry, "kind", context)).lower()
        try:
            kind = BusKind(kind_text)
        except ValueError:
            raise GridFormatError(f"{context}.kind: unknown bus kind {kind_text!r}")
        index = _require(entry, "index", context)
        if isinstance(index, bool) or not isinstance(index, int):
            raise GridFormatError(f"{context}.index: expected an integer")
        buses.append(Bus(
            index=index,
            kind=kind,
            p_gen=_number(entry.get("p_gen", 0.0), f"{context}.p_gen"),
            q_gen=_number(entry.get("q_gen", 0.0), f"{context}.q_gen"),
            p_dem=_number(entry.get("p_dem", 0.0), f"{context}.p_dem"),
            q_dem=_number(entry.get("q_dem", 0.0), f"{context}.q_dem"),
        ))

    branches = []
    for pos, entry in enumerate(raw_branches):
        context = f"branches[{pos}]"
        if not isinstance(entry, dict):
            raise GridFormatError(f"{context}: expected an object")
        branches.append(Branch(
            from_bus=_require(entry, "from", context),
            to_bus=_require(entry, "to", context),
            series_g=_number(_require(entry, "series_g", context), f"{context}.series_g"),
            series_b=_number(_require(entry, "series_b", context), f"{context}.series_b"),
            shunt_b_half=_number(entry.get("shunt_b_half", 0.0), f"{context}.shunt_b_half"),
        ))

    slack_voltage = doc.get("slack_voltage", {"mu": 1.0, "omega": 0.0})
    if not isinstance(slack_voltage, dict):
        raise GridFormatError("slack_voltage: expected an object with mu/omega")
    mu0 = _number(_require(slack_voltage, "mu", "slack_voltage"), "slack_voltage.mu")
    omega0 = _number(_require(slack_voltage, "omega", "slack_voltage"), "slack_voltage.omega")

    base_mva = _number(doc.get("base_mva", 100.0), "base_mva")
    return make_grid(buses, branches, (mu0, omega0), base_mva)


def load_grid(text: str) -> GridModel:
    """Parse grid-file content into a canonical GridModel."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"document: invalid JSON ({exc})") from exc
    return parse_grid_document(doc)


def serialize_grid(grid: GridModel, name: str | None = None,
                   notes: str | None = None) -> str:
    """Emit the canonical grid-file text for a model (load_grid inverse)."""
    doc: dict = {}
    if name is not None:
        doc["name"] = name
    if notes is not None:
        doc["notes"] = notes
    doc["base_mva"] = grid.base_mva
    doc["slack_voltage"] = {"mu": grid.slack_voltage[0], "omega": grid.slack_voltage[1]}
    doc["buses"] = [
        {
            "index": bus.index,
            "kind": bus.kind.value,
            "p_gen": bus.p_gen,
            "q_gen": bus.q_gen,
            "p_dem": bus.p_dem,
            "q_dem": bus.q_dem,
        }
        for bus in grid.buses
    ]
    doc["branches"] = [
        {
            "from": branch.from_bus,
            "to": branch.to_bus,
            "series_g": branch.series_g,
            "series_b": branch.series_b,
            "shunt_b_half": branch.shunt_b_half,
        }
        for branch in grid.branches
    ]
    return json.dumps(doc, indent=2) + "\n"


def load_bundled(name: str) -> GridModel:
    """Load one of the grid fixtures shipped inside the package."""
    text = resources.files("spinflow.data").joinpath(f"{name}.json").read_text()
    return load_grid(text)


def fourbus() -> GridModel:
    """The bundled 4-bus benchmark system (1 slack + 3 load buses)."""
    return load_bundled("fourbus")
