"""Power-flow analysis via iteratively refined spin-variable minimization."""

from .errors import (
    DimensionError,
    GridFormatError,
    JacobianSingularError,
    NewtonDivergedError,
    SolverError,
    SpinflowError,
)
from .grid import (
    Branch,
    Bus,
    BusKind,
    GridModel,
    build_admittance,
    fourbus,
    load_bundled,
    load_grid,
    make_grid,
    parse_grid_document,
    serialize_grid,
)
from .pfcore import (
    PowerInjection,
    VoltageState,
    compute_pq,
    flat_start,
    mismatch,
    newton_raphson,
    residual,
)

__version__ = "0.1.0"
