"""Linear solves of the hierarchy system and frequency / parameter sweeps.

Each Laplace point is an independent direct sparse solve (LU); an iterative
Krylov fallback takes over above a configurable dimension.  Sweep results are
written to pre-assigned slots, so the output is deterministic regardless of
the worker count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import gmres, splu

from .assembler import HierarchyOperator, LaplacePoint, assemble_static, rhs_all_sites
from .hierarchy import enumerate_basis
from .model import BathSpec, BathTerm, System

__all__ = [
    "SolverError",
    "CorrelationBlock",
    "SweepPlan",
    "SWEEP_AXES",
    "solve_point",
    "sweep_frequency",
    "sweep_parameter",
    "with_axis_value",
]

SWEEP_AXES = ("gamma", "g", "V")

# Direct factorisation is robust near sharp resonances where Krylov methods
# stagnate; it stays the default up to this many unknowns.
DIRECT_SOLVE_LIMIT = 200_000
KRYLOV_MAX_ITER = 10_000


class SolverError(RuntimeError):
    """A linear solve failed or missed the residual contract."""


@dataclass(frozen=True)
class CorrelationBlock:
    """The k = 0 block of the solution at one Laplace point.

    ``c_tilde[n, m]`` is the transformed correlation of site n for the
    excitation initially localised on site m (both 0-based here).
    """

    s: LaplacePoint
    c_tilde: np.ndarray
    residual: float = 0.0


@dataclass(frozen=True)
class SweepPlan:
    """Frequency grid and options for a sweep.

    `parameter_axis` is an optional (name, values) pair with name one of
    'gamma', 'g' or 'V'; gamma and g rebuild the bath, V the Hamiltonian.
    """

    omega_grid: np.ndarray
    epsilon: float = 0.01
    parameter_axis: tuple = None
    e_max: int = 12
    workers: int = 1
    residual_tol: float = 1e-10
    direct_limit: int = DIRECT_SOLVE_LIMIT
    max_unknowns: int = 5_000_000

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise ValueError("omega_grid must be a non-empty 1-d array")
        if not np.all(np.isfinite(grid)):
            raise ValueError("omega_grid contains non-finite values")
        if len(grid) > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("omega_grid must be strictly increasing")
        object.__setattr__(self, "omega_grid", grid)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.parameter_axis is not None:
            name, values = self.parameter_axis
            if name not in SWEEP_AXES:
                raise ValueError(f"unknown sweep axis {name!r}; expected one of {SWEEP_AXES}")
            values = tuple(float(v) for v in values)
            if len(values) == 0:
                raise ValueError("sweep axis needs at least one value")
            object.__setattr__(self, "parameter_axis", (name, values))
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def laplace_points(self):
        return [LaplacePoint(self.epsilon, w) for w in self.omega_grid]


def solve_point(
    op: HierarchyOperator,
    s: LaplacePoint,
    rhs: np.ndarray,
    *,
    residual_tol: float = 1e-10,
    direct_limit: int = DIRECT_SOLVE_LIMIT,
) -> CorrelationBlock:
    """Solve A(s) X = rhs and return the k = 0 block of the columns."""
    if rhs.shape[0] != op.dimension:
        raise ValueError("rhs dimension does not match the operator")
    b = rhs if rhs.ndim == 2 else rhs[:, None]
    a = op.shifted(s)

    if op.dimension <= direct_limit:
        try:
            lu = splu(a, permc_spec="MMD_ATA" if op.dimension > 3000 else "COLAMD")
            x = lu.solve(b)
            # one step of iterative refinement towards the residual contract
            x += lu.solve(b - a @ x)
        except RuntimeError as exc:
            raise SolverError(f"sparse LU failed at s = {s.value}: {exc}") from exc
    else:
        x = np.empty_like(b)
        for col in range(b.shape[1]):
            xi, info = gmres(
                a, b[:, col], rtol=residual_tol, atol=0.0,
                restart=200, maxiter=KRYLOV_MAX_ITER,
            )
            if info != 0:
                raise SolverError(
                    f"GMRES did not converge at s = {s.value} (info = {info})"
                )
            x[:, col] = xi

    norms = np.linalg.norm(b, axis=0)
    residuals = np.linalg.norm(a @ x - b, axis=0) / np.where(norms > 0, norms, 1.0)
    worst = float(residuals.max())
    if worst > residual_tol:
        raise SolverError(
            f"residual {worst:.3e} exceeds {residual_tol:.1e} at s = {s.value}"
        )

    n = op.block_size
    return CorrelationBlock(
        s=s, c_tilde=np.array(x[:n, :], dtype=complex), residual=worst
    )


def _run_indexed(tasks, workers):
    """Evaluate index-tagged thunks into slots, preserving order."""
    results = [None] * len(tasks)
    if workers <= 1 or len(tasks) <= 1:
        for i, thunk in enumerate(tasks):
            results[i] = thunk()
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(thunk): i for i, thunk in enumerate(tasks)}
            for fut, i in futures.items():
                results[i] = fut.result()
    return results


def sweep_frequency(system: System, plan: SweepPlan) -> list:
    """One CorrelationBlock per grid point, in grid order."""
    n = system.n_monomers
    basis = enumerate_basis(
        system.bath.term_count, plan.e_max,
        block_size=n, max_unknowns=plan.max_unknowns,
    )
    op = assemble_static(system, basis, max_unknowns=plan.max_unknowns)
    rhs = rhs_all_sites(basis, n)

    def make_task(point):
        def task():
            return solve_point(
                op, point, rhs,
                residual_tol=plan.residual_tol, direct_limit=plan.direct_limit,
            )
        return task

    tasks = [make_task(p) for p in plan.laplace_points()]
    try:
        return _run_indexed(tasks, plan.workers)
    except SolverError as exc:
        raise SolverError(f"{exc} (during frequency sweep)") from exc


def with_axis_value(system: System, name: str, value: float) -> System:
    """A copy of the system with one swept parameter replaced."""
    if name == "V":
        agg = dataclasses.replace(system.aggregate, dipole_coupling=float(value))
        return System(aggregate=agg, bath=system.bath)
    if name == "gamma":
        terms = tuple(
            tuple(BathTerm(t.weight, complex(value, t.center)) for t in ts)
            for ts in system.bath.per_monomer_terms
        )
    elif name == "g":
        terms = tuple(
            tuple(BathTerm(complex(value), t.decay) for t in ts)
            for ts in system.bath.per_monomer_terms
        )
    else:
        raise ValueError(f"unknown sweep axis {name!r}")
    return System(aggregate=system.aggregate, bath=BathSpec(per_monomer_terms=terms))


def sweep_parameter(system: System, plan: SweepPlan) -> list:
    """Row-major [axis value][omega] blocks; the model is rebuilt per value."""
    if plan.parameter_axis is None:
        raise ValueError("sweep_parameter requires a parameter_axis in the plan")
    name, values = plan.parameter_axis
    row_plan = dataclasses.replace(plan, parameter_axis=None)
    rows = []
    for value in values:
        try:
            rows.append(sweep_frequency(with_axis_value(system, name, value), row_plan))
        except SolverError as exc:
            raise SolverError(f"{exc} (at {name} = {value})") from exc
    return rows
