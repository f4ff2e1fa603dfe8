"""Conic solver binding: standard form in, normalized solution out.

The default backend is Clarabel, a native interior-point solver handling
linear, second-order and PSD cones.  Status mapping is honest: only the
solver's own "Solved" becomes Optimal; near-converged runs are reported as
Inaccurate and uncertified infeasibility claims as Failed.

Config defaults can be overridden with the environment variables
QRELAX_FEATOL, QRELAX_GAPTOL and QRELAX_TIME_LIMIT.
"""

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverFailure
from .lift import LiftedSpace, StandardForm, moment_lmi


def _env_float(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise SolverFailure(f"bad value for {name}: {raw!r}")


@dataclass
class SolverConfig:
    featol: float = field(default_factory=lambda: _env_float("QRELAX_FEATOL", 1e-8))
    gaptol: float = field(default_factory=lambda: _env_float("QRELAX_GAPTOL", 1e-8))
    max_iter: int = 200
    time_limit: float = field(default_factory=lambda: _env_float("QRELAX_TIME_LIMIT", 0.0))  # 0 = none
    verbosity: int = 0

    def __post_init__(self):
        for label, tol in (("featol", self.featol), ("gaptol", self.gaptol)):
            if not (0.0 < tol < 1e-2):
                raise SolverFailure(f"{label} must lie in (0, 1e-2), got {tol}")


@dataclass
class RawSolution:
    v: np.ndarray
    status: str
    objective: float
    objective_dual: float
    r_prim: float
    r_dual: float
    solve_time: float
    iterations: int
    diagnostic: str = ""


@dataclass
class LiftedSolution:
    x: np.ndarray
    z: np.ndarray
    X: np.ndarray
    S: np.ndarray
    Z: np.ndarray
    objective: float
    status: str
    r_prim: float
    r_dual: float
    gap: float
    moment_min_eig: float
    solve_time: float
    bound_is_dual: bool = False


_STATUS_MAP = {
    "Solved": "Optimal",
    "AlmostSolved": "Inaccurate",
    "PrimalInfeasible": "Infeasible",
    "DualInfeasible": "Unbounded",
    "AlmostPrimalInfeasible": "Failed",
    "AlmostDualInfeasible": "Failed",
    "MaxIterations": "Inaccurate",
    "MaxTime": "TimedOut",
    "NumericalError": "Failed",
    "InsufficientProgress": "Failed",
    "Unsolved": "Failed",
}


def solve(std: StandardForm, config: SolverConfig | None = None) -> RawSolution:
    """Run the conic solver on a lowered program."""
    import clarabel
    from scipy import sparse

    config = config or SolverConfig()
    cone_map = {
        "zero": clarabel.ZeroConeT,
        "nonneg": clarabel.NonnegativeConeT,
        "soc": clarabel.SecondOrderConeT,
        "psd": clarabel.PSDTriangleConeT,
    }
    cones = [cone_map[kind](d) for kind, d in std.cones]
    settings = clarabel.DefaultSettings()
    settings.verbose = config.verbosity > 0
    settings.tol_feas = config.featol
    settings.tol_gap_abs = config.gaptol
    settings.tol_gap_rel = config.gaptol
    settings.max_iter = config.max_iter
    if config.time_limit:
        settings.time_limit = config.time_limit
    # single-threaded for run-to-run determinism
    settings.max_threads = 1

    P = sparse.csc_matrix((std.nvars, std.nvars))
    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(P, std.c, std.A, std.b, cones, settings)
    sol = solver.solve()
    wall = time.perf_counter() - t0

    raw_status = str(sol.status)
    status = _STATUS_MAP.get(raw_status, "Failed")
    v = np.asarray(sol.x, dtype=float)
    if v.shape != (std.nvars,) or not np.all(np.isfinite(v)):
        v = np.full(std.nvars, np.nan)
        if status == "Optimal":
            status = "Failed"
    return RawSolution(
        v=v,
        status=status,
        objective=float(sol.obj_val) + std.obj_const,
        objective_dual=float(sol.obj_val_dual) + std.obj_const,
        r_prim=float(sol.r_prim),
        r_dual=float(sol.r_dual),
        solve_time=wall,
        iterations=int(sol.iterations),
        diagnostic=raw_status,
    )


def recover(space: LiftedSpace, raw: RawSolution) -> LiftedSolution:
    """Unpack a raw solution into lifted values; record the moment residual.

    When the run is Inaccurate the dual objective (a certified lower bound
    for a minimization) is reported instead of the primal value.
    """
    has_point = np.all(np.isfinite(raw.v))
    if has_point:
        x, z, X, S, Z = space.unpack(raw.v)
        min_eig = float(np.linalg.eigvalsh(moment_lmi(space).matrix_at(raw.v))[0])
    else:
        n, nz = space.n, space.nz
        x, z = np.full(n, np.nan), np.full(nz, np.nan)
        X, S, Z = np.full((n, n), np.nan), np.full((n, nz), np.nan), np.full((nz, nz), np.nan)
        min_eig = np.nan
    bound_is_dual = raw.status == "Inaccurate"
    objective = raw.objective_dual if bound_is_dual else raw.objective
    return LiftedSolution(
        x=x, z=z, X=X, S=S, Z=Z,
        objective=objective,
        status=raw.status,
        r_prim=raw.r_prim,
        r_dual=raw.r_dual,
        gap=abs(raw.objective - raw.objective_dual),
        moment_min_eig=min_eig,
        solve_time=raw.solve_time,
        bound_is_dual=bound_is_dual,
    )
