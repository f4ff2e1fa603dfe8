"""Brute-force global minimization of tiny instances.

Dense grid scan over the feasible cells of a finite box, followed by local
polish from the best grid points.  Intended to certify relaxation bounds on
desk-scale problems (n <= 4); it evaluates the original quadratic data
directly and shares no code with the relaxation path.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import NoFeasiblePointFound
from .model import QcqpInstance

DEFAULT_RADIUS = 10.0
FEAS_TOL = 1e-6
POLISH_STARTS = 10


@dataclass(frozen=True)
class OracleResult:
    best_x: np.ndarray
    best_val: float
    box: tuple
    resolution: int
    refined: bool


def default_box(inst: QcqpInstance, radius: float = DEFAULT_RADIUS):
    """Per-axis bounds from single-variable linear rows, clipped to +-radius."""
    lo = np.full(inst.n, -radius)
    hi = np.full(inst.n, radius)
    for lc in inst.lin:
        nz = np.nonzero(lc.a)[0]
        if len(nz) != 1:
            continue
        i, coef = int(nz[0]), lc.a[nz[0]]
        bound = lc.b / coef
        if coef > 0:
            hi[i] = min(hi[i], bound)
        else:
            lo[i] = max(lo[i], bound)
    return lo, hi


def global_min(inst: QcqpInstance, box=None, resolution: int = 41) -> OracleResult:
    """Grid scan + multistart polish; returns the best feasible point found."""
    if inst.n > 4:
        raise ValueError(f"oracle is for n <= 4 (got n = {inst.n})")
    lo, hi = box if box is not None else default_box(inst)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    axes = [np.linspace(lo[i], hi[i], resolution) for i in range(inst.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)

    feas = np.ones(len(pts), dtype=bool)
    for qc in inst.quad:
        vals = np.einsum("ki,ij,kj->k", pts, qc.Q, pts) + pts @ qc.c + qc.d
        feas &= vals <= FEAS_TOL
    for lc in inst.lin:
        feas &= pts @ lc.a <= lc.b + FEAS_TOL
    if not np.any(feas):
        raise NoFeasiblePointFound(f"no feasible grid point at resolution {resolution}")

    fpts = pts[feas]
    objs = np.einsum("ki,ij,kj->k", fpts, inst.Q0, fpts) + fpts @ inst.c0
    order = np.argsort(objs, kind="stable")
    best_x = fpts[order[0]]
    best_val = float(objs[order[0]])
    refined = False

    cons = [
        {"type": "ineq", "fun": (lambda x, qc=qc: -(x @ qc.Q @ x + qc.c @ x + qc.d))}
        for qc in inst.quad
    ] + [{"type": "ineq", "fun": (lambda x, lc=lc: lc.b - lc.a @ x)} for lc in inst.lin]
    bounds = list(zip(lo, hi))
    for k in order[:POLISH_STARTS]:
        res = optimize.minimize(
            inst.objective,
            fpts[k],
            method="SLSQP",
            constraints=cons,
            bounds=bounds,
            options={"maxiter": 200, "ftol": 1e-12},
        )
        if not res.success:
            continue
        x = np.clip(res.x, lo, hi)
        if inst.max_violation(x) > FEAS_TOL:
            continue
        val = inst.objective(x)
        if val < best_val:
            best_x, best_val, refined = x, val, True

    return OracleResult(
        best_x=np.asarray(best_x, dtype=float),
        best_val=float(best_val),
        box=(tuple(lo), tuple(hi)),
        resolution=resolution,
        refined=refined,
    )
