"""Random instance generation, batch comparison and dominance verification.

The generator follows the reference recipe: orthogonal similarity transforms
of random diagonal matrices (three Householder reflections), with diagonal,
linear-term and offset ranges depending on whether the constraint is convex
or not.  Sampling uses numpy's PCG64 generator; a seed fully determines the
instance, and sweep cells derive their streams from
``SeedSequence((base_seed, m, repetition))``.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend as _backend
from . import lift as _lift
from . import model as _model
from . import relax as _relax
from .errors import SettingViolated
from .relax import AlphaAug


@dataclass(frozen=True)
class GenSpec:
    n: int
    l: int  # noqa: E741 - quadratic constraint count
    k: int
    m: int
    seed: int
    phi: int | None = None  # negative-eigenvalue count per nonconvex constraint
    figures_mode: bool = False  # Q0 = I - sum(Q_i), phi controls negatives

    def __post_init__(self):
        if not (0 <= self.k <= self.l):
            raise ValueError(f"need 0 <= k <= l, got k={self.k}, l={self.l}")
        if self.phi is not None and not (1 <= self.phi <= self.n - 1):
            raise ValueError(f"phi must lie in [1, n-1], got {self.phi}")

    @property
    def name(self) -> str:
        tag = f"set-{self.n}-{self.l}-{self.k}-{self.m}-s{self.seed}"
        return tag + (f"-phi{self.phi}" if self.phi is not None else "")


def _round_half_away(x):
    """Round to nearest integer, halves away from zero."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _sym(M):
    return (M + M.T) / 2.0


def _random_orthogonal(rng, n):
    """Product of three Householder reflections I - 2 w w^T / ||w||^2."""
    P = np.eye(n)
    for _ in range(3):
        w = rng.uniform(-1.0, 1.0, n)
        P = P @ (np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w))
    return P


def generate(spec: GenSpec) -> _model.QcqpInstance:
    """Deterministic random instance for the given generation spec."""
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    n, l, k, m = spec.n, spec.l, spec.k, spec.m
    neg_count = spec.phi if spec.phi is not None else n // 2

    quads = []
    Qs = []
    for i in range(1, l + 1):
        P = _random_orthogonal(rng, n)
        if i <= k:
            diag = rng.uniform(0.0, 50.0, n)
        else:
            diag = np.concatenate(
                [rng.uniform(-50.0, 0.0, neg_count), rng.uniform(0.0, 50.0, n - neg_count)]
            )
        # orthogonal similarity: eigenvalues are exactly the sampled diagonal
        # (P is a product of three reflections, orthogonal but not symmetric,
        # so the transpose on the right is required for the eigenvalue ranges)
        Q = _sym(P @ np.diag(diag) @ P.T)
        c = rng.uniform(-100.0, 0.0, n) if i <= k else rng.uniform(0.0, 100.0, n)
        theta_i = float(-Q[0, 0] - c[0])
        lo = -100.0 if i <= k else -10.0
        d = float(rng.uniform(lo + theta_i, theta_i))
        Qs.append(Q)
        quads.append((Q, c, d))

    P0 = _random_orthogonal(rng, n)
    diag0 = rng.uniform(-50.0, 50.0, n)
    if spec.figures_mode:
        Q0 = np.eye(n) - sum(Qs) if Qs else np.eye(n)
    else:
        Q0 = _round_half_away(_sym(P0 @ np.diag(diag0) @ P0.T))
    c0 = rng.uniform(-50.0, 50.0, n)

    lin = []
    for _ in range(m):
        a = _round_half_away(rng.uniform(-50.0, 50.0, n))
        slack = 0.5 * float(np.sum(np.maximum(a, 0.0)))
        b = float(_round_half_away(rng.uniform(-10.0 - slack, -slack)))
        lin.append((a, b))

    return _model.make_instance(n=n, Q0=Q0, c0=c0, quad=quads, lin=lin, name=spec.name)


def with_nonnegativity(inst: _model.QcqpInstance) -> _model.QcqpInstance:
    """Append -x_i <= 0 rows for every coordinate not already covered."""
    out = inst
    covered = set()
    for lc in inst.lin:
        nz = np.nonzero(lc.a)[0]
        if len(nz) == 1 and lc.a[nz[0]] < 0 and lc.b <= 0:
            covered.add(int(nz[0]))
    for i in range(inst.n):
        if i not in covered:
            e = np.zeros(inst.n)
            e[i] = -1.0
            out = out.with_linear_row(e, 0.0)
    return out


# --------------------------------------------------------------------------
# comparison harness

DOMINANCE_TOL = 1e-5
# known bound orderings (weaker name first); checked on every compare run
_CHAINS = [
    ("sdp", "rlt"),
    ("rlt", "soc-rlt"),
    ("soc-rlt", "gsrt-a"),
    ("soc-rlt", "gsrt-b"),
    ("gsrt-a", "sst"),
    ("sst", "ksoc-sub"),
    ("ksoc-sub", "ksoc-full"),
    ("rlt", "alpha-rlt"),
    ("soc-rlt", "alpha-soc-rlt"),
    ("gsrt-a", "alpha-gsrt-a"),
    ("gsrt-b", "alpha-gsrt-b"),
    ("alpha-rlt", "alpha-soc-rlt"),
    ("alpha-soc-rlt", "alpha-gsrt-a"),
    ("alpha-soc-rlt", "alpha-gsrt-b"),
]


@dataclass
class CompareReport:
    instance: str
    rows: list  # SolveReport per relaxation, input order
    improvement_ratio: float | None
    dominance_violations: list = field(default_factory=list)

    def row(self, name: str):
        for r in self.rows:
            if r.name == name:
                return r
        return None

    def bounds(self) -> dict:
        return {r.name: r.bound for r in self.rows}


def compare(inst, relaxations, alpha=None, config=None, jobs: int = 1) -> CompareReport:
    """Solve each named relaxation and audit the known bound orderings.

    The improvement ratio (gsrt bound vs rlt bound) is recorded when both
    are solved to optimality; violations of the dominance chains beyond
    DOMINANCE_TOL are collected, never silently dropped.
    """
    if not relaxations:
        raise ValueError("need at least one relaxation name")

    def run(name):
        try:
            return _relax.solve_relaxation(inst, name, alpha=alpha, config=config)
        except Exception as e:  # propagate per-cell failures without aborting the batch
            return _relax.SolveReport(
                name=name, bound=float("nan"), status="Failed",
                solution=None, counts={}, build_time=0.0, solve_time=0.0,
                notes=[f"error: {e}"],
            )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run, relaxations))
    else:
        rows = [run(name) for name in relaxations]

    by_name = {r.name: r for r in rows}
    violations = []
    for weak, strong in _CHAINS:
        rw, rs = by_name.get(weak), by_name.get(strong)
        if rw is None or rs is None or rw.status != "Optimal" or rs.status != "Optimal":
            continue
        # scale-relative: solver gap tolerances are relative to the bound size
        if rs.bound < rw.bound - DOMINANCE_TOL * max(1.0, abs(rw.bound)):
            violations.append((weak, strong, rw.bound, rs.bound))

    # (v_gsrt - v_rlt) / |v_rlt|: nonnegative whenever the ordering holds,
    # matching the reported positive improvement percentages
    ratio = None
    gsrt = next((by_name[n] for n in ("gsrt-b", "gsrt-a") if n in by_name), None)
    rlt = by_name.get("rlt")
    if gsrt is not None and rlt is not None and gsrt.status == "Optimal" and rlt.status == "Optimal" \
            and rlt.bound != 0.0:
        ratio = (gsrt.bound - rlt.bound) / abs(rlt.bound)

    return CompareReport(
        instance=inst.name, rows=rows,
        improvement_ratio=ratio, dominance_violations=violations,
    )


def report_csv(reports) -> str:
    """CSV rows: one per instance x relaxation."""
    lines = ["instance,relaxation,bound,status,time_s,n_lin,n_soc,n_psd"]
    for rep in reports:
        for r in rep.rows:
            c = r.counts
            lines.append(
                f"{rep.instance},{r.name},{r.bound!r},{r.status},{r.solve_time:.6f},"
                f"{c.get('n_lin', '')},{c.get('n_soc', '')},{c.get('n_psd', '')}"
            )
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# dominance / redundancy verification

RESIDUAL_TOL = 1e-6


@dataclass
class DominanceReport:
    theorem: str
    instance: str
    residual: float  # min over checks of the signed slack; >= -RESIDUAL_TOL passes
    passed: bool
    details: list = field(default_factory=list)


def _phi_matrix(u, alpha_u, x):
    n = len(x)
    ux = u * x
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = np.diag(ux)
    M[:n, n] = ux
    M[n, :n] = ux
    M[n, n] = alpha_u
    return M


def _bordered(diag_vec, border_vec, corner, u):
    n = len(diag_vec)
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = np.diag(u * diag_vec)
    M[:n, n] = u * border_vec
    M[n, :n] = u * border_vec
    M[n, n] = corner
    return M


def verify_dominance(inst, theorem: str, u=None, alpha_u=None, config=None) -> DominanceReport:
    """Evaluate a dominated inequality at the dominating relaxation's optimum.

    theorem is one of t4, t5, t6, t8, t9, cor1, cor2.  For t4/t8 the check is
    a paired solve (bound agreement); the others assemble the dominated
    matrix from the recovered solution and report its signed eigenvalue slack.
    """
    if theorem == "t4":
        return _verify_t4(inst, config)
    if theorem == "t8":
        return _verify_t8(inst, config)

    u = np.asarray(u if u is not None else np.ones(inst.n), dtype=float)
    inst = with_nonnegativity(inst)
    alpha = _relax.resolve_alpha(inst, AlphaAug(u=u, alpha_u=alpha_u), config)
    if np.any(u <= 0):
        raise SettingViolated("u must be positive for the orthant-setting theorems")

    if theorem == "t5":
        rep = _relax.solve_relaxation(inst, "alpha-rlt", alpha=alpha, config=config)
        _require_optimal(rep, theorem)
        x, X = rep.solution.x, rep.solution.X
        M = alpha.alpha_u * np.diag(x / u) - X
        res = float(np.linalg.eigvalsh(M)[0])
        return DominanceReport(theorem, inst.name, res, res >= -RESIDUAL_TOL, [("eq35", res)])

    if theorem == "t6":
        rep = _relax.solve_relaxation(inst, "alpha-soc-rlt", alpha=alpha, config=config)
        _require_optimal(rep, theorem)
        x, X = rep.solution.x, rep.solution.X
        cls = _model.classify(inst)
        details = []
        for i in cls.convex_idx:
            qc = inst.quad[i]
            B = _relax.hsoc_factor(qc.Q)
            BX = B @ X
            M = _bordered(-x, np.diag(BX), alpha.alpha_u * (float(qc.c @ x) + qc.d), u)
            # dominated matrix is required <= 0: slack is -lambda_max
            res = -float(np.linalg.eigvalsh(M)[-1])
            details.append((f"hsoc38:{i}", res))
        worst = min(r for _, r in details) if details else 0.0
        return DominanceReport(theorem, inst.name, worst, worst >= -RESIDUAL_TOL, details)

    if theorem == "t9":
        rep = _relax.solve_relaxation(inst, "alpha-soc-rlt", alpha=alpha, config=config)
        _require_optimal(rep, theorem)
        x, X = rep.solution.x, rep.solution.X
        cls = _model.classify(inst)
        details = []
        n = inst.n
        for i in cls.convex_idx:
            qc = inst.quad[i]
            B = _relax.hsoc_factor(qc.Q)
            Phi = _phi_matrix(u, alpha.alpha_u, x)
            d = (n + 1) * (n + 1)
            T = np.zeros((d, d))
            for j in range(n):
                blk = slice(j * (n + 1), (j + 1) * (n + 1))
                T[blk, blk] = -Phi
                XBj = X @ B[j]
                V = _bordered(XBj, XBj, alpha.alpha_u * float(B[j] @ x), u)
                T[blk, n * (n + 1) :] = V
                T[n * (n + 1) :, blk] = V.T
            Xc = X @ qc.c + qc.d * x
            W = _bordered(Xc, Xc, alpha.alpha_u * (float(qc.c @ x) + qc.d), u)
            T[n * (n + 1) :, n * (n + 1) :] = W
            res = -float(np.linalg.eigvalsh(T)[-1])  # need T <= 0
            details.append((f"ksoc52:{i}", res))
        worst = min(r for _, r in details) if details else 0.0
        return DominanceReport(theorem, inst.name, worst, worst >= -RESIDUAL_TOL, details)

    if theorem in ("cor1", "cor2"):
        rep = _relax.solve_relaxation(inst, "alpha-gsrt-a", alpha=alpha, config=config)
        _require_optimal(rep, theorem)
        sol = rep.solution
        ctx_cls = _model.classify(inst)
        decomps = _relax.decompositions_for(inst, ctx_cls, _relax.spec_for("gsrt-a"))
        gsocs = _relax._dec.gsoc_catalogue(inst, ctx_cls, decomps)
        details = []
        for s, f in enumerate(gsocs):
            res = _cor_residual(f, sol, u, alpha.alpha_u, hadamard=(theorem == "cor1"))
            if res is not None:
                details.append((f"gsoc:{s}", res))
        worst = min((r for _, r in details), default=0.0)
        return DominanceReport(theorem, inst.name, worst, worst >= -RESIDUAL_TOL, details)

    raise ValueError(f"unknown theorem {theorem!r} (use t4, t5, t6, t8, t9, cor1, cor2)")


def _cor_residual(f, sol, u, alpha_u, hadamard: bool):
    """Signed min-eigenvalue of the linearized Hadamard (cor1) or
    Tracy-Singh (cor2) product of one GSOC-derived LMI with the
    artificial-bound LMI, at a recovered solution."""
    x, z, X, S = sol.x, sol.z, sol.X, sol.S
    n = len(x)
    C, xi = f.C, f.xi
    if hadamard:
        if f.p > n:
            return None  # Hadamard product undefined for taller-than-n forms
        if f.p < n:  # pad with zero rows; the SOC is unchanged
            C = np.vstack([C, np.zeros((n - f.p, n))])
            xi = np.concatenate([xi, np.zeros(n - f.p)])
    w = X @ f.zeta + (S @ f.eta if len(f.eta) else 0.0) + f.theta * x
    l_val = f.l(x, z)
    Phi_lin = _bordered(w, w, alpha_u * l_val, u)
    if hadamard:
        # entries: diag u_j lin(l x_j); border u_j lin(h_j x_j); corner alpha_u l
        g = np.einsum("ij,jk->ik", C, X).diagonal() + xi * x  # lin(h_j x_j)
        M = _bordered(w, g, alpha_u * l_val, u)
        return float(np.linalg.eigvalsh(M)[0])
    p = C.shape[0]
    d = (p + 1) * (n + 1)
    T = np.zeros((d, d))
    for j in range(p):
        blk = slice(j * (n + 1), (j + 1) * (n + 1))
        T[blk, blk] = Phi_lin
        gj = X @ C[j] + xi[j] * x  # lin(h_j x)
        Vj = _bordered(gj, gj, alpha_u * (float(C[j] @ x) + xi[j]), u)
        T[blk, p * (n + 1) :] = Vj
        T[p * (n + 1) :, blk] = Vj.T
    T[p * (n + 1) :, p * (n + 1) :] = Phi_lin
    return float(np.linalg.eigvalsh(T)[0])


def _require_optimal(rep, theorem):
    if rep.status != "Optimal":
        raise SettingViolated(f"{theorem}: dominating solve ended {rep.status}")


def _verify_t4(inst, config):
    """SOC-RLT and its recentered variant give equal bounds (eligible inst)."""
    cls = _model.classify(inst)
    eligible = [i for i in cls.convex_idx if i in cls.type_b_eligible]
    if not eligible:
        raise SettingViolated("t4 needs a type-B eligible convex constraint")
    r1 = _relax.solve_relaxation(inst, "soc-rlt", config=config)
    r2 = _relax.solve_relaxation(inst, "soc-rlt-b", config=config)
    for r in (r1, r2):
        # a near-converged run still reports its certified dual bound
        if r.status not in ("Optimal", "Inaccurate"):
            raise SettingViolated(f"t4: solve ended {r.status}")
    slack = max(r1.solution.gap, r2.solution.gap, 0.0)
    denom = max(1.0, abs(r1.bound))
    res = -(abs(r1.bound - r2.bound) - slack) / denom
    res = min(res, 0.0)
    return DominanceReport(
        "t4", inst.name, res, res >= -1e-5,
        [("soc-rlt", r1.bound), ("soc-rlt-b", r2.bound)],
    )


def _verify_t8(inst, config):
    """SST on a convex type-B pair leaves the bound unchanged."""
    cls = _model.classify(inst)
    pairs_ok = [i for i in cls.convex_idx if i in cls.type_b_eligible]
    if len(pairs_ok) < 2:
        raise SettingViolated("t8 needs two type-B eligible convex constraints")
    spec = _relax.spec_for("sdp")
    base_prog, ctx = _relax.build(inst, spec, config)
    base = _backend.solve(_lift.lower(base_prog), config)

    decomps = dict(ctx["decompositions"])
    for i in pairs_ok:
        decomps[i] = _relax._dec.decompose_constraint(inst.quad[i], _relax._dec.Kind.CONVEX_B)
    gsocs = _relax._dec.gsoc_catalogue(inst, ctx["classification"], decomps, convex_style="B")
    convex_forms = [s for s, f in enumerate(gsocs) if f.from_convex]
    pairs = [(s, t) for ai, s in enumerate(convex_forms) for t in convex_forms[ai + 1 :]]
    prog2, _ = _relax.build(inst, spec, config)
    _relax.add_sst(prog2, gsocs, pairs)
    with_sst = _backend.solve(_lift.lower(prog2), config)

    if base.status != "Optimal" or with_sst.status != "Optimal":
        raise SettingViolated(f"t8 solves ended {base.status}/{with_sst.status}")
    denom = max(1.0, abs(base.objective))
    res = -abs(base.objective - with_sst.objective) / denom
    return DominanceReport(
        "t8", inst.name, res, res >= -1e-6,
        [("sdp", base.objective), ("sdp+convex-sst", with_sst.objective)],
    )


# --------------------------------------------------------------------------
# figures sweep

@dataclass
class SweepRow:
    phi: int
    m: int
    mean_ratio: float
    max_ratio: float
    n_ok: int


def sweep_seed(base_seed: int, m: int, rep: int) -> int:
    """Deterministic per-cell seed from (base_seed, m, repetition)."""
    ss = np.random.SeedSequence((base_seed, m, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def figures_sweep(n=10, l=3, phis=(2, 5, 8), m_range=range(1, 11), repetitions=5,
                  base_seed=0, relaxation="gsrt-b", config=None, jobs=1):
    """Improvement-ratio sweep in the bounded (figures) setting.

    Each cell generates ``repetitions`` instances with Q0 = I - sum(Q_i) and
    reports mean/max of (v(GSRT) - v(RLT)) / v(RLT) over cells where both
    solves are Optimal.
    """
    rows = []
    for phi in phis:
        for m in m_range:
            ratios = []
            for rep in range(repetitions):
                spec = GenSpec(n=n, l=l, k=0, m=m, phi=phi, figures_mode=True,
                               seed=sweep_seed(base_seed, m, rep))
                inst = generate(spec)
                report = compare(inst, ["rlt", relaxation], config=config, jobs=jobs)
                if report.improvement_ratio is not None:
                    ratios.append(report.improvement_ratio)
            rows.append(
                SweepRow(
                    phi=phi, m=m,
                    mean_ratio=float(np.mean(ratios)) if ratios else float("nan"),
                    max_ratio=float(np.max(ratios)) if ratios else float("nan"),
                    n_ok=len(ratios),
                )
            )
    return rows


def sweep_csv(rows) -> str:
    lines = ["phi,m,mean_ratio,max_ratio,n_ok"]
    for r in rows:
        lines.append(f"{r.phi},{r.m},{r.mean_ratio!r},{r.max_ratio!r},{r.n_ok}")
    return "\n".join(lines) + "\n"
