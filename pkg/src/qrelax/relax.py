"""Relaxation builders: one function per valid-inequality family.

Families and the products they linearize:

* ``build_sdp`` -- the basic lifted relaxation (objective, lifted quadratic
  rows, linear rows, moment LMI).
* ``add_rlt`` -- products of pairs of linear rows.
* ``add_soc_rlt`` / ``add_soc_rlt_b`` -- products of a linear row with the
  SOC form of a convex quadratic constraint (plain or recentered variant).
* ``add_gsrt_a`` / ``add_gsrt_b`` -- the split-based SOC pairs derived from
  nonconvex constraints, their products with linear rows, and the trace
  equality tying Z to X.
* ``add_sst`` -- Frobenius-norm products of pairs of unified SOC forms.
* ``add_ksoc_sub`` / ``add_ksoc_full`` -- PSD blocks linearizing the
  Tracy-Singh product of the two SOC-derived LMIs (medium submatrix or the
  full block).
* ``add_eq35`` / ``add_hsoc`` -- the artificial-bound LMI X <= alpha_u
  diag(u)^-1 diag(x) and the Hadamard-product LMI (both only valid in the
  nonnegative-orthant setting; kept for redundancy verification).

All builders are pure given (instance, decompositions, spec) and emit named
constraints ``family:i:j`` into a :class:`~qrelax.lift.ConicProgram`.
"""

import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import backend as _backend
from . import decompose as _dec
from . import lift as _lift
from . import model as _model
from .errors import (
    AlphaInvalid,
    EmptyInterior,
    RangeConditionViolated,
    SettingViolated,
    SizeCapExceeded,
)


@dataclass(frozen=True)
class AlphaAug:
    """Artificial linear bound u^T x <= alpha_u."""

    u: np.ndarray
    alpha_u: float | None = None  # None -> compute by maximizing u^T x over the SDP
    source: str = "user"  # "user" | "computed"

    def resolved(self) -> bool:
        return self.alpha_u is not None


@dataclass(frozen=True)
class RelaxationSpec:
    rlt: bool = False
    soc_rlt: bool = False
    soc_rlt_b: bool = False
    gsrt_a: bool = False
    gsrt_b: bool = False
    sst: bool = False
    sst_include_convex_pairs: bool = False
    ksoc_sub: bool = False
    ksoc_full: bool = False
    eq35: bool = False
    hsoc38: bool = False
    alpha_row: bool = False
    epigraph: bool = False
    alpha: AlphaAug | None = None
    ksoc_size_cap: int = 200

    def __post_init__(self):
        if self.gsrt_a and self.gsrt_b:
            raise ValueError("gsrt_a and gsrt_b are mutually exclusive")
        needs_alpha = self.alpha_row or self.eq35 or self.hsoc38
        if needs_alpha and self.alpha is None:
            raise AlphaInvalid("this relaxation needs alpha data (u, alpha_u)")


# Ladder names match the numerical-results tables; "alpha-*" variants append
# the redundant row u^T x <= alpha_u before generating all product families.
RELAXATIONS: dict[str, RelaxationSpec] = {
    "sdp": RelaxationSpec(),
    "rlt": RelaxationSpec(rlt=True),
    "soc-rlt": RelaxationSpec(rlt=True, soc_rlt=True),
    "soc-rlt-b": RelaxationSpec(rlt=True, soc_rlt_b=True),
    "gsrt-a": RelaxationSpec(rlt=True, soc_rlt=True, gsrt_a=True),
    "gsrt-b": RelaxationSpec(rlt=True, soc_rlt=True, gsrt_b=True),
    "sst": RelaxationSpec(rlt=True, soc_rlt=True, gsrt_a=True, sst=True),
    "ksoc-sub": RelaxationSpec(rlt=True, soc_rlt=True, gsrt_a=True, sst=True, ksoc_sub=True),
    "ksoc-full": RelaxationSpec(rlt=True, soc_rlt=True, gsrt_a=True, ksoc_full=True),
}
_ALPHA_FAMILIES = {
    "alpha-rlt": "rlt",
    "alpha-soc-rlt": "soc-rlt",
    "alpha-gsrt-a": "gsrt-a",
    "alpha-gsrt-b": "gsrt-b",
}


def spec_for(name: str, alpha: AlphaAug | None = None) -> RelaxationSpec:
    """Resolve a ladder name (plus optional alpha data) to a RelaxationSpec."""
    if name == "alpha-u":
        return RelaxationSpec(rlt=True, soc_rlt=True, eq35=True, alpha=alpha)
    if name in ("rtc", "hsoc"):
        return RelaxationSpec(rlt=True, soc_rlt=True, hsoc38=True, alpha=alpha)
    if name in _ALPHA_FAMILIES:
        base = RELAXATIONS[_ALPHA_FAMILIES[name]]
        return replace(base, alpha_row=True, alpha=alpha)
    if name in RELAXATIONS:
        return replace(RELAXATIONS[name], alpha=alpha) if alpha is not None else RELAXATIONS[name]
    valid = sorted(RELAXATIONS) + sorted(_ALPHA_FAMILIES) + ["alpha-u", "rtc", "hsoc"]
    raise KeyError(f"unknown relaxation {name!r}; valid names: {', '.join(valid)}")


def relaxation_names() -> list[str]:
    return sorted(RELAXATIONS) + sorted(_ALPHA_FAMILIES) + ["alpha-u", "rtc"]


# --------------------------------------------------------------------------
# base relaxation


def build_sdp(inst: _model.QcqpInstance, nz: int = 0) -> _lift.ConicProgram:
    """Basic lifted relaxation; nz > 0 reserves auxiliary norm variables."""
    _warn_on_bad_scaling(inst)
    space = _lift.new_space(inst.n, nz)
    obj = space.X_row(inst.Q0) + space.x_row(inst.c0)
    prog = _lift.ConicProgram(space=space, obj_row=obj)
    for i, qc in enumerate(inst.quad):
        prog.add_lin(space.X_row(qc.Q) + space.x_row(qc.c), -qc.d, "<=", f"qc:{i}")
    for j, lc in enumerate(inst.lin):
        prog.add_lin(space.x_row(lc.a), lc.b, "<=", f"lin:{j}")
    prog.add_psd(_lift.moment_lmi(space))
    return prog


def _warn_on_bad_scaling(inst):
    norms = [np.linalg.norm(qc.Q, "fro") for qc in inst.quad]
    norms.append(np.linalg.norm(inst.Q0, "fro"))
    norms = [x for x in norms if x > 0]
    if norms and max(norms) / min(norms) > 1e6:
        warnings.warn("quadratic data badly scaled (||Q||_F ratio above 1e6)", stacklevel=3)


# --------------------------------------------------------------------------
# RLT and SOC-RLT


def add_rlt(prog: _lift.ConicProgram, inst: _model.QcqpInstance) -> None:
    """Linearized products of all pairs of distinct linear rows."""
    space = prog.space
    for i in range(inst.m):
        ai, bi = inst.lin[i].a, inst.lin[i].b
        for j in range(i + 1, inst.m):
            aj, bj = inst.lin[j].a, inst.lin[j].b
            row = space.X_row(np.outer(ai, aj)) - space.x_row(bj * ai + bi * aj)
            prog.add_lin(row, -bi * bj, ">=", f"rlt:{i}:{j}")


def _soc_rlt_block(space, B, c, d, a, b):
    """SOC data for the product of one convex SOC with one linear row."""
    p = B.shape[0]
    tails_F = np.zeros((p + 1, space.size))
    tails_g = np.zeros(p + 1)
    BXa = space.rows_AXa(B, a)
    for r in range(p):
        tails_F[r] = b * space.x_row(B[r]) - BXa[r]
    tails_F[p] = 0.5 * (-space.X_row(np.outer(c, a)) + space.x_row(b * c - d * a - a))
    tails_g[p] = 0.5 * (1.0 + d) * b
    head = 0.5 * (space.X_row(np.outer(c, a)) + space.x_row(d * a - a - b * c))
    head_c = 0.5 * (1.0 - d) * b
    return head, head_c, tails_F, tails_g


def add_soc_rlt(prog, inst, decomps, cls) -> None:
    """Products of each convex constraint's SOC form with every linear row."""
    space = prog.space
    for i in cls.convex_idx:
        qc = inst.quad[i]
        B = decomps[i].B
        for j, lc in enumerate(inst.lin):
            head, head_c, F, g = _soc_rlt_block(space, B, qc.c, qc.d, lc.a, lc.b)
            prog.add_soc(head, head_c, F, g, f"soc-rlt:{i}:{j}")


def add_soc_rlt_b(prog, inst, decomps, cls) -> None:
    """Recentered variant of the SOC-RLT products (type-B convex constraints).

    Constraints failing the range condition fall back to the plain form with
    a note.  A convex constraint with delta^2 < 0 has no feasible point with
    interior; that is reported as EmptyInterior.
    """
    space = prog.space
    for i in cls.convex_idx:
        qc = inst.quad[i]
        dec = decomps[i]
        if dec.kind is not _dec.Kind.CONVEX_B:
            prog.notes.append(f"soc-rlt-b:{i}: range condition fails, plain soc-rlt used")
            B = dec.B
            for j, lc in enumerate(inst.lin):
                head, head_c, F, g = _soc_rlt_block(space, B, qc.c, qc.d, lc.a, lc.b)
                prog.add_soc(head, head_c, F, g, f"soc-rlt:{i}:{j}")
            continue
        if dec.gamma < 0:
            raise EmptyInterior(f"convex constraint {i} has delta^2 = {dec.gamma:g} < 0")
        B, x0, delta = dec.B, dec.x0, float(np.sqrt(max(dec.gamma, 0.0)))
        Bx0 = B @ x0
        p = B.shape[0]
        for j, lc in enumerate(inst.lin):
            a, b = lc.a, lc.b
            BXa = space.rows_AXa(B, a)
            F = np.zeros((p, space.size))
            g = np.zeros(p)
            for r in range(p):
                F[r] = b * space.x_row(B[r]) - BXa[r] - Bx0[r] * space.x_row(a)
                g[r] = Bx0[r] * b
            head = -delta * space.x_row(a)
            prog.add_soc(head, delta * b, F, g, f"soc-rlt-b:{i}:{j}")


# --------------------------------------------------------------------------
# GSRT


def add_gsrt_a(prog, inst, decomps, cls) -> None:
    """Type-A constraints for every nonconvex i with auxiliary slot t."""
    space = prog.space
    for i in cls.nonconvex_idx:
        if decomps[i].kind is not _dec.Kind.NONCONVEX_A:
            continue  # handled by the B builder
        qc = inst.quad[i]
        t = cls.aux_index(i)
        L, M = decomps[i].split.L, decomps[i].split.M
        c, d = qc.c, qc.d
        z_t = space.z_row(_unit(space.nz, t))

        for tag, W, off in (("+", L, d + 1.0), ("-", M, d - 1.0)):
            p = W.shape[0]
            F = np.zeros((p + 1, space.size))
            g = np.zeros(p + 1)
            for r in range(p):
                F[r] = space.x_row(W[r])
            F[p] = 0.5 * space.x_row(c)
            g[p] = 0.5 * off
            prog.add_soc(z_t, 0.0, F, g, f"gsrt-a:soc{tag}:{i}")

        MtM = M.T @ M
        row = space.z_row(np.zeros(space.nz))
        row[space.ix_Z(t, t)] = 1.0
        row -= space.X_row(MtM + 0.25 * np.outer(c, c)) + space.x_row(0.5 * (d - 1.0) * c)
        prog.add_lin(row, 0.25 * (d - 1.0) ** 2, "==", f"gsrt-a:trace:{i}")

        for j, lc in enumerate(inst.lin):
            a, b = lc.a, lc.b
            rhs_row = b * z_t - space.S_row(np.outer(a, _unit(space.nz, t)))
            for tag, W, off in (("+", L, d + 1.0), ("-", M, d - 1.0)):
                p = W.shape[0]
                WXa = space.rows_AXa(W, a)
                F = np.zeros((p + 1, space.size))
                g = np.zeros(p + 1)
                for r in range(p):
                    F[r] = b * space.x_row(W[r]) - WXa[r]
                F[p] = 0.5 * (space.X_row(np.outer(c, -a)) + space.x_row(b * c - off * a))
                g[p] = 0.5 * off * b
                prog.add_soc(rhs_row, 0.0, F, g, f"gsrt-a:prod{tag}:{i}:{j}")


def add_gsrt_b(prog, inst, decomps, cls) -> None:
    """Type-B constraints (recentered split); per-constraint fallback to A."""
    space = prog.space
    for i in cls.nonconvex_idx:
        dec = decomps[i]
        if dec.kind is _dec.Kind.NONCONVEX_A:
            prog.notes.append(f"gsrt-b:{i}: range condition fails, gsrt-a used")
            continue  # A-blocks emitted by add_gsrt_a on the same decomps
        t = cls.aux_index(i)
        L, M = dec.split.L, dec.split.M
        x0, delta = dec.x0, dec.delta
        b1 = dec.kind is _dec.Kind.NONCONVEX_B1
        tag = "b1" if b1 else "b2"
        z_t = space.z_row(_unit(space.nz, t))

        # plus side carries the extra constant row under B2, minus side under B1
        def soc_rows(W, Wx0, extra_const):
            p = W.shape[0]
            rows = np.zeros((p + (1 if extra_const else 0), space.size))
            consts = np.zeros(rows.shape[0])
            for r in range(p):
                rows[r] = space.x_row(W[r])
                consts[r] = Wx0[r]
            if extra_const:
                consts[p] = delta
            return rows, consts

        F, g = soc_rows(L, L @ x0, extra_const=not b1)
        prog.add_soc(z_t, 0.0, F, g, f"gsrt-{tag}:soc+:{i}")
        F, g = soc_rows(M, M @ x0, extra_const=b1)
        prog.add_soc(z_t, 0.0, F, g, f"gsrt-{tag}:soc-:{i}")

        MtM = M.T @ M
        row = np.zeros(space.size)
        row[space.ix_Z(t, t)] = 1.0
        row -= space.X_row(MtM) + space.x_row(2.0 * MtM @ x0)
        rhs = float(np.linalg.norm(M @ x0) ** 2) + (delta**2 if b1 else 0.0)
        prog.add_lin(row, rhs, "==", f"gsrt-{tag}:trace:{i}")

        for j, lc in enumerate(inst.lin):
            a, b = lc.a, lc.b
            rhs_row = b * z_t - space.S_row(np.outer(a, _unit(space.nz, t)))

            def prod_rows(W, Wx0, extra_const):
                p = W.shape[0]
                WXa = space.rows_AXa(W, a)
                rows = np.zeros((p + (1 if extra_const else 0), space.size))
                consts = np.zeros(rows.shape[0])
                for r in range(p):
                    rows[r] = b * space.x_row(W[r]) - WXa[r] - Wx0[r] * space.x_row(a)
                    consts[r] = Wx0[r] * b
                if extra_const:
                    rows[p] = -delta * space.x_row(a)
                    consts[p] = delta * b
                return rows, consts

            F, g = prod_rows(L, L @ x0, extra_const=not b1)
            prog.add_soc(rhs_row, 0.0, F, g, f"gsrt-{tag}:prod+:{i}:{j}")
            F, g = prod_rows(M, M @ x0, extra_const=b1)
            prog.add_soc(rhs_row, 0.0, F, g, f"gsrt-{tag}:prod-:{i}:{j}")


def _unit(nz, t):
    e = np.zeros(nz)
    if nz:
        e[t] = 1.0
    return e


# --------------------------------------------------------------------------
# SST and KSOC


def _beta_affine(space, fs: _dec.GsocForm, ft: _dec.GsocForm):
    """Linearization of l_s * l_t as (row, const)."""
    row = space.X_row(np.outer(fs.zeta, ft.zeta))
    row += space.S_row(np.outer(fs.zeta, ft.eta)) + space.S_row(np.outer(ft.zeta, fs.eta))
    row += space.Z_row(np.outer(fs.eta, ft.eta))
    row += space.x_row(fs.theta * ft.zeta + ft.theta * fs.zeta)
    row += space.z_row(fs.theta * ft.eta + ft.theta * fs.eta)
    return row, fs.theta * ft.theta


def _outer_affine(space, fs: _dec.GsocForm, ft: _dec.GsocForm):
    """Linearization of h^s (h^t)^T, row-major stacked, as (rows, consts)."""
    ps, pt = fs.p, ft.p
    rows = np.zeros((ps * pt, space.size))
    consts = np.zeros(ps * pt)
    for a in range(ps):
        for b in range(pt):
            k = a * pt + b
            rows[k] = space.X_row(np.outer(fs.C[a], ft.C[b]))
            rows[k] += space.x_row(ft.xi[b] * fs.C[a] + fs.xi[a] * ft.C[b])
            consts[k] = fs.xi[a] * ft.xi[b]
    return rows, consts


def _lin_l_times_h(space, f_l: _dec.GsocForm, f_h: _dec.GsocForm):
    """Linearization of l_{f_l} * h^{f_h} (vector of dimension f_h.p)."""
    q = f_h.p
    rows = np.zeros((q, space.size))
    consts = np.zeros(q)
    for b in range(q):
        rows[b] = space.X_row(np.outer(f_h.C[b], f_l.zeta))
        rows[b] += space.S_row(np.outer(f_h.C[b], f_l.eta))
        rows[b] += space.x_row(f_l.theta * f_h.C[b] + f_h.xi[b] * f_l.zeta)
        rows[b] += space.z_row(f_h.xi[b] * f_l.eta)
        consts[b] = f_h.xi[b] * f_l.theta
    return rows, consts


def sst_pairs(gsocs, include_convex_pairs=False):
    """Index pairs s < t, skipping convex-convex pairs unless asked."""
    out = []
    for s in range(len(gsocs)):
        for t in range(s + 1, len(gsocs)):
            if gsocs[s].from_convex and gsocs[t].from_convex and not include_convex_pairs:
                continue
            out.append((s, t))
    return out


def add_sst(prog, gsocs, pairs) -> None:
    """Frobenius-norm product constraints for the given GSOC pairs."""
    space = prog.space
    for s, t in pairs:
        fs, ft = gsocs[s], gsocs[t]
        rows, consts = _outer_affine(space, fs, ft)
        beta_row, beta_c = _beta_affine(space, fs, ft)
        prog.add_frob(rows, consts, beta_row, beta_c, (fs.p, ft.p), f"sst:{s}:{t}")


def add_ksoc_sub(prog, gsocs, pairs) -> None:
    """Medium (p+q+1) PSD submatrix of the Tracy-Singh product per pair."""
    space = prog.space
    for s, t in pairs:
        fs, ft = gsocs[s], gsocs[t]
        p, q = fs.p, ft.p
        beta_row, beta_c = _beta_affine(space, fs, ft)
        Lst_rows, Lst_c = _outer_affine(space, fs, ft)
        Mst_rows, Mst_c = _lin_l_times_h(space, fs, ft)  # lin(l_s h^t), dim q
        Mts_rows, Mts_c = _lin_l_times_h(space, ft, fs)  # lin(l_t h^s), dim p
        d = p + q + 1
        asm = _lift.PsdAssembler(space, d)
        for a in range(p):
            asm.set_entry(a, a, beta_row, beta_c)
            for b in range(q):
                asm.set_entry(a, p + b, Lst_rows[a * q + b], Lst_c[a * q + b])
            asm.set_entry(a, p + q, Mts_rows[a], Mts_c[a])
        for b in range(q):
            asm.set_entry(p + b, p + b, beta_row, beta_c)
            asm.set_entry(p + b, p + q, Mst_rows[b], Mst_c[b])
        asm.set_entry(p + q, p + q, beta_row, beta_c)
        prog.add_psd(asm.block(f"ksoc-sub:{s}:{t}"))


def add_ksoc_full(prog, gsocs, pairs, size_cap: int = 200) -> None:
    """Full (pq+p+q+1) PSD linearization of the Tracy-Singh product."""
    space = prog.space
    for s, t in pairs:
        fs, ft = gsocs[s], gsocs[t]
        p, q = fs.p, ft.p
        d = p * q + p + q + 1
        if d > size_cap:
            raise SizeCapExceeded(f"ksoc-full block for pair ({s},{t}) has size {d} > cap {size_cap}")
        beta_row, beta_c = _beta_affine(space, fs, ft)
        Lst_rows, Lst_c = _outer_affine(space, fs, ft)
        Mst_rows, Mst_c = _lin_l_times_h(space, fs, ft)
        Mts_rows, Mts_c = _lin_l_times_h(space, ft, fs)
        asm = _lift.PsdAssembler(space, d)
        off_p, off_q, last = p * q, p * q + p, p * q + p + q
        for i in range(p):
            for b in range(q):
                r = i * q + b
                asm.set_entry(r, r, beta_row, beta_c)
                # K^i column block: lin(l_s h^t) in column i of the p-block
                asm.set_entry(r, off_p + i, Mst_rows[b], Mst_c[b])
                # J^i: lin(l_t h^s)_i on the q-block diagonal
                asm.set_entry(r, off_q + b, Mts_rows[i], Mts_c[i])
                # H^i: lin(h^s_i h^t)
                asm.set_entry(r, last, Lst_rows[i * q + b], Lst_c[i * q + b])
        for a in range(p):
            asm.set_entry(off_p + a, off_p + a, beta_row, beta_c)
            for b in range(q):
                asm.set_entry(off_p + a, off_q + b, Lst_rows[a * q + b], Lst_c[a * q + b])
            asm.set_entry(off_p + a, last, Mts_rows[a], Mts_c[a])
        for b in range(q):
            asm.set_entry(off_q + b, off_q + b, beta_row, beta_c)
            asm.set_entry(off_q + b, last, Mst_rows[b], Mst_c[b])
        asm.set_entry(last, last, beta_row, beta_c)
        prog.add_psd(asm.block(f"ksoc-full:{s}:{t}"))


# --------------------------------------------------------------------------
# artificial-bound LMIs (nonnegative-orthant setting)


def has_nonnegativity_rows(inst: _model.QcqpInstance) -> bool:
    """True when the linear rows imply x >= 0 componentwise."""
    covered = set()
    for lc in inst.lin:
        nz = np.nonzero(lc.a)[0]
        if len(nz) == 1 and lc.a[nz[0]] < 0 and lc.b <= 0:
            covered.add(int(nz[0]))
    return len(covered) == inst.n


def _require_orthant_setting(inst, alpha):
    if not has_nonnegativity_rows(inst):
        raise SettingViolated("this family needs x >= 0 rows in the linear constraints")
    if alpha is None or not alpha.resolved():
        raise AlphaInvalid("alpha data (u, alpha_u) required")
    if np.any(alpha.u <= 0):
        raise SettingViolated("u must be positive componentwise")
    if alpha.alpha_u <= 0:
        raise AlphaInvalid(f"alpha_u must be positive, got {alpha.alpha_u}")


def add_eq35(prog, inst, alpha: AlphaAug) -> None:
    """LMI alpha_u diag(u)^-1 diag(x) - X >= 0."""
    _require_orthant_setting(inst, alpha)
    space = prog.space
    n = inst.n
    asm = _lift.PsdAssembler(space, n)
    for i in range(n):
        row = np.zeros(space.size)
        row[space.ix_x(i)] = alpha.alpha_u / alpha.u[i]
        row[space.ix_X(i, i)] = -1.0
        asm.set_entry(i, i, row)
        for j in range(i + 1, n):
            row = np.zeros(space.size)
            row[space.ix_X(i, j)] = -1.0
            asm.set_entry(i, j, row)
    prog.add_psd(asm.block("eq35"))


def hsoc_factor(Q) -> np.ndarray:
    """Factor B with Q = B^T B used inside the Hadamard-product LMI.

    Unlike the SOC constraints, the Hadamard LMI depends elementwise on the
    choice of B; the eigenvector factor sqrt(D) V^T with eigenvalues
    ascending reproduces the reference bounds.
    """
    w, V = np.linalg.eigh(np.asarray(Q, dtype=float))
    return np.diag(np.sqrt(np.clip(w, 0.0, None))) @ V.T


def add_hsoc(prog, inst, decomps, cls, alpha: AlphaAug) -> None:
    """Hadamard-product LMI per convex constraint (verification family)."""
    _require_orthant_setting(inst, alpha)
    space = prog.space
    n = inst.n
    for i in cls.convex_idx:
        qc = inst.quad[i]
        B = hsoc_factor(qc.Q)
        asm = _lift.PsdAssembler(space, n + 1)
        for j in range(n):
            row = np.zeros(space.size)
            row[space.ix_x(j)] = alpha.u[j]
            asm.set_entry(j, j, row)
            # off-diagonal top-left entries are exactly zero
            Cj = np.zeros((n, n))
            Cj[:, j] = B[j]
            asm.set_entry(j, n, -alpha.u[j] * space.X_row(Cj))
        asm.set_entry(n, n, -alpha.alpha_u * space.x_row(qc.c), -alpha.alpha_u * qc.d)
        prog.add_psd(asm.block(f"hsoc38:{i}"))


# --------------------------------------------------------------------------
# alpha resolution and orchestration


def compute_alpha(inst: _model.QcqpInstance, u, config=None) -> float:
    """alpha_u = max u^T x over the basic SDP relaxation (a valid over-estimate)."""
    u = np.asarray(u, dtype=float)
    prog = build_sdp(inst)
    prog.obj_row = -prog.space.x_row(u)
    raw = _backend.solve(_lift.lower(prog), config)
    if raw.status != "Optimal":
        raise AlphaInvalid(f"alpha_u solve ended with status {raw.status}")
    return -raw.objective


def resolve_alpha(inst, alpha: AlphaAug | None, config=None) -> AlphaAug | None:
    if alpha is None or alpha.resolved():
        return alpha
    value = compute_alpha(inst, alpha.u, config)
    if has_nonnegativity_rows(inst) and np.all(alpha.u > 0) and value <= 0:
        raise AlphaInvalid(f"computed alpha_u = {value:g} <= 0 in the nonnegative setting")
    return AlphaAug(u=alpha.u, alpha_u=value, source="computed")


def add_alpha_rows(inst: _model.QcqpInstance, alpha: AlphaAug) -> _model.QcqpInstance:
    """Instance with the redundant row u^T x <= alpha_u appended (as row m+1),
    so that every subsequently generated product family includes it."""
    if not alpha.resolved():
        raise AlphaInvalid("alpha_u not resolved; call resolve_alpha first")
    return inst.with_linear_row(alpha.u, alpha.alpha_u)


def decompositions_for(inst, cls, spec: RelaxationSpec):
    """Per-constraint decompositions consistent with the requested families."""
    decomps = {}
    for i, qc in enumerate(inst.quad):
        if i in cls.convex_idx:
            want_b = spec.soc_rlt_b and i in cls.type_b_eligible
            kind = _dec.Kind.CONVEX_B if want_b else _dec.Kind.CONVEX_A
            decomps[i] = _dec.decompose_constraint(qc, kind)
        else:
            if spec.gsrt_b and i in cls.type_b_eligible:
                decomps[i] = _dec.decompose_constraint(qc, _dec.Kind.NONCONVEX_B1)
            else:
                decomps[i] = _dec.decompose_constraint(qc, _dec.Kind.NONCONVEX_A)
    return decomps


def build(inst: _model.QcqpInstance, spec: RelaxationSpec, config=None):
    """Compose the conic program for a relaxation spec.

    Returns ``(program, context)`` where the context records the effective
    instance, classification, decompositions, GSOC catalogue and resolved
    alpha, for reuse by verification code.
    """
    alpha = resolve_alpha(inst, spec.alpha, config)
    if spec.epigraph:
        inst = _model.epigraph_reformulate(inst)
    inst_eff = add_alpha_rows(inst, alpha) if spec.alpha_row else inst

    cls = _model.classify(inst_eff)
    decomps = decompositions_for(inst_eff, cls, spec)
    use_gsrt = (spec.gsrt_a or spec.gsrt_b) and cls.nonconvex_idx
    nz = len(cls.nonconvex_idx) if use_gsrt else 0

    prog = build_sdp(inst_eff, nz=nz)
    if spec.rlt:
        add_rlt(prog, inst_eff)
    if spec.soc_rlt and cls.convex_idx:
        add_soc_rlt(prog, inst_eff, decomps, cls)
    if spec.soc_rlt_b and cls.convex_idx:
        add_soc_rlt_b(prog, inst_eff, decomps, cls)
    if use_gsrt:
        add_gsrt_a(prog, inst_eff, decomps, cls)
        if spec.gsrt_b:
            add_gsrt_b(prog, inst_eff, decomps, cls)

    gsocs = None
    if spec.sst or spec.ksoc_sub or spec.ksoc_full:
        if not use_gsrt and cls.nonconvex_idx:
            raise SettingViolated("sst/ksoc need the gsrt lifting for nonconvex constraints")
        gsocs = _dec.gsoc_catalogue(inst_eff, cls, decomps)
        pairs = sst_pairs(gsocs, spec.sst_include_convex_pairs)
        if spec.sst:
            add_sst(prog, gsocs, pairs)
        if spec.ksoc_sub:
            add_ksoc_sub(prog, gsocs, pairs)
        if spec.ksoc_full:
            add_ksoc_full(prog, gsocs, pairs, spec.ksoc_size_cap)

    if spec.eq35:
        add_eq35(prog, inst_eff, alpha)
    if spec.hsoc38:
        add_hsoc(prog, inst_eff, decomps, cls, alpha)

    context = {
        "instance": inst_eff,
        "classification": cls,
        "decompositions": decomps,
        "gsocs": gsocs,
        "alpha": alpha,
        "nz": nz,
    }
    return prog, context


@dataclass
class SolveReport:
    name: str
    bound: float
    status: str
    solution: _backend.LiftedSolution
    counts: dict
    build_time: float
    solve_time: float
    notes: list = field(default_factory=list)
    alpha: AlphaAug | None = None

    @property
    def ok(self) -> bool:
        return self.status == "Optimal"


def solve_relaxation(inst, name_or_spec, alpha=None, config=None) -> SolveReport:
    """Build, lower and solve one relaxation; report the certified bound."""
    if isinstance(name_or_spec, str):
        name = name_or_spec
        spec = spec_for(name, alpha)
    else:
        name = "custom"
        spec = name_or_spec if alpha is None else replace(name_or_spec, alpha=alpha)
    t0 = time.perf_counter()
    prog, ctx = build(inst, spec, config)
    std = _lift.lower(prog)
    build_time = time.perf_counter() - t0
    raw = _backend.solve(std, config)
    sol = _backend.recover(prog.space, raw)
    return SolveReport(
        name=name,
        bound=sol.objective,
        status=sol.status,
        solution=sol,
        counts=prog.counts(),
        build_time=build_time,
        solve_time=raw.solve_time,
        notes=list(prog.notes),
        alpha=ctx["alpha"],
    )


def lift_feasible_point(inst, cls, decomps, x) -> tuple[np.ndarray, np.ndarray]:
    """Rank-1 lifting (z, v is returned as (z, packed values are built by caller)).

    For each nonconvex constraint the auxiliary value is the right-hand norm
    of its decomposition's equality side, so the trace equality holds exactly
    at the lifted point.
    """
    x = np.asarray(x, dtype=float)
    nz = len(cls.nonconvex_idx)
    z = np.zeros(nz)
    for i in cls.nonconvex_idx:
        t = cls.aux_index(i)
        dec = decomps[i]
        qc = inst.quad[i]
        if dec.kind is _dec.Kind.NONCONVEX_A:
            M = dec.split.M
            z[t] = float(np.sqrt(np.linalg.norm(M @ x) ** 2 + 0.25 * (qc.c @ x + qc.d - 1.0) ** 2))
        elif dec.kind is _dec.Kind.NONCONVEX_B1:
            M = dec.split.M
            z[t] = float(np.sqrt(np.linalg.norm(M @ (x + dec.x0)) ** 2 + dec.delta**2))
        else:
            M = dec.split.M
            z[t] = float(np.linalg.norm(M @ (x + dec.x0)))
    return z, x


def rank1_vector(space: _lift.LiftedSpace, x, z) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    return space.pack(x, z, np.outer(x, x), np.outer(x, z), np.outer(z, z))
