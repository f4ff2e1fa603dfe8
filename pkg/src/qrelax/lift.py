"""Lifted variable space (x, z, X, S, Z) and a solver-agnostic conic program.

Scalar variable layout (documented, fixed): first x (n entries), then z
(nz entries), then the distinct entries of symmetric X in upper-triangle
column-major order (n(n+1)/2), then S column-major by auxiliary index
(n * nz), then the distinct entries of symmetric Z (nz(nz+1)/2).  Distinct
symmetric entries are stored unscaled; the sqrt(2) off-diagonal scaling is
applied only when lowering PSD blocks to the solver's scaled-svec form.

Affine constraint blocks are stored as dense (F, g) pairs over the variable
vector v, meaning the block value is F @ v + g.
"""

import io
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

EXPORT_HEADER = "QRELAX-CONIC 1"


def tri_index(i: int, j: int) -> int:
    """Position of entry (i, j), i <= j, in upper-triangle column-major order."""
    if i > j:
        i, j = j, i
    return j * (j + 1) // 2 + i


def tri_count(d: int) -> int:
    return d * (d + 1) // 2


def svec_scale(d: int) -> np.ndarray:
    """Per-entry scaling turning distinct entries into the scaled svec."""
    w = np.empty(tri_count(d))
    for j in range(d):
        for i in range(j + 1):
            w[tri_index(i, j)] = 1.0 if i == j else np.sqrt(2.0)
    return w


def smat(vals: np.ndarray, d: int) -> np.ndarray:
    """Symmetric matrix from its distinct (unscaled) upper-triangle entries."""
    M = np.empty((d, d))
    for j in range(d):
        for i in range(j + 1):
            M[i, j] = M[j, i] = vals[tri_index(i, j)]
    return M


class LiftedSpace:
    """Index bookkeeping for the lifted variables."""

    def __init__(self, n: int, nz: int = 0):
        if n < 1 or nz < 0:
            raise ValueError(f"need n >= 1 and nz >= 0, got n={n}, nz={nz}")
        self.n = n
        self.nz = nz
        self.off_x = 0
        self.off_z = n
        self.off_X = n + nz
        self.off_S = self.off_X + tri_count(n)
        self.off_Z = self.off_S + n * nz
        self.size = self.off_Z + tri_count(nz)

    def ix_x(self, i: int) -> int:
        return self.off_x + i

    def ix_z(self, t: int) -> int:
        return self.off_z + t

    def ix_X(self, i: int, j: int) -> int:
        return self.off_X + tri_index(i, j)

    def ix_S(self, i: int, t: int) -> int:
        return self.off_S + t * self.n + i

    def ix_Z(self, s: int, t: int) -> int:
        return self.off_Z + tri_index(s, t)

    # --- affine row builders: length-`size` coefficient vectors ------------

    def x_row(self, c) -> np.ndarray:
        row = np.zeros(self.size)
        row[self.off_x : self.off_x + self.n] = c
        return row

    def z_row(self, w) -> np.ndarray:
        row = np.zeros(self.size)
        if self.nz:
            row[self.off_z : self.off_z + self.nz] = w
        return row

    def X_row(self, C) -> np.ndarray:
        """Row for sum_{uv} C[u,v] X[u,v] with X symmetric (C need not be)."""
        C = np.asarray(C, dtype=float)
        row = np.zeros(self.size)
        Cs = C + C.T
        for j in range(self.n):
            for i in range(j):
                row[self.ix_X(i, j)] = Cs[i, j]
            row[self.ix_X(j, j)] = C[j, j]
        return row

    def S_row(self, C) -> np.ndarray:
        """Row for sum_{it} C[i,t] S[i,t]."""
        C = np.asarray(C, dtype=float)
        row = np.zeros(self.size)
        if self.nz:
            row[self.off_S : self.off_S + self.n * self.nz] = C.reshape(-1, order="F")
        return row

    def Z_row(self, C) -> np.ndarray:
        C = np.asarray(C, dtype=float)
        row = np.zeros(self.size)
        Cs = C + C.T
        for t in range(self.nz):
            for s in range(t):
                row[self.ix_Z(s, t)] = Cs[s, t]
            row[self.ix_Z(t, t)] = C[t, t]
        return row

    def rows_AXa(self, A, a) -> np.ndarray:
        """Rows for the vector A @ X @ a (X symmetric), one per row of A."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return np.stack([self.X_row(np.outer(A[r], a)) for r in range(A.shape[0])]) \
            if A.shape[0] else np.zeros((0, self.size))

    def pack(self, x, z, X, S, Z) -> np.ndarray:
        """Assemble a full variable vector from lifted values."""
        X = np.asarray(X, dtype=float)
        Z = np.asarray(Z, dtype=float)
        v = np.zeros(self.size)
        v[: self.n] = x
        if self.nz:
            v[self.off_z : self.off_z + self.nz] = z
        for j in range(self.n):
            for i in range(j + 1):
                v[self.ix_X(i, j)] = X[i, j]
        if self.nz:
            v[self.off_S : self.off_S + self.n * self.nz] = np.asarray(S).reshape(-1, order="F")
            for t in range(self.nz):
                for s in range(t + 1):
                    v[self.ix_Z(s, t)] = Z[s, t]
        return v

    def unpack(self, v):
        """Inverse of :meth:`pack`: (x, z, X, S, Z) from a variable vector."""
        n, nz = self.n, self.nz
        x = np.array(v[:n])
        z = np.array(v[self.off_z : self.off_z + nz])
        X = smat(v[self.off_X : self.off_X + tri_count(n)], n)
        S = np.array(v[self.off_S : self.off_S + n * nz]).reshape((n, nz), order="F")
        Z = smat(v[self.off_Z : self.off_Z + tri_count(nz)], nz) if nz else np.zeros((0, 0))
        return x, z, X, S, Z


def new_space(n: int, nz: int = 0) -> LiftedSpace:
    return LiftedSpace(n, nz)


@dataclass
class LinRow:
    """row @ v (sense) rhs, sense one of "<=", "==", ">="."""

    row: np.ndarray
    rhs: float
    sense: str
    name: str


@dataclass
class SocBlock:
    """h = F @ v + g with h[0] >= ||h[1:]||."""

    F: np.ndarray
    g: np.ndarray
    name: str

    @property
    def dim(self) -> int:
        return self.F.shape[0]


@dataclass
class FrobBlock:
    """||mat(v)||_F <= beta(v) with mat affine (p x q) and beta affine scalar."""

    Fmat: np.ndarray
    gmat: np.ndarray
    beta_row: np.ndarray
    beta_const: float
    shape: tuple[int, int]
    name: str

    def to_soc(self) -> SocBlock:
        F = np.vstack([self.beta_row[None, :], self.Fmat])
        g = np.concatenate([[self.beta_const], self.gmat])
        return SocBlock(F=F, g=g, name=self.name)


@dataclass
class PsdBlock:
    """smat(G @ v + h) PSD; rows are unscaled distinct entries (tri order)."""

    G: np.ndarray
    h: np.ndarray
    d: int
    name: str

    def matrix_at(self, v) -> np.ndarray:
        return smat(self.G @ v + self.h, self.d)


class PsdAssembler:
    """Helper that collects affine entries of a symmetric d x d block."""

    def __init__(self, space: LiftedSpace, d: int):
        self.space = space
        self.d = d
        self.G = np.zeros((tri_count(d), space.size))
        self.h = np.zeros(tri_count(d))

    def set_entry(self, i: int, j: int, row=None, const: float = 0.0):
        k = tri_index(i, j)
        if row is not None:
            self.G[k] = row
        self.h[k] = const

    def set_variable(self, i: int, j: int, var_index: int):
        self.G[tri_index(i, j), var_index] = 1.0

    def block(self, name: str) -> PsdBlock:
        return PsdBlock(G=self.G, h=self.h, d=self.d, name=name)


@dataclass
class ConicProgram:
    space: LiftedSpace
    obj_row: np.ndarray
    obj_const: float = 0.0
    lin: list = field(default_factory=list)
    socs: list = field(default_factory=list)
    frobs: list = field(default_factory=list)
    psds: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add_lin(self, row, rhs, sense, name):
        self.lin.append(LinRow(row=np.asarray(row, dtype=float), rhs=float(rhs), sense=sense, name=name))

    def add_soc(self, head_row, head_const, tail_rows, tail_consts, name):
        F = np.vstack([np.asarray(head_row)[None, :], np.atleast_2d(tail_rows)]) \
            if len(tail_rows) else np.asarray(head_row)[None, :]
        g = np.concatenate([[head_const], np.atleast_1d(tail_consts)]) if len(tail_rows) else np.array([head_const])
        self.socs.append(SocBlock(F=F, g=g, name=name))

    def add_frob(self, Fmat, gmat, beta_row, beta_const, shape, name):
        self.frobs.append(
            FrobBlock(
                Fmat=np.atleast_2d(Fmat),
                gmat=np.atleast_1d(gmat),
                beta_row=np.asarray(beta_row, dtype=float),
                beta_const=float(beta_const),
                shape=shape,
                name=name,
            )
        )

    def add_psd(self, block: PsdBlock):
        self.psds.append(block)

    def counts(self) -> dict:
        return {
            "n_lin": len(self.lin),
            "n_soc": len(self.socs) + len(self.frobs),
            "n_psd": len(self.psds),
            "n_vars": self.space.size,
        }

    def objective_at(self, v) -> float:
        return float(self.obj_row @ v + self.obj_const)

    def evaluate(self, v) -> dict[str, float]:
        """Signed slack of every constraint at a variable vector.

        Nonnegative means satisfied: inequality rows report rhs - lhs (resp.
        lhs - rhs), equality rows -|lhs - rhs|, SOC blocks head - ||tail||,
        Frobenius blocks beta - ||mat||_F and PSD blocks lambda_min.
        """
        out = {}
        for r in self.lin:
            val = float(r.row @ v)
            if r.sense == "<=":
                out[r.name] = r.rhs - val
            elif r.sense == ">=":
                out[r.name] = val - r.rhs
            else:
                out[r.name] = -abs(val - r.rhs)
        for b in self.socs:
            h = b.F @ v + b.g
            out[b.name] = float(h[0] - np.linalg.norm(h[1:]))
        for b in self.frobs:
            mat = b.Fmat @ v + b.gmat
            out[b.name] = float(b.beta_row @ v + b.beta_const - np.linalg.norm(mat))
        for b in self.psds:
            out[b.name] = float(np.linalg.eigvalsh(b.matrix_at(v))[0])
        return out


def moment_lmi(space: LiftedSpace) -> PsdBlock:
    """Bordered moment block [[1, x^T, z^T], [x, X, S], [z, S^T, Z]] >= 0."""
    n, nz = space.n, space.nz
    d = 1 + n + nz
    asm = PsdAssembler(space, d)
    asm.set_entry(0, 0, const=1.0)
    for i in range(n):
        asm.set_variable(0, 1 + i, space.ix_x(i))
        for j in range(i, n):
            asm.set_variable(1 + i, 1 + j, space.ix_X(i, j))
    for t in range(nz):
        asm.set_variable(0, 1 + n + t, space.ix_z(t))
        for i in range(n):
            asm.set_variable(1 + i, 1 + n + t, space.ix_S(i, t))
        for u in range(t, nz):
            asm.set_variable(1 + n + t, 1 + n + u, space.ix_Z(t, u))
    return asm.block("moment-lmi")


@dataclass
class StandardForm:
    """Lowered program: min c^T v + const s.t. A v + s = b, s in cone product.

    Cones appear in order zero, nonneg, SOC..., PSD...; PSD slacks use the
    scaled symmetric vectorization (upper triangle, column-major, off-diagonal
    entries multiplied by sqrt(2)).
    """

    A: sparse.csc_matrix
    b: np.ndarray
    c: np.ndarray
    obj_const: float
    cones: list  # ("zero"|"nonneg", count) or ("soc"|"psd", dim)
    nvars: int
    space: LiftedSpace


def lower(prog: ConicProgram) -> StandardForm:
    """Flatten the IR into conic standard form (Frobenius blocks become SOCs)."""
    N = prog.space.size
    rows_A, rows_b = [], []
    cones = []

    eq = [r for r in prog.lin if r.sense == "=="]
    ineq = [r for r in prog.lin if r.sense != "=="]
    for r in eq:
        rows_A.append(r.row[None, :])
        rows_b.append([r.rhs])
    if eq:
        cones.append(("zero", len(eq)))
    for r in ineq:
        if r.sense == "<=":
            rows_A.append(r.row[None, :])
            rows_b.append([r.rhs])
        else:  # ">=" : -row <= -rhs
            rows_A.append(-r.row[None, :])
            rows_b.append([-r.rhs])
    if ineq:
        cones.append(("nonneg", len(ineq)))

    soc_blocks = list(prog.socs) + [fb.to_soc() for fb in prog.frobs]
    for blk in soc_blocks:
        if blk.dim == 1:
            # degenerate SOC: head >= 0 only
            rows_A.append(-blk.F)
            rows_b.append(blk.g)
            cones.append(("nonneg", 1))
            continue
        rows_A.append(-blk.F)
        rows_b.append(blk.g)
        cones.append(("soc", blk.dim))

    for blk in prog.psds:
        w = svec_scale(blk.d)
        rows_A.append(-(blk.G * w[:, None]))
        rows_b.append(blk.h * w)
        cones.append(("psd", blk.d))

    A = sparse.csc_matrix(np.vstack(rows_A)) if rows_A else sparse.csc_matrix((0, N))
    b = np.concatenate([np.atleast_1d(x) for x in rows_b]) if rows_b else np.zeros(0)
    return StandardForm(
        A=A, b=b, c=prog.obj_row.copy(), obj_const=prog.obj_const,
        cones=cones, nvars=N, space=prog.space,
    )


def export_text(std: StandardForm) -> str:
    """Versioned text dump of a lowered program for external cross-checks."""
    buf = io.StringIO()
    buf.write(EXPORT_HEADER + "\n")
    buf.write(f"VARS {std.nvars}\n")
    buf.write("OBJ " + " ".join(repr(float(x)) for x in std.c) + f" CONST {std.obj_const!r}\n")
    buf.write(f"CONES {len(std.cones)}\n")
    for kind, d in std.cones:
        buf.write(f"{kind.upper()} {d}\n")
    coo = std.A.tocoo()
    buf.write(f"A {std.A.shape[0]} {std.A.shape[1]} {coo.nnz}\n")
    order = np.lexsort((coo.col, coo.row))
    for k in order:
        buf.write(f"{coo.row[k]} {coo.col[k]} {float(coo.data[k])!r}\n")
    buf.write("B " + " ".join(repr(float(x)) for x in std.b) + "\n")
    return buf.getvalue()
