"""QCQP data model, on-disk format, validation and constraint classification.

Instance files are JSON text with top-level fields ``name``, ``n``,
``objective {Q, c}``, ``quadratic [{Q, c, d}]`` and ``linear [{a, b}]``.
Matrices are arrays of rows, numbers plain decimal literals.  Serialization
uses Python's shortest round-trip float representation, so
``parse(serialize(inst))`` reproduces the exact same bytes on re-serialization.
"""

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .errors import DimError, FixtureNotFound, InvalidConstraint, ParseError

SYMMETRY_WARN_TOL = 1e-12


@dataclass(frozen=True)
class QuadConstraint:
    """x^T Q x + c^T x + d <= 0."""

    Q: np.ndarray
    c: np.ndarray
    d: float

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x + self.c @ x + self.d)


@dataclass(frozen=True)
class LinConstraint:
    """a^T x <= b."""

    a: np.ndarray
    b: float

    def slack(self, x) -> float:
        return float(self.b - self.a @ np.asarray(x, dtype=float))


@dataclass(frozen=True)
class QcqpInstance:
    n: int
    Q0: np.ndarray
    c0: np.ndarray
    quad: tuple[QuadConstraint, ...]
    lin: tuple[LinConstraint, ...]
    name: str = ""

    @property
    def l(self) -> int:  # noqa: E743 - paper's constraint count
        return len(self.quad)

    @property
    def m(self) -> int:
        return len(self.lin)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q0 @ x + self.c0 @ x)

    def with_linear_row(self, a, b) -> "QcqpInstance":
        """Copy of the instance with one extra linear row appended."""
        a = np.asarray(a, dtype=float)
        if a.shape != (self.n,):
            raise DimError(f"extra row has length {a.shape}, expected {self.n}")
        return replace(self, lin=self.lin + (LinConstraint(a=a, b=float(b)),))

    def max_violation(self, x) -> float:
        """Largest constraint violation at x (0 when feasible)."""
        v = 0.0
        for qc in self.quad:
            v = max(v, qc.value(x))
        for lc in self.lin:
            v = max(v, -lc.slack(x))
        return v


@dataclass(frozen=True)
class Classification:
    """Constraint partition: convex vs not, plus range-condition eligibility."""

    convex_idx: tuple[int, ...]
    nonconvex_idx: tuple[int, ...]
    type_b_eligible: frozenset[int]
    tol: float

    @property
    def k(self) -> int:
        return len(self.convex_idx)

    def aux_index(self, i: int) -> int:
        """Auxiliary z slot for nonconvex constraint i: its rank in sorted N."""
        return self.nonconvex_idx.index(i)


def make_instance(n, Q0, c0, quad, lin, name="") -> QcqpInstance:
    """Validate, symmetrize and freeze raw instance data."""
    n = int(n)
    if n < 1:
        raise DimError(f"n must be >= 1, got {n}")
    Q0 = _load_matrix(Q0, n, "objective.Q")
    c0 = _load_vector(c0, n, "objective.c")
    quads = []
    for idx, (Q, c, d) in enumerate(quad):
        path = f"quadratic[{idx}]"
        Q = _load_matrix(Q, n, path + ".Q")
        c = _load_vector(c, n, path + ".c")
        if not np.any(Q):
            raise InvalidConstraint(f"{path}: Q is the zero matrix")
        quads.append(QuadConstraint(Q=Q, c=c, d=float(d)))
    lins = []
    for idx, (a, b) in enumerate(lin):
        path = f"linear[{idx}]"
        a = _load_vector(a, n, path + ".a")
        lins.append(LinConstraint(a=a, b=float(b)))
    return QcqpInstance(n=n, Q0=Q0, c0=c0, quad=tuple(quads), lin=tuple(lins), name=str(name))


def _load_matrix(M, n, path) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (n, n):
        raise DimError(f"{path}: shape {M.shape}, expected ({n}, {n})")
    if not np.all(np.isfinite(M)):
        raise InvalidConstraint(f"{path}: non-finite entries")
    if np.max(np.abs(M - M.T), initial=0.0) > SYMMETRY_WARN_TOL * max(1.0, np.max(np.abs(M))):
        warnings.warn(f"{path}: asymmetric input symmetrized", stacklevel=3)
    M = linalg.sym(M)
    M.setflags(write=False)
    return M


def _load_vector(v, n, path) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DimError(f"{path}: length {v.shape}, expected ({n},)")
    if not np.all(np.isfinite(v)):
        raise InvalidConstraint(f"{path}: non-finite entries")
    v.setflags(write=False)
    return v


def parse_instance(text: str | bytes) -> QcqpInstance:
    """Parse an instance document (see module docstring for the schema)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(str(e)) from e
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")

    def need(obj, key, path):
        if not isinstance(obj, dict) or key not in obj:
            raise ParseError(f"missing field '{key}'", path)
        return obj[key]

    n = need(doc, "n", "")
    if not isinstance(n, int) or n < 1:
        raise ParseError("n must be a positive integer", "n")
    objective = need(doc, "objective", "")
    quad_docs = doc.get("quadratic", [])
    lin_docs = doc.get("linear", [])
    if not isinstance(quad_docs, list):
        raise ParseError("must be a list", "quadratic")
    if not isinstance(lin_docs, list):
        raise ParseError("must be a list", "linear")
    quad = [
        (need(q, "Q", f"quadratic[{i}]"), need(q, "c", f"quadratic[{i}]"), need(q, "d", f"quadratic[{i}]"))
        for i, q in enumerate(quad_docs)
    ]
    lin = [(need(r, "a", f"linear[{i}]"), need(r, "b", f"linear[{i}]")) for i, r in enumerate(lin_docs)]
    return make_instance(
        n=n,
        Q0=need(objective, "Q", "objective"),
        c0=need(objective, "c", "objective"),
        quad=quad,
        lin=lin,
        name=doc.get("name", ""),
    )


def serialize_instance(inst: QcqpInstance) -> str:
    """Canonical JSON text for an instance (stable field order, repr floats)."""
    doc = {
        "name": inst.name,
        "n": inst.n,
        "objective": {"Q": inst.Q0.tolist(), "c": inst.c0.tolist()},
        "quadratic": [{"Q": qc.Q.tolist(), "c": qc.c.tolist(), "d": qc.d} for qc in inst.quad],
        "linear": [{"a": lc.a.tolist(), "b": lc.b} for lc in inst.lin],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_instance(path) -> QcqpInstance:
    with open(path, "rb") as f:
        return parse_instance(f.read())


def save_instance(inst: QcqpInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_instance(inst))


def load_fixture(name: str) -> QcqpInstance:
    """Load a bundled fixture by name (``example1`` ... ``example6``)."""
    from importlib.resources import files

    res = files("qrelax").joinpath("fixtures").joinpath(f"{name}.qcqp")
    if not res.is_file():
        raise FixtureNotFound(name)
    return parse_instance(res.read_text(encoding="utf-8"))


def classify(inst: QcqpInstance, tol: float = linalg.DEFAULT_EIG_TOL) -> Classification:
    """Partition quadratic constraints into convex / nonconvex (0-based indices).

    A constraint is convex iff lambda_min(Q_i) >= -tol * max(1, |lambda|_max).
    Eligibility for the type-B recentering (c in Range(Q)) is recorded for
    every constraint.
    """
    convex, nonconvex, eligible = [], [], set()
    for i, qc in enumerate(inst.quad):
        w, _ = linalg.eig_sym(qc.Q)
        cutoff = tol * max(1.0, float(np.max(np.abs(w))))
        if w[0] >= -cutoff:
            convex.append(i)
        else:
            nonconvex.append(i)
        if linalg.in_range(qc.Q, qc.c, tol=max(tol, 1e-8)):
            eligible.add(i)
    return Classification(
        convex_idx=tuple(convex),
        nonconvex_idx=tuple(nonconvex),
        type_b_eligible=frozenset(eligible),
        tol=tol,
    )


def epigraph_reformulate(inst: QcqpInstance) -> QcqpInstance:
    """Epigraph form over (x, tau): minimize tau with x^T Q0 x + c0^T x - tau <= 0.

    Original constraints are embedded with zero coefficients on tau.  The
    optimal value is preserved.
    """
    n = inst.n
    Q0 = np.zeros((n + 1, n + 1))
    c0 = np.zeros(n + 1)
    c0[n] = 1.0

    def pad_mat(Q):
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = Q
        return M

    def pad_vec(c, tau_coef=0.0):
        v = np.zeros(n + 1)
        v[:n] = c
        v[n] = tau_coef
        return v

    quad = [(pad_mat(qc.Q), pad_vec(qc.c), qc.d) for qc in inst.quad]
    quad.append((pad_mat(inst.Q0), pad_vec(inst.c0, tau_coef=-1.0), 0.0))
    lin = [(pad_vec(lc.a), lc.b) for lc in inst.lin]
    name = f"{inst.name}+epigraph" if inst.name else "epigraph"
    return make_instance(n=n + 1, Q0=Q0, c0=c0, quad=quad, lin=lin, name=name)
