"""Per-constraint decomposition artifacts consumed by the relaxation builders.

A convex constraint i carries B with Q_i = B^T B.  A nonconvex constraint
carries the sign split Q_i = L^T L - M^T M; with the range condition
c in Range(Q) it additionally carries the recentering x0 = Q^+ c / 2 and the
constant gamma = c^T Q^+ c / 4 - d, whose sign selects the B1 (gamma > 0)
or B2 (gamma <= 0) scheme with offset delta = sqrt(|gamma|).

The unified second-order-cone catalogue collects every SOC derived from the
quadratic constraints in the common form  ||C x + xi|| <= zeta^T x + eta^T z
+ theta, which is what the SST and Kronecker-product builders consume.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import RangeConditionViolated
from .model import Classification, QcqpInstance, QuadConstraint


class Kind(Enum):
    CONVEX_A = "convex-a"
    CONVEX_B = "convex-b"
    NONCONVEX_A = "nonconvex-a"
    NONCONVEX_B1 = "nonconvex-b1"
    NONCONVEX_B2 = "nonconvex-b2"


@dataclass(frozen=True)
class ConstraintDecomposition:
    kind: Kind
    B: np.ndarray | None = None
    split: linalg.EigenSplit | None = None
    Qdag: np.ndarray | None = None
    x0: np.ndarray | None = None
    delta: float | None = None
    gamma: float | None = None


def decompose_constraint(qc: QuadConstraint, kind: Kind, tol: float = 1e-8) -> ConstraintDecomposition:
    """Build the decomposition artifacts for one constraint.

    B-kinds require c in Range(Q); requesting one without eligibility raises
    :class:`RangeConditionViolated`.  When ``kind`` is NONCONVEX_B1 or
    NONCONVEX_B2 the caller may pass either; the actual branch is re-derived
    from the sign of gamma (boundary gamma == 0 goes to B2).
    """
    if kind is Kind.CONVEX_A:
        return ConstraintDecomposition(kind=kind, B=linalg.psd_sqrt(qc.Q))

    if kind is Kind.NONCONVEX_A:
        return ConstraintDecomposition(kind=kind, split=linalg.split_signed(qc.Q))

    # type-B kinds
    if not linalg.in_range(qc.Q, qc.c, tol=tol):
        raise RangeConditionViolated(f"c not in Range(Q) for kind {kind.value}")
    Qdag = linalg.pinv(qc.Q)
    x0 = 0.5 * (Qdag @ qc.c)
    gamma = float(0.25 * qc.c @ Qdag @ qc.c - qc.d)

    if kind is Kind.CONVEX_B:
        return ConstraintDecomposition(
            kind=kind,
            B=linalg.psd_sqrt(qc.Q),
            Qdag=Qdag,
            x0=x0,
            gamma=gamma,
            delta=float(np.sqrt(max(gamma, 0.0))) if gamma >= 0 else None,
        )

    split = linalg.split_signed(qc.Q)
    resolved = Kind.NONCONVEX_B1 if gamma > 0 else Kind.NONCONVEX_B2
    return ConstraintDecomposition(
        kind=resolved,
        split=split,
        Qdag=Qdag,
        x0=x0,
        gamma=gamma,
        delta=float(np.sqrt(abs(gamma))),
    )


@dataclass(frozen=True)
class GsocForm:
    """One SOC constraint ||C x + xi|| <= zeta^T x + eta^T z + theta."""

    C: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray
    theta: float
    origin: tuple[int, str]  # (constraint index, side tag)
    from_convex: bool

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def h(self, x) -> np.ndarray:
        return self.C @ np.asarray(x, dtype=float) + self.xi

    def l(self, x, z) -> float:  # noqa: E743
        return float(self.zeta @ x + (self.eta @ z if len(self.eta) else 0.0) + self.theta)


def _unit(nz: int, t: int) -> np.ndarray:
    e = np.zeros(nz)
    e[t] = 1.0
    return e


def gsoc_catalogue(
    inst: QcqpInstance,
    cls: Classification,
    decomps: dict[int, ConstraintDecomposition],
    convex_style: str = "A",
) -> list[GsocForm]:
    """Unified SOC catalogue: 2 forms per nonconvex constraint, 1 per convex.

    Nonconvex forms take the pair matching the constraint's decomposition
    (type A, B1 or B2); each uses the auxiliary z slot assigned by the
    classification's rank-in-sorted-N mapping.  Convex constraints default to
    the type-A SOC; ``convex_style="B"`` selects the recentered constant-rhs
    form (requires a CONVEX_B decomposition).
    """
    n, nz = inst.n, len(cls.nonconvex_idx)
    forms: list[GsocForm] = []
    for i, qc in enumerate(inst.quad):
        dec = decomps[i]
        if i in cls.convex_idx:
            if convex_style == "B" and dec.kind is Kind.CONVEX_B:
                # ||B x + B x0|| <= delta  (constant right side)
                forms.append(
                    GsocForm(
                        C=dec.B,
                        xi=dec.B @ dec.x0,
                        zeta=np.zeros(n),
                        eta=np.zeros(nz),
                        theta=dec.delta,
                        origin=(i, "convex-b"),
                        from_convex=True,
                    )
                )
            else:
                # ||(B x; -(c^T x + d + 1)/2)|| <= (1 - d - c^T x)/2
                forms.append(
                    GsocForm(
                        C=np.vstack([dec.B, -0.5 * qc.c[None, :]]),
                        xi=np.concatenate([np.zeros(dec.B.shape[0]), [-(qc.d + 1.0) / 2.0]]),
                        zeta=-0.5 * qc.c,
                        eta=np.zeros(nz),
                        theta=(1.0 - qc.d) / 2.0,
                        origin=(i, "convex-a"),
                        from_convex=True,
                    )
                )
            continue

        t = cls.aux_index(i)
        eta = _unit(nz, t)
        zeros_n = np.zeros(n)
        if dec.kind is Kind.NONCONVEX_A:
            L, M = dec.split.L, dec.split.M
            forms.append(
                GsocForm(
                    C=np.vstack([L, 0.5 * qc.c[None, :]]),
                    xi=np.concatenate([np.zeros(L.shape[0]), [(qc.d + 1.0) / 2.0]]),
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "a-plus"), from_convex=False,
                )
            )
            forms.append(
                GsocForm(
                    C=np.vstack([M, 0.5 * qc.c[None, :]]),
                    xi=np.concatenate([np.zeros(M.shape[0]), [(qc.d - 1.0) / 2.0]]),
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "a-minus"), from_convex=False,
                )
            )
        elif dec.kind is Kind.NONCONVEX_B1:
            L, M = dec.split.L, dec.split.M
            forms.append(
                GsocForm(
                    C=L, xi=L @ dec.x0,
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "b1-plus"), from_convex=False,
                )
            )
            forms.append(
                GsocForm(
                    C=np.vstack([M, np.zeros((1, n))]),
                    xi=np.concatenate([M @ dec.x0, [dec.delta]]),
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "b1-minus"), from_convex=False,
                )
            )
        elif dec.kind is Kind.NONCONVEX_B2:
            L, M = dec.split.L, dec.split.M
            forms.append(
                GsocForm(
                    C=np.vstack([L, np.zeros((1, n))]),
                    xi=np.concatenate([L @ dec.x0, [dec.delta]]),
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "b2-plus"), from_convex=False,
                )
            )
            forms.append(
                GsocForm(
                    C=M, xi=M @ dec.x0,
                    zeta=zeros_n, eta=eta, theta=0.0,
                    origin=(i, "b2-minus"), from_convex=False,
                )
            )
        else:
            raise RangeConditionViolated(
                f"constraint {i} is nonconvex but carries decomposition {dec.kind.value}"
            )
    return forms
