"""Conic relaxation hierarchy for nonconvex QCQP.

Builds and solves the lifted relaxation ladder (basic SDP, RLT, SOC-RLT,
split-based SOC families for nonconvex constraints, pairwise SOC products,
Kronecker-product LMIs, artificial-bound variants) and verifies the
dominance and redundancy relations among them numerically.
"""

__version__ = "0.1.0"

from .backend import LiftedSolution, SolverConfig, recover, solve
from .bench import CompareReport, GenSpec, compare, figures_sweep, generate, verify_dominance
from .decompose import ConstraintDecomposition, GsocForm, Kind, decompose_constraint, gsoc_catalogue
from .lift import ConicProgram, LiftedSpace, lower, moment_lmi, new_space
from .model import (
    Classification,
    LinConstraint,
    QcqpInstance,
    QuadConstraint,
    classify,
    epigraph_reformulate,
    load_fixture,
    load_instance,
    make_instance,
    parse_instance,
    save_instance,
    serialize_instance,
)
from .oracle import OracleResult, global_min
from .relax import (
    RELAXATIONS,
    AlphaAug,
    RelaxationSpec,
    SolveReport,
    build,
    build_sdp,
    relaxation_names,
    solve_relaxation,
    spec_for,
)

__all__ = [
    "AlphaAug", "Classification", "CompareReport", "ConicProgram",
    "ConstraintDecomposition", "GenSpec", "GsocForm", "Kind", "LiftedSolution",
    "LiftedSpace", "LinConstraint", "OracleResult", "QcqpInstance",
    "QuadConstraint", "RELAXATIONS", "RelaxationSpec", "SolverConfig",
    "SolveReport", "build", "build_sdp", "classify", "compare",
    "decompose_constraint", "epigraph_reformulate", "figures_sweep", "generate",
    "global_min", "gsoc_catalogue", "load_fixture", "load_instance", "lower",
    "make_instance", "moment_lmi", "new_space", "parse_instance", "recover",
    "relaxation_names", "save_instance", "serialize_instance", "solve",
    "solve_relaxation", "spec_for", "verify_dominance",
]
