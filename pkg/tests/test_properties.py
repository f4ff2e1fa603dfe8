"""Cross-module property tests (randomized)."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrelax import bench, decompose as dec, lift, linalg, model, relax


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2**31 - 1))
def test_trace_inequality(n, seed):
    # tr(AB) <= tr(A) tr(B) for PSD A, B
    rng = np.random.default_rng(seed)
    Ga, Gb = rng.normal(size=(2, n, n))
    A, B = Ga @ Ga.T, Gb @ Gb.T
    assert np.trace(A @ B) <= np.trace(A) * np.trace(B) + 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_gsoc_count_is_2l_minus_k(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    l = int(rng.integers(1, 4))
    k = int(rng.integers(0, l + 1))
    inst = bench.generate(bench.GenSpec(n=n, l=l, k=k, m=1, seed=seed))
    cls = model.classify(inst)
    decomps = relax.decompositions_for(inst, cls, relax.spec_for("gsrt-a"))
    forms = dec.gsoc_catalogue(inst, cls, decomps)
    assert len(forms) == 2 * inst.l - cls.k


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_lower_is_lossless_on_objective(seed):
    rng = np.random.default_rng(seed)
    space = lift.new_space(int(rng.integers(1, 4)), int(rng.integers(0, 3)))
    prog = lift.ConicProgram(space=space, obj_row=rng.normal(size=space.size),
                             obj_const=float(rng.normal()))
    std = lift.lower(prog)
    v = rng.normal(size=space.size)
    assert std.c @ v + std.obj_const == pytest.approx(prog.objective_at(v))


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_generated_instance_round_trips(seed):
    rng = np.random.default_rng(seed)
    spec = bench.GenSpec(
        n=int(rng.integers(2, 6)), l=int(rng.integers(1, 4)),
        k=0, m=int(rng.integers(0, 4)), seed=seed,
    )
    inst = bench.generate(spec)
    text = model.serialize_instance(inst)
    assert model.serialize_instance(model.parse_instance(text)) == text


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_validity_at_rank1_generated(seed):
    """Sampled feasible points of generated instances satisfy every emitted
    constraint of the strongest composite family after lifting."""
    spec = bench.GenSpec(n=3, l=2, k=0, m=2, seed=seed, phi=1, figures_mode=True)
    inst = bench.generate(spec)
    prog, ctx = relax.build(inst, relax.spec_for("ksoc-sub"))
    cls, decomps = ctx["classification"], ctx["decompositions"]
    rng = np.random.default_rng(seed)
    found = 0
    for x in rng.uniform(-3.0, 3.0, size=(500, inst.n)):
        if inst.max_violation(x) > 0:
            continue
        found += 1
        z, _ = relax.lift_feasible_point(inst, cls, decomps, x)
        v = relax.rank1_vector(prog.space, x, z)
        worst = min(prog.evaluate(v).values())
        assert worst >= -1e-8
        if found >= 5:
            break


def test_moment_lmi_rank1_feasible_many():
    rng = np.random.default_rng(0)
    space = lift.new_space(4, 3)
    blk = lift.moment_lmi(space)
    for _ in range(50):
        x, z = rng.normal(size=4), rng.normal(size=3)
        v = space.pack(x, z, np.outer(x, x), np.outer(x, z), np.outer(z, z))
        assert np.linalg.eigvalsh(blk.matrix_at(v))[0] >= -1e-9
