import numpy as np
import pytest

from qrelax import model, oracle
from qrelax.errors import NoFeasiblePointFound


@pytest.fixture(scope="module")
def ex():
    return {n: model.load_fixture(n) for n in ("example1", "example3", "example4")}


class TestGlobalMin:
    def test_example1(self, ex):
        res = oracle.global_min(ex["example1"], resolution=41)
        assert res.best_val == pytest.approx(-1.21788, abs=1e-3)
        assert np.allclose(res.best_x, [0.05256, 1.00646, -0.125414], atol=1e-3)

    def test_example3(self, ex):
        res = oracle.global_min(ex["example3"], resolution=101)
        assert res.best_val == pytest.approx(-3.327, abs=1e-3)
        assert np.allclose(res.best_x, [0.427, 0.588], atol=1e-3)

    def test_example4(self, ex):
        res = oracle.global_min(ex["example4"], resolution=101)
        assert res.best_val == pytest.approx(-6.4444, abs=1e-3)
        assert np.allclose(res.best_x, [0.0, 0.6667], atol=1e-3)

    def test_best_point_feasible(self, ex):
        res = oracle.global_min(ex["example3"], resolution=61)
        assert ex["example3"].max_violation(res.best_x) <= 1e-6

    def test_monotone_in_resolution(self, ex):
        lo = oracle.global_min(ex["example4"], resolution=41)
        hi = oracle.global_min(ex["example4"], resolution=81)
        assert hi.best_val <= lo.best_val + 1e-8

    def test_no_feasible_point(self):
        inst = model.make_instance(
            2, np.eye(2), np.zeros(2),
            [(np.eye(2), np.zeros(2), 1.0)], [],  # ||x||^2 <= -1
        )
        with pytest.raises(NoFeasiblePointFound):
            oracle.global_min(inst, resolution=11)

    def test_n_cap(self):
        inst = model.make_instance(5, np.eye(5), np.zeros(5), [(np.eye(5), np.zeros(5), -1.0)], [])
        with pytest.raises(ValueError):
            oracle.global_min(inst)

    def test_box_from_single_variable_rows(self, ex):
        lo, hi = oracle.default_box(ex["example3"])
        assert np.allclose(lo, [0.0, 0.0]) and np.allclose(hi, [1.0, 1.0])
