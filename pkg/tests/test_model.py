import numpy as np
import pytest

from qrelax import model, oracle
from qrelax.errors import DimError, FixtureNotFound, InvalidConstraint, ParseError


class TestParse:
    def test_example1_fixture(self):
        inst = model.load_fixture("example1")
        assert inst.n == 3 and inst.l == 1 and inst.m == 1
        assert np.allclose(inst.Q0, np.diag([0.3, -2.0, 2.4]))
        assert inst.quad[0].d == -1.0

    def test_unconstrained_instance(self):
        inst = model.make_instance(2, np.eye(2), [0.0, 0.0], [], [])
        assert inst.l == 0 and inst.m == 0

    def test_dim_mismatch(self):
        with pytest.raises(DimError):
            model.make_instance(
                3, np.eye(3), np.zeros(3),
                [(np.eye(3), np.zeros(2), 0.0)], [],
            )

    def test_zero_Q_rejected(self):
        with pytest.raises(InvalidConstraint):
            model.make_instance(2, np.eye(2), np.zeros(2), [(np.zeros((2, 2)), np.zeros(2), -1.0)], [])

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            model.parse_instance(b"{not json")

    def test_missing_field_path(self):
        with pytest.raises(ParseError) as e:
            model.parse_instance('{"n": 2, "objective": {"Q": [[1,0],[0,1]]}}')
        assert "objective" in str(e.value)

    def test_asymmetric_warns_and_symmetrizes(self):
        with pytest.warns(UserWarning, match="symmetrized"):
            inst = model.make_instance(2, [[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0], [], [])
        assert np.allclose(inst.Q0, [[1.0, 1.0], [1.0, 1.0]])

    def test_unknown_fixture(self):
        with pytest.raises(FixtureNotFound):
            model.load_fixture("example99")


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["example1", "example2", "example3", "example4", "example5", "example6"])
    def test_fixture_round_trip_bit_identical(self, name):
        inst = model.load_fixture(name)
        text = model.serialize_instance(inst)
        again = model.serialize_instance(model.parse_instance(text))
        assert text == again

    def test_awkward_floats_survive(self):
        inst = model.make_instance(
            2, [[0.1, 1e-17], [1e-17, 3.3333333333333335]], [np.pi, -0.0],
            [(np.eye(2), [1e300, 5e-324], -7.1)], [([0.3, -0.7], 2.5)],
        )
        text = model.serialize_instance(inst)
        assert model.serialize_instance(model.parse_instance(text)) == text


class TestClassify:
    def test_example1(self):
        inst = model.load_fixture("example1")
        cls = model.classify(inst)
        assert cls.convex_idx == () and cls.nonconvex_idx == (0,)
        assert 0 in cls.type_b_eligible  # Q1 nonsingular

    def test_example3(self):
        inst = model.load_fixture("example3")
        cls = model.classify(inst)
        assert 0 in cls.convex_idx and 1 in cls.nonconvex_idx
        assert 0 not in cls.type_b_eligible  # c has a nullspace component
        assert 1 in cls.type_b_eligible

    def test_all_psd(self):
        inst = model.make_instance(
            2, np.eye(2), np.zeros(2),
            [(np.eye(2), np.zeros(2), -1.0), (np.diag([2.0, 1.0]), np.ones(2), -3.0)], [],
        )
        cls = model.classify(inst)
        assert cls.nonconvex_idx == () and cls.k == 2

    def test_perturbation_below_tolerance(self):
        Q = np.diag([5.0, 0.0])
        eps = 1e-12
        a = model.classify(model.make_instance(2, np.eye(2), np.zeros(2), [(Q, np.zeros(2), -1.0)], []))
        b = model.classify(
            model.make_instance(2, np.eye(2), np.zeros(2), [(Q - eps * np.eye(2), np.zeros(2), -1.0)], [])
        )
        assert a.convex_idx == b.convex_idx == (0,)

    def test_aux_index_is_rank_in_sorted_N(self):
        inst = model.make_instance(
            2, np.eye(2), np.zeros(2),
            [(np.diag([1.0, -1.0]), np.zeros(2), -1.0),
             (np.eye(2), np.zeros(2), -1.0),
             (np.diag([-1.0, 1.0]), np.zeros(2), -1.0)], [],
        )
        cls = model.classify(inst)
        assert cls.nonconvex_idx == (0, 2)
        assert cls.aux_index(0) == 0 and cls.aux_index(2) == 1


class TestEpigraph:
    def test_example1_shape(self):
        inst = model.load_fixture("example1")
        epi = model.epigraph_reformulate(inst)
        assert epi.n == 4 and epi.l == 2
        assert np.allclose(epi.c0, [0, 0, 0, 1]) and not np.any(epi.Q0)

    def test_convex_objective_lands_convex(self):
        inst = model.make_instance(2, np.eye(2), np.ones(2), [(np.eye(2), np.zeros(2), -1.0)], [])
        cls = model.classify(model.epigraph_reformulate(inst))
        assert len(cls.convex_idx) == 2

    def test_indefinite_objective_lands_nonconvex(self):
        inst = model.load_fixture("example5")  # indefinite Q0
        epi = model.epigraph_reformulate(inst)
        cls = model.classify(epi)
        assert epi.l - 1 in cls.nonconvex_idx

    def test_value_preserved(self):
        inst = model.make_instance(
            2, np.diag([1.0, -1.0]), [0.5, -0.3],
            [(np.eye(2), np.zeros(2), -1.0)],
            [([1.0, 1.0], 1.0)],
        )
        base = oracle.global_min(inst, resolution=61)
        epi = model.epigraph_reformulate(inst)
        box = (list(base.box[0]) + [-40.0], list(base.box[1]) + [40.0])
        lifted = oracle.global_min(epi, box=box, resolution=31)
        assert abs(base.best_val - lifted.best_val) <= 2e-3
