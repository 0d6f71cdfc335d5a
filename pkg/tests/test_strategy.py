import math

import numpy as np
import pytest
from hypothesis import given, strategies as hs

from conftest import ANGLE_P, ANGLE_T, PROB
from qpennyflip.qmat import InvalidStateError, evolve_pure
from qpennyflip.strategy import (SCHEMA_CLASSICAL_1, SCHEMA_CLASSICAL_2, SCHEMA_MIXED2_1, SCHEMA_PURE_1,
                                 SCHEMA_PURE_2, Chromosome, ClassicalMixed, MixedTwoUnitary,
                                 PureQuantum, Schema, StrategyParams, decode, encode, make_unitary,
                                 move_to_branches, named_operator, named_params)

PI = math.pi
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


class TestMakeUnitary:
    def test_flip(self):
        assert np.allclose(make_unitary(StrategyParams(PI / 2, PI)).m, [[0, 1], [1, 0]], atol=1e-15)

    def test_no_flip(self):
        assert np.array_equal(make_unitary(StrategyParams(0, 0)).m, np.eye(2))

    def test_hadamard(self):
        assert np.allclose(make_unitary(StrategyParams(PI / 4, PI)).m, H, atol=1e-15)

    @pytest.mark.parametrize("theta, phi", [(-0.1, 0), (PI / 2 + 0.01, 0), (0, -0.1), (0, PI + 0.01),
                                            (math.nan, 0)])
    def test_rejects_out_of_range(self, theta, phi):
        with pytest.raises(ValueError):
            StrategyParams(theta, phi)

    def test_unitary_over_random_sample(self):
        rng = np.random.default_rng(1)
        for t, p in zip(rng.uniform(0, PI / 2, 1000), rng.uniform(0, PI, 1000)):
            u = make_unitary(StrategyParams(t, p)).m
            assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-12


class TestMoves:
    def test_probability_bounds(self):
        with pytest.raises(ValueError):
            ClassicalMixed(1.2)
        with pytest.raises(ValueError):
            MixedTwoUnitary(-0.1, StrategyParams(0, 0), StrategyParams(0, 0))

    def test_classical_branches(self):
        (p1, f), (p2, n) = move_to_branches(ClassicalMixed(0.5))
        assert (p1, p2) == (0.5, 0.5)
        assert np.array_equal(f.m, [[0, 1], [1, 0]]) and np.array_equal(n.m, np.eye(2))

    def test_pure_branch(self):
        ((p, u),) = move_to_branches(PureQuantum.of(PI / 4, PI))
        assert p == 1.0 and np.allclose(u.m, H, atol=1e-15)

    @given(PROB)
    def test_mixed_branches(self, p):
        (a, u1), (b, u2) = move_to_branches(MixedTwoUnitary.of(p, (PI / 2, 0), (0, 0)))
        assert a == p and abs(a + b - 1) < 1e-15
        assert np.allclose(u1.m, [[0, -1], [1, 0]], atol=1e-15)
        assert np.array_equal(u2.m, np.eye(2))


class TestNamed:
    def test_sigma1_is_flip_form(self):
        assert named_params("sigma1") == StrategyParams(PI / 2, PI)
        assert np.allclose(make_unitary(named_params("sigma1")).m, named_operator("sigma1").m, atol=1e-15)

    def test_sigma3(self):
        assert np.array_equal(named_operator("sigma3").m, [[1, 0], [0, -1]])

    def test_sigma2_real_form(self):
        assert np.array_equal(named_operator("sigma2").m, [[0, -1], [1, 0]])

    @pytest.mark.parametrize("name", ["sigma1", "sigma2", "sigma3", "identity", "hadamard"])
    def test_params_match_matrix(self, name):
        assert np.allclose(make_unitary(named_params(name)).m, named_operator(name).m, atol=1e-15)

    def test_unknown(self):
        with pytest.raises(ValueError):
            named_operator("sigma4")


class TestDecode:
    def test_classical(self):
        assert decode(Chromosome((0.5,), SCHEMA_CLASSICAL_1)) == [ClassicalMixed(0.5)]

    def test_two_pure(self):
        moves = decode(Chromosome((PI / 4, PI / 2, PI / 4, PI), SCHEMA_PURE_2))
        assert moves == [PureQuantum.of(PI / 4, PI / 2), PureQuantum.of(PI / 4, PI)]

    def test_mixed_two(self):
        moves = decode(Chromosome((0.5, PI / 2, PI, 0, 0), SCHEMA_MIXED2_1))
        assert moves == [MixedTwoUnitary.of(0.5, (PI / 2, PI), (0, 0))]

    def test_gene_count_mismatch(self):
        with pytest.raises(ValueError):
            Chromosome((0.5, 0.5), SCHEMA_CLASSICAL_1)

    def test_gene_out_of_bounds(self):
        with pytest.raises(ValueError):
            Chromosome((PI, 0.0), SCHEMA_PURE_1)

    def test_schema_gene_names(self):
        assert SCHEMA_MIXED2_1.gene_names == ("m1_pro", "m1_theta1", "m1_phi1", "m1_theta2", "m1_phi2")
        assert SCHEMA_PURE_2.gene_index(1, "phi") == 3


def _moves_for(kind, draw):
    if kind == "classical":
        return ClassicalMixed(draw(PROB))
    if kind == "pure":
        return PureQuantum.of(draw(ANGLE_T), draw(ANGLE_P))
    return MixedTwoUnitary.of(draw(PROB), (draw(ANGLE_T), draw(ANGLE_P)), (draw(ANGLE_T), draw(ANGLE_P)))


@given(hs.data(), hs.lists(hs.sampled_from(["classical", "pure", "mixed2"]), min_size=1, max_size=3))
def test_round_trip(data, kinds):
    moves = [_moves_for(k, data.draw) for k in kinds]
    chrom = encode(moves)
    assert chrom.schema == Schema(tuple(kinds))
    assert decode(chrom) == moves


@given(PROB, ANGLE_T, ANGLE_P)
def test_phi_leaves_diagonal_input_magnitudes_alone(s, t, p):
    rho = np.diag([s, 1 - s])
    a = evolve_pure(rho, make_unitary(StrategyParams(t, p))).m
    b = evolve_pure(rho, make_unitary(StrategyParams(t, 0.0))).m
    assert np.allclose(np.diag(a), np.diag(b), atol=1e-12)
    assert abs(abs(a[0, 1]) - abs(b[0, 1])) < 1e-12


@given(PROB, ANGLE_P)
def test_quarter_turn_halves_diagonal(s, p):
    out = evolve_pure(np.diag([s, 1 - s]), make_unitary(StrategyParams(PI / 4, p))).m
    assert np.allclose(np.diag(out).real, [0.5, 0.5], atol=1e-12)


def test_classical_two_schema():
    assert SCHEMA_CLASSICAL_2.n_genes == 2
    assert decode(Chromosome((0.1, 0.9), SCHEMA_CLASSICAL_2)) == [ClassicalMixed(0.1), ClassicalMixed(0.9)]
