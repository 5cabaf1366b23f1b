import numpy as np
import pytest
from hypothesis import given, settings

from nctorus import algebra, oracle
from nctorus.algebra import DeformationMatrix
from nctorus.errors import ArgumentError, PreconditionError

from conftest import seeds


REP = oracle.ClockShiftRep(n_rep=17, m=3, phi=0.137)


def draw(seed, count, n=2):
    rng = np.random.default_rng(seed)
    return [algebra.random_element(rng, REP.theta, n, radius=3) for _ in range(count)]


def test_weyl_relation():
    C, S = REP.clock(), REP.shift()
    np.testing.assert_allclose(C @ S, np.exp(2j * np.pi * 3 / 17) * S @ C, atol=1e-14)
    for matrix in (C, S):
        np.testing.assert_allclose(matrix @ matrix.conj().T, np.eye(17), atol=1e-14)
    assert abs(REP.central()) == pytest.approx(1)


def test_shift_moves_basis_vectors_forward():
    S = REP.shift()
    assert S[1, 0] == 1 and S[0, 16] == 1


def test_generator_relation_in_representation():
    u1, u2, _ = algebra.generators(REP.theta)
    left = oracle.represent(algebra.mul(u1, u2), REP)
    right = oracle.represent(algebra.mul(u2, u1), REP)
    mask = np.abs(right) > 1e-12
    np.testing.assert_allclose(left[mask] / right[mask], np.exp(2j * np.pi * 3 / 17), atol=1e-13)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_represent_is_a_star_homomorphism(seed):
    a, b = draw(seed, 2)
    product = oracle.represent(algebra.mul(a, b), REP)
    expected = oracle.represent(a, REP) @ oracle.represent(b, REP)
    assert np.abs(product - expected).max() <= 1e-12 * algebra.l1(a) * algebra.l1(b)
    star = oracle.represent(algebra.adjoint(a), REP)
    assert np.abs(star - oracle.represent(a, REP).conj().T).max() <= 1e-12 * algebra.l1(a)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_oracle_trace_matches_trace(seed):
    a, = draw(seed, 1)
    assert abs(oracle.oracle_trace(a, REP) - algebra.trace(a)) <= 1e-13 * algebra.l1(a)


def test_oracle_trace_of_one():
    assert oracle.oracle_trace(algebra.one(REP.theta, 2), REP) == pytest.approx(2)


def test_aliasing_is_rejected():
    u = algebra.monomial(REP.theta, 1, (17, 0, 0))
    with pytest.raises(PreconditionError):
        oracle.oracle_trace(u, REP)


def test_theta_mismatch_is_rejected():
    with pytest.raises(PreconditionError):
        oracle.represent(algebra.one(DeformationMatrix(theta12=0.5), 1), REP)
    with pytest.raises(PreconditionError):
        oracle.represent(algebra.one(DeformationMatrix(3 / 17, 0.1, 0.0), 1), REP)


def test_representation_parameters_are_checked():
    with pytest.raises(ArgumentError):
        oracle.ClockShiftRep(n_rep=12, m=4)
    with pytest.raises(ArgumentError):
        oracle.ClockShiftRep(n_rep=0)


@pytest.mark.parametrize("seed", range(200))
def test_product_star_and_trace_agree_with_clock_shift_matrices(seed):
    a, b = draw(seed, 2, n=1 + seed % 2)
    scale = algebra.l1(a) * algebra.l1(b)
    rep_a, rep_b = oracle.represent(a, REP), oracle.represent(b, REP)

    assert np.abs(oracle.represent(algebra.mul(a, b), REP) - rep_a @ rep_b).max() <= 1e-12 * scale
    assert np.abs(oracle.represent(algebra.adjoint(a), REP) - rep_a.conj().T).max() <= 1e-12 * algebra.l1(a)
    assert abs(oracle.oracle_trace(algebra.mul(a, b), REP) - algebra.trace(algebra.mul(a, b))) <= 1e-12 * scale
