import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dirac_ladder.algebra import (
    AffinePhaseFn,
    BracketMatrix,
    PhaseSpace,
    QuadHamiltonian,
    bracket,
    bracket_observable,
    default_tol,
    dirac_bracket_matrix,
    gram_matrix,
    numerical_rank,
)
from dirac_ladder.engine import legendre
from dirac_ladder.errors import ContractError, NotSecondClassError
from dirac_ladder.zoo import csm_particle

SPACE = PhaseSpace(("A0", "A1", "phi"))
J3 = BracketMatrix.canonical(3)


def fn(**coeffs):
    g = np.zeros(6, dtype=complex)
    const = coeffs.pop("const", 0.0)
    for label, c in coeffs.items():
        g[SPACE.index(label)] = c
    return AffinePhaseFn(g, const)


def csm_constraints(a, e):
    """Constraint pair written exactly as in the model's hand analysis."""
    psi1 = fn(p_A0=1)
    psi2 = fn(p_phi=1, A0=e * (a - 1))
    return psi1, psi2


def test_phase_space_structure():
    J = SPACE.J
    assert np.allclose(J, -J.T)
    assert np.allclose(J @ J, -np.eye(6))
    with pytest.raises(ContractError):
        PhaseSpace(("x", "x"))


def test_canonical_bracket_sign():
    assert bracket(SPACE.coordinate("A1"), SPACE.coordinate("p_A1"), J3) == 1


def test_bracket_of_constraint_pair():
    psi1, psi2 = csm_constraints(a=2, e=1)
    assert bracket(psi1, psi2, J3) == pytest.approx(-1)


@pytest.mark.parametrize("a,e", [(2, 1), (3, 2), (0.5, 1.5)])
def test_bracket_of_constraint_pair_general(a, e):
    psi1, psi2 = csm_constraints(a, e)
    assert bracket(psi1, psi2, J3) == pytest.approx(-e * (a - 1))


def test_bracket_with_itself_vanishes():
    f = fn(A0=1.3, p_phi=-2.0, const=4)
    assert bracket(f, f, J3) == 0


def test_gauge_pairs_with_first_class():
    chi, gauge = fn(p_A0=1), fn(A0=1)
    assert bracket(gauge, chi, J3) == 1


def test_bracket_dimension_mismatch():
    with pytest.raises(ContractError):
        bracket(AffinePhaseFn(np.ones(4)), AffinePhaseFn(np.ones(6)), J3)


def test_bracket_observable_gives_secondary_constraint():
    H, _ = legendre(csm_particle(2, 1))
    out = bracket_observable(fn(p_A0=1), H, J3)
    expected = fn(p_phi=1, A0=1)
    assert np.allclose(out.grad, expected.grad)
    assert out.const == 0


def test_bracket_observable_of_zero_hamiltonian():
    out = bracket_observable(fn(A1=2, p_phi=1), QuadHamiltonian(np.zeros((6, 6))), J3)
    assert out.is_zero()


def test_bracket_observable_respects_linear_term():
    # H = p: {q, H} = 1
    H = QuadHamiltonian(np.zeros((2, 2)), lin=[0, 1])
    out = bracket_observable(AffinePhaseFn([1, 0]), H, BracketMatrix.canonical(1))
    assert out.const == 1 and not np.any(out.grad)


# numerical_rank


def test_rank_of_diagonal():
    rank, null = numerical_rank(np.diag([0.0, 1.0, 1.0]))
    assert rank == 2
    assert null.shape == (3, 1)
    assert abs(abs(null[0, 0]) - 1) < 1e-12


def test_rank_of_zero_matrix():
    rank, null = numerical_rank(np.zeros((2, 2)))
    assert rank == 0
    assert null.shape == (2, 2)


def test_rank_of_empty_matrix():
    assert numerical_rank(np.zeros((0, 3)))[0] == 0


def test_rank_of_constraint_gram_matrix():
    C = gram_matrix([f.grad for f in csm_constraints(2, 1)], J3)
    rank, null = numerical_rank(C)
    assert rank == 2 and null.shape[1] == 0


def test_rank_rejects_bad_tolerance():
    with pytest.raises(ContractError):
        numerical_rank(np.eye(2), rel_tol=1.5)


def test_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("DIRAC_LADDER_TOL", "1e-6")
    assert default_tol() == 1e-6
    assert numerical_rank(np.diag([1.0, 1e-7]))[0] == 1
    monkeypatch.delenv("DIRAC_LADDER_TOL")
    assert numerical_rank(np.diag([1.0, 1e-7]))[0] == 2


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (4, 5), elements=st.floats(-5, 5)),
    st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3),
)
def test_rank_is_scale_invariant(A, c):
    A[3] = A[0] - 2 * A[1]  # guarantee some rank deficiency
    assert numerical_rank(c * A)[0] == numerical_rank(A)[0]


def test_null_basis_orthonormal_and_annihilated():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    rank, null = numerical_rank(A)
    assert rank == 3
    assert np.allclose(null.conj().T @ null, np.eye(3))
    assert np.allclose(A @ null, 0)


# brackets as a bilinear form


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, (2, 6), elements=st.floats(-10, 10)),
    arrays(np.float64, (6, 6), elements=st.floats(-10, 10)),
)
def test_bracket_antisymmetric(grads, W):
    W = BracketMatrix(W - W.T)
    f, g = AffinePhaseFn(grads[0]), AffinePhaseFn(grads[1])
    assert bracket(f, g, W) == pytest.approx(-bracket(g, f, W), abs=1e-9)


def test_bracket_matrix_rejects_symmetric():
    with pytest.raises(ContractError):
        BracketMatrix(np.eye(2))


def test_quad_hamiltonian_symmetrizes():
    H = QuadHamiltonian(np.array([[0.0, 2.0], [0.0, 0.0]]))
    assert np.allclose(H.hess, [[0, 1], [1, 0]])
    assert H([1, 1]) == pytest.approx(1)


# Dirac bracket


def test_dirac_bracket_values_at_a2():
    psi = csm_constraints(2, 1)
    D = dirac_bracket_matrix(J3, [p.grad for p in psi])
    c = SPACE.coordinate
    assert bracket(c("A0"), c("phi"), D) == pytest.approx(1.0)
    # covariant pi_1 is -p_A1 in canonical variables
    assert bracket(c("A1"), -c("p_A1"), D) == pytest.approx(-1.0)
    assert bracket(c("phi"), c("p_phi"), D) == pytest.approx(1.0)


def test_dirac_bracket_empty_set_is_canonical():
    assert dirac_bracket_matrix(J3, []) is J3


def test_dirac_bracket_requires_second_class():
    with pytest.raises(NotSecondClassError):
        dirac_bracket_matrix(J3, [fn(p_A0=1).grad, fn(p_phi=1).grad])


def test_dirac_bracket_matches_defining_formula():
    rng = np.random.default_rng(7)
    psi = [p.grad for p in csm_constraints(2.7, 1.3)]
    D = dirac_bracket_matrix(J3, psi)
    C = gram_matrix(psi, J3)
    Cinv = np.linalg.inv(C)
    for _ in range(5):
        f, g = (AffinePhaseFn(rng.standard_normal(6)) for _ in range(2))
        fa = np.array([bracket(f, AffinePhaseFn(p), J3) for p in psi])
        bg = np.array([bracket(AffinePhaseFn(p), g, J3) for p in psi])
        assert bracket(f, g, D) == pytest.approx(bracket(f, g, J3) - fa @ Cinv @ bg)


def test_dirac_bracket_annihilates_constraints():
    psi = [p.grad for p in csm_constraints(3.0, 2.0)]
    D = dirac_bracket_matrix(J3, psi)
    for g in psi:
        assert np.max(np.abs(g @ D.omega)) <= 1e-10 * np.max(np.abs(D.omega))
    assert np.allclose(D.omega, -D.omega.T)


def test_dirac_brackets_for_random_a():
    rng = np.random.default_rng(11)
    count = 0
    while count < 20:
        a, e = rng.uniform(-3, 5), rng.uniform(0.3, 3)
        if abs(a - 1) <= 0.1:
            continue
        count += 1
        H, prim = legendre(csm_particle(a, e))
        # the constraints as the engine produces them: primary plus its time derivative
        psi = [prim[0].fn.grad, bracket_observable(prim[0].fn, H, J3).grad]
        D = dirac_bracket_matrix(J3, psi)
        c = SPACE.coordinate
        assert bracket(c("A0"), c("phi"), D) == pytest.approx(1 / (e * (a - 1)), rel=1e-10)
        assert bracket(c("A1"), -c("p_A1"), D) == pytest.approx(-1, rel=1e-10)
        assert bracket(c("phi"), c("p_phi"), D) == pytest.approx(1, rel=1e-10)
