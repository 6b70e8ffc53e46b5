import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pronynd import (
    ExponentialSumModel,
    InsufficientWindowError,
    LatticeSignal,
    NonCommutingError,
    Polynomial,
    RankNotStabilizedError,
    VarietyPoint,
    ZeroComponentError,
    admissible_set,
    annihilator_check,
    box,
    commutation_residual,
    frequencies_from_points,
    hankel_matrix,
    joint_eigen,
    kernel_basis,
    match_models,
    multiplication_matrices,
    numeric_rank,
    random_model,
    reconstruct,
    recover_coefficients,
    sample,
    simplex,
    sis_dimension,
)
from pronynd.pronysolve import largest_kernel_order

from conftest import LN2


def _cosine_to_span(v, polys, A):
    B = np.column_stack([p.to_vector(A) for p in polys])
    Q, _ = np.linalg.qr(B)
    x = v.to_vector(A)
    return np.linalg.norm(Q.conj().T @ x) / np.linalg.norm(x)


# -- kernel --------------------------------------------------------------------


def test_kernel_e1(e1_signal):
    kd = kernel_basis(e1_signal, 1)
    assert kd.rank == 2
    assert list(kd.normal_set) == [(0,), (1,)]
    assert len(kd.kernel_polys) == 1
    p = kd.kernel_polys[0]
    p = p / p.coeff((2,))
    z = Polynomial.variable(0, 1)
    assert p.allclose(z ** 2 - 5 * z + 6, atol=1e-10)


def test_kernel_e2_contains_line(e2_signal):
    kd = kernel_basis(e2_signal, 1)
    assert kd.rank == 2
    target = Polynomial({(0, 0): 1, (1, 0): -2, (0, 1): 1}, 2)
    assert _cosine_to_span(target, kd.kernel_polys, simplex(2, 2)) > 1 - 1e-8


def test_kernel_e2_square_matrix_oracle(e2_signal):
    # 1 - 2 z1 + z2 is a null vector of the 3x3 matrix H_{Gamma_1, Gamma_1}
    G = simplex(1, 2)
    H = hankel_matrix(e2_signal, G, G)
    v = np.array([{(0, 0): 1, (1, 0): -2, (0, 1): 1}[a] for a in G])
    assert np.allclose(H.data @ v, 0)


def test_kernel_constant_signal():
    f = LatticeSignal(box([0], [3]), np.ones(4))
    for k in (0, 1):
        kd = kernel_basis(f, k)
        assert kd.rank == 1
        assert list(kd.normal_set) == [(0,)]
        z = Polynomial.variable(0, 1)
        assert _cosine_to_span(z - 1, kd.kernel_polys, simplex(k + 1, 1)) > 1 - 1e-12


def test_kernel_rank_not_stabilized(e3_signal):
    # H_{Gamma_0, Gamma_0} = [0] but H_{Gamma_0, Gamma_1} = [0, 2]
    with pytest.raises(RankNotStabilizedError):
        kernel_basis(e3_signal, 0)


# -- multiplication matrices ---------------------------------------------------


def test_multiplication_matrix_e1(e1_signal):
    (M,) = multiplication_matrices(kernel_basis(e1_signal, 1))
    assert np.allclose(M, [[0, -6], [1, 5]], atol=1e-9)


def test_multiplication_matrices_e2(e2_signal):
    M1, M2 = multiplication_matrices(kernel_basis(e2_signal, 1))
    assert np.allclose(sorted(np.linalg.eigvals(M1).real), [1, 2])
    assert np.allclose(sorted(np.linalg.eigvals(M2).real), [1, 3])


def test_multiplication_matrix_constant():
    f = LatticeSignal(box([0], [3]), np.ones(4))
    (M,) = multiplication_matrices(kernel_basis(f, 1))
    assert np.allclose(M, [[1]])


# -- joint eigenvalues ---------------------------------------------------------


def test_joint_eigen_e1(e1_signal):
    pts = joint_eigen(multiplication_matrices(kernel_basis(e1_signal, 1)))
    thetas = sorted(p.theta[0].real for p in pts)
    assert np.allclose(thetas, [2, 3])
    assert [p.weight for p in pts] == [1, 1]


def test_joint_eigen_e2(e2_signal):
    pts = joint_eigen(multiplication_matrices(kernel_basis(e2_signal, 1)))
    got = sorted(tuple(np.round(p.theta.real, 8)) for p in pts)
    assert got == [(1.0, 1.0), (2.0, 3.0)]


def test_joint_eigen_e3(e3_signal):
    kd = kernel_basis(e3_signal, 2)
    # (z - 2)^2 = 4 - 4z + z^2 annihilates the rows of H_{Gamma_1, Gamma_2}
    H = hankel_matrix(e3_signal, simplex(1, 1), simplex(2, 1)).data
    assert np.allclose(H @ [4, -4, 1], 0)
    (pt,) = joint_eigen(multiplication_matrices(kd))
    assert pt.weight == 2
    assert abs(pt.theta[0] - 2) < 1e-8
    assert [q.support().elements for q in pt.mult_basis] == [((0,),), ((1,),)]


def test_joint_eigen_rejects_noncommuting():
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(NonCommutingError):
        joint_eigen([A, A.T])


def test_frequencies_branch():
    w = frequencies_from_points([np.array([2.0]), np.array([1.0, 1.0]), np.array([-1.0])])
    assert w[0][0] == pytest.approx(LN2)
    assert np.allclose(w[1], 0)
    assert w[2][0] == pytest.approx(1j * np.pi)
    with pytest.raises(ZeroComponentError):
        frequencies_from_points([np.array([0.0, 1.0])])


# -- coefficients --------------------------------------------------------------


def test_recover_coefficients_e1(e1_signal):
    pts = [VarietyPoint(np.array([2.0]), [Polynomial.constant(1, 1)]),
           VarietyPoint(np.array([3.0]), [Polynomial.constant(1, 1)])]
    m, res = recover_coefficients(e1_signal, pts, box([0], [1]))
    # oracle: [[1, 1], [2, 3]] c = (2, 5)
    c = np.linalg.solve([[1, 1], [2, 3]], [2, 5])
    assert np.allclose(c, [1, 1])
    got = sorted((w[0].real, p.coeff((0,))) for w, p in m.terms)
    assert np.allclose([g[1] for g in got], c)
    assert res < 1e-12


def test_recover_coefficients_zero_signal():
    f = LatticeSignal.zeros(box([0], [3]))
    pts = [VarietyPoint(np.array([2.0]), [Polynomial.constant(1, 1)])]
    m, _ = recover_coefficients(f, pts)
    assert len(m) == 0


def test_recover_coefficients_e3(e3_signal):
    z = Polynomial.variable(0, 1)
    pts = [VarietyPoint(np.array([2.0]), [Polynomial.constant(1, 1), z], weight=2)]
    m, res = recover_coefficients(e3_signal, pts, box([0], [2]))
    # brute-force oracle: rows (q(D) x^a)(2) for q = 1, z
    V = np.array([[1, 2, 4], [0, 1, 4]], dtype=float)
    c, *_ = np.linalg.lstsq(V.T, [0, 2, 8], rcond=None)
    assert np.allclose(c, [0, 2])
    (term,) = m.terms
    assert term[1].allclose(z, atol=1e-10)


# -- end to end ----------------------------------------------------------------


def test_reconstruct_e1(e1_signal, e1):
    rec = reconstruct(e1_signal)
    _, fe, ce = match_models(rec.model, e1)
    assert fe < 1e-8 and ce < 1e-8
    assert rec.rank == 2 and rec.k_star == 1


def test_reconstruct_e2(e2_signal, e2):
    rec = reconstruct(e2_signal)
    _, fe, ce = match_models(rec.model, e2)
    assert fe < 1e-8 and ce < 1e-8


def test_reconstruct_e3(e3_signal, e3):
    rec = reconstruct(e3_signal)
    _, fe, ce = match_models(rec.model, e3)
    assert fe < 1e-8 and ce < 1e-8
    assert [p.weight for p in rec.points] == [2]


def test_reconstruct_window_too_small():
    f = LatticeSignal(box([0], [0]), [1.0])
    with pytest.raises(InsufficientWindowError) as exc:
        reconstruct(f)
    assert exc.value.missing == [(1,)]


def test_reconstruct_multiple_points_in_two_variables():
    z1, z2 = Polynomial.variable(0, 2), Polynomial.variable(1, 2)
    m = ExponentialSumModel(2, [([0.1, -0.2], z1), ([0.3j, 0.2], z2 + 2)])
    rec = reconstruct(sample(m, simplex(9, 2)))
    _, fe, ce = match_models(rec.model, m)
    assert fe < 1e-8 and ce < 1e-8
    assert all(not p.heuristic for p in rec.points)


def test_reconstruct_is_deterministic(e2_signal):
    a = reconstruct(e2_signal).to_json()
    b = reconstruct(e2_signal).to_json()
    assert a == b


def test_largest_kernel_order():
    assert largest_kernel_order(box([0], [4]), 1) == 1
    assert largest_kernel_order(simplex(9, 2), 2) == 4
    assert largest_kernel_order(box([0], [1]), 1) == 0


def test_annihilator_examples(e1_signal):
    z = Polynomial.variable(0, 1)
    assert annihilator_check(e1_signal, z ** 2 - 5 * z + 6) < 1e-10
    assert annihilator_check(e1_signal, z - 2, box([0], [0])) == pytest.approx(1.0)
    assert annihilator_check(e1_signal, Polynomial.zero(1)) == 0.0
    assert list(admissible_set(e1_signal.window, z - 2)) == [(0,), (1,), (2,), (3,)]


# -- properties ----------------------------------------------------------------


models = st.tuples(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 6))


@settings(max_examples=30, deadline=None)
@given(models)
def test_pipeline_invariants(params):
    seed, s, n = params
    m = random_model(s, n, seed=seed)
    f = sample(m, simplex(2 * n + 1, s))
    rec = reconstruct(f)
    kd = rec.kernel
    # kernel polynomials and their monomial multiples annihilate f (the
    # acceptance suite checks all of them; a spread-out sample suffices here)
    scale = np.max(np.abs(f.values))
    step = max(1, len(kd.kernel_polys) // 6)
    for p in kd.kernel_polys[::step]:
        assert annihilator_check(f, p) <= 1e-9 * scale
        for j in range(s):
            assert annihilator_check(f, p * Polynomial.variable(j, s)) <= 1e-9 * scale
    Ms = multiplication_matrices(kd)
    assert commutation_residual(Ms) <= 1e-8
    # rank bookkeeping
    r = numeric_rank(hankel_matrix(f, simplex(n, s), simplex(n, s)))
    assert len(kd.normal_set) == r == sis_dimension(m) == sum(p.weight for p in rec.points)
    # spectra of the M_j are the coordinates of the nodes
    for j, M in enumerate(Ms):
        ev = np.sort_complex(np.linalg.eigvals(M))
        th = np.sort_complex(np.array([p.theta[j] for p in rec.points]))
        assert np.allclose(ev, th, atol=1e-6)
    _, fe, ce = match_models(rec.model, m)
    assert fe <= 1e-6 and ce <= 1e-6


@pytest.mark.parametrize("s", [2, 3])
@pytest.mark.parametrize("seed", range(3))
def test_multiple_points_in_several_variables(s, seed):
    m = random_model(s, 2, degree=1, seed=seed)
    n = sis_dimension(m)
    rec = reconstruct(sample(m, simplex(2 * n + 1, s)))
    _, fe, ce = match_models(rec.model, m)
    assert fe < 1e-8 and ce < 1e-6
    # a generic affine coefficient has the shift hull {1, p}
    assert [p.weight for p in rec.points] == [2, 2]


@pytest.mark.parametrize("s", [2, 3])
@pytest.mark.parametrize("seed", range(2))
def test_larger_multiplicity_in_several_variables(s, seed):
    m = random_model(s, 2, degree=2, seed=seed)
    n = sis_dimension(m)
    rec = reconstruct(sample(m, simplex(9, s)))
    _, fe, ce = match_models(rec.model, m)
    assert fe < 1e-8 and ce < 1e-5
    assert sum(p.weight for p in rec.points) == n
    assert all(not p.heuristic for p in rec.points)
