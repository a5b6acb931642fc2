import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import choi_oracle, random_matrix
from posmap.errors import BasisError, DimensionError
from posmap.maprep import (
    AForm,
    KrausForm,
    TransferMatrix,
    aform_from_transfer_coeffs,
    allclose_maps,
    apply,
    choi_inner,
    compose,
    conjugation_map,
    conversion_kernel,
    dual,
    identity_map,
    is_selfadjoint,
    is_trace_preserving,
    is_unital,
    map_inner,
    random_kraus,
    random_map,
    reshuffle,
    to_aform,
    to_choi,
    to_transfer,
    transfer_from_aform_coeffs,
    transfer_in_basis,
    transpose_map,
    unreshuffle,
)
from posmap.matspace import fourier_basis, gell_mann_basis, matrix_unit, matrix_unit_basis
from posmap.stateclasses import ball_map, flip, pinching

seeds = st.integers(0, 2**31 - 1)
dims = st.sampled_from([2, 3, 4])


def all_reps(phi):
    d = phi.d
    return [
        to_transfer(phi),
        to_choi(phi),
        to_aform(phi),
        to_aform(phi, gell_mann_basis(d)),
        to_aform(phi, fourier_basis(d)),
        transfer_in_basis(phi, gell_mann_basis(d)),
    ]


def test_apply_identity_and_transpose():
    a = random_matrix(3, 1)
    np.testing.assert_array_equal(apply(identity_map(3), a), a)
    np.testing.assert_array_equal(apply(transpose_map(3), a), a.T)


def test_apply_pinching_d2():
    pin = pinching([matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)])
    np.testing.assert_array_equal(apply(pin, np.array([[1, 2], [3, 4]])), np.diag([1, 4]))


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(identity_map(2), np.eye(3))


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_apply_representation_independent(d, seed):
    phi = random_map(d, seed)
    a = random_matrix(d, seed + 1)
    ref = apply(phi, a)
    for rep in all_reps(phi):
        assert np.max(np.abs(apply(rep, a) - ref)) <= 1e-10, type(rep).__name__


def test_kraus_apply_matches_definition():
    k = random_kraus(3, 4, seed=5)
    a = random_matrix(3, 6)
    expected = sum(K @ a @ K.conj().T for K in k.ops)
    np.testing.assert_allclose(apply(k, a), expected, atol=1e-12)
    np.testing.assert_allclose(apply(to_transfer(k), a), expected, atol=1e-12)


def test_identity_conversions():
    for d in (2, 3):
        np.testing.assert_array_equal(to_transfer(identity_map(d)).B, np.eye(d * d))
        C = to_choi(identity_map(d)).C
        np.testing.assert_allclose(C, choi_oracle(identity_map(d)), atol=0)
        w = np.linalg.eigvalsh(C)
        np.testing.assert_allclose(w, [0] * (d * d - 1) + [d], atol=1e-12)


def test_transpose_choi_is_flip():
    C = to_choi(transpose_map(2)).C
    np.testing.assert_array_equal(C, flip(2))
    np.testing.assert_allclose(np.linalg.eigvalsh(C), [-1, 1, 1, 1], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(dims, seeds)
def test_reshuffle_matches_apply_oracle(d, seed):
    phi = random_map(d, seed)
    C = reshuffle(phi).C
    assert np.max(np.abs(C - choi_oracle(phi))) <= 1e-12
    np.testing.assert_array_equal(unreshuffle(reshuffle(phi)).B, phi.B)


def test_reshuffle_identity_map():
    d = 3
    expected = sum(np.kron(matrix_unit(d, i, j), matrix_unit(d, i, j)) for i in range(d) for j in range(d))
    np.testing.assert_array_equal(reshuffle(identity_map(d)).C, expected)


def test_reshuffle_refuses_other_bases():
    phi = transfer_in_basis(random_map(2, 0), gell_mann_basis(2))
    with pytest.raises(BasisError):
        reshuffle(phi)


def test_matrix_unit_aform_is_index_swap_of_transfer():
    # A_{ij,kl} = B_{ik,jl}
    d = 3
    phi = random_map(d, 4)
    A = to_aform(phi).A
    B = phi.B
    for i, j, k, l in np.ndindex(d, d, d, d):
        assert A[i * d + j, k * d + l] == B[i * d + k, j * d + l]


@pytest.mark.parametrize("basis_fn", [matrix_unit_basis, gell_mann_basis, fourier_basis])
@pytest.mark.parametrize("d", [2, 3])
def test_general_basis_coefficient_relations(basis_fn, d):
    basis = basis_fn(d)
    phi = random_map(d, 10 * d)
    B = transfer_in_basis(phi, basis).B
    A = to_aform(phi, basis).A
    assert np.max(np.abs(aform_from_transfer_coeffs(B, basis) - A)) <= 1e-10
    assert np.max(np.abs(transfer_from_aform_coeffs(A, basis) - B)) <= 1e-10
    K = conversion_kernel(basis)
    assert np.max(np.abs(K @ K - np.eye(len(K)))) <= 1e-10


def test_coefficients_by_inner_products():
    # A_ab = (gamma_ab, phi), B_ab = (eps_ab, phi) with the map inner product
    d = 2
    basis = gell_mann_basis(d)
    phi = random_map(d, 3)
    A = to_aform(phi, basis).A
    B = transfer_in_basis(phi, basis).B
    for a in range(d * d):
        for b in range(d * d):
            fa, fb = basis[a], basis[b]
            gamma = TransferMatrix(np.kron(fa, fb.conj()))  # a -> fa a fb^†
            eps = TransferMatrix(np.outer(fa.reshape(-1), fb.conj().reshape(-1)))  # a -> fa tr(fb^† a)
            assert abs(map_inner(gamma, phi) - A[a, b]) <= 1e-12
            assert abs(map_inner(eps, phi) - B[a, b]) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(dims, seeds)
def test_round_trips(d, seed):
    phi = random_map(d, seed)
    B = phi.B
    for rep in all_reps(phi):
        assert np.max(np.abs(to_transfer(rep).B - B)) <= 1e-10
    gm = gell_mann_basis(d)
    A = to_aform(phi, gm)
    assert np.max(np.abs(to_aform(to_transfer(A), gm).A - A.A)) <= 1e-10


def test_compose():
    phi = random_map(2, 1)
    assert allclose_maps(compose(identity_map(2), phi), phi, 1e-14)
    assert allclose_maps(compose(transpose_map(3), transpose_map(3)), identity_map(3), 0)
    pin = pinching([matrix_unit(3, k, k) for k in range(3)])
    assert allclose_maps(compose(pin, pin), pin, 1e-14)
    psi = random_map(2, 2)
    a = random_matrix(2, 3)
    np.testing.assert_allclose(apply(compose(phi, psi), a), apply(phi, apply(psi, a)), atol=1e-10)
    with pytest.raises(DimensionError):
        compose(identity_map(2), identity_map(3))


@settings(max_examples=30, deadline=None)
@given(dims, seeds)
def test_dual_pairing(d, seed):
    phi = random_map(d, seed)
    phi_star = dual(phi)
    a, x = random_matrix(d, seed + 1), random_matrix(d, seed + 2)
    lhs = np.trace(apply(phi_star, x) @ a)
    rhs = np.trace(x @ apply(phi, a))
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))
    assert allclose_maps(dual(phi_star), phi, 0)


def test_dual_is_adjoint_only_for_selfadjoint_maps():
    k = random_kraus(3, seed=2)
    B = to_transfer(k).B
    np.testing.assert_allclose(dual(k).B, B.conj().T, atol=1e-14)
    generic = random_map(3, 2)
    assert not is_selfadjoint(generic)
    assert np.max(np.abs(dual(generic).B - generic.B.conj().T)) > 1e-3


def test_dual_examples():
    assert allclose_maps(dual(identity_map(3)), identity_map(3), 0)
    pin = pinching([matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)])
    assert allclose_maps(dual(pin), pin, 0)


def test_predicates():
    ident = identity_map(3)
    assert is_selfadjoint(ident) and is_unital(ident) and is_trace_preserving(ident)
    v = conjugation_map(np.diag([1, 2]))
    assert is_selfadjoint(v)
    assert not is_unital(v)
    assert not is_trace_preserving(v)
    ball = ball_map(4)
    assert is_selfadjoint(ball) and is_unital(ball) and is_trace_preserving(ball)
    assert not is_selfadjoint(random_map(2, 0))


@settings(max_examples=30, deadline=None)
@given(dims, seeds)
def test_tp_iff_dual_unital(d, seed):
    k = random_kraus(d, seed=seed)
    # make it trace preserving by completing sum K^† K = I
    s = sum(K.conj().T @ K for K in k.ops)
    w, v = np.linalg.eigh(s)
    tp = KrausForm(np.array([K @ (v / np.sqrt(w)) @ v.conj().T for K in k.ops]))
    assert is_trace_preserving(tp) and is_unital(dual(tp))
    assert is_trace_preserving(k) == is_unital(dual(k))


def test_map_inner_examples():
    for d in (2, 3):
        assert map_inner(identity_map(d), identity_map(d)) == pytest.approx(d * d, abs=1e-12)
    assert map_inner(identity_map(2), transpose_map(2)) == pytest.approx(2, abs=1e-12)
    phi, psi = random_map(3, 1), random_map(3, 2)
    units = map_inner(phi, psi)
    assert abs(map_inner(phi, psi, gell_mann_basis(3)) - units) <= 1e-12 * (1 + abs(units))
    assert abs(choi_inner(phi, psi) - units) <= 1e-10 * (1 + abs(units))


def test_aform_hermitian_for_selfadjoint_maps():
    k = random_kraus(3, seed=8)
    for basis in (matrix_unit_basis(3), gell_mann_basis(3), fourier_basis(3)):
        A = to_aform(k, basis).A
        assert np.max(np.abs(A - A.conj().T)) <= 1e-10
        assert np.linalg.eigvalsh((A + A.conj().T) / 2)[0] >= -1e-10


def test_immutability():
    phi = random_map(2, 0)
    with pytest.raises(ValueError):
        phi.B[0, 0] = 1
    with pytest.raises(AttributeError):
        phi.B = np.eye(4)
