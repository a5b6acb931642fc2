"""Linear maps on M_d and conversions among their representations.

Four representations are supported, all immutable:

``TransferMatrix``
    ``phi(a) = sum_ab B[a,b] f_a tr(f_b^† a)``.  In the matrix-unit basis this
    is the ordinary superoperator, ``vec(phi(a)) = B @ vec(a)`` with
    row-stacking ``vec``.
``AForm``
    ``phi(a) = sum_ab A[a,b] f_a a f_b^†``.
``ChoiMatrix``
    ``C = sum_ij e_ij ⊗ phi(e_ij)``, unnormalized.
``KrausForm``
    ``phi(a) = sum_k K_k a K_k^†``.

The matrix-unit transfer matrix is the canonical form; every conversion goes
through it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import BasisError, DimensionError
from .matspace import (
    ATOL,
    OrthonormalBasis,
    as_square,
    dagger,
    dim_from_square,
    matrix_unit_basis,
    unvec,
    vec,
)


def _freeze(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _is_matrix_units(basis: OrthonormalBasis | None) -> bool:
    return basis is None or basis.kind == "matrix_units"


def _check_basis(basis: OrthonormalBasis | None, d: int) -> None:
    if basis is not None and basis.d != d:
        raise DimensionError(f"basis is for d={basis.d}, map has d={d}")


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    B: np.ndarray
    basis: OrthonormalBasis | None = None  # None means matrix units
    d: int = field(init=False)

    def __post_init__(self):
        B = as_square(self.B, "transfer matrix")
        object.__setattr__(self, "d", dim_from_square(B.shape[0]))
        object.__setattr__(self, "B", _freeze(B))
        _check_basis(self.basis, self.d)


@dataclass(frozen=True, eq=False)
class AForm:
    A: np.ndarray
    basis: OrthonormalBasis
    d: int = field(init=False)

    def __post_init__(self):
        A = as_square(self.A, "A-matrix")
        object.__setattr__(self, "d", dim_from_square(A.shape[0]))
        object.__setattr__(self, "A", _freeze(A))
        _check_basis(self.basis, self.d)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    C: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        C = as_square(self.C, "Choi matrix")
        object.__setattr__(self, "d", dim_from_square(C.shape[0]))
        object.__setattr__(self, "C", _freeze(C))


@dataclass(frozen=True, eq=False)
class KrausForm:
    ops: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        ops = np.array(self.ops, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or len(ops) == 0:
            raise DimensionError(f"Kraus operators need shape (k, d, d), got {ops.shape}")
        object.__setattr__(self, "d", ops.shape[1])
        object.__setattr__(self, "ops", _freeze(ops))


MapRep = Union[TransferMatrix, AForm, ChoiMatrix, KrausForm]


# --------------------------------------------------------------------------
# index permutations in the matrix-unit basis


def _four(m: np.ndarray, d: int) -> np.ndarray:
    return m.reshape(d, d, d, d)


def _flat(m4: np.ndarray) -> np.ndarray:
    d = m4.shape[0]
    return np.ascontiguousarray(m4).reshape(d * d, d * d)


def reshuffle(phi: TransferMatrix) -> ChoiMatrix:
    """Choi matrix from a matrix-unit transfer matrix by index permutation.

    ``C[(i,k),(j,l)] = B[(k,l),(i,j)]``, composite index ``(x,y) = x*d + y``.
    """
    if not _is_matrix_units(phi.basis):
        raise BasisError("reshuffle needs a matrix-unit transfer matrix; call to_transfer first")
    d = phi.d
    return ChoiMatrix(_flat(_four(phi.B, d).transpose(2, 0, 3, 1)))


def unreshuffle(choi: ChoiMatrix) -> TransferMatrix:
    """Inverse of :func:`reshuffle`."""
    d = choi.d
    return TransferMatrix(_flat(_four(choi.C, d).transpose(1, 3, 0, 2)))


def realign(m: np.ndarray) -> np.ndarray:
    """Involutive swap ``M'[(i,j),(k,l)] = M[(i,k),(j,l)]``.

    Maps the matrix-unit transfer matrix to the matrix-unit A-matrix and back.
    """
    m = as_square(m)
    d = dim_from_square(m.shape[0])
    return _flat(_four(m, d).transpose(0, 2, 1, 3))


# --------------------------------------------------------------------------
# conversions


def to_transfer(phi: MapRep) -> TransferMatrix:
    """Matrix-unit transfer matrix of any representation."""
    if isinstance(phi, TransferMatrix):
        if _is_matrix_units(phi.basis):
            return phi if phi.basis is None else TransferMatrix(phi.B)
        u = phi.basis.columns()
        return TransferMatrix(u @ phi.B @ u.conj().T)
    if isinstance(phi, ChoiMatrix):
        return unreshuffle(phi)
    if isinstance(phi, AForm):
        u = phi.basis.columns()
        a_units = u @ phi.A @ u.conj().T
        return TransferMatrix(realign(a_units))
    if isinstance(phi, KrausForm):
        B = sum(np.kron(k, k.conj()) for k in phi.ops)
        return TransferMatrix(B)
    raise TypeError(f"not a map representation: {type(phi).__name__}")


def transfer_in_basis(phi: MapRep, basis: OrthonormalBasis) -> TransferMatrix:
    """Transfer coefficients ``B_ab = (eps_ab, phi)`` with respect to ``basis``."""
    B = to_transfer(phi).B
    _check_basis(basis, dim_from_square(B.shape[0]))
    u = basis.columns()
    return TransferMatrix(u.conj().T @ B @ u, basis)


def to_choi(phi: MapRep) -> ChoiMatrix:
    if isinstance(phi, ChoiMatrix):
        return phi
    return reshuffle(to_transfer(phi))


def to_aform(phi: MapRep, basis: OrthonormalBasis | None = None) -> AForm:
    """A-matrix of ``phi`` with respect to ``basis`` (matrix units by default)."""
    T = to_transfer(phi)
    basis = matrix_unit_basis(T.d) if basis is None else basis
    _check_basis(basis, T.d)
    u = basis.columns()
    return AForm(u.conj().T @ realign(T.B) @ u, basis)


def conversion_kernel(f: OrthonormalBasis, g: OrthonormalBasis | None = None) -> np.ndarray:
    """Kernel ``K[(a,b),(m,n)] = tr(f_a^† f_m g_b g_n^†)`` linking A- and B-coefficients.

    ``vec(A) = K @ vec(B)`` and ``vec(B) = K @ vec(A)``.
    """
    g = f if g is None else g
    F = np.asarray(f.elems)
    G = np.asarray(g.elems)
    left = np.einsum("aqx,mqy->amxy", F.conj(), F)  # f_a^† f_m
    right = np.einsum("byr,nxr->bnyx", G, G.conj())  # g_b g_n^†
    k = np.einsum("amxy,bnyx->abmn", left, right)
    n = len(F)
    return k.reshape(n * n, n * n)


def aform_from_transfer_coeffs(B: np.ndarray, f: OrthonormalBasis, g=None) -> np.ndarray:
    B = np.asarray(B)
    return (conversion_kernel(f, g) @ B.reshape(-1)).reshape(B.shape)


def transfer_from_aform_coeffs(A: np.ndarray, f: OrthonormalBasis, g=None) -> np.ndarray:
    A = np.asarray(A)
    return (conversion_kernel(f, g) @ A.reshape(-1)).reshape(A.shape)


# --------------------------------------------------------------------------
# action


def _check_input(phi: MapRep, a) -> np.ndarray:
    a = as_square(a, "input")
    if a.shape[0] != phi.d:
        raise DimensionError(f"map acts on {phi.d}x{phi.d} matrices, got {a.shape}")
    return a


def apply(phi: MapRep, a) -> np.ndarray:
    """Evaluate ``phi(a)`` natively in whatever representation ``phi`` is held."""
    a = _check_input(phi, a)
    d = phi.d
    if isinstance(phi, TransferMatrix):
        if _is_matrix_units(phi.basis):
            return unvec(phi.B @ vec(a))
        F = phi.basis.elems
        coeffs = phi.B @ np.einsum("apq,pq->a", F.conj(), a)
        return np.einsum("a,apq->pq", coeffs, F)
    if isinstance(phi, ChoiMatrix):
        return np.einsum("ij,ikjl->kl", a, _four(phi.C, d))
    if isinstance(phi, AForm):
        F = phi.basis.elems
        # right[a, s, r] = sum_b A_ab conj(f_b[s, r]), i.e. (sum_b A_ab f_b^†)[r, s]
        right = np.einsum("ab,bsr->asr", phi.A, F.conj())
        return np.einsum("apq,qr,asr->ps", F, a, right)
    if isinstance(phi, KrausForm):
        K = phi.ops
        return np.einsum("kpq,qr,ksr->ps", K, a, K.conj())
    raise TypeError(f"not a map representation: {type(phi).__name__}")


def compose(phi: MapRep, psi: MapRep) -> TransferMatrix:
    """``phi ∘ psi``."""
    if phi.d != psi.d:
        raise DimensionError(f"cannot compose maps with d={phi.d} and d={psi.d}")
    return TransferMatrix(to_transfer(phi).B @ to_transfer(psi).B)


def dual(phi: MapRep) -> TransferMatrix:
    """Dual with respect to the trace pairing: ``tr(dual(x) a) == tr(x phi(a))``.

    For self-adjoint maps this coincides with the Hilbert-Schmidt adjoint,
    whose transfer matrix is ``B^†``.
    """
    T = to_transfer(phi)
    return TransferMatrix(_flat(_four(T.B, T.d).transpose(3, 2, 1, 0)))


def _tol(m: np.ndarray, atol: float) -> float:
    return atol * max(1.0, float(np.max(np.abs(m), initial=0.0)))


def is_selfadjoint(phi: MapRep, atol: float = ATOL) -> bool:
    """``phi(a^†) == phi(a)^†`` for all ``a``."""
    T = to_transfer(phi)
    d = T.d
    # conj(B)[(x,y),(p,q)] must equal B[(y,x),(q,p)]
    swapped = _four(T.B, d).transpose(1, 0, 3, 2)
    return bool(np.max(np.abs(_four(T.B.conj(), d) - swapped)) <= _tol(T.B, atol))


def is_unital(phi: MapRep, atol: float = ATOL) -> bool:
    eye = np.eye(phi.d)
    out = apply(phi, eye)
    return bool(np.max(np.abs(out - eye)) <= atol * max(1.0, float(np.max(np.abs(out)))))


def is_trace_preserving(phi: MapRep, atol: float = ATOL) -> bool:
    return is_unital(dual(phi), atol)


def map_inner(phi: MapRep, psi: MapRep, basis: OrthonormalBasis | None = None) -> complex:
    """``sum_a tr(phi(f_a)^† psi(f_a))`` over an orthonormal basis (matrix units by default)."""
    if phi.d != psi.d:
        raise DimensionError(f"maps have d={phi.d} and d={psi.d}")
    basis = matrix_unit_basis(phi.d) if basis is None else basis
    _check_basis(basis, phi.d)
    return complex(sum(np.vdot(apply(phi, f), apply(psi, f)) for f in basis))


def choi_inner(phi: MapRep, psi: MapRep) -> complex:
    """``tr(C_phi^† C_psi)``."""
    return complex(np.vdot(to_choi(phi).C, to_choi(psi).C))


def allclose_maps(phi: MapRep, psi: MapRep, atol: float = ATOL) -> bool:
    if phi.d != psi.d:
        return False
    return bool(np.max(np.abs(to_transfer(phi).B - to_transfer(psi).B)) <= atol)


# --------------------------------------------------------------------------
# standard maps and random ensembles


def identity_map(d: int) -> TransferMatrix:
    return TransferMatrix(np.eye(d * d))


def transpose_map(d: int) -> TransferMatrix:
    perm = np.eye(d * d).reshape(d, d, d, d).transpose(0, 1, 3, 2).reshape(d * d, d * d)
    return TransferMatrix(perm)


def conjugation_map(v) -> KrausForm:
    """``a -> v a v^†``."""
    v = as_square(v)
    return KrausForm(v[None])


def random_map(d: int, seed=None) -> TransferMatrix:
    """Transfer matrix with i.i.d. standard complex Gaussian entries."""
    rng = np.random.default_rng(seed)
    n = d * d
    return TransferMatrix(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_kraus(d: int, n_ops: int | None = None, seed=None) -> KrausForm:
    """CP map with ``n_ops`` Ginibre Kraus operators (``d`` by default)."""
    rng = np.random.default_rng(seed)
    n_ops = d if n_ops is None else n_ops
    shape = (n_ops, d, d)
    return KrausForm((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2 * d))


def random_unital_kraus(d: int, n_ops: int | None = None, seed=None) -> KrausForm:
    """Random CP unital map: Ginibre Kraus operators completed to ``sum K K^† = I``."""
    K = random_kraus(d, n_ops, seed).ops
    s = np.einsum("kpq,krq->pr", K, K.conj())
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return KrausForm(np.einsum("pq,kqr->kpr", inv_sqrt, K))
