"""Matrices over M_d: bases, Hilbert-Schmidt geometry and density operators.

Conventions used throughout the package:

* matrices are ``numpy.ndarray`` of dtype ``complex128``;
* matrix units are ordered row-major and zero-based, ``alpha = i*d + j``;
* ``vec`` stacks rows, so ``vec(a)[i*d + j] == a[i, j]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, SpecError

ATOL = 1e-9

BASIS_KINDS = (
    "matrix_units",
    "fourier_diagonal_plus_offdiag",
    "gell_mann_with_identity",
    "custom",
)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise SpecError(f"{name} has non-finite entries")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def dim_from_square(n: int) -> int:
    """Return ``d`` with ``d*d == n`` or raise."""
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"{n} is not a perfect square")
    return d


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    d = dim_from_square(v.shape[0])
    return v.reshape(d, d)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def op_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def psd_tol(m: np.ndarray, atol: float = ATOL) -> float:
    """Eigenvalue floor used when deciding positive semidefiniteness."""
    return atol * max(1.0, op_norm(m))


# --------------------------------------------------------------------------
# bases


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """``d*d`` matrices, HS-orthonormal, stacked in an array of shape (d², d, d)."""

    d: int
    elems: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        elems = np.asarray(self.elems, dtype=np.complex128)
        if elems.shape != (self.d * self.d, self.d, self.d):
            raise DimensionError(
                f"basis for d={self.d} needs shape {(self.d**2, self.d, self.d)}, got {elems.shape}"
            )
        if self.kind not in BASIS_KINDS:
            raise SpecError(f"unknown basis kind {self.kind!r}")
        elems.setflags(write=False)
        object.__setattr__(self, "elems", elems)

    def __len__(self):
        return len(self.elems)

    def __getitem__(self, i):
        return self.elems[i]

    def __iter__(self):
        return iter(self.elems)

    def columns(self) -> np.ndarray:
        """Unitary whose column ``alpha`` is ``vec(f_alpha)``."""
        return self.elems.reshape(len(self.elems), -1).T

    def gram(self) -> np.ndarray:
        u = self.columns()
        return u.conj().T @ u

    def is_orthonormal(self, atol: float = ATOL) -> bool:
        return bool(np.max(np.abs(self.gram() - np.eye(len(self)))) <= atol)


@dataclass(frozen=True, eq=False)
class TracelessFamily:
    d: int
    elems: np.ndarray

    def __post_init__(self):
        elems = np.asarray(self.elems, dtype=np.complex128)
        if elems.shape != (self.d * self.d - 1, self.d, self.d):
            raise DimensionError(f"traceless family for d={self.d} has shape {elems.shape}")
        elems.setflags(write=False)
        object.__setattr__(self, "elems", elems)

    def __len__(self):
        return len(self.elems)

    def __getitem__(self, i):
        return self.elems[i]

    def __iter__(self):
        return iter(self.elems)


def _check_dim(d, minimum=1):
    if int(d) != d or d < minimum:
        raise DimensionError(f"dimension must be an integer >= {minimum}, got {d}")
    return int(d)


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def matrix_unit_basis(d: int) -> OrthonormalBasis:
    d = _check_dim(d)
    elems = np.eye(d * d, dtype=np.complex128).reshape(d * d, d, d)
    return OrthonormalBasis(d, elems, "matrix_units")


def gell_mann_traceless(d: int) -> TracelessFamily:
    """Generalized Gell-Mann matrices, normalized to ``tr(h_a h_b^†) = δ_ab``.

    Order: for each pair ``i < j`` the symmetric then the antisymmetric
    element, followed by the ``d - 1`` diagonal ones.
    """
    d = _check_dim(d, 2)
    s = 1 / np.sqrt(2)
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[i, j] = sym[j, i] = s
            anti = np.zeros((d, d), dtype=np.complex128)
            anti[i, j] = -1j * s
            anti[j, i] = 1j * s
            out += [sym, anti]
    for k in range(1, d):
        diag = np.zeros(d)
        diag[:k] = 1.0
        diag[k] = -k
        out.append(np.diag(diag / np.sqrt(k * (k + 1))).astype(np.complex128))
    return TracelessFamily(d, np.array(out))


def gell_mann_basis(d: int) -> OrthonormalBasis:
    """``I/sqrt(d)`` followed by the traceless Gell-Mann family."""
    d = _check_dim(d)
    ident = (np.eye(d) / np.sqrt(d)).astype(np.complex128)[None]
    if d == 1:
        return OrthonormalBasis(1, ident, "gell_mann_with_identity")
    return OrthonormalBasis(
        d, np.concatenate([ident, gell_mann_traceless(d).elems]), "gell_mann_with_identity"
    )


def fourier_diagonal_basis(d: int) -> np.ndarray:
    """Diagonal matrices ``u_m = d^{-1/2} sum_j λ^{jm} e_jj`` with ``λ = exp(2πi/d)``.

    Returns an array of shape (d, d, d); ``result[m]`` is ``u_m``.
    """
    d = _check_dim(d)
    j = np.arange(d)
    phases = np.exp(2j * np.pi * np.outer(np.arange(d), j) / d)
    out = np.zeros((d, d, d), dtype=np.complex128)
    out[:, j, j] = phases / np.sqrt(d)
    return out


def fourier_basis(d: int) -> OrthonormalBasis:
    """The ``u_m`` on the diagonal slots and ``e_ij`` (i != j) elsewhere.

    Element at index ``m*d + n`` is ``u_m`` when ``m == n`` and ``e_mn`` otherwise.
    """
    d = _check_dim(d)
    u = fourier_diagonal_basis(d)
    elems = matrix_unit_basis(d).elems.copy()
    for m in range(d):
        elems[m * d + m] = u[m]
    return OrthonormalBasis(d, elems, "fourier_diagonal_plus_offdiag")


def basis_by_name(name: str, d: int) -> OrthonormalBasis:
    builders = {
        "matrix_units": matrix_unit_basis,
        "fourier_diagonal_plus_offdiag": fourier_basis,
        "gell_mann_with_identity": gell_mann_basis,
    }
    try:
        return builders[name](d)
    except KeyError:
        raise SpecError(f"unknown basis {name!r}") from None


# --------------------------------------------------------------------------
# Hilbert-Schmidt geometry and states


def hs_inner(a, b) -> complex:
    """``tr(a^† b)``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def is_hermitian(a, atol: float = ATOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= atol)


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(a))[0])


def is_psd(a, atol: float = ATOL) -> bool:
    a = as_square(a)
    return is_hermitian(a, atol) and min_eigenvalue(a) >= -psd_tol(a, atol)


def density_problems(rho, atol: float = ATOL) -> list[str]:
    """List the violated density-matrix invariants (empty when valid)."""
    m = np.asarray(rho, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return [f"not square: shape {m.shape}"]
    if not np.all(np.isfinite(m)):
        return ["non-finite entries"]
    problems = []
    if not is_hermitian(m, atol):
        problems.append("not Hermitian")
    elif min_eigenvalue(m) < -psd_tol(m, atol):
        problems.append(f"negative eigenvalue {min_eigenvalue(m):.3g}")
    if abs(np.trace(m) - 1) > atol:
        problems.append(f"trace {np.trace(m).real:.12g} != 1")
    return problems


def is_density(rho, atol: float = ATOL) -> bool:
    return not density_problems(rho, atol)


def check_density(rho, atol: float = ATOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising SpecError if it is not a state."""
    problems = density_problems(rho, atol)
    if problems:
        raise SpecError("invalid density matrix: " + "; ".join(problems))
    return np.asarray(rho, dtype=np.complex128)


def purity(rho) -> float:
    """``tr(rho^2)`` for Hermitian ``rho``."""
    m = np.asarray(rho, dtype=np.complex128)
    return float(np.real(np.vdot(m.conj().T, m)))


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128) / d


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random state ``G G^† / tr(G G^†)`` with ``G`` a d×rank complex Ginibre matrix.

    ``seed`` may be an int or a ``numpy.random.Generator``; full rank by default.
    """
    d = _check_dim(d)
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise DimensionError(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, d, rank)
    rho = g @ g.conj().T
    rho = hermitize(rho / np.trace(rho).real)
    return rho


def random_pure_state(d: int, seed=None) -> np.ndarray:
    """Haar-random unit vector in C^d."""
    rng = np.random.default_rng(seed)
    psi = _ginibre(rng, d, 1)[:, 0]
    return psi / np.linalg.norm(psi)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return np.outer(psi, psi.conj())


def is_orthonormal_family(elems: Sequence[np.ndarray], atol: float = ATOL) -> bool:
    u = np.asarray(elems, dtype=np.complex128).reshape(len(elems), -1)
    gram = u.conj() @ u.T
    return bool(np.max(np.abs(gram - np.eye(len(elems)))) <= atol)
