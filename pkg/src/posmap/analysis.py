"""Positivity certificates, map spectra and bi-orthonormal decompositions."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonDiagonalizable, NotCP, NumericalError, SpecError
from .maprep import (
    KrausForm,
    MapRep,
    TransferMatrix,
    apply,
    compose,
    to_choi,
    to_transfer,
    transpose_map,
)
from .matspace import (
    ATOL,
    as_square,
    check_density,
    gell_mann_traceless,
    hermitize,
    is_hermitian,
    matrix_unit,
    op_norm,
    projector,
    psd_tol,
    random_pure_state,
)


# --------------------------------------------------------------------------
# positivity


@dataclass(frozen=True)
class CPCheck:
    """Outcome of a complete-positivity test; truthy iff the map is CP."""

    cp: bool
    min_eigenvalue: float
    reason: str | None = None

    def __bool__(self):
        return self.cp


def is_completely_positive(phi: MapRep, atol: float = ATOL) -> CPCheck:
    """Certify complete positivity from the spectrum of the Choi matrix."""
    C = to_choi(phi).C
    min_eig = float(np.linalg.eigvalsh(hermitize(C))[0])
    if not is_hermitian(C, atol * max(1.0, float(np.max(np.abs(C))))):
        return CPCheck(False, min_eig, "map is not self-adjoint (Choi matrix not Hermitian)")
    tol = psd_tol(C, atol)
    if min_eig < -tol:
        return CPCheck(False, min_eig, f"Choi matrix has eigenvalue {min_eig:.6g} < -{tol:.3g}")
    return CPCheck(True, min_eig)


def is_completely_copositive(phi: MapRep, atol: float = ATOL) -> bool:
    return bool(is_completely_positive(compose(phi, transpose_map(phi.d)), atol))


def transfer_positivity_operator(phi: MapRep) -> np.ndarray:
    """``sum_ab B_ab e_a^T ⊗ e_b^†`` over matrix units.

    This equals the transpose of the matrix-unit A-matrix, so for self-adjoint
    maps it is PSD exactly when the Choi matrix is.
    """
    T = to_transfer(phi)
    d = T.d
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d * d):
        ea = matrix_unit(d, *divmod(a, d))
        for b in range(d * d):
            if T.B[a, b] != 0:
                eb = matrix_unit(d, *divmod(b, d))
                out += T.B[a, b] * np.kron(ea.T, eb.conj().T)
    return out


def kraus_from_choi(phi: MapRep, atol: float = ATOL) -> KrausForm:
    """Kraus operators from the spectral factorization of the Choi matrix.

    Each eigenpair ``(mu, v)`` with ``mu`` above the rank tolerance yields
    ``K = sqrt(mu) * unvec(v).T``, so that ``phi(a) = sum K a K^†``.

    Raises:
        NotCP: if the Choi matrix has an eigenvalue below ``-psd_tol``.
    """
    check = is_completely_positive(phi, atol)
    if not check:
        raise NotCP(check.reason)
    C = hermitize(to_choi(phi).C)
    d = phi.d
    w, v = np.linalg.eigh(C)
    keep = w > psd_tol(C, atol)
    if not np.any(keep):
        # zero map
        return KrausForm(np.zeros((1, d, d)))
    ops = [math.sqrt(mu) * v[:, k].reshape(d, d).T for k, mu in zip(np.flatnonzero(keep), w[keep])]
    return KrausForm(np.array(ops[::-1]))


@dataclass(frozen=True, eq=False)
class FalsifyResult:
    """Either a pure state ``counterexample`` whose image is not PSD, or None."""

    counterexample: np.ndarray | None
    min_eigenvalue: float
    trials: int
    seed: int | None

    @property
    def found(self) -> bool:
        return self.counterexample is not None


def positivity_falsify(phi: MapRep, n_samples: int = 1000, seed=0, atol: float = ATOL) -> FalsifyResult:
    """Search for a pure state mapped outside the PSD cone.

    Finding one proves ``phi`` is not positive; not finding one proves nothing.
    """
    if n_samples < 1:
        raise SpecError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = math.inf
    for trial in range(1, n_samples + 1):
        psi = random_pure_state(phi.d, rng)
        out = apply(phi, projector(psi))
        lo = float(np.linalg.eigvalsh(hermitize(out))[0])
        worst = min(worst, lo)
        hermitian = is_hermitian(out, atol * max(1.0, float(np.max(np.abs(out)))))
        if not hermitian or lo < -psd_tol(out, atol):
            return FalsifyResult(psi, lo, trial, seed)
    return FalsifyResult(None, worst, n_samples, seed)


# --------------------------------------------------------------------------
# spectra


def _phase(z: complex) -> float:
    return cmath.phase(z) % (2 * math.pi)


def sort_eigenvalues(values) -> np.ndarray:
    """Order by decreasing modulus, then by phase in [0, 2π).

    Keys are rounded so that solver noise does not reorder ties.
    """
    values = np.asarray(values, dtype=np.complex128)

    def key(z):
        z = complex(round(z.real, 12), round(z.imag, 12))
        return (-round(abs(z), 10), round(_phase(z), 10) % round(2 * math.pi, 10))

    return np.array(sorted(values, key=key), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    pf_bound: float
    bound_satisfied: bool


def eigenvalues(phi: MapRep) -> np.ndarray:
    try:
        return np.linalg.eigvals(to_transfer(phi).B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


def pf_bound(phi: MapRep) -> float:
    """Operator norm of ``phi(I)``."""
    return op_norm(apply(phi, np.eye(phi.d)))


def spectrum(phi: MapRep, atol: float = ATOL) -> SpectrumReport:
    lam = sort_eigenvalues(eigenvalues(phi))
    radius = float(np.max(np.abs(lam)))
    bound = pf_bound(phi)
    return SpectrumReport(lam, radius, bound, radius <= bound + atol)


@dataclass(frozen=True, eq=False)
class BiorthDecomp:
    """``phi(a) = sum_k lambdas[k] f[k] tr(g[k] a)`` with ``tr(f[j] g[k]) = δ_jk``."""

    lambdas: np.ndarray
    f: np.ndarray
    g: np.ndarray
    condition_number: float

    def gram(self) -> np.ndarray:
        # tr(f_j g_k) = sum_pq f_j[p,q] g_k[q,p]
        return np.einsum("jpq,kqp->jk", self.f, self.g)

    def __call__(self, a) -> np.ndarray:
        coeffs = np.einsum("kqp,pq->k", self.g, np.asarray(a, dtype=np.complex128))
        return np.einsum("k,kpq->pq", self.lambdas * coeffs, self.f)


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    parent = list(range(len(values)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(values)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def biorthonormal_decomposition(
    phi: MapRep, cond_max: float = 1e8, cluster_tol: float = 1e-8
) -> BiorthDecomp:
    """Eigen-matrices of ``phi`` and of its dual, normalized to ``tr(f_j g_k) = δ_jk``.

    Right eigenvectors of the transfer matrix give ``f``; the rows of the
    inverse eigenvector matrix give ``g``, so that ``dual(phi)(g_k) = λ_k g_k``.
    Eigenvalues closer than ``cluster_tol`` are treated as one eigenspace,
    which is orthonormalized before inversion.

    Raises:
        NonDiagonalizable: if the eigenvector matrix has condition number
            above ``cond_max`` or a degenerate cluster is not a full eigenspace.
    """
    T = to_transfer(phi)
    d, B = T.d, T.B
    try:
        lam, V = np.linalg.eig(B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    V = V / np.linalg.norm(V, axis=0)
    scale = max(1.0, float(np.max(np.abs(B))))
    for idx in _clusters(lam, cluster_tol):
        if len(idx) == 1:
            continue
        u, s, _ = np.linalg.svd(V[:, idx], full_matrices=False)
        if s[-1] * cond_max < s[0]:
            raise NonDiagonalizable(
                f"eigenvalue {lam[idx[0]]:.6g} has algebraic multiplicity {len(idx)} "
                f"but a deficient eigenspace"
            )
        mean = complex(np.mean(lam[idx]))
        if np.max(np.abs(B @ u - mean * u)) > 1e-6 * scale:
            raise NonDiagonalizable(f"cluster at {mean:.6g} is not an eigenspace")
        V[:, idx] = u
        lam[idx] = mean
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > cond_max:
        raise NonDiagonalizable(f"eigenvector condition number {cond:.3g} exceeds {cond_max:.3g}")
    W = np.linalg.inv(V)
    f = V.T.reshape(-1, d, d)
    g = W.reshape(-1, d, d).transpose(0, 2, 1)
    return BiorthDecomp(lam, np.ascontiguousarray(f), np.ascontiguousarray(g), cond)


def adapted_invariant_basis(d: int, omega, atol: float = ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Bi-orthonormal pair built from a state ``omega`` and the Gell-Mann family.

    The last elements are ``g = omega`` and ``f = I``; the others are
    ``g_k = h_k`` and ``f_k = h_k^† - I tr(omega h_k^†)``.
    Returns arrays ``(f, g)`` of shape (d², d, d).
    """
    omega = check_density(omega, atol)
    if omega.shape != (d, d):
        raise SpecError(f"state has shape {omega.shape}, expected {(d, d)}")
    eye = np.eye(d, dtype=np.complex128)
    if d == 1:
        return eye[None], omega[None]
    h = gell_mann_traceless(d).elems
    h_dag = h.conj().transpose(0, 2, 1)
    shift = np.einsum("pq,kqp->k", omega, h_dag)
    f = h_dag - shift[:, None, None] * eye
    return np.concatenate([f, eye[None]]), np.concatenate([h, omega[None]])


# --------------------------------------------------------------------------
# the circulant/Schur example map


@dataclass(frozen=True, eq=False)
class ExampleMapSpec:
    """Weights ``alpha`` (a probability vector) and a PSD ``beta`` with unit diagonal."""

    alpha: np.ndarray
    beta: np.ndarray
    atol: float = ATOL

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        beta = as_square(self.beta, "beta")
        d = len(alpha)
        if d < 1 or beta.shape != (d, d):
            raise SpecError(f"alpha has length {d} but beta has shape {beta.shape}")
        if np.any(alpha < -self.atol) or abs(alpha.sum() - 1) > self.atol:
            raise SpecError("alpha must be non-negative and sum to 1")
        if np.max(np.abs(np.diag(beta) - 1)) > self.atol:
            raise SpecError("beta must have unit diagonal")
        if not is_hermitian(beta, self.atol) or np.linalg.eigvalsh(hermitize(beta))[0] < -psd_tol(beta, self.atol):
            raise SpecError("beta must be positive semidefinite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def d(self) -> int:
        return len(self.alpha)


def example_map(spec: ExampleMapSpec) -> TransferMatrix:
    """``a -> sum_{i≠j} α_{(j-i) mod d} e_ij^† a e_ij + α_0 sum_ij β_ij e_ii a e_jj``."""
    d = spec.d
    B = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            e_ij = matrix_unit(d, i, j)
            if i != j:
                # vec(L a R) = kron(L, R.T) vec(a)
                B += spec.alpha[(j - i) % d] * np.kron(e_ij.T, e_ij.T)
            B += spec.alpha[0] * spec.beta[i, j] * np.kron(matrix_unit(d, i, i), matrix_unit(d, j, j).T)
    return TransferMatrix(B)


def circulant_eigenvalues(alpha) -> np.ndarray:
    """``rho_m = sum_j alpha_j λ^{-jm}``, ``λ = exp(2πi/d)``, by direct summation."""
    alpha = np.asarray(alpha, dtype=float)
    d = len(alpha)
    return np.array(
        [sum(alpha[j] * cmath.exp(-2j * math.pi * j * m / d) for j in range(d)) for m in range(d)]
    )


def predicted_eigenvalues(spec: ExampleMapSpec) -> np.ndarray:
    d = spec.d
    off = [spec.alpha[0] * spec.beta[i, j] for i in range(d) for j in range(d) if i != j]
    return np.concatenate([circulant_eigenvalues(spec.alpha), np.array(off, dtype=np.complex128)])


def random_example_spec(d: int, seed=None) -> ExampleMapSpec:
    """Dirichlet ``alpha`` and ``beta`` = Gram matrix of random unit vectors."""
    rng = np.random.default_rng(seed)
    alpha = rng.dirichlet(np.ones(d))
    vecs = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    beta = vecs @ vecs.conj().T
    np.fill_diagonal(beta, 1.0)
    return ExampleMapSpec(alpha, hermitize(beta))


def match_multisets(a, b) -> tuple[np.ndarray, float]:
    """Optimal pairing of two equal-size complex multisets.

    Returns ``b`` reordered to line up with ``a`` and the largest pair distance.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise SpecError(f"multisets differ in size: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = b[cols[np.argsort(rows)]]
    return matched, float(np.max(np.abs(a - matched), initial=0.0))
