"""State sets generated by unital CP maps, their membership tests and witnesses.

Covers the projections ``a -> sum_k p_k tr(omega_k a)``, pinchings, the
Werner and isotropic projector pairs on C^n ⊗ C^n, and the map whose dual
image is the purity ball ``tr(rho^2) <= 1/(d-1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InBall, NotAProjection, SpecError
from .maprep import MapRep, TransferMatrix, apply, compose, dual, to_transfer
from .matspace import (
    ATOL,
    as_square,
    check_density,
    hermitize,
    is_hermitian,
    matrix_unit,
    maximally_mixed,
    op_norm,
    purity,
    random_density,
)


def _outer_op(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Transfer matrix of ``a -> left * tr(right a)``."""
    # vec(left) vec(right^T)^T, since tr(right a) = vec(right^T) . vec(a)
    return np.outer(left.reshape(-1), right.T.reshape(-1))


def check_projectors(p: Sequence[np.ndarray], atol: float = ATOL) -> np.ndarray:
    """Validate a resolution of the identity into orthogonal projectors."""
    if len(p) == 0:
        raise SpecError("need at least one projector")
    p = np.array([as_square(x, "projector") for x in p])
    d = p.shape[1]
    for k, pk in enumerate(p):
        if not is_hermitian(pk, atol):
            raise SpecError(f"p[{k}] is not Hermitian")
        if np.max(np.abs(pk @ pk - pk)) > atol:
            raise SpecError(f"p[{k}] is not idempotent")
        for m in range(k + 1, len(p)):
            if np.max(np.abs(pk @ p[m])) > atol:
                raise SpecError(f"p[{k}] and p[{m}] are not orthogonal")
    if np.max(np.abs(p.sum(axis=0) - np.eye(d))) > atol:
        raise SpecError("projectors do not sum to the identity")
    return p


@dataclass(frozen=True, eq=False)
class ProjectionSpec:
    """Orthogonal projectors ``p`` and states ``omega`` with ``tr(omega_a p_b) = δ_ab``."""

    p: np.ndarray
    omega: np.ndarray
    atol: float = ATOL
    d: int = field(init=False)

    def __post_init__(self):
        p = check_projectors(self.p, self.atol)
        if len(self.omega) != len(p):
            raise SpecError(f"{len(p)} projectors but {len(self.omega)} states")
        omega = np.array([check_density(w, self.atol) for w in self.omega])
        if omega.shape[1:] != p.shape[1:]:
            raise DimensionError(f"states have shape {omega.shape[1:]}, projectors {p.shape[1:]}")
        duality = np.einsum("apq,bqp->ab", omega, p)
        if np.max(np.abs(duality - np.eye(len(p)))) > self.atol:
            raise SpecError("duality condition tr(omega_a p_b) = delta_ab violated")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "d", p.shape[1])

    @classmethod
    def normalized(cls, p: Sequence[np.ndarray], atol: float = ATOL) -> "ProjectionSpec":
        """Spec with ``omega_k = p_k / tr(p_k)``."""
        p = check_projectors(p, atol)
        return cls(p, np.array([pk / np.trace(pk).real for pk in p]), atol)


def projection_map(spec: ProjectionSpec) -> TransferMatrix:
    """``a -> sum_k p_k tr(omega_k a)``."""
    return TransferMatrix(sum(_outer_op(pk, wk) for pk, wk in zip(spec.p, spec.omega)))


def projection_dual(spec: ProjectionSpec) -> TransferMatrix:
    """``rho -> sum_k omega_k tr(p_k rho)``."""
    return TransferMatrix(sum(_outer_op(wk, pk) for pk, wk in zip(spec.p, spec.omega)))


def normalized_projection_map(p: Sequence[np.ndarray], atol: float = ATOL) -> TransferMatrix:
    return projection_map(ProjectionSpec.normalized(p, atol))


def invariant_state(spec: ProjectionSpec, c: Sequence[float], atol: float = ATOL) -> np.ndarray:
    """Convex combination ``sum_k c_k omega_k``; a fixed point of the dual projection."""
    c = np.asarray(c, dtype=float).reshape(-1)
    if len(c) != len(spec.omega):
        raise SpecError(f"need {len(spec.omega)} weights, got {len(c)}")
    if np.any(c < -atol) or abs(c.sum() - 1) > atol:
        raise SpecError("weights must be non-negative and sum to 1")
    return np.einsum("k,kpq->pq", c, spec.omega)


def pinching(p: Sequence[np.ndarray], atol: float = ATOL) -> TransferMatrix:
    """``a -> sum_k p_k a p_k``."""
    p = check_projectors(p, atol)
    return TransferMatrix(sum(np.kron(pk, pk.T) for pk in p))


# --------------------------------------------------------------------------
# bipartite families on C^n ⊗ C^n


def flip(n: int) -> np.ndarray:
    """``F = sum_ij e_ij ⊗ e_ji``."""
    return sum(np.kron(matrix_unit(n, i, j), matrix_unit(n, j, i)) for i in range(n) for j in range(n))


def _check_n(n: int) -> int:
    if int(n) != n or n < 2:
        raise DimensionError(f"local dimension must be >= 2, got {n}")
    return int(n)


def isotropic_projectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(p'_1, p'_0)``: the maximally entangled projector and its complement."""
    n = _check_n(n)
    p1 = sum(np.kron(matrix_unit(n, i, j), matrix_unit(n, i, j)) for i in range(n) for j in range(n)) / n
    return p1, np.eye(n * n) - p1


def werner_projectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(p''_0, p''_1)``: symmetric and antisymmetric subspace projectors."""
    n = _check_n(n)
    F = flip(n)
    eye = np.eye(n * n)
    return (eye + F) / 2, (eye - F) / 2


def werner_map(n: int) -> TransferMatrix:
    return normalized_projection_map(werner_projectors(n))


def isotropic_map(n: int) -> TransferMatrix:
    return normalized_projection_map(isotropic_projectors(n))


# --------------------------------------------------------------------------
# purity ball


def ball_map(d: int) -> TransferMatrix:
    """``a -> a/(d-1) + (1 - 1/(d-1)) I tr(a)/d``.

    Its dual image is the set of states with purity at most ``1/(d-1)``;
    for ``d = 2`` that is every state.
    """
    if int(d) != d or d < 2:
        raise DimensionError(f"ball map needs d >= 2, got {d}")
    d = int(d)
    t = 1 / (d - 1)
    eye = np.eye(d)
    return TransferMatrix(t * np.eye(d * d) + (1 - t) * _outer_op(eye, maximally_mixed(d)))


def ball_radius_sq(d: int) -> float:
    return 1 / (d - 1)


def ball_membership(rho, d: int | None = None, atol: float = ATOL) -> bool:
    rho = check_density(rho, atol)
    d = rho.shape[0] if d is None else d
    if rho.shape != (d, d):
        raise DimensionError(f"state has shape {rho.shape}, expected {(d, d)}")
    return purity(rho) <= ball_radius_sq(d) + atol


def cone_checks(a, atol: float = ATOL) -> dict[str, bool]:
    a = as_square(a)
    if not is_hermitian(a, atol):
        raise SpecError("cone membership is defined for Hermitian matrices only")
    tr = float(np.trace(a).real)
    tr_sq = float(np.real(np.vdot(a, a)))
    scale = max(1.0, tr * tr)
    return {"trace_nonneg": tr >= -atol, "trace_sq": tr_sq <= tr * tr + atol * scale}


def cone_membership(a, d: int | None = None, atol: float = ATOL) -> bool:
    """``tr a >= 0`` and ``tr a^2 <= (tr a)^2``: the dual cone of the purity ball."""
    a = as_square(a)
    if d is not None and a.shape != (d, d):
        raise DimensionError(f"matrix has shape {a.shape}, expected {(d, d)}")
    return all(cone_checks(a, atol).values())


def sample_ball_states(d: int, n: int, seed=None) -> np.ndarray:
    """Random states pushed onto (or kept inside) the purity ball.

    Hilbert-Schmidt random states outside the ball are mixed with ``I/d``
    just enough to land on its boundary.
    """
    rng = np.random.default_rng(seed)
    r2 = ball_radius_sq(d)
    mixed = maximally_mixed(d)
    out = np.empty((n, d, d), dtype=np.complex128)
    for k in range(n):
        sigma = random_density(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        excess = purity(sigma) - 1 / d
        if purity(sigma) > r2 and excess > 0:
            # purity(t sigma + (1-t) I/d) = 1/d + t^2 (purity(sigma) - 1/d)
            t = math.sqrt((r2 - 1 / d) / excess)
            sigma = t * sigma + (1 - t) * mixed
        out[k] = sigma
    return out


@dataclass(frozen=True, eq=False)
class Witness:
    a: np.ndarray
    value: float
    cone: dict
    sampled_min: float | None = None
    seed: int | None = None


def ball_witness(rho, d: int | None = None, n_samples: int = 1000, seed: int = 0,
                 atol: float = ATOL) -> Witness:
    """Witness ``a ∝ c I - rho`` with ``c = sqrt(tr(rho^2)/(d-1))``.

    By Cauchy-Schwarz ``tr(a sigma) >= 0`` for every ball state ``sigma``
    while ``tr(a rho) = c - tr(rho^2) < 0``. The matrix is left unscaled so
    that a pure state gives ``sqrt(1/(d-1)) - 1``; it is checked against
    ``n_samples`` sampled ball states.

    Raises:
        InBall: if ``rho`` already lies in the ball.
    """
    rho = check_density(rho, atol)
    d = rho.shape[0] if d is None else d
    if ball_membership(rho, d, atol):
        raise InBall(f"purity {purity(rho):.12g} <= {ball_radius_sq(d):.12g}; no witness exists")
    c = math.sqrt(purity(rho) * ball_radius_sq(d))
    a = hermitize(c * np.eye(d) - rho)
    value = float(np.real(np.vdot(a.conj().T, rho)))
    sampled_min = None
    if n_samples:
        sigmas = sample_ball_states(d, n_samples, seed)
        sampled_min = float(np.min(np.real(np.einsum("pq,kqp->k", a, sigmas))))
    return Witness(a, value, cone_checks(a, atol), sampled_min, seed)


# --------------------------------------------------------------------------
# membership for projections


@dataclass(frozen=True, eq=False)
class Membership:
    member: bool
    residual: float
    witness: np.ndarray | None = None
    witness_value: complex | None = None

    def __bool__(self):
        return self.member


def projection_membership(rho, pi: MapRep, atol: float = ATOL) -> Membership:
    """Is ``rho`` in the dual image of the projection ``pi``?

    Members are exactly the fixed points of ``dual(pi)``. For a non-member,
    with ``x = rho - dual(pi)(rho)``, the witness is ``a = x - pi(x)`` scaled
    to unit operator norm: it lies in ``(I - pi)(M)`` and
    ``tr(rho a) ∝ tr(x^2) > 0``. For self-dual ``pi``, ``a`` is ``x`` itself.

    Raises:
        NotAProjection: if ``pi ∘ pi != pi``.
    """
    B = to_transfer(pi).B
    if np.max(np.abs(compose(pi, pi).B - B)) > atol * max(1.0, float(np.max(np.abs(B)))):
        raise NotAProjection("map is not idempotent")
    rho = check_density(rho, atol)
    image = apply(dual(pi), rho)
    diff = rho - image
    residual = float(np.max(np.abs(diff)))
    if residual <= atol:
        return Membership(True, residual)
    x = hermitize(diff)
    a = hermitize(x - apply(pi, x))
    a = a / op_norm(a)
    value = complex(np.trace(rho @ a))
    return Membership(False, residual, a, value)
