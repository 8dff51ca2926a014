"""Dense complex linear algebra substrate for bipartite quantum systems.

Kets are 1-D complex ndarrays, operators are square 2-D complex ndarrays.
The composite index convention is fixed once and for all: a joint ket on
A (x) B stores amplitude for (a, b) at index a * dimB + b, which is exactly
numpy's Kronecker-product ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import DIM_CAP, TOL_NORM, TOL_OP, TOL_PROB, TOL_VEC


@dataclass(frozen=True)
class BipartiteDims:
    """Dimensions of the two factors of a composite space."""

    dimA: int
    dimB: int

    def __post_init__(self):
        if self.dimA < 1 or self.dimB < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.dimA * self.dimB


def as_ket(x) -> np.ndarray:
    ket = np.asarray(x, dtype=complex)
    if ket.ndim != 1:
        raise ValueError("a ket must be one-dimensional")
    return ket


def as_op(x) -> np.ndarray:
    op = np.asarray(x, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("an operator must be a square matrix")
    return op


def basis_ket(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def require_unit(ket: np.ndarray, tol: float = TOL_NORM) -> np.ndarray:
    ket = as_ket(ket)
    if abs(np.linalg.norm(ket) - 1.0) > tol:
        raise ValueError("ket is not normalized")
    return ket


def is_hermitian(op: np.ndarray, tol: float = TOL_OP) -> bool:
    op = as_op(op)
    return np.linalg.norm(op - op.conj().T, 2) <= tol


def is_unitary(op: np.ndarray, tol: float = TOL_OP) -> bool:
    op = as_op(op)
    return np.linalg.norm(op.conj().T @ op - np.eye(op.shape[0]), 2) <= tol


def is_projector(op: np.ndarray, tol: float = TOL_OP) -> bool:
    """Idempotent within tol and Hermitian within tol."""
    op = as_op(op)
    return is_hermitian(op, tol) and np.linalg.norm(op @ op - op, 2) <= tol


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two kets or two operators (A-major ordering)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("tensor expects two kets or two operators")
    if a.shape[0] * b.shape[0] > DIM_CAP:
        raise ValueError(f"composite dimension exceeds the cap of {DIM_CAP}")
    return np.kron(a, b)


def outer(ket: np.ndarray, other: np.ndarray | None = None) -> np.ndarray:
    """|ket><other| (|ket><ket| when other is omitted)."""
    ket = as_ket(ket)
    other = ket if other is None else as_ket(other)
    return np.outer(ket, other.conj())


def partial_trace(x: np.ndarray, dims: BipartiteDims, over: str) -> np.ndarray:
    """Trace out one factor of a composite operator.

    `over` is "A" or "B"; the result acts on the retained factor.
    """
    x = as_op(x)
    if x.shape[0] != dims.dim:
        raise ValueError("operator dimension does not match the factor dims")
    t = x.reshape(dims.dimA, dims.dimB, dims.dimA, dims.dimB)
    if over == "B":
        return np.trace(t, axis1=1, axis2=3)
    if over == "A":
        return np.trace(t, axis1=0, axis2=2)
    raise ValueError("subsystem tag must be 'A' or 'B'")


def orthonormal_range_basis(projector: np.ndarray, tol: float = 1e-8) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the range of a projector.

    Gram-Schmidt over the projector's columns in index order, so identical
    inputs always give identical bases.
    """
    projector = as_op(projector)
    rank = int(round(np.trace(projector).real))
    basis: list[np.ndarray] = []
    for j in range(projector.shape[0]):
        v = projector[:, j].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        for b in basis:  # second pass for numerical stability
            v -= b * (b.conj() @ v)
        n = np.linalg.norm(v)
        if n > tol:
            basis.append(v / n)
        if len(basis) == rank:
            break
    return basis


def extend_to_basis(vectors: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Extend an orthonormal set to a full basis of C^dim.

    New vectors come from Gram-Schmidt over the standard basis in index
    order, keeping the construction deterministic.
    """
    basis = [as_ket(v) for v in vectors]
    for j in range(dim):
        if len(basis) == dim:
            break
        v = basis_ket(dim, j)
        for b in basis:
            v -= b * (b.conj() @ v)
        for b in basis:
            v -= b * (b.conj() @ v)
        n = np.linalg.norm(v)
        if n > 1e-7:
            basis.append(v / n)
    if len(basis) != dim:
        raise ValueError("could not extend the set to a full basis")
    return basis


def _check_orthonormal(kets: list[np.ndarray], what: str) -> None:
    for i, a in enumerate(kets):
        for j in range(i + 1):
            g = a.conj() @ kets[j]
            target = 1.0 if i == j else 0.0
            if abs(g - target) > 1e-9:
                raise ValueError(f"{what} kets are not orthonormal at pair ({j}, {i})")


def complete_to_unitary(domain_kets: list[np.ndarray], image_kets: list[np.ndarray],
                        dim: int | None = None) -> np.ndarray:
    """Unitary U with U @ domain_kets[i] = image_kets[i], deterministically.

    Both sets are extended to full bases by Gram-Schmidt over the standard
    basis in index order and the leftovers are paired in order, so the
    completion is unique given the inputs. Empty constraint lists yield the
    identity on C^dim (dim is then required).
    """
    domain_kets = [as_ket(v) for v in domain_kets]
    image_kets = [as_ket(v) for v in image_kets]
    if len(domain_kets) != len(image_kets):
        raise ValueError("domain and image must contain the same number of kets")
    if not domain_kets:
        if dim is None:
            raise ValueError("dim is required when the constraint lists are empty")
        return np.eye(dim, dtype=complex)
    if dim is None:
        dim = domain_kets[0].shape[0]
    if any(v.shape[0] != dim for v in domain_kets + image_kets):
        raise ValueError("all kets must share one dimension")
    _check_orthonormal(domain_kets, "domain")
    _check_orthonormal(image_kets, "image")
    full_domain = extend_to_basis(domain_kets, dim)
    full_image = extend_to_basis(image_kets, dim)
    u = np.zeros((dim, dim), dtype=complex)
    for d, m in zip(full_domain, full_image):
        u += np.outer(m, d.conj())
    return u


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Bi-orthonormal decomposition of a bipartite unit ket.

    coefficients are non-negative and descending; left/right vectors are
    rows of the stored arrays. The source ket is
    sum_i coefficients[i] * kron(left[i], right[i]).
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dims: BipartiteDims

    def reconstruct(self) -> np.ndarray:
        ket = np.zeros(self.dims.dim, dtype=complex)
        for c, l, r in zip(self.coefficients, self.left, self.right):
            ket += c * np.kron(l, r)
        return ket


def schmidt(ket: np.ndarray, dims: BipartiteDims, cutoff: float = 1e-12) -> SchmidtDecomposition:
    """Schmidt decomposition of a unit ket on A (x) B.

    Coefficients below `cutoff` are dropped.
    """
    ket = require_unit(ket)
    if ket.shape[0] != dims.dim:
        raise ValueError("ket dimension does not match the factor dims")
    m = ket.reshape(dims.dimA, dims.dimB)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s > cutoff
    return SchmidtDecomposition(
        coefficients=s[keep],
        left=u[:, keep].T.copy(),
        right=vh[keep, :].copy(),
        dims=dims,
    )


def is_certain(ket: np.ndarray, e: np.ndarray,
               prob_tol: float = TOL_PROB, vec_tol: float = TOL_VEC) -> tuple[bool, float]:
    """Whether the event `e` holds with certainty in the pure state `ket`.

    Returns (verdict, residual) with residual = 1 - <ket|e|ket>. The verdict
    from the probability form is cross-checked against the invariance form
    ||e ket - ket|| <= vec_tol; inputs sitting in the narrow region where the
    two forms disagree are rejected rather than silently resolved.
    """
    ket = require_unit(ket)
    e = as_op(e)
    if not is_projector(e):
        raise ValueError("event must be a projector")
    prob = (ket.conj() @ e @ ket).real
    residual = 1.0 - prob
    by_prob = prob >= 1.0 - prob_tol
    by_invariance = np.linalg.norm(e @ ket - ket) <= vec_tol
    if by_prob != by_invariance:
        raise ValueError("certainty predicates disagree inside the tolerance gap")
    return by_prob, residual


def random_ket(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2
