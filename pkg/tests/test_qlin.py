"""Dense linear-algebra layer: partial traces, Schmidt, completion, certainty."""

import numpy as np
import pytest

from premeasure import qlin
from premeasure.qlin import BipartiteDims
from premeasure.tolerances import DIM_CAP

DIM_PAIRS = [(2, 2), (3, 2), (3, 4)]


def _random_density(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


@pytest.mark.parametrize("dim_a,dim_b", DIM_PAIRS)
def test_partial_trace_expectation_rule(dim_a, dim_b):
    # tr(rho_A X) = tr(rho (X (x) I)) and the mirrored rule for B
    rng = np.random.default_rng(42)
    dims = BipartiteDims(dim_a, dim_b)
    for _ in range(100):
        rho = _random_density(rng, dims.dim)
        x = qlin.random_hermitian(rng, dim_a)
        y = qlin.random_hermitian(rng, dim_b)
        rho_a = qlin.partial_trace(rho, dims, over="B")
        rho_b = qlin.partial_trace(rho, dims, over="A")
        lhs_a = np.trace(rho_a @ x)
        rhs_a = np.trace(rho @ qlin.tensor(x, np.eye(dim_b)))
        lhs_b = np.trace(rho_b @ y)
        rhs_b = np.trace(rho @ qlin.tensor(np.eye(dim_a), y))
        assert abs(lhs_a - rhs_a) <= 1e-10
        assert abs(lhs_b - rhs_b) <= 1e-10
        assert abs(np.trace(rho_a) - 1.0) <= 1e-10
        assert abs(np.trace(rho_b) - 1.0) <= 1e-10


@pytest.mark.parametrize("dim_a,dim_b", DIM_PAIRS)
def test_partial_trace_product_state(dim_a, dim_b):
    rng = np.random.default_rng(7)
    dims = BipartiteDims(dim_a, dim_b)
    for _ in range(100):
        a = qlin.random_ket(rng, dim_a)
        b = qlin.random_ket(rng, dim_b)
        rho = qlin.outer(qlin.tensor(a, b))
        assert np.linalg.norm(qlin.partial_trace(rho, dims, over="B")
                              - qlin.outer(a)) <= 1e-10
        assert np.linalg.norm(qlin.partial_trace(rho, dims, over="A")
                              - qlin.outer(b)) <= 1e-10


def test_partial_trace_hermitian_positive():
    rng = np.random.default_rng(3)
    dims = BipartiteDims(3, 4)
    for _ in range(100):
        rho = _random_density(rng, dims.dim)
        for over in ("A", "B"):
            marg = qlin.partial_trace(rho, dims, over=over)
            assert np.linalg.norm(marg - marg.conj().T) <= 1e-10
            assert np.linalg.eigvalsh(marg).min() >= -1e-10


def test_certainty_forms_agree():
    rng = np.random.default_rng(11)
    for _ in range(100):
        dim = int(rng.integers(2, 6))
        basis = qlin.random_unitary(rng, dim)
        r = int(rng.integers(1, dim))
        e = basis[:, :r] @ basis[:, :r].conj().T
        inside = e @ qlin.random_ket(rng, dim)
        if np.linalg.norm(inside) < 1e-3:
            continue
        inside = inside / np.linalg.norm(inside)
        certain, residual = qlin.is_certain(inside, e)
        assert certain and residual <= 1e-10
        generic = qlin.random_ket(rng, dim)
        p = float(np.real(generic.conj() @ e @ generic))
        if p < 1 - 1e-3:
            certain, residual = qlin.is_certain(generic, e)
            assert not certain
            assert abs(residual - (1 - p)) <= 1e-10


def test_schmidt_reconstruction():
    rng = np.random.default_rng(5)
    for _ in range(100):
        dims = BipartiteDims(int(rng.integers(2, 5)), int(rng.integers(2, 5)))
        ket = qlin.random_ket(rng, dims.dim)
        dec = qlin.schmidt(ket, dims)
        assert np.linalg.norm(dec.reconstruct() - ket) <= 1e-10
        assert abs(np.sum(dec.coefficients ** 2) - 1.0) <= 1e-10
        # left/right vector families are orthonormal
        for rows in (dec.left, dec.right):
            gram = rows.conj() @ rows.T
            assert np.linalg.norm(gram - np.eye(len(rows))) <= 1e-10


def test_schmidt_product_state_single_coefficient():
    rng = np.random.default_rng(9)
    dims = BipartiteDims(3, 2)
    ket = qlin.tensor(qlin.random_ket(rng, 3), qlin.random_ket(rng, 2))
    dec = qlin.schmidt(ket, dims)
    assert len(dec.coefficients) == 1
    assert abs(dec.coefficients[0] - 1.0) <= 1e-12


def test_orthonormal_range_basis_reconstructs_projector():
    rng = np.random.default_rng(13)
    for _ in range(50):
        dim = int(rng.integers(2, 6))
        u = qlin.random_unitary(rng, dim)
        r = int(rng.integers(1, dim + 1))
        p = u[:, :r] @ u[:, :r].conj().T
        basis = qlin.orthonormal_range_basis(p)
        assert len(basis) == r
        rebuilt = sum(np.outer(b, b.conj()) for b in basis)
        assert np.linalg.norm(rebuilt - p) <= 1e-10


def test_complete_to_unitary_deterministic_and_correct():
    rng = np.random.default_rng(17)
    dim = 6
    u_src = qlin.random_unitary(rng, dim)
    domain = [u_src[:, i] for i in range(2)]
    u_img = qlin.random_unitary(rng, dim)
    image = [u_img[:, i] for i in range(2)]
    u1 = qlin.complete_to_unitary(domain, image)
    u2 = qlin.complete_to_unitary(domain, image)
    assert np.array_equal(u1, u2)
    assert qlin.is_unitary(u1)
    for d, i in zip(domain, image):
        assert np.linalg.norm(u1 @ d - i) <= 1e-10


def test_complete_to_unitary_empty_is_identity():
    u = qlin.complete_to_unitary([], [], dim=4)
    assert np.array_equal(u, np.eye(4))


def test_tensor_rejects_oversized_products():
    a = np.eye(DIM_CAP)
    b = np.eye(2)
    with pytest.raises(ValueError):
        qlin.tensor(a, b)


def test_unit_norm_required():
    with pytest.raises(ValueError):
        qlin.require_unit(np.array([1.0, 1.0], dtype=complex))
