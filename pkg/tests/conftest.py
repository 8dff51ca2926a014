"""Shared helpers: random-scheme population used by the equivalence suites."""

from __future__ import annotations

import numpy as np
import pytest

from premeasure import qlin
from premeasure.fixtures import FIXTURES, _obs3, _pointer2, _pointer3
from premeasure.qlin import BipartiteDims, basis_ket, tensor
from premeasure.scheme import MeasurementScheme, build_premeasurement, make_scheme


def random_assignment_scheme(rng: np.random.Generator, dim_b: int = 2):
    """CC-valid scheme with random orthonormal targets inside each pointer range."""
    obs = _obs3()
    pointer = _pointer2() if dim_b == 2 else _pointer3()
    ready = basis_ket(dim_b, 0)
    dims = BipartiteDims(3, dim_b)
    assignment = []
    for k, e_k in enumerate(obs.projectors):
        rank = len(qlin.orthonormal_range_basis(e_k))
        range_basis = []
        f_basis = qlin.orthonormal_range_basis(pointer.projectors[k])
        for a in range(dims.dimA):
            for f in f_basis:
                range_basis.append(tensor(basis_ket(dims.dimA, a), f))
        u = qlin.random_unitary(rng, len(range_basis))
        targets = []
        for q in range(rank):
            t = np.zeros(dims.dim, dtype=complex)
            for i, b in enumerate(range_basis):
                t += u[i, q] * b
            targets.append(t)
        assignment.append(targets)
    return build_premeasurement(obs, pointer, ready, assignment), obs


def random_unitary_scheme(rng: np.random.Generator, dim_b: int = 2):
    """Generic interaction; almost surely violates every criterion."""
    obs = _obs3()
    pointer = _pointer2() if dim_b == 2 else _pointer3()
    dims = BipartiteDims(3, dim_b)
    u = qlin.random_unitary(rng, dims.dim)
    return make_scheme(dims, basis_ket(dim_b, 0), pointer, u), obs


def perturbed_scheme(rng: np.random.Generator, base: MeasurementScheme, obs,
                     eps: float):
    """base with interaction multiplied by exp(i*eps*H), H random Hermitian."""
    h = qlin.random_hermitian(rng, base.dims.dim)
    vals, vecs = np.linalg.eigh(h)
    u_pert = (vecs * np.exp(1j * eps * vals)) @ vecs.conj().T
    return make_scheme(base.dims, base.ready_state, base.pointer,
                       u_pert @ base.interaction), obs


def build_population(seed: int = 12345):
    """50 random-assignment builds + 50 random unitaries + 100 perturbations."""
    rng = np.random.default_rng(seed)
    population = []
    for i in range(50):
        population.append(random_assignment_scheme(rng, dim_b=2 if i % 2 else 3))
    for i in range(50):
        population.append(random_unitary_scheme(rng, dim_b=2 if i % 2 else 3))
    valid = population[:50]
    for i in range(100):
        base_s, base_obs = valid[i % 50]
        eps = 1e-6 if i % 2 == 0 else 1e-2
        population.append(perturbed_scheme(rng, base_s, base_obs, eps))
    return population


@pytest.fixture(scope="session")
def population():
    return build_population()


@pytest.fixture(scope="session")
def fixture_schemes():
    return {name: builder() for name, builder in FIXTURES.items()}
