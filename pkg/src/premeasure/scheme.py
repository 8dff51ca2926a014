"""Measurement schemes: the (ready state, pointer, interaction) triple.

A scheme carries exactly one ready state; the subspace of all admissible
ready states for a given interaction is a separate analysis
(ready_subspace).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .observables import SpectralForm
from .qlin import BipartiteDims
from .tolerances import TOL_PROB, TOL_VEC


@dataclass(frozen=True)
class MeasurementScheme:
    """Ready instrument state, pointer observable, and interaction unitary."""

    dims: BipartiteDims
    ready_state: np.ndarray
    pointer: SpectralForm
    interaction: np.ndarray


def make_scheme(dims: BipartiteDims, ready_state, pointer: SpectralForm,
                interaction) -> MeasurementScheme:
    ready_state = qlin.require_unit(ready_state)
    interaction = qlin.as_op(interaction)
    if ready_state.shape[0] != dims.dimB:
        raise ValueError("ready state must live on the instrument factor")
    if pointer.dim != dims.dimB:
        raise ValueError("pointer observable must live on the instrument factor")
    if interaction.shape[0] != dims.dim:
        raise ValueError("interaction must act on the composite space")
    if not qlin.is_unitary(interaction):
        raise ValueError("interaction is not unitary")
    return MeasurementScheme(dims, ready_state, pointer, interaction)


@dataclass(frozen=True)
class Branch:
    """Index-k pair of unnormalized initial and final components."""

    index: int
    initial_component: np.ndarray
    final_component: np.ndarray
    probability: float


@dataclass(frozen=True)
class FinalState:
    """Composite state after premeasurement with its branch decomposition."""

    ket: np.ndarray
    branches: tuple[Branch, ...]


def evolve(s: MeasurementScheme, phi_a, observable: SpectralForm) -> FinalState:
    """Apply the interaction to phi_a (x) ready and split into branches."""
    phi_a = qlin.require_unit(phi_a)
    if phi_a.shape[0] != s.dims.dimA:
        raise ValueError("object state dimension mismatch")
    if observable.dim != s.dims.dimA:
        raise ValueError("observable dimension mismatch")
    if len(observable) > len(s.pointer):
        raise ValueError("pointer has fewer positions than the observable has eigenvalues")
    final = s.interaction @ qlin.tensor(phi_a, s.ready_state)
    eye_a = np.eye(s.dims.dimA)
    branches = []
    # Branches run over pointer positions so that the final components always
    # resolve the identity; positions beyond the observable's index set get a
    # zero initial component.
    for k in range(len(s.pointer)):
        if k < len(observable):
            initial = observable.projectors[k] @ phi_a
        else:
            initial = np.zeros(s.dims.dimA, dtype=complex)
        final_k = qlin.tensor(eye_a, s.pointer.projectors[k]) @ final
        branches.append(Branch(k, initial, final_k, float(np.linalg.norm(final_k) ** 2)))
    return FinalState(final, tuple(branches))


def eigen_product_basis(observable: SpectralForm, ready_state: np.ndarray) -> list[list[np.ndarray]]:
    """Per index k, the kets basis(R(E^k)) (x) ready, in deterministic order."""
    out = []
    for p in observable.projectors:
        out.append([qlin.tensor(b, ready_state) for b in qlin.orthonormal_range_basis(p)])
    return out


def _build(observable: SpectralForm, pointer: SpectralForm, ready_state,
           assignment, membership_projector) -> MeasurementScheme:
    ready_state = qlin.require_unit(ready_state)
    dims = BipartiteDims(observable.dim, pointer.dim)
    if len(assignment) != len(observable):
        raise ValueError("one target list per observable index is required")
    if len(pointer) < len(observable):
        raise ValueError("pointer has fewer positions than the observable has eigenvalues")
    domain: list[np.ndarray] = []
    image: list[np.ndarray] = []
    ranks = observable.ranks()
    pointer_ranks = pointer.ranks()
    for k, targets in enumerate(assignment):
        targets = [qlin.as_ket(t) for t in targets]
        if len(targets) != ranks[k]:
            raise ValueError(f"index {k} needs {ranks[k]} target kets, got {len(targets)}")
        room = membership_projector(k)
        room_rank = int(round(np.trace(room).real))
        if ranks[k] > room_rank:
            raise ValueError(f"index {k} is uncompletable: eigenspace rank {ranks[k]} "
                             f"exceeds the {room_rank}-dimensional target range")
        for q, t in enumerate(targets):
            t = qlin.require_unit(t, tol=1e-9)
            defect = np.linalg.norm(t - room @ t)
            if defect > TOL_VEC:
                raise ValueError(f"target ({k},{q}) lies outside its required range "
                                 f"(residual {defect:.2e})")
            image.append(t)
        for b in qlin.orthonormal_range_basis(observable.projectors[k]):
            domain.append(qlin.tensor(b, ready_state))
    interaction = qlin.complete_to_unitary(domain, image, dim=dims.dim)
    return make_scheme(dims, ready_state, pointer, interaction)


def build_premeasurement(observable: SpectralForm, pointer: SpectralForm, ready_state,
                         assignment) -> MeasurementScheme:
    """Construct a scheme from per-(k, q) composite targets.

    assignment[k] lists orthonormal target kets, one per basis vector of the
    k-th eigenspace (deterministic index-ordered basis); each target must lie
    in the range of I (x) F^k. The unitary is completed deterministically.
    """
    eye_a = np.eye(observable.dim)

    def room(k: int) -> np.ndarray:
        return qlin.tensor(eye_a, pointer.projectors[k])

    return _build(observable, pointer, ready_state, assignment, room)


def build_nondemolition(observable: SpectralForm, pointer: SpectralForm, ready_state,
                        assignment) -> MeasurementScheme:
    """As build_premeasurement but targets must lie in range(E^k (x) F^k)."""

    def room(k: int) -> np.ndarray:
        return qlin.tensor(observable.projectors[k], pointer.projectors[k])

    return _build(observable, pointer, ready_state, assignment, room)


def ready_subspace(interaction: np.ndarray, observable: SpectralForm,
                   pointer: SpectralForm, tol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal basis of all instrument states this interaction can use.

    A state b qualifies when, for every k and every eigenbasis ket of the
    k-th eigenspace, the interaction sends ket (x) b into the range of
    I (x) F^k. Solved as the joint null space of the stacked linear
    constraint maps.
    """
    interaction = qlin.as_op(interaction)
    dim_a = observable.dim
    dim_b = pointer.dim
    if interaction.shape[0] != dim_a * dim_b:
        raise ValueError("interaction dimension mismatch")
    if not qlin.is_unitary(interaction):
        raise ValueError("interaction is not unitary")
    eye_a = np.eye(dim_a)
    eye_ab = np.eye(dim_a * dim_b)
    rows = []
    for k in range(len(observable)):
        complement = eye_ab - qlin.tensor(eye_a, pointer.projectors[k])
        for b in qlin.orthonormal_range_basis(observable.projectors[k]):
            # column j of this block: (I - I(x)F^k) U (b (x) e_j)
            block = np.zeros((dim_a * dim_b, dim_b), dtype=complex)
            for j in range(dim_b):
                block[:, j] = complement @ (interaction @ qlin.tensor(b, qlin.basis_ket(dim_b, j)))
            rows.append(block)
    stacked = np.vstack(rows)
    _, svals, vh = np.linalg.svd(stacked)
    null = [vh[i, :].conj() for i in range(dim_b) if i >= len(svals) or svals[i] <= tol]
    return null


def complete_measurement_expansion(f: FinalState) -> list[tuple[float, np.ndarray]]:
    """(probability, normalized final component) per nonzero branch.

    Zero-probability branches are omitted; the source ket is recovered as
    sum_k sqrt(p_k) * ket_k.
    """
    terms = []
    for branch in f.branches:
        if branch.probability <= TOL_PROB:
            continue
        norm = np.linalg.norm(branch.final_component)
        terms.append((branch.probability, branch.final_component / norm))
    return terms


def check_final_state(f: FinalState, tol_vec: float = TOL_VEC,
                      tol_prob: float = TOL_PROB) -> None:
    """Internal consistency of a FinalState; raises on violation."""
    total = np.zeros_like(f.ket)
    psum = 0.0
    for branch in f.branches:
        total += branch.final_component
        psum += branch.probability
    if np.linalg.norm(total - f.ket) > tol_vec * 10:
        raise AssertionError("final components do not sum to the final ket")
    if abs(psum - 1.0) > tol_prob:
        raise AssertionError("branch probabilities do not sum to one")
