"""Disentanglement, state transformers, ideal measurement, classification.

A scheme is disentangled when every outcome index carries a single
instrument ray in the final state; the interaction then factors through a
set of partial isometries on the object (the state transformers).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qlin
from .observables import SpectralForm
from .scheme import MeasurementScheme, build_nondemolition
from .tolerances import PASS_TOL, RANK_CUTOFF, TOL_OP, TOL_VEC
from .verify_general import GeneralCriterion, verify_general


@dataclass(frozen=True)
class StateTransformerSet:
    """Per-index Kraus operators M_k with their instrument rays."""

    per_index: tuple[np.ndarray, ...]
    pointer_vectors: tuple[np.ndarray, ...]


@enum.unique
class MClass(enum.Enum):
    """The five kinds of final complete-measurement components, in reading order."""

    M11a = "M11a"  # ideal
    M11b = "M11b"  # nondemolition, non-ideal, disentangled
    M12 = "M12"    # nondemolition, entangled
    M21 = "M21"    # demolition, disentangled
    M22 = "M22"    # demolition, entangled


_READING_ORDER = [MClass.M11a, MClass.M11b, MClass.M12, MClass.M21, MClass.M22]


def _branch_images(s: MeasurementScheme, observable: SpectralForm, k: int) -> list[np.ndarray]:
    """Interaction images of the k-th eigenbasis kets paired with the ready state."""
    return [s.interaction @ qlin.tensor(b, s.ready_state)
            for b in qlin.orthonormal_range_basis(observable.projectors[k])]


def _branch_b_marginal(s: MeasurementScheme, observable: SpectralForm, k: int) -> np.ndarray:
    """Unnormalized instrument marginal of the k-th branch operator."""
    eye_a = np.eye(s.dims.dimA)
    f_k = qlin.tensor(eye_a, s.pointer.projectors[k])
    rho = np.zeros((s.dims.dimB, s.dims.dimB), dtype=complex)
    for image in _branch_images(s, observable, k):
        w = f_k @ image
        rho += qlin.partial_trace(qlin.outer(w), s.dims, over="A")
    return rho


def _marginal_rank_and_ray(rho_b: np.ndarray) -> tuple[int, np.ndarray | None]:
    values, vectors = np.linalg.eigh(rho_b)
    top = values[-1]
    rank = int(np.sum(values > RANK_CUTOFF * max(top, 1e-300)))
    if rank != 1:
        return rank, None
    ray = vectors[:, -1]
    # deterministic phase: largest-magnitude entry real positive
    pivot = int(np.argmax(np.abs(ray)))
    ray = ray * (np.conj(ray[pivot]) / abs(ray[pivot]))
    return rank, ray


@dataclass(frozen=True)
class DisentanglementReport:
    disentangled: bool
    pointer_vectors: tuple[np.ndarray, ...] | None
    witness: str | None
    cc_established: bool


def is_disentangled(s: MeasurementScheme, observable: SpectralForm) -> DisentanglementReport:
    """Whether each branch carries a single instrument ray.

    Decided by the rank of each branch's instrument marginal; rank one
    yields the branch's pointer vector (phase-fixed deterministically).
    """
    cc = verify_general(s, observable, GeneralCriterion.CC_INV)
    rays = []
    for k in range(len(observable)):
        rank, ray = _marginal_rank_and_ray(_branch_b_marginal(s, observable, k))
        if rank > 1:
            return DisentanglementReport(False, None,
                                         f"k={k}: instrument marginal has rank {rank}",
                                         cc.passed)
        if ray is None:
            return DisentanglementReport(False, None,
                                         f"k={k}: branch carries no instrument weight",
                                         cc.passed)
        rays.append(ray)
    return DisentanglementReport(True, tuple(rays), None, cc.passed)


def _transformer(s: MeasurementScheme, ray: np.ndarray) -> np.ndarray:
    """M with M|a> = (I (x) <ray|) U (|a> (x) ready)."""
    dim_a, dim_b = s.dims.dimA, s.dims.dimB
    m = np.zeros((dim_a, dim_a), dtype=complex)
    for a in range(dim_a):
        image = s.interaction @ qlin.tensor(qlin.basis_ket(dim_a, a), s.ready_state)
        m[:, a] = image.reshape(dim_a, dim_b) @ ray.conj()
    return m


def _align_phase(m: np.ndarray, ray: np.ndarray,
                 projector: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate the (M, ray) pair so M is maximally real against its eigenspace.

    The pair is only defined up to a joint phase; fixing it makes the ideal
    test (M equals the eigenprojector) well posed.
    """
    z = np.trace(projector @ m)
    if abs(z) <= 1e-8:
        flat = m.reshape(-1)
        pivot = int(np.argmax(np.abs(flat)))
        z = flat[pivot]
    phase = np.conj(z) / abs(z)
    return m * phase, ray * np.conj(phase)


def extract_state_transformers(s: MeasurementScheme,
                               observable: SpectralForm) -> StateTransformerSet:
    """Factor a disentangled scheme into per-index Kraus operators.

    Raises for entangled schemes. The returned set satisfies
    sum_k M_k^+ M_k = I and M_k^+ M_k = E^k.
    """
    report = is_disentangled(s, observable)
    if not report.disentangled:
        raise ValueError(f"scheme is entangled: {report.witness}")
    transformers = []
    rays = []
    for k, ray in enumerate(report.pointer_vectors):
        m = _transformer(s, ray)
        m, ray = _align_phase(m, ray, observable.projectors[k])
        transformers.append(m)
        rays.append(ray)
    result = StateTransformerSet(tuple(transformers), tuple(rays))
    _validate_transformers(result, s, observable)
    return result


def _validate_transformers(t: StateTransformerSet, s: MeasurementScheme,
                           observable: SpectralForm) -> None:
    dim_a = s.dims.dimA
    total = np.zeros((dim_a, dim_a), dtype=complex)
    for k, m in enumerate(t.per_index):
        e_k = observable.projectors[k]
        gram = m.conj().T @ m
        total += gram
        if np.linalg.norm(gram - e_k, 2) > 1e-9:
            raise ValueError(f"transformer {k} is not a partial isometry on its eigenspace")
        if np.linalg.norm(m @ (np.eye(dim_a) - e_k), 2) > 1e-9:
            raise ValueError(f"transformer {k} is not supported on its eigenspace")
        f_k = s.pointer.projectors[k]
        if np.linalg.norm(f_k @ t.pointer_vectors[k] - t.pointer_vectors[k]) > TOL_VEC * 10:
            raise ValueError(f"pointer vector {k} is not in its pointer position")
    if np.linalg.norm(total - np.eye(dim_a), 2) > 1e-9:
        raise ValueError("transformers do not resolve the identity")


def reconstruction_residual(t: StateTransformerSet, s: MeasurementScheme,
                            phi_a) -> float:
    """|| U(phi (x) ready) - sum_k (M_k phi) (x) ray_k ||."""
    phi_a = qlin.require_unit(phi_a)
    final = s.interaction @ qlin.tensor(phi_a, s.ready_state)
    rebuilt = np.zeros_like(final)
    for m, ray in zip(t.per_index, t.pointer_vectors):
        rebuilt += qlin.tensor(m @ phi_a, ray)
    return float(np.linalg.norm(final - rebuilt))


def is_nondemolition_kraus(t: StateTransformerSet, observable: SpectralForm,
                           tol: float = TOL_OP) -> bool:
    """Whether every transformer keeps its eigenspace (no demolition)."""
    return all(np.linalg.norm(m - observable.projectors[k] @ m, 2) <= tol
               for k, m in enumerate(t.per_index))


def luders_channel(phi_a, observable: SpectralForm) -> np.ndarray:
    """Nonselective ideal-measurement change of state on the object."""
    phi_a = qlin.require_unit(phi_a)
    rho = np.zeros((observable.dim, observable.dim), dtype=complex)
    for p in observable.projectors:
        v = p @ phi_a
        rho += np.outer(v, v.conj())
    return rho


def _sharp_input_residual(s: MeasurementScheme, observable: SpectralForm,
                          rng: np.random.Generator) -> float:
    """Worst defect of rho_A^f = |phi><phi| over sharp-value inputs."""
    worst = 0.0
    for k, e_k in enumerate(observable.projectors):
        basis = qlin.orthonormal_range_basis(e_k)
        probes = list(basis)
        if len(basis) > 1:
            mix = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
            probe = sum(c * b for c, b in zip(mix, basis))
            probes.append(probe / np.linalg.norm(probe))
        for phi in probes:
            final = s.interaction @ qlin.tensor(phi, s.ready_state)
            rho_a = qlin.partial_trace(qlin.outer(final), s.dims, over="B")
            worst = max(worst, float(np.linalg.norm(rho_a - qlin.outer(phi), 2)))
    return worst


def _luders_marginal_residual(s: MeasurementScheme, observable: SpectralForm,
                              rng: np.random.Generator, trials: int = 10) -> float:
    """Worst defect of tr_B of the evolved state against the nonselective
    ideal change of state, over random inputs."""
    worst = 0.0
    for _ in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        rho_a = qlin.partial_trace(qlin.outer(final), s.dims, over="B")
        worst = max(worst, float(np.linalg.norm(
            rho_a - luders_channel(phi, observable), 2)))
    return worst


@dataclass(frozen=True)
class IdealVerdicts:
    """The three equivalent readings of ideality, decided independently."""

    by_transformers: bool    # transformers equal the eigenprojectors
    by_luders_marginal: bool  # object marginal follows the ideal channel
    by_sharp_inputs: bool    # sharp-value inputs come out unchanged

    def agree(self) -> bool:
        return self.by_transformers == self.by_luders_marginal == self.by_sharp_inputs


def ideal_definition_verdicts(s: MeasurementScheme, observable: SpectralForm,
                              tol: float = PASS_TOL,
                              rng: np.random.Generator | None = None) -> IdealVerdicts:
    if rng is None:
        rng = np.random.default_rng(7)
    report = is_disentangled(s, observable)
    if report.disentangled:
        t = extract_state_transformers(s, observable)
        by_transformers = all(
            np.linalg.norm(m - observable.projectors[k], 2) <= tol
            for k, m in enumerate(t.per_index))
    else:
        by_transformers = False
    by_luders = _luders_marginal_residual(s, observable, rng) <= tol
    by_sharp = _sharp_input_residual(s, observable, rng) <= tol
    return IdealVerdicts(bool(by_transformers), bool(by_luders), bool(by_sharp))


def is_ideal(s: MeasurementScheme, observable: SpectralForm,
             tol: float = PASS_TOL) -> bool:
    """Whether the scheme is ideal: disentangled with identity transformers.

    The transformer reading is cross-checked against the sharp-input form
    (final object state unchanged); the definitions must agree.
    """
    v = ideal_definition_verdicts(s, observable, tol)
    if v.by_transformers != v.by_sharp_inputs:
        raise AssertionError("ideal-measurement definitions disagree; "
                             "residuals sit inside the tolerance gap")
    return v.by_transformers


def build_ideal(observable: SpectralForm, pointer: SpectralForm,
                ready_state) -> MeasurementScheme:
    """Ideal scheme sending each eigenbasis ket to itself times a pointer ray.

    The per-index pointer ray is the first index-ordered basis vector of the
    pointer position's range, keeping the construction deterministic.
    """
    if len(pointer) < len(observable):
        raise ValueError("pointer has fewer positions than the observable has eigenvalues")
    assignment = []
    for k, e_k in enumerate(observable.projectors):
        ray = qlin.orthonormal_range_basis(pointer.projectors[k])[0]
        assignment.append([qlin.tensor(b, ray)
                           for b in qlin.orthonormal_range_basis(e_k)])
    return build_nondemolition(observable, pointer, ready_state, assignment)


@dataclass(frozen=True)
class BranchVerdict:
    index: int
    demolition: bool
    entangled: bool
    ideal: bool
    m_class: MClass


@dataclass(frozen=True)
class ClassificationReport:
    m_class: MClass
    branches: tuple[BranchVerdict, ...]
    cc_established: bool


def _branch_class(demolition: bool, entangled: bool, ideal: bool) -> MClass:
    if demolition:
        return MClass.M22 if entangled else MClass.M21
    if entangled:
        return MClass.M12
    return MClass.M11a if ideal else MClass.M11b


def classify(s: MeasurementScheme, observable: SpectralForm,
             tol: float = PASS_TOL) -> ClassificationReport:
    """Classify a scheme into the five-kind array, branch by branch.

    A heterogeneous scheme takes the class of its worst branch, "worst"
    meaning farthest in reading order of the array.
    """
    cc = verify_general(s, observable, GeneralCriterion.CC_INV)
    eye_b = np.eye(s.dims.dimB)
    branches = []
    for k in range(len(observable)):
        e_k = observable.projectors[k]
        keep = qlin.tensor(e_k, eye_b)
        images = _branch_images(s, observable, k)
        demolition = any(np.linalg.norm(img - keep @ img) > tol for img in images)
        rank, ray = _marginal_rank_and_ray(_branch_b_marginal(s, observable, k))
        entangled = rank > 1
        ideal = False
        if not demolition and not entangled and ray is not None:
            m = _transformer(s, ray)
            m, _ = _align_phase(m, ray, e_k)
            # compare on the eigenspace only; other branches own the rest
            ideal = bool(np.linalg.norm((m - e_k) @ e_k, 2) <= tol)
        branches.append(BranchVerdict(k, demolition, entangled, ideal,
                                      _branch_class(demolition, entangled, ideal)))
    worst = max(branches, key=lambda b: _READING_ORDER.index(b.m_class))
    return ClassificationReport(worst.m_class, tuple(branches), cc.passed)


def orthogonal_transformer_family(t: StateTransformerSet,
                                  tol: float = 1e-9) -> bool:
    """Whether the transformer images are pairwise orthogonal families.

    Reported as an observation only: true when M_k^+ M_j = 0 for k != j
    and the images of any object state under distinct indices are
    orthogonal.
    """
    n = len(t.per_index)
    for i in range(n):
        for j in range(i):
            if np.linalg.norm(t.per_index[i].conj().T @ t.per_index[j], 2) > tol:
                return False
    return True
