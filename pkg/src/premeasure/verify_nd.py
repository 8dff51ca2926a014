"""The ten equivalent nondemolition criteria and their consequences.

All checks presuppose the calibration condition; callers get the verdicts
either way, with a flag recording whether the precondition was established.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qlin, scheme as scheme_mod
from .observables import IndexFunction, SpectralForm, apply_function, coarsen_pointer
from .scheme import MeasurementScheme, make_scheme
from .tolerances import FAIL_TOL, PASS_TOL, TOL_PROB
from .verify_general import (GeneralCriterion, VerdictReport,
                             _consistency, _ready_projector, _verdict,
                             expansion_coefficients, pointer_eigenbases, verify_general)


class NDCriterion(enum.Enum):
    """The equivalent additional definitions of nondemolition premeasurement."""

    ND_STAT = "nd-stat"            # sharp value preserved (probability form)
    ND_INV = "nd-inv"              # invariance form of the preservation
    ND_STRONG = "nd-strong"        # both directions of the preservation
    ND_DYN = "nd-dyn"              # interaction commutes with each eigenprojector
    ND_BASIS = "nd-basis"          # membership in range(E^k (x) F^k), basis form
    ND_SUBSPACE = "nd-subspace"    # membership in range(E^k (x) F^k), subspace form
    TWIN = "twin"                  # measured and pointer projectors act identically
    REPEAT = "repeat"              # immediate repetition gives the same result
    EXT_PRC = "ext-prc"            # probabilities reproduced on the object side
    EXPANSION_ND = "expansion-nd"  # expansion coefficients are eigenvectors
    TWIN_SCHMIDT = "twin-schmidt"  # Schmidt vectors group into co-indexed eigenspaces


def _nd_residuals(s: MeasurementScheme, observable: SpectralForm):
    """Per (k, q): defect of eigenspace preservation, vector and probability."""
    eye_b = np.eye(s.dims.dimB)
    vec_worst, prob_worst, witness = 0.0, 0.0, None
    for k in range(len(observable)):
        keep = qlin.tensor(observable.projectors[k], eye_b)
        complement = np.eye(s.dims.dim) - keep
        for q, b in enumerate(qlin.orthonormal_range_basis(observable.projectors[k])):
            image = s.interaction @ qlin.tensor(b, s.ready_state)
            defect = np.linalg.norm(complement @ image)
            if defect > vec_worst:
                vec_worst, witness = defect, f"k={k}, eigenbasis ket q={q}"
            prob_worst = max(prob_worst, float(defect ** 2))
    return vec_worst, prob_worst, witness


def _nd_converse_residual(s: MeasurementScheme, observable: SpectralForm):
    eye_b = np.eye(s.dims.dimB)
    worst, witness = 0.0, None
    for k in range(len(observable)):
        keep = qlin.tensor(observable.projectors[k], eye_b)
        complement_a = np.eye(s.dims.dimA) - observable.projectors[k]
        for q, b in enumerate(qlin.orthonormal_range_basis(complement_a)):
            weight = np.linalg.norm(keep @ (s.interaction @ qlin.tensor(b, s.ready_state)))
            if weight > worst:
                worst, witness = weight, f"k={k}, orthocomplement ket q={q}"
    return worst, witness


def _membership_residual(s: MeasurementScheme, observable: SpectralForm):
    worst, witness = 0.0, None
    for k in range(len(observable)):
        room = qlin.tensor(observable.projectors[k], s.pointer.projectors[k])
        complement = np.eye(s.dims.dim) - room
        for q, b in enumerate(qlin.orthonormal_range_basis(observable.projectors[k])):
            defect = np.linalg.norm(complement @ (s.interaction @ qlin.tensor(b, s.ready_state)))
            if defect > worst:
                worst, witness = defect, f"k={k}, eigenbasis ket q={q}"
    return worst, witness


def _twin_residual(s: MeasurementScheme, observable: SpectralForm,
                   rng: np.random.Generator, trials: int):
    eye_a = np.eye(s.dims.dimA)
    eye_b = np.eye(s.dims.dimB)
    p = _ready_projector(s)
    worst, witness = 0.0, None
    for k in range(len(observable)):
        diff = qlin.tensor(observable.projectors[k], eye_b) - \
            qlin.tensor(eye_a, s.pointer.projectors[k])
        op_defect = np.linalg.norm(diff @ s.interaction @ p, 2)
        if op_defect > worst:
            worst, witness = op_defect, f"k={k}, operator identity"
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        for k in range(len(observable)):
            lhs = qlin.tensor(observable.projectors[k], eye_b) @ final
            rhs = qlin.tensor(eye_a, s.pointer.projectors[k]) @ final
            defect = np.linalg.norm(lhs - rhs)
            if defect > worst:
                worst, witness = defect, f"k={k}, sampled state {t}"
    return worst, witness


def _repeat_residual(s: MeasurementScheme, observable: SpectralForm,
                     rng: np.random.Generator, trials: int):
    eye_b = np.eye(s.dims.dimB)
    worst, witness = 0.0, None
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = scheme_mod.evolve(s, phi, observable)
        for branch in final.branches:
            if branch.probability <= TOL_PROB:
                continue  # zero-probability terms are skipped by convention
            if branch.index >= len(observable):
                continue
            keep = qlin.tensor(observable.projectors[branch.index], eye_b)
            defect = np.linalg.norm(branch.final_component - keep @ branch.final_component)
            defect /= np.linalg.norm(branch.final_component)
            if defect > worst:
                worst, witness = defect, f"k={branch.index}, sampled state {t}"
    return worst, witness


def _ext_prc_residual(s: MeasurementScheme, observable: SpectralForm,
                      rng: np.random.Generator, trials: int):
    eye_b = np.eye(s.dims.dimB)
    worst, witness = 0.0, None
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        for k in range(len(observable)):
            lhs = (phi.conj() @ observable.projectors[k] @ phi).real
            rhs = (final.conj() @ qlin.tensor(observable.projectors[k], eye_b) @ final).real
            if abs(lhs - rhs) > worst:
                worst, witness = abs(lhs - rhs), f"k={k}, sampled state {t}"
    return worst, witness


def _expansion_nd_residual(s: MeasurementScheme, observable: SpectralForm,
                           rng: np.random.Generator, trials: int):
    worst, witness = 0.0, None
    bases = [pointer_eigenbases(s, observable)]
    bases += [pointer_eigenbases(s, observable, rng) for _ in range(10)]
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        for bi, base in enumerate(bases):
            for k in range(len(observable)):
                for c in expansion_coefficients(final, s, base[k]):
                    defect = np.linalg.norm(observable.projectors[k] @ c - c)
                    if defect > worst:
                        worst, witness = defect, f"k={k}, basis {bi}, sampled state {t}"
    return worst, witness


def _twin_schmidt_residual(s: MeasurementScheme, observable: SpectralForm,
                           rng: np.random.Generator, trials: int,
                           degeneracy_tol: float = 1e-8):
    """Membership defect of the final state's Schmidt structure.

    Right Schmidt vectors must group into pointer eigenspaces (degenerate
    coefficients compared at subspace level) and the co-indexed part of the
    state must carry matching object eigenvectors.
    """
    worst, witness = 0.0, None
    trials = max(trials // 2, 10)
    eye_a = np.eye(s.dims.dimA)
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        dec = qlin.schmidt(final, s.dims)
        # group Schmidt indices by coefficient degeneracy
        groups: list[list[int]] = []
        for i, c in enumerate(dec.coefficients):
            if groups and abs(c - dec.coefficients[groups[-1][-1]]) <= degeneracy_tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        for g in groups:
            span = sum(qlin.outer(dec.right[i]) for i in g)
            blocks = sum(s.pointer.projectors[k] @ span @ s.pointer.projectors[k]
                         for k in range(len(s.pointer)))
            defect = np.linalg.norm(span - blocks, 2)
            if defect > worst:
                worst, witness = defect, f"coefficient group {g}, sampled state {t}"
        for k in range(len(observable)):
            mismatch = qlin.tensor(eye_a - observable.projectors[k],
                                   s.pointer.projectors[k]) @ final
            defect = np.linalg.norm(mismatch)
            if defect > worst:
                worst, witness = defect, f"k={k}, sampled state {t}"
    return worst, witness


def verify_nd(s: MeasurementScheme, observable: SpectralForm, criterion: NDCriterion, *,
              rng: np.random.Generator | None = None, trials: int = 50,
              pass_tol: float = PASS_TOL, fail_tol: float = FAIL_TOL) -> VerdictReport:
    """Check one nondemolition criterion and report the residual."""
    rng = np.random.default_rng(0) if rng is None else rng
    name = criterion.value
    if criterion is NDCriterion.ND_INV:
        vec, _, witness = _nd_residuals(s, observable)
        return _verdict(name, vec, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.ND_STAT:
        _, prob, witness = _nd_residuals(s, observable)
        return _verdict(name, prob, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.ND_STRONG:
        vec, _, witness = _nd_residuals(s, observable)
        conv, conv_witness = _nd_converse_residual(s, observable)
        if conv > vec:
            vec, witness = conv, conv_witness
        return _verdict(name, vec, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.ND_DYN:
        eye_b = np.eye(s.dims.dimB)
        p = _ready_projector(s)
        worst, witness = 0.0, None
        for k in range(len(observable)):
            e_k = qlin.tensor(observable.projectors[k], eye_b)
            defect = np.linalg.norm((s.interaction @ e_k - e_k @ s.interaction) @ p, 2)
            if defect > worst:
                worst, witness = defect, f"k={k}"
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion in (NDCriterion.ND_BASIS, NDCriterion.ND_SUBSPACE):
        worst, witness = _membership_residual(s, observable)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.TWIN:
        worst, witness = _twin_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.REPEAT:
        worst, witness = _repeat_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.EXT_PRC:
        worst, witness = _ext_prc_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.EXPANSION_ND:
        worst, witness = _expansion_nd_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is NDCriterion.TWIN_SCHMIDT:
        worst, witness = _twin_schmidt_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    raise ValueError(f"unknown criterion {criterion!r}")


@dataclass(frozen=True)
class NDSummary:
    reports: tuple[VerdictReport, ...]
    equivalence_consistent: bool
    cc_established: bool


def verify_all_nd(s: MeasurementScheme, observable: SpectralForm, *,
                  rng: np.random.Generator | None = None, trials: int = 50,
                  pass_tol: float = PASS_TOL, fail_tol: float = FAIL_TOL) -> NDSummary:
    """Run every nondemolition criterion; verdicts must agree given the CC."""
    rng = np.random.default_rng(0) if rng is None else rng
    cc = verify_general(s, observable, GeneralCriterion.CC_INV,
                        pass_tol=pass_tol, fail_tol=fail_tol)
    reports = [verify_nd(s, observable, c, rng=rng, trials=trials,
                         pass_tol=pass_tol, fail_tol=fail_tol)
               for c in NDCriterion]
    return NDSummary(tuple(reports), _consistency(reports), cc.passed)


@dataclass(frozen=True)
class CoherenceReport:
    """Decoherence consequences of the twin relation on the final marginals."""

    rho_a_residual: float
    rho_b_residual: float
    commutator_a: float
    commutator_b: float
    twin_established: bool


def coherence_report(s: MeasurementScheme, observable: SpectralForm,
                     phi_a) -> CoherenceReport:
    """Block-diagonality of the final reduced states in the eigenprojectors."""
    twin = verify_nd(s, observable, NDCriterion.TWIN)
    phi_a = qlin.require_unit(phi_a)
    final = s.interaction @ qlin.tensor(phi_a, s.ready_state)
    rho = qlin.outer(final)
    rho_a = qlin.partial_trace(rho, s.dims, over="B")
    rho_b = qlin.partial_trace(rho, s.dims, over="A")
    block_a = sum(p @ rho_a @ p for p in observable.projectors)
    block_b = sum(p @ rho_b @ p for p in s.pointer.projectors)
    comm_a = max(np.linalg.norm(p @ rho_a - rho_a @ p, 2) for p in observable.projectors)
    comm_b = max(np.linalg.norm(p @ rho_b - rho_b @ p, 2) for p in s.pointer.projectors)
    return CoherenceReport(
        rho_a_residual=float(np.linalg.norm(rho_a - block_a, 2)),
        rho_b_residual=float(np.linalg.norm(rho_b - block_b, 2)),
        commutator_a=float(comm_a),
        commutator_b=float(comm_b),
        twin_established=twin.passed,
    )


def overmeasure(s: MeasurementScheme, observable: SpectralForm, f: IndexFunction,
                pointer_values=None) -> tuple[SpectralForm, MeasurementScheme]:
    """Coarsen the measured observable and the pointer under one index map.

    The interaction and ready state are untouched; the returned scheme
    premeasures the coarse observable whenever the source scheme satisfied
    the calibration condition for the fine one.
    """
    coarse_obs = apply_function(observable, f)
    if pointer_values is None:
        pointer_values = [float(l) for l in range(len(f.target_values))]
    mapping = list(f.mapping)
    # carry along pointer positions beyond the observable's index set
    extra = len(s.pointer) - len(f.mapping)
    if extra < 0:
        raise ValueError("index function is not total on the pointer's index set")
    next_l = len(f.target_values)
    extra_values = []
    for i in range(extra):
        mapping.append(next_l + i)
        extra_values.append(float(max(pointer_values) + 1 + i))
    placeholder_values = tuple(float(i) for i in range(next_l + extra))
    pointer_f = IndexFunction(tuple(mapping), placeholder_values)
    coarse_pointer = coarsen_pointer(s.pointer, pointer_f,
                                     list(pointer_values) + extra_values)
    return coarse_obs, make_scheme(s.dims, s.ready_state, coarse_pointer, s.interaction)
