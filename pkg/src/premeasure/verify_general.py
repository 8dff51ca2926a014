"""The seven equivalent criteria for general premeasurement.

Universally quantified conditions are decided at operator level on the
subspace H_A (x) span(ready state): by linearity a check over an eigenbasis
is exhaustive, so random state sampling is only an additional smoke layer
on the probability-style criteria.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qlin, scheme as scheme_mod
from .observables import SpectralForm
from .scheme import MeasurementScheme
from .tolerances import FAIL_TOL, PASS_TOL, TOL_PROB


class GeneralCriterion(enum.Enum):
    """The equivalent definitions of general premeasurement."""

    CC_STAT = "cc-stat"          # sharp value statistically detected (probability form)
    CC_INV = "cc-inv"            # invariance form of the calibration condition
    STRONG_INV = "strong-inv"    # both directions of the invariance
    PRC = "prc"                  # probability reproducibility
    DYNAMICAL = "dynamical"      # pointer projection commutes through the interaction
    BASIS_DYN = "basis-dyn"      # per-eigenbasis membership in the pointer range
    SUBSPACE_DYN = "subspace-dyn"  # per-eigenspace membership in the pointer range
    EXPANSION = "expansion"      # pointer-eigenbasis expansion weights


@dataclass(frozen=True)
class VerdictReport:
    """Outcome of one criterion check."""

    criterion: str
    status: str  # "pass" | "fail" | "indeterminate"
    residual: float
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _verdict(criterion: str, residual: float, witness: str | None,
             pass_tol: float, fail_tol: float) -> VerdictReport:
    if residual <= pass_tol:
        return VerdictReport(criterion, "pass", residual, None)
    if residual > fail_tol:
        return VerdictReport(criterion, "fail", residual, witness)
    return VerdictReport(criterion, "indeterminate", residual, witness)


def _check_dims(s: MeasurementScheme, observable: SpectralForm) -> None:
    if observable.dim != s.dims.dimA:
        raise ValueError("observable dimension does not match the scheme")
    if len(s.pointer) < len(observable):
        raise ValueError("pointer has fewer positions than the observable has eigenvalues")


def _ready_projector(s: MeasurementScheme) -> np.ndarray:
    return qlin.tensor(np.eye(s.dims.dimA), qlin.outer(s.ready_state))


def _cc_residuals(s: MeasurementScheme, observable: SpectralForm):
    """Per (k, q): vector and probability defect of the pointer projection."""
    eye_a = np.eye(s.dims.dimA)
    eye_ab = np.eye(s.dims.dim)
    vec_worst, prob_worst, witness = 0.0, 0.0, None
    for k in range(len(observable)):
        complement = eye_ab - qlin.tensor(eye_a, s.pointer.projectors[k])
        for q, b in enumerate(qlin.orthonormal_range_basis(observable.projectors[k])):
            image = s.interaction @ qlin.tensor(b, s.ready_state)
            defect = np.linalg.norm(complement @ image)
            if defect > vec_worst:
                vec_worst, witness = defect, f"k={k}, eigenbasis ket q={q}"
            prob_worst = max(prob_worst, float(defect ** 2))
    return vec_worst, prob_worst, witness


def _strong_converse_residual(s: MeasurementScheme, observable: SpectralForm):
    """No pointer-k weight from the orthocomplement of the k-th eigenspace."""
    eye_a = np.eye(s.dims.dimA)
    worst, witness = 0.0, None
    for k in range(len(observable)):
        f_k = qlin.tensor(eye_a, s.pointer.projectors[k])
        complement = eye_a - observable.projectors[k]
        for q, b in enumerate(qlin.orthonormal_range_basis(complement)):
            weight = np.linalg.norm(f_k @ (s.interaction @ qlin.tensor(b, s.ready_state)))
            if weight > worst:
                worst, witness = weight, f"k={k}, orthocomplement ket q={q}"
    return worst, witness


def _prc_residual(s: MeasurementScheme, observable: SpectralForm,
                  rng: np.random.Generator, trials: int):
    eye_a = np.eye(s.dims.dimA)
    p = _ready_projector(s)
    u = s.interaction
    worst, witness = 0.0, None
    for k in range(len(observable)):
        f_k = qlin.tensor(eye_a, s.pointer.projectors[k])
        e_k = qlin.tensor(observable.projectors[k], np.eye(s.dims.dimB))
        op_defect = np.linalg.norm(p @ (u.conj().T @ f_k @ u - e_k) @ p, 2)
        if op_defect > worst:
            worst, witness = op_defect, f"k={k}, operator identity"
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = u @ qlin.tensor(phi, s.ready_state)
        for k in range(len(observable)):
            lhs = (phi.conj() @ observable.projectors[k] @ phi).real
            rhs = (final.conj() @ qlin.tensor(eye_a, s.pointer.projectors[k]) @ final).real
            if abs(lhs - rhs) > worst:
                worst, witness = abs(lhs - rhs), f"k={k}, sampled state {t}"
    return worst, witness


def _dynamical_residual(s: MeasurementScheme, observable: SpectralForm):
    eye_a = np.eye(s.dims.dimA)
    eye_b = np.eye(s.dims.dimB)
    p = _ready_projector(s)
    worst, witness = 0.0, None
    for k in range(len(observable)):
        f_k = qlin.tensor(eye_a, s.pointer.projectors[k])
        e_k = qlin.tensor(observable.projectors[k], eye_b)
        defect = np.linalg.norm((f_k @ s.interaction - s.interaction @ e_k) @ p, 2)
        if defect > worst:
            worst, witness = defect, f"k={k}"
    return worst, witness


def pointer_eigenbases(s: MeasurementScheme, observable: SpectralForm,
                       rng: np.random.Generator | None = None) -> list[list[np.ndarray]]:
    """Per index k, an orthonormal eigenbasis of the k-th pointer position.

    Deterministic (index-ordered) when rng is None, otherwise randomly
    rotated inside each position's range.
    """
    bases = []
    for k in range(len(observable)):
        basis = qlin.orthonormal_range_basis(s.pointer.projectors[k])
        if rng is not None and len(basis) > 1:
            mix = qlin.random_unitary(rng, len(basis))
            basis = [sum(mix[i, j] * basis[i] for i in range(len(basis)))
                     for j in range(len(basis))]
        bases.append(basis)
    return bases


def expansion_coefficients(final_ket: np.ndarray, s: MeasurementScheme,
                           basis_k: list[np.ndarray]) -> list[np.ndarray]:
    """Object-space expansion coefficients against one pointer sub-basis."""
    m = final_ket.reshape(s.dims.dimA, s.dims.dimB)
    return [m @ b.conj() for b in basis_k]


def _expansion_residual(s: MeasurementScheme, observable: SpectralForm,
                        rng: np.random.Generator, trials: int):
    worst, witness = 0.0, None
    bases = [pointer_eigenbases(s, observable)]
    bases += [pointer_eigenbases(s, observable, rng) for _ in range(10)]
    for t in range(trials):
        phi = qlin.random_ket(rng, s.dims.dimA)
        final = s.interaction @ qlin.tensor(phi, s.ready_state)
        for bi, base in enumerate(bases):
            for k in range(len(observable)):
                coefs = expansion_coefficients(final, s, base[k])
                weight = sum(float(np.linalg.norm(c) ** 2) for c in coefs)
                expected = (phi.conj() @ observable.projectors[k] @ phi).real
                defect = abs(weight - expected)
                if defect > worst:
                    worst, witness = defect, f"k={k}, basis {bi}, sampled state {t}"
    return worst, witness


def verify_general(s: MeasurementScheme, observable: SpectralForm,
                   criterion: GeneralCriterion, *, rng: np.random.Generator | None = None,
                   trials: int = 50, pass_tol: float = PASS_TOL,
                   fail_tol: float = FAIL_TOL) -> VerdictReport:
    """Check one general-premeasurement criterion and report the residual."""
    _check_dims(s, observable)
    rng = np.random.default_rng(0) if rng is None else rng
    name = criterion.value
    if criterion in (GeneralCriterion.CC_INV, GeneralCriterion.BASIS_DYN):
        vec, _, witness = _cc_residuals(s, observable)
        return _verdict(name, vec, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.CC_STAT:
        _, prob, witness = _cc_residuals(s, observable)
        return _verdict(name, prob, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.STRONG_INV:
        vec, _, witness = _cc_residuals(s, observable)
        conv, conv_witness = _strong_converse_residual(s, observable)
        if conv > vec:
            vec, witness = conv, conv_witness
        return _verdict(name, vec, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.PRC:
        worst, witness = _prc_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.DYNAMICAL:
        worst, witness = _dynamical_residual(s, observable)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.SUBSPACE_DYN:
        # Same membership defect as the basis form, computed per eigenspace
        # image block; the two verdicts must agree.
        eye_a = np.eye(s.dims.dimA)
        eye_ab = np.eye(s.dims.dim)
        worst, witness = 0.0, None
        for k in range(len(observable)):
            complement = eye_ab - qlin.tensor(eye_a, s.pointer.projectors[k])
            basis = qlin.orthonormal_range_basis(observable.projectors[k])
            block = np.column_stack(
                [s.interaction @ qlin.tensor(b, s.ready_state) for b in basis])
            defect = np.linalg.norm(complement @ block, 2)
            if defect > worst:
                worst, witness = defect, f"k={k}"
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    if criterion is GeneralCriterion.EXPANSION:
        worst, witness = _expansion_residual(s, observable, rng, trials)
        return _verdict(name, worst, witness, pass_tol, fail_tol)
    raise ValueError(f"unknown criterion {criterion!r}")


@dataclass(frozen=True)
class VerificationSummary:
    reports: tuple[VerdictReport, ...]
    equivalence_consistent: bool


def _consistency(reports: list[VerdictReport]) -> bool:
    determinate = {r.status for r in reports if r.status != "indeterminate"}
    return len(determinate) <= 1


def verify_all_general(s: MeasurementScheme, observable: SpectralForm, *,
                       rng: np.random.Generator | None = None, trials: int = 50,
                       pass_tol: float = PASS_TOL,
                       fail_tol: float = FAIL_TOL) -> VerificationSummary:
    """Run every general criterion; the verdicts must agree (equivalence)."""
    rng = np.random.default_rng(0) if rng is None else rng
    reports = [verify_general(s, observable, c, rng=rng, trials=trials,
                              pass_tol=pass_tol, fail_tol=fail_tol)
               for c in GeneralCriterion]
    return VerificationSummary(tuple(reports), _consistency(reports))


def check_time_reversal(s: MeasurementScheme, observable: SpectralForm,
                        phi_a, tol: float = TOL_PROB) -> VerdictReport:
    """Reversed-role probability reproducibility on one final state.

    Requires a scheme that satisfies the calibration condition.
    """
    cc = verify_general(s, observable, GeneralCriterion.CC_INV)
    if not cc.passed:
        raise ValueError("scheme does not satisfy the calibration condition")
    phi_a = qlin.require_unit(phi_a)
    final = scheme_mod.evolve(s, phi_a, observable)
    eye_a = np.eye(s.dims.dimA)
    worst, witness = 0.0, None
    for k in range(len(observable)):
        lhs = (phi_a.conj() @ observable.projectors[k] @ phi_a).real
        rhs = (final.ket.conj() @ qlin.tensor(eye_a, s.pointer.projectors[k]) @ final.ket).real
        if abs(lhs - rhs) > worst:
            worst, witness = abs(lhs - rhs), f"k={k}"
    status = "pass" if worst <= tol else "fail"
    return VerdictReport("time-reversal", status, worst, witness if status == "fail" else None)
