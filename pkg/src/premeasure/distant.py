"""Measurement on one half of an entangled pair, seen from the other half.

The object is bipartite (A1 (x) A2); the instrument B interacts with A2
only. Selecting a pointer outcome then steers the untouched subsystem A1
exactly as an ideal occurrence of the twin event would.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .observables import SpectralForm, make_spectral_form
from .qlin import BipartiteDims
from .scheme import MeasurementScheme
from .tolerances import TOL_PROB, TOL_VEC


@dataclass(frozen=True)
class TripartiteState:
    """Unit ket on A1 (x) A2 (x) B; index (((a1*dimA2)+a2)*dimB)+b."""

    dims: tuple[int, int, int]
    ket: np.ndarray

    def __post_init__(self):
        d1, d2, db = self.dims
        if self.ket.shape != (d1 * d2 * db,):
            raise ValueError("ket length does not match tripartite dimensions")
        qlin.require_unit(self.ket)

    def a1_marginal(self) -> np.ndarray:
        pair = BipartiteDims(self.dims[0], self.dims[1] * self.dims[2])
        return qlin.partial_trace(qlin.outer(self.ket), pair, over="B")


def _split_dims(phi_a1a2: np.ndarray, dim_a2: int) -> BipartiteDims:
    total = phi_a1a2.shape[0]
    if total % dim_a2 != 0:
        raise ValueError("pair-state length is not divisible by the A2 dimension")
    return BipartiteDims(total // dim_a2, dim_a2)


def subsystem_premeasure(phi_a1a2, s: MeasurementScheme,
                         u_a1: np.ndarray) -> TripartiteState:
    """Evolve (phi_A1A2 (x) ready) by uA1 (x) U; A1 stays untouched by U."""
    phi_a1a2 = qlin.require_unit(phi_a1a2)
    if not qlin.is_unitary(u_a1):
        raise ValueError("uA1 is not unitary")
    pair = _split_dims(phi_a1a2, s.dims.dimA)
    if u_a1.shape != (pair.dimA, pair.dimA):
        raise ValueError("uA1 dimension does not match A1")
    initial = qlin.tensor(phi_a1a2, s.ready_state)
    full_u = qlin.tensor(u_a1, s.interaction)
    return TripartiteState((pair.dimA, s.dims.dimA, s.dims.dimB),
                           full_u @ initial)


def conditional_state(phi_a1a2, e: np.ndarray) -> np.ndarray:
    """State of A1 given that event e occurred on A2: tr_A2(E phi phi^+ E)/p."""
    phi_a1a2 = qlin.require_unit(phi_a1a2)
    if not qlin.is_projector(e):
        raise ValueError("event is not a projector")
    pair = _split_dims(phi_a1a2, e.shape[0])
    selected = qlin.tensor(np.eye(pair.dimA), e) @ phi_a1a2
    p = float(np.real(np.vdot(selected, selected)))
    if p <= TOL_PROB:
        raise ValueError(f"event probability {p:.3e} is numerically zero")
    rho = qlin.partial_trace(qlin.outer(selected), pair, over="B")
    return rho / p


def distant_state_after_complete(phi_a1a2, s: MeasurementScheme,
                                 u_a1: np.ndarray, k: int) -> np.ndarray:
    """State of A1 after selecting pointer outcome k of a measurement on A2.

    The interaction with the instrument drops out: the result equals
    uA1 . conditional_state(phi, E_A2^k) . uA1^+ for any scheme that
    satisfies the calibration condition for the measured observable.
    """
    tri = subsystem_premeasure(phi_a1a2, s, u_a1)
    d1, d2, db = tri.dims
    f_k = qlin.tensor(np.eye(d1 * d2), s.pointer.projectors[k])
    selected = f_k @ tri.ket
    p = float(np.real(np.vdot(selected, selected)))
    if p <= TOL_PROB:
        raise ValueError(f"branch {k} probability {p:.3e} is numerically zero")
    pair = BipartiteDims(d1, d2 * db)
    rho = qlin.partial_trace(qlin.outer(selected), pair, over="B")
    return rho / p


def find_twin(phi_a1a2, o_a2: SpectralForm) -> SpectralForm | None:
    """Projector family on A1 acting on the state like the given A2 family.

    Solves (E_A1^k (x) I)|phi> = (I (x) E_A2^k)|phi> on the support of the
    A1 marginal via the singular value decomposition of the coefficient
    matrix; dimensions off the support are assigned to the first index's
    projector so the family resolves the identity. Returns None when no
    twin exists.
    """
    phi_a1a2 = qlin.require_unit(phi_a1a2)
    pair = _split_dims(phi_a1a2, o_a2.dim)
    m = phi_a1a2.reshape(pair.dimA, pair.dimB)
    w, svals, vh = np.linalg.svd(m)
    rank = int(np.sum(svals > 1e-12 * svals[0]))
    s_r = svals[:rank]

    twins = []
    for k, e2 in enumerate(o_a2.projectors):
        # conjugate the transposed event into the right singular basis
        b = vh @ e2.T @ vh.conj().T
        if np.linalg.norm(b[:rank, rank:]) > TOL_VEC:
            return None
        a_rr = (s_r[:, None] * b[:rank, :rank]) / s_r[None, :]
        if not qlin.is_projector(a_rr):
            return None
        a_full = np.zeros((pair.dimA, pair.dimA), dtype=complex)
        a_full[:rank, :rank] = a_rr
        if k == 0:
            a_full[rank:, rank:] = np.eye(pair.dimA - rank)
        twins.append(w @ a_full @ w.conj().T)

    for e1, e2 in zip(twins, o_a2.projectors):
        lhs = qlin.tensor(e1, np.eye(pair.dimB)) @ phi_a1a2
        rhs = qlin.tensor(np.eye(pair.dimA), e2) @ phi_a1a2
        if np.linalg.norm(lhs - rhs) > TOL_VEC:
            return None
    return make_spectral_form(o_a2.eigenvalues, tuple(twins))


# --- spin-1/2 conventions: |z,+/-> = standard basis, |x,+/-> = (|0> +/- |1>)/sqrt(2)

def z_ket(sign: int) -> np.ndarray:
    return qlin.basis_ket(2, 0 if sign > 0 else 1)


def x_ket(sign: int) -> np.ndarray:
    return np.array([1.0, 1.0 if sign > 0 else -1.0], dtype=complex) / np.sqrt(2.0)


def spin_observable(axis: str) -> SpectralForm:
    """Spin projection along z or x, eigenvalues +/- 1/2."""
    ket = {"z": z_ket, "x": x_ket}[axis]
    return make_spectral_form(
        (0.5, -0.5), (qlin.outer(ket(+1)), qlin.outer(ket(-1))))


def singlet() -> np.ndarray:
    """The antisymmetric two-spin state (|+ -> - |- +>)/sqrt(2)."""
    return np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
