"""Canonical example schemes used across tests and the CLI fixture catalog.

Each builder returns (scheme, measured observable). The five core fixtures
realize one classification kind each; mixed_branch mixes an ideal branch
with a demolition-entangled one.
"""

from __future__ import annotations

import numpy as np

from . import scheme as scheme_mod
from .observables import SpectralForm, make_spectral_form
from .qlin import basis_ket, tensor


def _diag_projector(dim: int, indices) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    for i in indices:
        p[i, i] = 1.0
    return p


def _obs3() -> SpectralForm:
    """Rank-(2,1) observable on C^3 with eigenvalues +1, -1."""
    return make_spectral_form([1.0, -1.0],
                              [_diag_projector(3, [0, 1]), _diag_projector(3, [2])])


def _pointer2() -> SpectralForm:
    return make_spectral_form([0.0, 1.0],
                              [_diag_projector(2, [0]), _diag_projector(2, [1])])


def _pointer3() -> SpectralForm:
    """Rank-(2,1) pointer on C^3."""
    return make_spectral_form([0.0, 1.0],
                              [_diag_projector(3, [0, 1]), _diag_projector(3, [2])])


def _ket2(a: int, b: int, dim_a: int = 3, dim_b: int = 2) -> np.ndarray:
    return tensor(basis_ket(dim_a, a), basis_ket(dim_b, b))


def ideal3():
    """Ideal scheme on C^3 (x) C^2: each eigenbasis ket keeps its object part."""
    obs = _obs3()
    assignment = [
        [_ket2(0, 0), _ket2(1, 0)],
        [_ket2(2, 1)],
    ]
    return scheme_mod.build_premeasurement(obs, _pointer2(), basis_ket(2, 0), assignment), obs


def demo3():
    """Demolition disentangled: the k=2 branch leaves its eigenspace."""
    obs = _obs3()
    plus01 = (basis_ket(3, 0) + basis_ket(3, 1)) / np.sqrt(2)
    assignment = [
        [_ket2(0, 0), _ket2(1, 0)],
        [tensor(plus01, basis_ket(2, 1))],
    ]
    return scheme_mod.build_premeasurement(obs, _pointer2(), basis_ket(2, 0), assignment), obs


def nd_ent():
    """Nondemolition entangled: the rank-2 branch spreads over a rank-2 position."""
    obs = _obs3()
    pointer = _pointer3()
    assignment = [
        [tensor(basis_ket(3, 0), basis_ket(3, 0)), tensor(basis_ket(3, 1), basis_ket(3, 1))],
        [tensor(basis_ket(3, 2), basis_ket(3, 2))],
    ]
    return scheme_mod.build_nondemolition(obs, pointer, basis_ket(3, 0), assignment), obs


def nd_rot():
    """Nondemolition non-ideal disentangled: in-eigenspace swap on span{0,1}."""
    obs = _obs3()
    assignment = [
        [_ket2(1, 0), _ket2(0, 0)],
        [_ket2(2, 1)],
    ]
    return scheme_mod.build_premeasurement(obs, _pointer2(), basis_ket(2, 0), assignment), obs


def demo_ent():
    """Demolition entangled: one branch leaves its eigenspace and entangles."""
    obs = _obs3()
    pointer = _pointer3()
    assignment = [
        [tensor(basis_ket(3, 0), basis_ket(3, 0)), tensor(basis_ket(3, 2), basis_ket(3, 1))],
        [tensor(basis_ket(3, 2), basis_ket(3, 2))],
    ]
    return scheme_mod.build_premeasurement(obs, pointer, basis_ket(3, 0), assignment), obs


def mixed_branch():
    """Branch 1 ideal, branch 2 demolition entangled; classifies as the worst."""
    obs = make_spectral_form([1.0, -1.0],
                             [_diag_projector(3, [0]), _diag_projector(3, [1, 2])])
    pointer = make_spectral_form([0.0, 1.0],
                                 [_diag_projector(3, [0]), _diag_projector(3, [1, 2])])
    assignment = [
        [tensor(basis_ket(3, 0), basis_ket(3, 0))],
        [tensor(basis_ket(3, 0), basis_ket(3, 1)), tensor(basis_ket(3, 1), basis_ket(3, 2))],
    ]
    return scheme_mod.build_premeasurement(obs, pointer, basis_ket(3, 0), assignment), obs


def ideal2():
    """Two-level ideal scheme for spin along z, rank-1 pointer positions."""
    from .kinds import build_ideal
    obs = make_spectral_form([0.5, -0.5],
                             [_diag_projector(2, [0]), _diag_projector(2, [1])])
    pointer = make_spectral_form([0.0, 1.0],
                                 [_diag_projector(2, [0]), _diag_projector(2, [1])])
    return build_ideal(obs, pointer, basis_ket(2, 0)), obs


FIXTURES = {
    "ideal3": ideal3,
    "ideal2": ideal2,
    "demo3": demo3,
    "nd_ent": nd_ent,
    "nd_rot": nd_rot,
    "demo_ent": demo_ent,
    "mixed_branch": mixed_branch,
}
