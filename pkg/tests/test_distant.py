"""Measurement on one half of a pair: no-influence, steering theorem, twins."""

import numpy as np
import pytest

from conftest import random_assignment_scheme
from premeasure import distant, qlin
from premeasure.fixtures import FIXTURES
from premeasure.qlin import BipartiteDims


def _random_pair(rng, dim_a1, dim_a2):
    return qlin.random_ket(rng, dim_a1 * dim_a2)


def test_no_influence_on_untouched_subsystem():
    rng = np.random.default_rng(91)
    s, obs = FIXTURES["ideal3"]()
    pair_dims = BipartiteDims(2, 3)
    for _ in range(50):
        pair = _random_pair(rng, 2, 3)
        u_a1 = qlin.random_unitary(rng, 2)
        tri = distant.subsystem_premeasure(pair, s, u_a1)
        before = qlin.partial_trace(qlin.outer(pair), pair_dims, over="B")
        after = tri.a1_marginal()
        assert np.linalg.norm(after - u_a1 @ before @ u_a1.conj().T, 2) <= 1e-10


def test_distant_state_matches_conditional_state():
    rng = np.random.default_rng(97)
    for trial in range(50):
        s, obs = random_assignment_scheme(rng, dim_b=2 if trial % 2 else 3)
        pair = _random_pair(rng, 2, 3)
        u_a1 = qlin.random_unitary(rng, 2)
        k = trial % 2
        e_k = obs.projectors[k]
        prob = float(np.real(pair.conj() @ qlin.tensor(np.eye(2), e_k) @ pair))
        if prob <= 1e-6:
            continue
        got = distant.distant_state_after_complete(pair, s, u_a1, k)
        want = u_a1 @ distant.conditional_state(pair, e_k) @ u_a1.conj().T
        assert np.linalg.norm(got - want, 2) <= 1e-10


def test_distant_state_scheme_independent():
    # the interaction with the instrument drops out of the distant state
    rng = np.random.default_rng(101)
    pair = _random_pair(rng, 2, 3)
    schemes = [random_assignment_scheme(rng, dim_b=2),
               random_assignment_scheme(rng, dim_b=3),
               FIXTURES["demo3"]()]
    states = [distant.distant_state_after_complete(pair, s, np.eye(2), 0)
              for s, _ in schemes]
    for rho in states[1:]:
        assert np.linalg.norm(rho - states[0], 2) <= 1e-10


def test_product_state_distant_is_unchanged():
    rng = np.random.default_rng(103)
    s, obs = FIXTURES["ideal3"]()
    a1 = qlin.random_ket(rng, 2)
    a2 = qlin.random_ket(rng, 3)
    pair = qlin.tensor(a1, a2)
    u_a1 = qlin.random_unitary(rng, 2)
    for k in range(2):
        prob = float(np.real(a2.conj() @ obs.projectors[k] @ a2))
        if prob <= 1e-6:
            continue
        rho = distant.distant_state_after_complete(pair, s, u_a1, k)
        assert np.linalg.norm(rho - u_a1 @ qlin.outer(a1) @ u_a1.conj().T, 2) <= 1e-10


def test_zero_probability_branch_rejected():
    s, obs = FIXTURES["ideal2"]()
    pair = qlin.tensor(distant.z_ket(+1), distant.z_ket(+1))
    with pytest.raises(ValueError):
        distant.distant_state_after_complete(pair, s, np.eye(2), 1)


def test_singlet_properties():
    sg = distant.singlet()
    assert abs(np.linalg.norm(sg) - 1.0) <= 1e-15
    dec = qlin.schmidt(sg, BipartiteDims(2, 2))
    assert np.allclose(sorted(dec.coefficients), [1 / np.sqrt(2)] * 2, atol=1e-12)
    sz = np.diag([0.5, -0.5]).astype(complex)
    total_z = qlin.tensor(sz, np.eye(2)) + qlin.tensor(np.eye(2), sz)
    assert abs(sg.conj() @ total_z @ sg) <= 1e-12


def test_singlet_z_and_x_steering_exact():
    sg = distant.singlet()
    s2, _ = FIXTURES["ideal2"]()
    for axis in ("z", "x"):
        obs = distant.spin_observable(axis)
        plus = distant.z_ket(+1) if axis == "z" else distant.x_ket(+1)
        cond = distant.conditional_state(sg, obs.projectors[1])
        assert np.linalg.norm(cond - qlin.outer(plus), 2) <= 1e-12
    # full pipeline with the two-level ideal scheme measures z
    rho = distant.distant_state_after_complete(sg, s2, np.eye(2), 1)
    assert np.linalg.norm(rho - qlin.outer(distant.z_ket(+1)), 2) <= 1e-12


def test_find_twin_singlet_opposite_projectors():
    sg = distant.singlet()
    for axis in ("z", "x"):
        obs = distant.spin_observable(axis)
        twin = distant.find_twin(sg, obs)
        assert twin is not None
        # the twin of each projector is the oppositely-oriented one
        assert np.linalg.norm(twin.projectors[0] - obs.projectors[1]) <= 1e-10
        assert np.linalg.norm(twin.projectors[1] - obs.projectors[0]) <= 1e-10


def test_twin_consistency_of_conditional_states():
    rng = np.random.default_rng(107)
    sg = distant.singlet()
    obs = distant.spin_observable("z")
    twin = distant.find_twin(sg, obs)
    for k in range(2):
        via_a2 = distant.conditional_state(sg, obs.projectors[k])
        # conditioning on the twin event on A1 gives the mirrored statement:
        # swap roles by flipping the factors of the state
        swapped = sg.reshape(2, 2).T.reshape(-1)
        via_a1 = distant.conditional_state(swapped, twin.projectors[k])
        probs_a2 = [float(np.real(np.trace(via_a2 @ p))) for p in obs.projectors]
        probs_a1 = [float(np.real(np.trace(via_a1 @ p))) for p in twin.projectors]
        assert max(abs(a - b) for a, b in zip(probs_a2, probs_a1)) <= 1e-10


def test_product_state_has_no_nontrivial_twin():
    rng = np.random.default_rng(109)
    a1 = qlin.random_ket(rng, 2)
    a2 = np.array([0.6, 0.8], dtype=complex)
    pair = qlin.tensor(a1, a2)
    obs = distant.spin_observable("z")
    assert distant.find_twin(pair, obs) is None
    # with a sharp-value second factor the twin exists trivially
    sharp = qlin.tensor(a1, distant.z_ket(+1))
    twin = distant.find_twin(sharp, obs)
    assert twin is not None


def test_subsystem_premeasure_final_ket_form():
    rng = np.random.default_rng(113)
    s, obs = FIXTURES["ideal2"]()
    pair = _random_pair(rng, 3, 2)
    u_a1 = qlin.random_unitary(rng, 3)
    tri = distant.subsystem_premeasure(pair, s, u_a1)
    expected = qlin.tensor(u_a1, s.interaction) @ qlin.tensor(pair, s.ready_state)
    assert np.linalg.norm(tri.ket - expected) <= 1e-12
