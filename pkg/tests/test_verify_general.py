"""Seven-criterion verification: fixtures, failure witnesses, population consistency."""

import numpy as np
import pytest

from premeasure import qlin
from premeasure.fixtures import FIXTURES, _obs3
from premeasure.observables import make_spectral_form
from premeasure.qlin import BipartiteDims, basis_ket
from premeasure.scheme import make_scheme
from premeasure.verify_general import (GeneralCriterion, check_time_reversal,
                                       verify_all_general, verify_general)


def test_all_fixtures_pass_every_general_criterion(fixture_schemes):
    for name, (s, obs) in fixture_schemes.items():
        summary = verify_all_general(s, obs)
        assert summary.equivalence_consistent, name
        for report in summary.reports:
            assert report.passed, f"{name}: {report.criterion} {report.residual}"


def test_swapped_pointer_fails_with_witness():
    s, obs = FIXTURES["ideal3"]()
    swapped = make_spectral_form(s.pointer.eigenvalues,
                                 (s.pointer.projectors[1], s.pointer.projectors[0]))
    bad = make_scheme(s.dims, s.ready_state, swapped, s.interaction)
    report = verify_general(bad, obs, GeneralCriterion.CC_INV)
    assert report.status == "fail"
    assert report.witness is not None and "k=" in report.witness


def test_random_unitary_fails_consistently():
    rng = np.random.default_rng(51)
    obs = _obs3()
    pointer = FIXTURES["ideal3"]()[0].pointer
    s = make_scheme(BipartiteDims(3, 2), basis_ket(2, 0), pointer,
                    qlin.random_unitary(rng, 6))
    summary = verify_all_general(s, obs, rng=rng)
    statuses = {r.status for r in summary.reports}
    assert statuses == {"fail"}
    assert summary.equivalence_consistent


def test_trivial_observable_identity_interaction_passes():
    # one eigenvalue, projector = identity: any pointer position works with U = I
    obs = make_spectral_form((1.0,), (np.eye(3, dtype=complex),))
    pointer = make_spectral_form((0.0, 1.0),
                                 (np.diag([1.0, 0.0]).astype(complex),
                                  np.diag([0.0, 1.0]).astype(complex)))
    s = make_scheme(BipartiteDims(3, 2), basis_ket(2, 0), pointer,
                    np.eye(6, dtype=complex))
    summary = verify_all_general(s, obs)
    assert all(r.passed for r in summary.reports)


def test_population_equivalence_consistency(population):
    for i, (s, obs) in enumerate(population):
        summary = verify_all_general(s, obs, trials=10)
        assert summary.equivalence_consistent, f"scheme {i}"


def test_cc_implies_prc_over_population(population):
    for i, (s, obs) in enumerate(population):
        cc = verify_general(s, obs, GeneralCriterion.CC_INV)
        if cc.passed:
            prc = verify_general(s, obs, GeneralCriterion.PRC)
            assert prc.status != "fail", f"scheme {i}: CC holds but PRC fails"


def test_time_reversal_on_calibrated_scheme():
    s, obs = FIXTURES["ideal3"]()
    rng = np.random.default_rng(53)
    for _ in range(20):
        report = check_time_reversal(s, obs, qlin.random_ket(rng, 3))
        assert report.passed


def test_time_reversal_rejects_uncalibrated_scheme():
    rng = np.random.default_rng(57)
    obs = _obs3()
    pointer = FIXTURES["ideal3"]()[0].pointer
    s = make_scheme(BipartiteDims(3, 2), basis_ket(2, 0), pointer,
                    qlin.random_unitary(rng, 6))
    with pytest.raises(ValueError):
        check_time_reversal(s, obs, qlin.random_ket(rng, 3))


def test_every_criterion_reported_exactly_once():
    s, obs = FIXTURES["ideal3"]()
    summary = verify_all_general(s, obs)
    names = [r.criterion for r in summary.reports]
    assert sorted(names) == sorted(c.value for c in GeneralCriterion)
