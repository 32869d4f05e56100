import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depinner.errors import ConvergenceError, DomainError
from depinner.transmon import (
    TransmonParams,
    asymptotic_f01,
    harmonic_deviation_report,
    infer_EJ_EC,
    spectrum,
)
from depinner.transmon import _levels

QUDITS = [(166e6, 23.2e9), (168e6, 22.2e9)]


def test_params_validation():
    with pytest.raises(DomainError):
        TransmonParams(0.0, 1e9)
    with pytest.raises(DomainError):
        TransmonParams(1e8, 1e9, n_charge=5)
    with pytest.raises(DomainError):
        TransmonParams(1e8, 1e9, n_charge=10, n_levels=11)


@pytest.mark.parametrize("ec,ej", QUDITS + [(166e6, 23.24e9)])
def test_f01_near_asymptotic(ec, ej):
    s = spectrum(TransmonParams(ec, ej))
    assert abs(s.f01 / asymptotic_f01(ec, ej) - 1) < 0.01


@pytest.mark.parametrize("ec,ej", QUDITS)
def test_anharmonicity_near_minus_ec(ec, ej):
    s = spectrum(TransmonParams(ec, ej))
    assert abs(s.anharmonicity / -ec - 1) < 0.10


def test_transition_count():
    s = spectrum(TransmonParams(166e6, 23.2e9, n_levels=6))
    assert s.transitions.shape == (5,)
    assert np.all(s.transitions > 0)


def test_weak_coupling_limit():
    ec = 200e6
    E = _levels(ec, 1e-6 * ec, 30, 5)
    np.testing.assert_allclose(E - E[0], [0.0, 4 * ec, 4 * ec, 16 * ec, 16 * ec], atol=1e-3 * ec)


def test_levels_match_dense_solver():
    ec, ej, n = 166e6, 23.2e9, 30
    k = np.arange(-n, n + 1)
    H = np.diag(4.0 * ec * k.astype(float) ** 2) - 0.5 * ej * (np.eye(2 * n + 1, k=1) + np.eye(2 * n + 1, k=-1))
    ref = np.linalg.eigvalsh(H)[:6]
    np.testing.assert_allclose(_levels(ec, ej, n, 6), ref, rtol=1e-12, atol=1e-12 * abs(ref).max())


@settings(max_examples=30, deadline=None)
@given(ratio=st.floats(20.0, 500.0), ec=st.floats(50e6, 500e6))
def test_basis_convergence_30_vs_60(ratio, ec):
    ej = ratio * ec
    f30 = np.diff(_levels(ec, ej, 30, 6))
    f60 = np.diff(_levels(ec, ej, 60, 6))
    assert np.all(np.abs(f60 - f30) <= 1e-9 * np.abs(f60))


def test_spectrum_reports_converged_basis():
    s = spectrum(TransmonParams(166e6, 23.2e9))
    assert s.n_charge == 30


def test_spectrum_grows_basis_when_needed():
    # a tiny starting basis is too small for E_J/E_C = 500; the check doubles it
    s = spectrum(TransmonParams(100e6, 50e9, n_charge=10, n_levels=6))
    assert s.n_charge > 10
    ref = np.diff(_levels(100e6, 50e9, 120, 6))
    np.testing.assert_allclose(s.transitions, ref, rtol=1e-9)


def test_spectrum_gives_up_at_cap():
    with pytest.raises(ConvergenceError):
        spectrum(TransmonParams(1e3, 1e12, n_charge=10, n_levels=6))


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.1, 10.0))
def test_spectrum_scaling(s):
    base = spectrum(TransmonParams(166e6, 23.2e9)).transitions
    scaled = spectrum(TransmonParams(166e6 * s, 23.2e9 * s)).transitions
    np.testing.assert_allclose(scaled, s * base, rtol=1e-12)


def test_transitions_decrease_with_level():
    t = spectrum(TransmonParams(166e6, 23.2e9)).transitions
    assert np.all(np.diff(t) < 0)


# -- inference -----------------------------------------------------------------------

@pytest.mark.parametrize("ec,ej", QUDITS)
def test_infer_roundtrip(ec, ej):
    s = spectrum(TransmonParams(ec, ej))
    p = infer_EJ_EC(s.transitions[0], s.transitions[1])
    assert p.E_C == pytest.approx(ec, rel=1e-4)
    assert p.E_J == pytest.approx(ej, rel=1e-4)


def test_infer_residuals_below_one_hz():
    s = spectrum(TransmonParams(166e6, 23.2e9))
    p = infer_EJ_EC(s.transitions[0], s.transitions[1])
    back = spectrum(p).transitions
    assert abs(back[0] - s.transitions[0]) < 1.0 and abs(back[1] - s.transitions[1]) < 1.0


@settings(max_examples=25, deadline=None)
@given(ratio=st.floats(20.0, 500.0), ec=st.floats(80e6, 400e6))
def test_infer_inverts_spectrum(ratio, ec):
    ej = ratio * ec
    t = spectrum(TransmonParams(ec, ej)).transitions
    p = infer_EJ_EC(t[0], t[1])
    assert p.E_C == pytest.approx(ec, rel=1e-4)
    assert p.E_J == pytest.approx(ej, rel=1e-4)


@pytest.mark.parametrize("f01,f12", [(5e9, 5e9), (5e9, 5.1e9), (5e9, 0.0)])
def test_infer_rejects_non_transmon(f01, f12):
    with pytest.raises(DomainError):
        infer_EJ_EC(f01, f12)


# -- harmonic deviation report -------------------------------------------------------------

def test_report_identity():
    p = TransmonParams(166e6, 23.2e9)
    rows = harmonic_deviation_report(spectrum(p).transitions, p)
    assert [k for k, _ in rows] == [0, 1, 2, 3, 4]
    assert all(d == 0.0 for _, d in rows)


def test_report_inferred_first_two_vanish():
    measured = spectrum(TransmonParams(168e6, 22.2e9)).transitions + np.array([0, 0, 3e5, -2e5, 7e5])
    p = infer_EJ_EC(measured[0], measured[1])
    rows = harmonic_deviation_report(measured, p)
    assert abs(rows[0][1]) < 1.0 and abs(rows[1][1]) < 1.0


def test_report_planted_offset():
    p = TransmonParams(166e6, 23.2e9)
    measured = spectrum(p).transitions.copy()
    measured[2] += 1e6
    rows = harmonic_deviation_report(measured, p)
    assert rows[2][1] == pytest.approx(1e6, abs=1e-6)
    assert rows[3][1] == 0.0


def test_report_partial_measurement():
    p = TransmonParams(166e6, 23.2e9)
    rows = harmonic_deviation_report(spectrum(p).transitions[:3], p)
    assert len(rows) == 3


def test_report_too_many_transitions():
    p = TransmonParams(166e6, 23.2e9, n_levels=4)
    with pytest.raises(DomainError):
        harmonic_deviation_report(np.ones(4) * 5e9, p)
    with pytest.raises(DomainError):
        harmonic_deviation_report([], p)
