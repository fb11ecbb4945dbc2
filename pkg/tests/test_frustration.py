import numpy as np
import pytest
from hypothesis import given, strategies as st

from lfsl.errors import InvalidParameter
from lfsl.frustration import (
    angle_residuals,
    frustration_scan,
    per_term_residual,
    total_residual,
    unit_cell_functional,
)

angles = st.floats(-10, 10, allow_nan=False)


def symmetric_minimax(alpha):
    """Per-term minimum for α1 = α2 = α from the symmetric ansatz θ-steps π/2 - x.

    Balancing 2 sin x = 4α cos 2x gives sin x = (√(1+32α²) - 1)/(8α).
    """
    return (np.sqrt(1 + 32 * alpha ** 2) - 1) / (4 * alpha)


def test_functional_aligned_phases():
    n, gamma = 1.7, 0.3
    assert unit_cell_functional((0, 0, 0, 0), n, 1.0, gamma, gamma) == pytest.approx(2 * n * gamma)


def test_functional_staggered_phases():
    n, gamma = 0.9, 0.4
    val = unit_cell_functional((0, np.pi / 2, np.pi, 3 * np.pi / 2), n, 1.3, gamma, gamma)
    assert val == pytest.approx(-2 * n * gamma, abs=1e-14)


def test_functional_empty_cell():
    assert unit_cell_functional((0.1, 0.2, 0.3, 0.4), 0.0, 1.0, 0.3, 0.5) == 0


def test_functional_needs_coherent_coupling():
    with pytest.raises(InvalidParameter):
        unit_cell_functional((0, 0, 0, 0), 1.0, 0.0, 0.3, 0.3)


@given(st.tuples(angles, angles, angles, angles), st.floats(0, 2), st.floats(0, 2), st.floats(0.1, 3))
def test_functional_matches_residuals(th, g1, g2, eta):
    # L/(2ηn) = (α1+α2) cos φ + i[c12 - c23 + c34 - c41 + (α2-α1) sin φ]
    a1, a2 = g1 / (2 * eta), g2 / (2 * eta)
    val = unit_cell_functional(th, 1.0, eta, g1, g2) / (2 * eta)
    r_real, r_imag = angle_residuals(th, a1, a2)
    assert abs(abs(val.imag) - r_real) < 1e-9
    assert abs(abs(val.real) - r_imag) < 1e-9


def test_residual_zero_exists():
    r = angle_residuals((0, np.pi / 4, np.pi / 2, np.pi / 4), 0.3, 0.3)
    assert r == pytest.approx((0, 0), abs=1e-15)


def test_residual_aligned_dissipation():
    assert angle_residuals((0.4, 1.0, 0.4, 2.0), 0.2, 0.5)[1] == pytest.approx(0.7)


@given(st.tuples(angles, angles, angles, angles))
def test_residual_closed_limit(th):
    assert angle_residuals(th, 0.0, 0.0)[1] == 0


@given(st.tuples(angles, angles, angles, angles), angles, st.floats(0, 2), st.floats(0, 2))
def test_global_phase_invariance(th, shift, a1, a2):
    shifted = tuple(t + shift for t in th)
    assert np.allclose(angle_residuals(th, a1, a2), angle_residuals(shifted, a1, a2), atol=1e-9)
    assert per_term_residual(th, a1, a2) == pytest.approx(per_term_residual(shifted, a1, a2), abs=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
def test_symmetric_dissipation_is_frustrated(alpha):
    rep = frustration_scan(alpha, alpha, 64)
    assert rep.frustrated
    assert rep.min_total_residual < 1e-6
    assert rep.min_per_term_residual == pytest.approx(symmetric_minimax(alpha), abs=1e-6)
    # the reported phases realize the reported value
    assert per_term_residual(rep.argmin_phases, alpha, alpha) == pytest.approx(rep.min_per_term_residual)
    assert rep.argmin_phases[0] == 0


def test_closed_cell_not_frustrated():
    rep = frustration_scan(0.0, 0.0, 32)
    assert not rep.frustrated
    assert rep.min_per_term_residual < 1e-12


def test_grid_convergence():
    a = frustration_scan(0.5, 0.5, 64).min_per_term_residual
    b = frustration_scan(0.5, 0.5, 128).min_per_term_residual
    assert abs(a - b) / b < 0.02


def test_scan_beats_coarse_brute_force():
    alpha1, alpha2 = 0.2, 0.6
    grid = 2 * np.pi * np.arange(16) / 16
    brute = min(per_term_residual((0, a, b, c), alpha1, alpha2) for a in grid for b in grid for c in grid)
    rep = frustration_scan(alpha1, alpha2, 16)
    assert rep.min_per_term_residual <= brute + 1e-12
    assert total_residual((0, np.pi / 4, np.pi / 2, np.pi / 4), 0.3, 0.3) < 1e-15


def test_grid_too_coarse():
    with pytest.raises(InvalidParameter):
        frustration_scan(0.5, 0.5, 8)


def test_report_dict_order():
    rep = frustration_scan(0.5, 0.5, 16)
    assert list(rep.to_dict()) == ["alphas", "grid_resolution", "min_per_term_residual",
                                   "min_total_residual", "argmin_phases", "frustrated", "threshold"]
