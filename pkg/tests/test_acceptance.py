"""Release acceptance battery, one test per criterion.

Every criterion prints its pass/fail line (visible with -v / on failure) and
asserts at the tolerance pinned in spincopter.acceptance. Two criteria are
expected to fail on the default model: the bicopter-circle horizontal RMS
and the hand-throw recovery rate. Both trace to the same physics: with the
per-propeller anisotropic rotor drag and stability-bounded bang-bang gains,
the achievable tilt slew rate is capped near deadzone * spin * (2 - Iz/Id),
an order below what the reference hardware evidently had. See
notes/decisions.md at the repository root for the full analysis. The tests
assert the stated bounds regardless; they are not weakened to pass.
"""

import pytest

from spincopter import acceptance


@pytest.fixture(scope="module")
def setup(fleet, gains):
    return fleet, gains


def _run(criterion, setup):
    fleet, gains = setup
    result = criterion(fleet, gains)
    print(result.line())
    assert result.passed, result.detail


def test_relaxed_hover_convergence(setup):
    _run(acceptance.relaxed_hover_convergence, setup)


def test_precession_oracle(setup):
    _run(acceptance.precession_oracle, setup)


def test_routh_hurwitz_vs_eigenvalue_oracle(setup):
    _run(acceptance.routh_grid_agreement, setup)


def test_cycle_average_allocation_identity(setup):
    _run(acceptance.allocation_identity, setup)


def test_reduced_vs_full_model_agreement(setup):
    _run(acceptance.reduced_vs_full, setup)


def test_bicopter_flight_rms_bounds(setup):
    _run(acceptance.bicopter_flight, setup)


def test_quadcopter_flight_rms_and_split_brain(setup):
    _run(acceptance.quad_flights, setup)


def test_mode_detection(setup):
    _run(acceptance.mode_detection, setup)


def test_hand_throw_recovery(setup):
    _run(acceptance.hand_throw_recovery, setup)


def test_conservation_convergence_determinism(setup):
    _run(acceptance.conservation_and_determinism, setup)
