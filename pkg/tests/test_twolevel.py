import math

import numpy as np

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssblab.errors import ArgumentError, ShapeError
from ssblab.hilbert import Grid
from ssblab.potentials import Harmonic, QuarticDoubleWell, Tilted
from ssblab.twolevel import (TwoLevelSystem, build_doublet, history_probabilities, interference_term,
                             measurement_chain, protocol_compare, string_probability, two_level_system)

angles = st.floats(0.0, math.pi)


@pytest.fixture(scope="module")
def doublet():
    return build_doublet(QuarticDoubleWell(1.0, 1.0))


def test_doublet_orientation_and_gap(doublet):
    assert doublet.omega_gap > 0
    assert doublet.right_localization() > 0.99
    x = doublet.psi0.grid.x
    assert np.sum(x * np.abs(doublet.psi_R.amplitudes) ** 2) > 0
    assert np.sum(x * np.abs(doublet.psi_L.amplitudes) ** 2) < 0


def test_mixing_angle_round_trip(doublet):
    assert math.isclose(doublet.mixing_angle(doublet.tau_for_angle(0.3)), 0.3)


def test_asymmetric_potential_is_rejected():
    with pytest.raises(ShapeError):
        build_doublet(Tilted(QuarticDoubleWell(1.0, 1.0), 0.2), grid=Grid(-10.0, 10.0, 600))


def test_harmonic_localization_oracle():
    p = build_doublet(Harmonic(1.0), n_points=2048).right_localization()
    assert abs(p - (0.5 + 1 / math.sqrt(2 * math.pi))) < 1e-4


@given(theta=angles, n=st.integers(1, 8))
def test_chain_distribution_is_normalised(theta, n):
    probs = measurement_chain(None, 1.0, n, theta=theta).probabilities
    assert len(probs) == 2 ** n
    assert math.isclose(sum(probs.values()), 1.0, rel_tol=1e-12)
    assert all(p >= 0 for p in probs.values())


@given(theta=angles, n=st.integers(2, 7))
def test_chain_marginal_skipping_last_measurement(theta, n):
    full = measurement_chain(None, 1.0, n, theta=theta).probabilities
    short = measurement_chain(None, 1.0, n - 1, theta=theta).probabilities
    for s, p in short.items():
        assert math.isclose(full[s + "L"] + full[s + "R"], p, rel_tol=1e-12, abs_tol=1e-15)


@given(theta=angles)
def test_protocol_closed_forms(theta):
    pc = protocol_compare(None, 1.0, theta=theta)
    lll, lrl = string_probability("LLL", theta), string_probability("LRL", theta)
    assert math.isclose(lll + lrl, pc.pr_sum, abs_tol=1e-14)
    assert math.isclose(measurement_chain(None, 2.0, 2, theta=2 * theta).probabilities["LL"], pc.pr_skip,
                        abs_tol=1e-14)
    assert pc.violation <= 1e-15


@given(theta=st.floats(0.01, math.pi - 0.01))
def test_histories_engine_matches_chain(theta):
    system = TwoLevelSystem((0.0, 1.0))
    tau = system.tau_for_angle(theta)
    engine = history_probabilities(system, tau, 3)
    chain = measurement_chain(None, tau, 3, theta=theta).probabilities
    for s in chain:
        assert math.isclose(engine[s], chain[s], abs_tol=1e-12)
    pc = protocol_compare(None, tau, theta=theta)
    assert math.isclose(interference_term(system, tau), pc.violation, abs_tol=1e-12)


def test_two_level_system_from_model(doublet):
    system = two_level_system(doublet)
    assert math.isclose(system.omega_gap, doublet.omega_gap)


def test_string_validation():
    with pytest.raises(ArgumentError):
        string_probability("LXR", 0.1)
    with pytest.raises(ArgumentError):
        measurement_chain(None, 1.0, 0, theta=0.1)
    with pytest.raises(ArgumentError):
        measurement_chain(None, 1.0, 2)
