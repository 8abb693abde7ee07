import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssblab.errors import ArgumentError, DomainError, ShapeError
from ssblab.potentials import (FieldWellSpec, Harmonic, QuarticDoubleWell, Tabulated, Tilted, evaluate, field_gap,
                               instanton_action, is_symmetric, minima, particle_splitting, potential_from_dict,
                               potential_to_dict, quartic_action_closed_form, well_geometry)

positive = st.floats(0.1, 10.0)


@given(lam=positive, mu2=positive, x=st.floats(-20, 20))
def test_quartic_is_even_and_vanishes_at_minima(lam, mu2, x):
    V = QuarticDoubleWell(lam, mu2)
    assert math.isclose(evaluate(V, x), evaluate(V, -x), rel_tol=1e-12, abs_tol=1e-12)
    assert abs(evaluate(V, V.x0)) < 1e-9 * max(1.0, mu2 ** 2 / lam)
    assert evaluate(V, x) >= -1e-9 * max(1.0, mu2 ** 2 / lam)


@given(lam=positive, mu2=positive)
def test_quartic_geometry(lam, mu2):
    V = QuarticDoubleWell(lam, mu2)
    g = well_geometry(V, 1.0)
    assert math.isclose(g.x0, math.sqrt(6 * mu2 / lam), rel_tol=1e-9)
    assert math.isclose(g.barrier_height, 1.5 * mu2 ** 2 / lam, rel_tol=1e-8)
    # V'' at the minimum is 2 mu^2
    assert math.isclose(g.omega, math.sqrt(2 * mu2), rel_tol=1e-9)


@given(lam=st.floats(0.2, 5.0), mu2=st.floats(0.2, 5.0), mass=st.floats(0.2, 5.0))
def test_instanton_action_matches_closed_form(lam, mu2, mass):
    V = QuarticDoubleWell(lam, mu2)
    assert math.isclose(instanton_action(V, mass), quartic_action_closed_form(V, mass), rel_tol=1e-8)


def test_numerical_derivatives_match():
    V = QuarticDoubleWell(0.7, 1.3)
    x = np.linspace(-3, 3, 11)
    h = 1e-5
    num = (V(x + h) - V(x - h)) / (2 * h)
    assert np.allclose(V.derivative(x), num, atol=1e-7)
    num2 = (V(x + h) - 2 * V(x) + V(x - h)) / h ** 2
    assert np.allclose(V.derivative(x, 2), num2, atol=1e-3)
    with pytest.raises(ArgumentError):
        V.derivative(x, 3)


def test_tilted_breaks_symmetry_and_shifts_minimum():
    V = QuarticDoubleWell(1.0, 1.0)
    T = Tilted(V, 0.05)
    assert is_symmetric(V) and not is_symmetric(T)
    assert is_symmetric(Tilted(V, 0.0))
    mins = minima(T)
    assert len(mins) == 2 and mins[-1] > V.x0
    assert abs(T.derivative(mins[-1])) < 1e-8


def test_tabulated_reproduces_analytic_well():
    V = QuarticDoubleWell(1.0, 1.0)
    x = np.linspace(-5, 5, 801)
    T = Tabulated(tuple(x), tuple(V(x)))
    assert is_symmetric(T)
    xs = np.linspace(-4.5, 4.5, 37)
    assert np.allclose(T(xs), V(xs), atol=1e-6)
    assert math.isclose(instanton_action(T, 1.0), instanton_action(V, 1.0), rel_tol=1e-5)
    with pytest.raises(DomainError):
        T(6.0)


def test_tabulated_rejects_bad_input():
    with pytest.raises(ArgumentError):
        Tabulated((0.0, 1.0, 1.0, 2.0), (0.0, 1.0, 2.0, 3.0))
    with pytest.raises(ArgumentError):
        Tabulated((0.0, 1.0), (0.0, 1.0))
    with pytest.raises(DomainError):
        Tabulated((0.0, 1.0, 2.0, 3.0), (0.0, float("nan"), 2.0, 3.0))


def test_domain_errors():
    with pytest.raises(DomainError):
        QuarticDoubleWell(-1.0, 1.0)
    with pytest.raises(DomainError):
        Harmonic(0.0)
    with pytest.raises(ShapeError):
        instanton_action(Harmonic(1.0), 1.0)
    with pytest.raises(DomainError):
        well_geometry(Harmonic(1.0), 0.0)


def test_harmonic_geometry_uses_its_mass():
    g = well_geometry(Harmonic(2.0, mass=3.0), 3.0)
    assert math.isclose(g.omega, 2.0)
    assert g.barrier_height == 0.0


@given(s=st.floats(1.0, 60.0), omega=positive)
def test_particle_splitting_log_form(s, omega):
    geom = well_geometry(Harmonic(omega), 1.0)
    r = particle_splitting(geom, s)
    assert math.isclose(r.ln_delta_E, math.log(omega) + 0.5 * math.log(s) - s, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(r.delta_E, omega * math.sqrt(s) * math.exp(-s), rel_tol=1e-10)


def test_particle_splitting_scales_with_kappa():
    geom = well_geometry(QuarticDoubleWell(1.0, 1.0), 1.0)
    a, b = particle_splitting(geom, 5.0, 1.0), particle_splitting(geom, 5.0, 2.0)
    assert math.isclose(b.delta_E, 2 * a.delta_E)


def test_field_gap_macroscopic_box_stays_in_log_form():
    fw = FieldWellSpec(V=lambda phi: (phi ** 2 - 1.0) ** 2, phi0=1.0, L=1e3, m=1.0)
    r = field_gap(fw)
    # ∫ sqrt(2) (1 - φ²) dφ over [-1, 1] = 4√2/3
    assert math.isclose(r.S, 1e9 * 4 * math.sqrt(2) / 3, rel_tol=1e-9)
    assert r.delta_E == 0.0 and math.isfinite(r.ln_delta_E) and r.ln_delta_E < -1e9
    zero = field_gap(FieldWellSpec(V=lambda phi: phi * 0.0, phi0=0.0, L=1.0, m=1.0))
    assert zero.delta_E == 0.0 and zero.ln_delta_E == -math.inf


@pytest.mark.parametrize("spec", [QuarticDoubleWell(1.0, 2.0), Harmonic(1.5, 0.2, 2.0),
                                  Tilted(QuarticDoubleWell(1.0, 1.0), 0.1)])
def test_dict_round_trip(spec):
    assert potential_from_dict(potential_to_dict(spec)) == spec


def test_dict_errors_name_the_key():
    with pytest.raises(ArgumentError, match=r"potential\.mu2"):
        potential_from_dict({"kind": "quartic", "lam": 1.0})
    with pytest.raises(ArgumentError, match=r"potential\.extra"):
        potential_from_dict({"kind": "harmonic", "omega": 1.0, "extra": 2})
    with pytest.raises(ArgumentError, match="unknown kind"):
        potential_from_dict({"kind": "sextic"})
