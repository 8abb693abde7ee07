import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from ssblab import sigma
from ssblab.errors import ArgumentError, DomainError, NumericError, ResolutionError, ValidityError, ValidityWarning
from ssblab.hilbert import DensityOperator
from ssblab.histories import Classification

SYSTEM = sigma.PhaseSystem(rho0=1.0, L=1.0)


def closed_form_survival(width: float, mass: float, hbar: float, t: float) -> complex:
    """Overlap integral done analytically with Fresnel functions.

    A = (2/Δ)√(m/2πiħt)[Δ(C + iS)(aΔ)/a − (e^{iαΔ²} − 1)/(2iα)], a = √(m/πħt), α = m/2ħt.
    """
    a = math.sqrt(mass / (math.pi * hbar * t))
    alpha = mass / (2 * hbar * t)
    S, C = special.fresnel(a * width)
    pre = (2 / width) * np.sqrt(mass / (2j * math.pi * hbar * t))
    return complex(pre * (width * (C + 1j * S) / a - (np.exp(1j * alpha * width ** 2) - 1) / (2j * alpha)))


@given(log_s=st.floats(-5.0, 4.0), width=st.floats(0.2, 5.0))
@settings(max_examples=25)
def test_survival_matches_closed_form(log_s, width):
    s = 10 ** log_s
    t = s * width ** 2 / 2
    packet = sigma.SquareWavePacket(width)
    a = sigma.survival_amplitude(packet, 1.0, 1.0, t)
    assert abs(a - closed_form_survival(width, 1.0, 1.0, t)) < 1e-9


@given(log_s=st.floats(-4.0, 3.0))
@settings(max_examples=15)
def test_position_and_momentum_routes_agree(log_s):
    packet = sigma.SquareWavePacket(1.0, center=0.3)
    t = 10 ** log_s / 2
    a = sigma.survival_amplitude(packet, 1.0, 1.0, t)
    g = sigma.survival_amplitude_grid(packet, 1.0, 1.0, t)
    assert abs(a - g) < 1e-9


def test_survival_envelope_decreases():
    packet = sigma.SquareWavePacket(1.0)
    ts = np.geomspace(1e-4, 1e2, 25)
    mags = [abs(sigma.survival_amplitude(packet, 1.0, 1.0, t)) for t in ts]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert mags[0] <= 1.0
    # long times: |A| ~ (2/π)√(π/s) e^{...}, so |A|√t is roughly constant
    late = np.array(mags[-4:]) * np.sqrt(ts[-4:])
    assert np.ptp(late) / late.mean() < 0.05


def test_short_time_deficit_has_square_root_law():
    # the sharp edges give 1 − A ≈ √(s/π) e^{iπ/4} at small s = 2ħt/mΔ²
    packet = sigma.SquareWavePacket(1.0)
    for s in (1e-4, 1e-3):
        a = sigma.survival_amplitude(packet, 1.0, 1.0, s / 2)
        approx = math.sqrt(s / math.pi) * np.exp(0.25j * math.pi)
        assert abs((1 - a) - approx) < 0.05 * abs(approx)


def test_survival_edge_cases():
    packet = sigma.SquareWavePacket(2.0)
    assert sigma.survival_amplitude(packet, 1.0, 1.0, 0.0) == 1.0
    assert sigma.survival_amplitude_grid(packet, 1.0, 1.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        sigma.survival_amplitude(packet, 1.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        sigma.SquareWavePacket(0.0)
    with pytest.raises(NumericError):
        sigma.survival_amplitude(packet, 1.0, 1.0, 1e-8)


def test_evolved_square_wave_is_normalised():
    packet = sigma.SquareWavePacket(1.0)
    inside = []
    for X in (30, 60):
        x = np.linspace(-X, X, 4000 * X + 1)
        psi = sigma.evolved_square_wave(packet, 1.0, 1.0, 0.5, x)
        inside.append(np.trapezoid(np.abs(psi) ** 2, x))
    # the |psi|^2 ~ 1/x^2 tail leaves a deficit ~ 1/X; one Richardson step removes it
    assert abs(2 * inside[1] - inside[0] - 1.0) < 1e-4
    psi0 = sigma.evolved_square_wave(packet, 1.0, 1.0, 0.0, np.array([-0.6, 0.0, 0.6]))
    assert np.allclose(psi0, [0.0, 1.0, 0.0])


def test_circle_propagator_is_unitary_and_composes():
    U = sigma.circle_propagator(SYSTEM, 32)
    a, b = U(0.3), U(0.5)
    assert np.allclose(a @ a.conj().T, np.eye(64), atol=1e-12)
    assert np.allclose(a @ b, U(0.8), atol=1e-12)
    H = sigma.circle_hamiltonian(SYSTEM, 32)
    assert np.allclose(H, H.conj().T, atol=1e-12)
    e = np.linalg.eigvalsh(H)
    assert math.isclose(e[0], 0.0, abs_tol=1e-10) and math.isclose(e[1], 0.5 / SYSTEM.m_eff, rel_tol=1e-10)


def test_uniform_state_is_stationary():
    psi = sigma.uniform_ground_state(SYSTEM, 32)
    assert math.isclose(psi.norm2(), 1.0)
    out = sigma.circle_propagator(SYSTEM, 32)(7.0) @ psi.vector
    assert np.allclose(out, psi.vector, atol=1e-12)


@pytest.mark.parametrize("n_sectors", [2, 4, 8])
def test_sector_probabilities_are_uniform(n_sectors):
    fam = sigma.sector_family(n_sectors, 64)
    rho = DensityOperator.from_wavefunction(sigma.uniform_ground_state(SYSTEM, 64))
    for P in fam.projectors.members:
        assert abs(np.trace(rho.matrix @ P).real - 1 / n_sectors) < 1e-12
    dm = sigma.sector_histories(SYSTEM, fam, 0.01, 1)
    assert abs(dm.total_probability() - 1.0) < 1e-12


def test_sector_histories_classification_follows_timescale():
    fam = sigma.sector_family(4, 64)
    with pytest.warns(ValidityWarning):
        t_ch = sigma.consistency_timescale(SYSTEM, fam.width)
    short = sigma.sector_histories(SYSTEM, fam, 1e-4 * t_ch / 2, 2)
    long = sigma.sector_histories(SYSTEM, fam, 10 * t_ch / 2, 2)
    assert short.classification is Classification.APPROXIMATELY_CONSISTENT
    assert long.classification is Classification.INTERFERING
    assert short.diagnostics["max_re_offdiag"] < long.diagnostics["max_re_offdiag"]


def test_sector_family_checks():
    with pytest.raises(ArgumentError):
        sigma.sector_family(3, 64)
    with pytest.raises(ArgumentError):
        sigma.sector_family(1, 64)
    with pytest.raises(ResolutionError):
        sigma.sector_family(16, 16)
    fam = sigma.sector_family(8, 64)
    with pytest.raises(ArgumentError):
        sigma.sector_histories(SYSTEM, fam, 0.1, 4)
    with pytest.raises(DomainError):
        sigma.sector_histories(SYSTEM, fam, 0.0, 1)


def test_consistency_timescale_checks():
    assert math.isclose(sigma.consistency_timescale(sigma.PhaseSystem(2.0, 3.0, 0.5), 0.1),
                        0.01 * 4.0 * 27.0 / 0.5)
    with pytest.raises(DomainError):
        sigma.consistency_timescale(SYSTEM, 7.0)
    with pytest.warns(ValidityWarning):
        sigma.consistency_timescale(SYSTEM, 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ValidityWarning)
        sigma.consistency_timescale(SYSTEM, 0.5)


@given(rho0=st.floats(0.5, 2.0), L=st.floats(0.5, 2.0), width=st.floats(0.01, 0.3))
def test_tilt_for_width_inverts_variance(rho0, L, width):
    system = sigma.PhaseSystem(rho0, L)
    J = sigma.tilt_for_width(system, width)
    assert math.isclose(sigma.tilted_variance(system, J), width ** 2, rel_tol=1e-12)


def test_variance_scales_as_inverse_cube_of_L():
    J = sigma.tilt_for_width(SYSTEM, 0.03)
    var = [sigma.angle_variance(sigma.cosine_trap_ground_state(sigma.PhaseSystem(1.0, L), J)[1])
           for L in (1.0, 2.0)]
    assert abs(var[0] / var[1] / 8 - 1) < 0.01


def test_gaussian_matches_cosine_trap():
    J = sigma.tilt_for_width(SYSTEM, 0.05)
    gauss = sigma.tilted_ground_state(SYSTEM, J)
    energy, exact = sigma.cosine_trap_ground_state(SYSTEM, J)
    assert sigma.fidelity(gauss, exact) > 0.9999
    assert abs(sigma.angle_variance(exact) / 0.05 ** 2 - 1) < 0.01
    # harmonic estimate of the ground energy: −Jρ₀L³ + ħω/2 with ω = √(Jρ₀L³/m_eff)
    depth = J * SYSTEM.rho0 * SYSTEM.L ** 3
    assert abs(energy - (-depth + 0.5 * math.sqrt(depth / SYSTEM.m_eff))) < 0.01 * depth


def test_tilted_validity():
    J = sigma.tilt_for_width(SYSTEM, 1.0)
    with pytest.raises(ValidityError):
        sigma.tilted_ground_state(SYSTEM, J)
    with pytest.raises(DomainError):
        sigma.tilted_variance(SYSTEM, -1.0)
    with pytest.raises(DomainError):
        sigma.PhaseSystem(0.0, 1.0)


def test_fidelity_requires_same_grid():
    a = sigma.uniform_ground_state(SYSTEM, 16)
    b = sigma.uniform_ground_state(SYSTEM, 32)
    with pytest.raises(ArgumentError):
        sigma.fidelity(a, b)
