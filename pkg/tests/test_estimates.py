import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssblab import estimates
from ssblab.errors import DomainError

DEFAULT = estimates.SolidStateInputs()


def test_default_values_by_hand():
    # m_p = 1.6726e-27 kg, E = 1.6022e-19 J, l = 1e-10 m, L = 1 mm
    root = math.sqrt(1.67262192e-27 * 1.602176634e-19)
    assert math.isclose(estimates.action_density(DEFAULT), root / 1e-20, rel_tol=1e-6)
    assert math.isclose(estimates.action_density(DEFAULT), 1.637e-3, rel_tol=1e-3)
    assert math.isclose(estimates.discrete_gap_exponent(DEFAULT), 1.552e22, rel_tol=1e-3)
    assert math.isclose(estimates.ch_coefficient(DEFAULT), 1.0217e16, rel_tol=1e-4)


def test_gap_stays_in_log_form():
    gap = estimates.discrete_gap(DEFAULT)
    assert gap.render() == "e^(-1.55e+22)"
    assert gap.linear() == 0.0
    assert math.isclose(gap.log10_value, -1.552e22 / math.log(10), rel_tol=1e-3)
    assert "J x e^(-" in str(gap)
    assert estimates.LogEnergy(-math.inf, 1.0).render() == "0"
    assert math.isclose(estimates.LogEnergy(-1.0, 2.0).linear(), 2 / math.e)
    with pytest.raises(DomainError):
        estimates.LogEnergy(math.nan, 1.0)


def test_decoherence_time_exponent():
    ln_t = estimates.ln_decoherence_time(DEFAULT)
    # t = ħ/ΔE, so the exponent is the gap exponent plus ln(ħ/E); the latter is lost next to 1e22
    assert ln_t == estimates.discrete_gap_exponent(DEFAULT) + math.log(estimates.HBAR / estimates.ELECTRON_VOLT)
    small = estimates.SolidStateInputs(L=1e-9)
    assert math.isclose(estimates.ln_decoherence_time(small) - estimates.discrete_gap_exponent(small),
                        math.log(estimates.HBAR / estimates.ELECTRON_VOLT), rel_tol=1e-9)


def test_continuous_conditions():
    ok = estimates.continuous_conditions(DEFAULT, 1.0)
    assert ok.condition_ok and math.isclose(ok.t_mu, 1e-6)
    assert math.isclose(ok.delta2_threshold, 9.787e-12, rel_tol=1e-3)
    tiny = estimates.continuous_conditions(DEFAULT, 1e-6)
    assert not tiny.condition_ok
    assert set(ok.to_record()) == {"t_CH", "t_mu", "ratio", "delta2_threshold", "margin", "condition_ok"}
    with pytest.raises(DomainError):
        estimates.continuous_conditions(DEFAULT, 7.0)
    with pytest.raises(DomainError):
        estimates.continuous_conditions(DEFAULT, 1.0, margin=0.0)


@given(Delta=st.floats(1e-8, 6.0), L=st.floats(1e-6, 1.0))
def test_threshold_marks_the_margin(Delta, L):
    inp = estimates.SolidStateInputs(L=L)
    c = estimates.continuous_conditions(inp, Delta)
    assert math.isclose(c.ratio / c.margin, c.delta2_threshold / Delta ** 2, rel_tol=1e-12)
    assert math.isclose(c.t_CH, estimates.ch_coefficient(inp) * L ** 3 * Delta ** 2, rel_tol=1e-12)


@given(alpha=st.floats(1e-3, 1e3), L=st.floats(1e-6, 1.0))
def test_exponent_scales_with_volume_and_alpha(alpha, L):
    inp = estimates.SolidStateInputs(alpha=alpha, L=L)
    ratio = estimates.discrete_gap_exponent(inp) / estimates.discrete_gap_exponent(DEFAULT)
    assert math.isclose(ratio, alpha * (L / 1e-3) ** 3, rel_tol=1e-10)


def test_alpha_sweep_spans_range():
    sweep = estimates.alpha_sweep(DEFAULT, 7)
    assert len(sweep) == 7
    assert math.isclose(sweep[0][0], 1e-3) and math.isclose(sweep[-1][0], 1e3)
    assert all(b[2] > a[2] for a, b in zip(sweep, sweep[1:]))
    # even at the weakest binding the gap exponent is astronomically large
    assert sweep[0][2] > 1e19


@pytest.mark.parametrize("field", ["m", "E", "l", "alpha", "L", "c_sound"])
def test_inputs_must_be_positive(field):
    with pytest.raises(DomainError):
        estimates.SolidStateInputs(**{field: 0.0})
    with pytest.raises(DomainError):
        estimates.SolidStateInputs(**{field: math.inf})
