"""Order-of-magnitude estimates for a macroscopic solid, in SI units.

A solid made of constituents of mass m bound with energy E at spacing l has
an action density S/V ≈ α√(mE)/l².  For a discrete symmetry the gap between
the two lowest states of a sample of side L is suppressed by exp(−S L³/ħV),
a number far below the smallest float, so gaps are carried as logarithms.
For a continuous symmetry the phase-sector consistency time is
t_CH = Δ² m_eff/ħ with m_eff/ħ = √(m/E) L³/l², to be compared with the
sound-crossing time L/c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError

PROTON_MASS = constants.m_p
ELECTRON_VOLT = constants.e
HBAR = constants.hbar
DEFAULT_MARGIN = 1e-2
ALPHA_RANGE = (1e-3, 1e3)


@dataclass(frozen=True)
class SolidStateInputs:
    m: float = PROTON_MASS
    E: float = ELECTRON_VOLT
    l: float = 1e-10
    alpha: float = 1.0
    L: float = 1e-3
    c_sound: float = 1e3

    def __post_init__(self):
        for name in ("m", "E", "l", "alpha", "L", "c_sound"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class LogEnergy:
    """An energy ``reference · e^{ln_value}`` kept in log form."""

    ln_value: float
    reference: float

    def __post_init__(self):
        if math.isnan(self.ln_value) or self.ln_value == math.inf:
            raise DomainError("ln_value must be finite or -inf")

    @property
    def log10_value(self) -> float:
        return self.ln_value / math.log(10)

    def linear(self) -> float:
        """The energy in joules; 0.0 when it underflows."""
        return self.reference * math.exp(self.ln_value) if self.ln_value > -745 else 0.0

    def render(self) -> str:
        if self.ln_value == -math.inf:
            return "0"
        sign = "-" if self.ln_value < 0 else ""
        return f"e^({sign}{abs(self.ln_value):.3g})"

    def __str__(self) -> str:
        return f"{self.reference:.3g} J x {self.render()}"


def action_density(inp: SolidStateInputs) -> float:
    """S/V = α√(mE)/l² in J·s/m³."""
    return inp.alpha * math.sqrt(inp.m * inp.E) / inp.l ** 2


def discrete_gap_exponent(inp: SolidStateInputs) -> float:
    """S L³/ħV, the exponent suppressing the gap of a sample of side L."""
    return action_density(inp) * inp.L ** 3 / HBAR


def discrete_gap(inp: SolidStateInputs) -> LogEnergy:
    """ΔE ≈ E e^{−S L³/ħV}."""
    return LogEnergy(-discrete_gap_exponent(inp), inp.E)


def ln_decoherence_time(inp: SolidStateInputs) -> float:
    """ln(t/1 s) for t = ħ/ΔE, below which L/R histories stay effectively decoherent."""
    return discrete_gap_exponent(inp) + math.log(HBAR / inp.E)


def ch_coefficient(inp: SolidStateInputs) -> float:
    """t_CH/(L³Δ²) = √(m/E)/l², in s/m³."""
    return math.sqrt(inp.m / inp.E) / inp.l ** 2


@dataclass(frozen=True)
class ContinuousConditions:
    t_CH: float
    t_mu: float
    ratio: float
    delta2_threshold: float
    margin: float
    condition_ok: bool

    def to_record(self) -> dict:
        return {k: getattr(self, k) for k in ("t_CH", "t_mu", "ratio", "delta2_threshold", "margin", "condition_ok")}


def continuous_conditions(inp: SolidStateInputs, Delta: float, margin: float = DEFAULT_MARGIN) -> ContinuousConditions:
    """Compare the sector consistency time with the sound-crossing time L/c.

    The condition holds when t_mu/t_CH < margin.  ``delta2_threshold`` is the
    Δ² at which the ratio equals the margin.
    """
    if not 0 < Delta < 2 * math.pi:
        raise DomainError(f"Delta must lie in (0, 2π), got {Delta}")
    if not margin > 0:
        raise DomainError("margin must be positive")
    coeff = ch_coefficient(inp)
    t_ch = coeff * inp.L ** 3 * Delta ** 2
    t_mu = inp.L / inp.c_sound
    ratio = t_mu / t_ch
    threshold = t_mu / (coeff * inp.L ** 3 * margin)
    return ContinuousConditions(t_ch, t_mu, ratio, threshold, margin, bool(ratio < margin))


def alpha_sweep(inp: SolidStateInputs, n: int = 7) -> list[tuple[float, float, float]]:
    """(α, S/V, gap exponent) for α log-spaced over the allowed range."""
    out = []
    for a in np.geomspace(*ALPHA_RANGE, n):
        x = SolidStateInputs(inp.m, inp.E, inp.l, float(a), inp.L, inp.c_sound)
        out.append((float(a), action_density(x), discrete_gap_exponent(x)))
    return out
