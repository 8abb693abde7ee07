"""Sequential left/right measurements on the lowest doublet of a symmetric well.

The doublet {ψ0, ψ1} defines ψ_R = (ψ0 + ψ1)/√2 and ψ_L = (ψ0 − ψ1)/√2.
Between measurements the pair rotates by the mixing angle

    θ = (E1 − E0) τ / 2ħ,

so a measured L survives a gap τ with amplitude cos θ and flips with
amplitude sin θ.  Outcome-string probabilities starting from the ground state
are ½ cos^{2a}θ sin^{2b}θ with a repeats and b flips.  All closed forms below
take θ; ``mixing_angle`` converts a waiting time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError
from .hilbert import DensityOperator, Grid, WaveFunction, position_projector, solve, state_expectation
from .histories import History, ProjectorFamily, decoherence_functional, diagonal_propagator
from .potentials import PotentialSpec, minima, well_geometry

PARITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DoubletModel:
    omega_gap: float
    energies: tuple
    psi0: WaveFunction
    psi1: WaveFunction
    hbar: float = 1.0

    @property
    def psi_R(self) -> WaveFunction:
        return (self.psi0 + self.psi1) * (1 / math.sqrt(2))

    @property
    def psi_L(self) -> WaveFunction:
        return (self.psi0 - self.psi1) * (1 / math.sqrt(2))

    def mixing_angle(self, tau: float) -> float:
        return 0.5 * self.omega_gap * tau

    def tau_for_angle(self, theta: float) -> float:
        return 2.0 * theta / self.omega_gap

    def right_localization(self) -> float:
        """Probability that ψ_R is found at x >= 0."""
        return state_expectation(self.psi_R, position_projector(self.psi0.grid, lower=0.0))


def default_grid(spec: PotentialSpec, mass: float, n_points: int = 1024, widths: float = 8.0) -> Grid:
    """Symmetric grid reaching ``widths`` oscillator lengths beyond the outer minima."""
    geom = well_geometry(spec, mass)
    ell = 1.0 / math.sqrt(mass * geom.omega)
    edge = max(abs(m) for m in minima(spec)) + widths * max(ell, 1.0)
    return Grid(-edge, edge, n_points)


def build_doublet(spec: PotentialSpec, mass: float = 1.0, hbar: float = 1.0, grid: Grid | None = None,
                  n_points: int = 1024) -> DoubletModel:
    """Solve for the two lowest eigenstates and orient ψ1 so ψ_R sits at x > 0."""
    grid = grid or default_grid(spec, mass, n_points)
    sp = solve(grid, spec, mass, hbar, k=2)
    psi0, psi1 = sp.state(0), sp.state(1)
    a0, a1 = psi0.amplitudes, psi1.amplitudes
    scale0, scale1 = np.max(np.abs(a0)), np.max(np.abs(a1))
    if np.max(np.abs(a0 - a0[::-1])) > PARITY_TOL * scale0 or np.max(np.abs(a1 + a1[::-1])) > PARITY_TOL * scale1:
        raise ShapeError("lowest two states are not an even/odd pair; is the potential symmetric?")
    if state_expectation(psi0 + psi1, np.diag(grid.x)) < 0:
        psi1 = psi1 * -1.0
    e0, e1 = sp.eigenvalues[:2]
    return DoubletModel(omega_gap=(e1 - e0) / hbar, energies=(float(e0), float(e1)), psi0=psi0, psi1=psi1, hbar=hbar)


def string_probability(outcomes: str, theta: float) -> float:
    """½ cos^{2a}θ sin^{2b}θ for a string over {L, R} with a repeats and b flips."""
    if not outcomes or set(outcomes) - {"L", "R"}:
        raise ArgumentError(f"outcome string must be a non-empty word over L/R, got {outcomes!r}")
    flips = sum(a != b for a, b in zip(outcomes, outcomes[1:]))
    repeats = len(outcomes) - 1 - flips
    return 0.5 * math.cos(theta) ** (2 * repeats) * math.sin(theta) ** (2 * flips)


@dataclass(frozen=True)
class OutcomeDistribution:
    n_measurements: int
    tau: float
    theta: float
    probabilities: dict

    def to_record(self) -> dict:
        return {"n_measurements": self.n_measurements, "tau": self.tau, "theta": self.theta,
                "probabilities": dict(self.probabilities)}


def measurement_chain(model: DoubletModel | None, tau: float, n: int, theta: float | None = None) -> OutcomeDistribution:
    """Closed-form distribution of n successive L/R measurements spaced by tau.

    Passing ``theta`` directly bypasses the model (pure closed form).
    """
    if n < 1:
        raise ArgumentError("need at least one measurement")
    if theta is None:
        if model is None:
            raise ArgumentError("need a model or an explicit mixing angle")
        theta = model.mixing_angle(tau)
    probs = {"".join(s): string_probability("".join(s), theta) for s in itertools.product("LR", repeat=n)}
    return OutcomeDistribution(n, tau, theta, probs)


@dataclass(frozen=True)
class ProtocolComparison:
    theta: float
    pr_skip: float
    pr_sum: float
    violation: float


def protocol_compare(model: DoubletModel | None, tau: float, theta: float | None = None) -> ProtocolComparison:
    """Protocol I, Pr(L?L) = ½cos²2θ, against protocol II, Pr(LLL) + Pr(LRL) = ¼(1 + cos²2θ)."""
    if theta is None:
        theta = model.mixing_angle(tau)
    skip = 0.5 * math.cos(2 * theta) ** 2
    total = 0.25 * (1.0 + math.cos(2 * theta) ** 2)
    return ProtocolComparison(theta, skip, total, skip - total)


@dataclass(frozen=True, eq=False)
class TwoLevelSystem:
    """The doublet as a 2-dimensional history space in the {ψ0, ψ1} basis."""

    energies: tuple
    hbar: float = 1.0

    @property
    def family(self) -> ProjectorFamily:
        pl = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        pr = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]])
        return ProjectorFamily((pl, pr), ("L", "R"))

    @property
    def propagator(self):
        return diagonal_propagator(self.energies, self.hbar)

    @property
    def ground_state(self) -> DensityOperator:
        return DensityOperator(np.array([[1.0, 0.0], [0.0, 0.0]]))

    @property
    def omega_gap(self) -> float:
        return (self.energies[1] - self.energies[0]) / self.hbar

    def tau_for_angle(self, theta: float) -> float:
        return 2.0 * theta / self.omega_gap


def two_level_system(model: DoubletModel) -> TwoLevelSystem:
    return TwoLevelSystem(model.energies, model.hbar)


def history_probabilities(system: TwoLevelSystem, tau: float, n: int) -> dict:
    """Diagonal D(h, h) for every L/R string of length n, via the histories engine."""
    times = tuple(i * tau for i in range(n))
    fam, U, rho = system.family, system.propagator, system.ground_state
    return {"".join(s): decoherence_functional(rho, History.fine(s, times), History.fine(s, times), fam, U).real
            for s in itertools.product("LR", repeat=n)}


def interference_term(system: TwoLevelSystem, tau: float) -> float:
    """2 Re D(LLL, LRL) from the histories engine."""
    times = (0.0, tau, 2 * tau)
    d = decoherence_functional(system.ground_state, History.fine("LLL", times), History.fine("LRL", times),
                               system.family, system.propagator)
    return 2.0 * d.real
