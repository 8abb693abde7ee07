"""Average-phase sector of a complex order parameter.

Integrating out everything but the spatially averaged phase θ̄ leaves a free
particle on the circle with moment of inertia m_eff = ρ₀²L³.  This module
covers its uniform ground state, the narrow ground state of the tilted
trap −Jρ₀L³cos θ̄, phase-sector histories, and the spreading of a
square-wave packet that sets the consistency timescale t_CH = Δ²m_eff/ħ.

The circle is represented on M = 2N equally spaced points, equivalent to the
Fourier modes n = −N, ..., N−1.  Kinetic evolution is applied in the mode
basis and sector projectors are diagonal on the points, so sectors of width
2π/n_sectors are exact whenever n_sectors divides M.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, special

from .errors import ArgumentError, DomainError, NumericError, ResolutionError, ValidityError, ValidityWarning
from .hilbert import DensityOperator, Grid, WaveFunction
from .histories import (DEFAULT_EPSILON, MAX_HISTORIES, DecoherenceMatrix, ProjectorFamily, decoherence_matrix,
                        enumerate_histories, equally_spaced)

DEFAULT_MODES = 256
MAX_TILT_WIDTH = math.pi / 4
MAX_SECTOR_HISTORIES = 4096
MAX_PANELS = 2_000_000
#: Fourier cut-off must reach this many inverse sector widths.
RESOLUTION_FACTOR = 8.0


@dataclass(frozen=True)
class PhaseSystem:
    rho0: float
    L: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("rho0", "L", "hbar"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def m_eff(self) -> float:
        return self.rho0 ** 2 * self.L ** 3


def circle_grid(n_modes: int = DEFAULT_MODES) -> Grid:
    return Grid(0.0, 2 * math.pi, 2 * n_modes, periodic=True)


def mode_numbers(n_modes: int = DEFAULT_MODES) -> np.ndarray:
    """Integer angular momenta −N, ..., N−1 in FFT order."""
    return np.rint(np.fft.fftfreq(2 * n_modes, d=1.0 / (2 * n_modes))).astype(int)


def circle_hamiltonian(sys: PhaseSystem, n_modes: int = DEFAULT_MODES) -> np.ndarray:
    """P̂²/2m_eff as a dense matrix on the circle points."""
    M = 2 * n_modes
    F = np.fft.fft(np.eye(M), axis=0, norm="ortho")
    k = mode_numbers(n_modes)
    return F.conj().T @ np.diag(sys.hbar ** 2 * k ** 2 / (2 * sys.m_eff)) @ F


def circle_propagator(sys: PhaseSystem, n_modes: int = DEFAULT_MODES):
    """dt -> exp(−i P̂² dt / 2m_eff ħ) as a dense matrix on the circle points."""
    M = 2 * n_modes
    F = np.fft.fft(np.eye(M), axis=0, norm="ortho")
    k2 = mode_numbers(n_modes).astype(float) ** 2

    def U(dt: float) -> np.ndarray:
        phase = np.exp(-1j * sys.hbar * k2 * dt / (2 * sys.m_eff))
        return F.conj().T @ (phase[:, None] * F)

    return U


def uniform_ground_state(sys: PhaseSystem, n_modes: int = DEFAULT_MODES) -> WaveFunction:
    """Ψ(θ̄) = (2π)^{−1/2}, the zero-momentum state."""
    grid = circle_grid(n_modes)
    return WaveFunction(grid, np.full(grid.n_points, 1.0 / math.sqrt(2 * math.pi)))


# --- tilted trap -----------------------------------------------------------

def tilted_variance(sys: PhaseSystem, J: float) -> float:
    """Variance ħ/(2L³√(Jρ₀³)) of θ̄ in the small-angle ground state."""
    if not J > 0:
        raise DomainError("J must be positive")
    return sys.hbar / (2 * sys.L ** 3 * math.sqrt(J * sys.rho0 ** 3))


def tilt_for_width(sys: PhaseSystem, width: float) -> float:
    """The J giving a ground state with standard deviation ``width``."""
    if not width > 0:
        raise DomainError("width must be positive")
    return sys.hbar ** 2 / (4 * sys.L ** 6 * sys.rho0 ** 3 * width ** 4)


def trap_modes(sys: PhaseSystem, J: float) -> int:
    """Fourier cut-off resolving the tilted ground state: at least 16 modes per inverse width."""
    return max(DEFAULT_MODES, math.ceil(16.0 / math.sqrt(tilted_variance(sys, J))))


def _trap_grid(n_modes: int) -> Grid:
    return Grid(-math.pi, math.pi, 2 * n_modes, periodic=True)


def tilted_ground_state(sys: PhaseSystem, J: float, n_modes: int | None = None) -> WaveFunction:
    """Gaussian small-angle ground state of the tilted trap, centred at θ̄ = 0.

    The circle is sampled on [−π, π) with 2·n_modes points.  Raises
    ValidityError when the width is too large for the small-angle expansion.
    """
    var = tilted_variance(sys, J)
    width = math.sqrt(var)
    if width >= MAX_TILT_WIDTH:
        raise ValidityError(f"tilted ground-state width {width:.3g} >= pi/4; small-angle expansion invalid")
    grid = _trap_grid(n_modes or trap_modes(sys, J))
    return WaveFunction.from_function(grid, lambda th: np.exp(-th ** 2 / (4 * var)))


def cosine_trap_ground_state(sys: PhaseSystem, J: float, n_modes: int | None = None) -> tuple[float, WaveFunction]:
    """Exact ground state of P̂²/2m_eff − Jρ₀L³cos θ̄ in the Fourier basis.

    cos θ̄ couples neighbouring modes, so the Hamiltonian is tridiagonal over
    n = −N, ..., N.  Returns the energy and the state on the same grid as
    :func:`tilted_ground_state`.
    """
    if not J > 0:
        raise DomainError("J must be positive")
    N = n_modes or trap_modes(sys, J)
    n = np.arange(-N, N + 1)
    diag = sys.hbar ** 2 * n.astype(float) ** 2 / (2 * sys.m_eff)
    off = np.full(n.size - 1, -0.5 * J * sys.rho0 * sys.L ** 3)
    e, c = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    grid = _trap_grid(N)
    M = grid.n_points
    # grid starts at −π, hence the (−1)^n; modes ±N alias onto one point
    coeffs = np.zeros(M, dtype=complex)
    np.add.at(coeffs, n % M, c[:, 0] * np.where(n % 2, -1.0, 1.0))
    amps = M * np.fft.ifft(coeffs) / math.sqrt(2 * math.pi)
    i0 = M // 2
    psi = WaveFunction(grid, amps * (abs(amps[i0]) / amps[i0]))
    return float(e[0]), psi


def angle_variance(psi: WaveFunction) -> float:
    """⟨θ̄²⟩ − ⟨θ̄⟩² over the grid interval."""
    p = np.abs(psi.amplitudes) ** 2 * psi.grid.spacing
    p = p / p.sum()
    mean = float(np.sum(p * psi.grid.x))
    return float(np.sum(p * (psi.grid.x - mean) ** 2))


def fidelity(a: WaveFunction, b: WaveFunction) -> float:
    """|⟨a|b⟩|² for normalised states on the same grid."""
    if a.grid != b.grid:
        raise ArgumentError("states live on different grids")
    return abs(a.normalized().inner(b.normalized())) ** 2


# --- square-wave spreading -------------------------------------------------

@dataclass(frozen=True)
class SquareWavePacket:
    width: float
    center: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("packet width must be positive")

    @property
    def amplitude(self) -> float:
        return 1.0 / math.sqrt(self.width)

    def spreading_time(self, mass: float, hbar: float = 1.0) -> float:
        """mΔ²/ħ, the scale below which the packet does not spread appreciably."""
        return mass * self.width ** 2 / hbar


def _check_time(mass: float, hbar: float, t: float) -> None:
    if not mass > 0 or not hbar > 0:
        raise DomainError("mass and hbar must be positive")
    if t < 0:
        raise DomainError("t must be non-negative")


def _head_panels(s: float, z_max: float, n_nodes: int, chunk: int = 50_000) -> complex:
    """∫₀^z_max sinc²(z) e^{−isz²} dz on Gauss-Legendre panels one oscillation long.

    The combined phase 2z + sz² advances by 2π per panel.
    """
    k_max = math.ceil((2 * z_max + s * z_max ** 2) / (2 * math.pi))
    if k_max > MAX_PANELS:
        raise NumericError(f"survival amplitude at s={s:.3g} needs {k_max} panels; "
                           "use survival_amplitude_grid for such short times")
    k = np.arange(k_max + 1, dtype=float)
    edges = np.minimum((np.sqrt(1 + 2 * math.pi * s * k) - 1) / s, z_max)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    total = 0j
    for i in range(0, k_max, chunk):
        j = min(i + chunk, k_max)
        lo, hi = edges[i:j, None], edges[i + 1:j + 1, None]
        z = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        total += np.sum(0.5 * (hi - lo) * w * np.sinc(z / math.pi) ** 2 * np.exp(-1j * s * z * z))
    return complex(total)


def _fourier_tail(s: float, w0: float) -> complex:
    """∫_{w0}^∞ sin²(√w)/(2w^{3/2}) e^{−isw} dw with QUADPACK's Fourier-weight rule."""

    def f(w):
        return math.sin(math.sqrt(w)) ** 2 / (2 * w ** 1.5)

    parts = []
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for weight in ("cos", "sin"):
                v, _ = integrate.quad(f, w0, math.inf, weight=weight, wvar=s, limlst=200, epsabs=1e-13)
                parts.append(v)
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"survival amplitude quadrature did not converge at s={s:.3g}: {exc}") from None
    return complex(parts[0], -parts[1])


def survival_amplitude(packet: SquareWavePacket, mass: float, hbar: float, t: float) -> complex:
    """⟨ψ|exp(−itĤ/ħ)|ψ⟩ for a free particle, by momentum-space quadrature.

    With z = kΔ/2 and s = 2ħt/mΔ² the amplitude is
    (2/π)∫₀^∞ sin²z/z² e^{−isz²} dz.  Below z₀ = 2π·max(1, 1/s) the integrand is
    summed on Gauss-Legendre panels, checked against a second node count.
    Beyond z₀, w = z² turns the chirp into a plain Fourier weight with at
    most one oscillation of sin²z per cycle, which QUADPACK handles.
    """
    _check_time(mass, hbar, t)
    if t == 0:
        return 1.0 + 0.0j
    s = 2 * hbar * t / (mass * packet.width ** 2)
    z0 = 2 * math.pi * max(1.0, 1.0 / s)
    head = _head_panels(s, z0, 30)
    if abs(head - _head_panels(s, z0, 20)) > 1e-11:
        raise NumericError(f"panel quadrature not converged at s={s:.3g}")
    return 2 / math.pi * (head + _fourier_tail(s, z0 * z0))


def evolved_square_wave(packet: SquareWavePacket, mass: float, hbar: float, t: float, x) -> np.ndarray:
    """ψ(x, t) from the free propagator acting on the square wave (Fresnel integrals)."""
    _check_time(mass, hbar, t)
    x = np.asarray(x, dtype=float) - packet.center
    half = 0.5 * packet.width
    if t == 0:
        return np.where(np.abs(x) <= half, packet.amplitude, 0.0).astype(complex)
    a = math.sqrt(mass / (math.pi * hbar * t))
    s_hi, c_hi = special.fresnel(a * (x + half))
    s_lo, c_lo = special.fresnel(a * (x - half))
    return np.exp(-0.25j * math.pi) / math.sqrt(2 * packet.width) * ((c_hi - c_lo) + 1j * (s_hi - s_lo))


def survival_amplitude_grid(packet: SquareWavePacket, mass: float, hbar: float, t: float,
                            min_nodes: int = 400) -> complex:
    """Position-space route: overlap of the evolved packet with the initial one.

    The overlap over the support is a Gauss-Legendre sum, with enough nodes to
    resolve the Fresnel fringes of width √(πħt/m).
    """
    _check_time(mass, hbar, t)
    if t == 0:
        return 1.0 + 0.0j
    fringe = math.sqrt(math.pi * hbar * t / mass)
    n = int(max(min_nodes, 400 * packet.width / fringe))
    n_pieces = max(1, n // 200)
    nodes, weights = np.polynomial.legendre.leggauss(200)
    edges = np.linspace(-0.5 * packet.width, 0.5 * packet.width, n_pieces + 1) + packet.center
    total = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * np.sum(weights * evolved_square_wave(packet, mass, hbar, t, x))
    return complex(packet.amplitude * total)


# --- sectors and histories --------------------------------------------------

def consistency_timescale(sys: PhaseSystem, width: float) -> float:
    """t_CH = Δ²m_eff/ħ; any "much less than" margin is left to the caller."""
    if not 0 < width < 2 * math.pi:
        raise DomainError("sector width must lie in (0, 2π)")
    if width >= math.pi / 2:
        warnings.warn(f"sector width {width:.3g} >= pi/2; the spreading estimate is only qualitative",
                      ValidityWarning, stacklevel=2)
    return width ** 2 * sys.m_eff / sys.hbar


@dataclass(frozen=True, eq=False)
class SectorFamily:
    n_sectors: int
    n_modes: int
    projectors: ProjectorFamily

    @property
    def width(self) -> float:
        return 2 * math.pi / self.n_sectors

    @property
    def grid(self) -> Grid:
        return circle_grid(self.n_modes)


def sector_family(n_sectors: int, n_modes: int = DEFAULT_MODES) -> SectorFamily:
    """Equal sectors [2πj/n, 2π(j+1)/n) as diagonal projectors on the circle points."""
    M = 2 * n_modes
    if n_sectors < 2:
        raise ArgumentError("need at least two sectors")
    if M % n_sectors:
        raise ArgumentError(f"{n_sectors} sectors do not align with {M} circle points")
    width = 2 * math.pi / n_sectors
    if n_modes < RESOLUTION_FACTOR / width:
        raise ResolutionError(f"{n_modes} Fourier modes cannot resolve sectors of width {width:.3g}; "
                              f"need at least {math.ceil(RESOLUTION_FACTOR / width)}")
    idx = np.arange(M) // (M // n_sectors)
    members = tuple(np.diag((idx == j).astype(float)) for j in range(n_sectors))
    labels = tuple(f"S{j}" for j in range(n_sectors))
    return SectorFamily(n_sectors, n_modes, ProjectorFamily(members, labels))


def sector_histories(sys: PhaseSystem, family: SectorFamily, tau: float, n: int,
                     rho: DensityOperator | None = None, epsilon: float = DEFAULT_EPSILON) -> DecoherenceMatrix:
    """Decoherence matrix of all sector histories at times 0, τ, ..., nτ.

    ``n`` counts intervals, so the total span is nτ.  The default state is
    the uniform ground state.
    """
    if n < 1:
        raise ArgumentError("need at least one interval")
    if not tau > 0:
        raise DomainError("tau must be positive")
    count = family.n_sectors ** (n + 1)
    if count > min(MAX_SECTOR_HISTORIES, MAX_HISTORIES):
        raise ArgumentError(f"{count} sector histories exceed the bound of {MAX_SECTOR_HISTORIES}")
    if rho is None:
        rho = DensityOperator.from_wavefunction(uniform_ground_state(sys, family.n_modes))
    times = equally_spaced(tau, n + 1)
    hs = enumerate_histories(family.projectors, times)
    return decoherence_matrix(rho, hs, family.projectors, circle_propagator(sys, family.n_modes), epsilon)
