"""Nearest-neighbour Ising model on a periodic square lattice.

Used as the many-body counterpart of the double well: below the ordering
temperature each replica settles into one of two magnetised states, so the
magnetisation histogram splits into two modes and spin correlations stay
finite at large separation, while the replica-averaged magnetisation remains
zero.  Even sides are updated with a checkerboard Metropolis sweep that is
vectorised across replicas; odd sides fall back to a sequential sweep, since
the two sublattices are not independent under periodic wrapping.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classical import make_rng
from .errors import ArgumentError, DomainError

CRITICAL_TEMPERATURE = 2.0 / math.log(1.0 + math.sqrt(2.0))
MIN_SIDE = 16
MIN_SWEEPS = 10_000
MAX_ENUMERATED_SITES = 20
#: Each site is proposed for a flip with this probability per sweep.  A value
#: below one keeps the chain aperiodic: with every proposal taken, states in
#: which all flips cost ΔE = 0 cycle deterministically and never thermalise.
PROPOSAL_PROBABILITY = 0.9


@dataclass(frozen=True, eq=False)
class SpinLattice:
    side: int
    coupling: float
    temperature: float
    spins: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.side < 2:
            raise ArgumentError("side must be at least 2")
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")
        s = np.asarray(self.spins)
        if s.shape != (self.side, self.side):
            raise ArgumentError(f"spins must have shape ({self.side}, {self.side}), got {s.shape}")
        if not np.all(np.abs(s) == 1):
            raise ArgumentError("spins must be +1 or -1")
        object.__setattr__(self, "spins", s.astype(np.int8))

    @classmethod
    def random(cls, side: int, coupling: float, temperature: float, seed: int = 0) -> "SpinLattice":
        spins = make_rng(seed).choice(np.array([-1, 1], dtype=np.int8), size=(side, side))
        return cls(side, coupling, temperature, spins, seed)

    @classmethod
    def ordered(cls, side: int, coupling: float, temperature: float, seed: int = 0, sign: int = 1) -> "SpinLattice":
        return cls(side, coupling, temperature, np.full((side, side), sign, dtype=np.int8), seed)

    def energy(self) -> float:
        return float(lattice_energy(self.spins[None], self.coupling)[0])

    def magnetization(self) -> float:
        return float(self.spins.mean())


def lattice_energy(spins: np.ndarray, coupling: float) -> np.ndarray:
    """-J Σ s_i s_j over nearest-neighbour bonds, one value per replica."""
    s = spins.astype(float)
    bonds = s * np.roll(s, 1, axis=-1) + s * np.roll(s, 1, axis=-2)
    return -coupling * bonds.sum(axis=(-2, -1))


class _Sweeper:
    """Metropolis sweeps over a stack of replicas with shape (R, side, side)."""

    def __init__(self, side: int, coupling: float, temperature: float, rng: np.random.Generator):
        self.side = side
        self.rng = rng
        # s_i * h_i takes values in {-4, ..., 4}; ΔE = 2J s_i h_i.  The flip
        # probability is the proposal probability times the Metropolis acceptance.
        k = np.arange(-4, 5)
        self.accept = PROPOSAL_PROBABILITY * np.minimum(1.0, np.exp(-2.0 * coupling * k / temperature))
        ij = np.add.outer(np.arange(side), np.arange(side))
        flat = np.arange(side * side).reshape(side, side)
        nbrs = np.stack([np.roll(flat, sh, axis=ax) for sh in (1, -1) for ax in (0, 1)], axis=-1)
        self.sublattices = [(flat[ij % 2 == c], nbrs[ij % 2 == c]) for c in (0, 1)]
        self.accepted = 0
        self.attempted = 0

    def sweep(self, s: np.ndarray) -> None:
        if self.side % 2 == 0:
            flat = s.reshape(s.shape[0], -1)
            for sites, nbrs in self.sublattices:
                self._update(flat, sites, nbrs)
        else:
            self._sequential(s)

    def _update(self, flat: np.ndarray, sites: np.ndarray, nbrs: np.ndarray) -> None:
        si = flat[:, sites]
        h = flat[:, nbrs].sum(axis=-1, dtype=np.int8)
        flip = self.rng.random(si.shape) < self.accept[si * h + 4]
        flat[:, sites] = np.where(flip, -si, si)
        self.accepted += int(np.count_nonzero(flip))
        self.attempted += flip.size

    def _sequential(self, s: np.ndarray) -> None:
        L = self.side
        u = self.rng.random((L * L, s.shape[0]))
        for n, (i, j) in enumerate(itertools.product(range(L), range(L))):
            h = s[:, (i + 1) % L, j] + s[:, (i - 1) % L, j] + s[:, i, (j + 1) % L] + s[:, i, (j - 1) % L]
            si = s[:, i, j]
            flip = u[n] < self.accept[si * h + 4]
            s[flip, i, j] *= -1
            self.accepted += int(flip.sum())
        self.attempted += s.shape[0] * L * L


def _initial_stack(lat: SpinLattice, n_replicas: int, start: str, rng: np.random.Generator) -> np.ndarray:
    if start == "random":
        return rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_replicas, lat.side, lat.side))
    if start == "given":
        return np.repeat(lat.spins[None], n_replicas, axis=0).copy()
    raise ArgumentError(f"start must be 'random' or 'given', got {start!r}")


def _correlations(s: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """Per-replica ⟨s_i s_{i+r}⟩ averaged over sites and both lattice axes."""
    out = np.empty((s.shape[0], distances.size))
    f = s.astype(float)
    for k, r in enumerate(distances):
        c = f * np.roll(f, -r, axis=-1) + f * np.roll(f, -r, axis=-2)
        out[:, k] = 0.5 * c.mean(axis=(-2, -1))
    return out


@dataclass(frozen=True)
class MetropolisRun:
    magnetizations: np.ndarray  # (n_measurements, n_replicas)
    correlations: np.ndarray  # (n_replicas, n_distances), time-averaged
    distances: np.ndarray
    acceptance_rate: float


def run_metropolis(lat: SpinLattice, sweeps: int, n_replicas: int = 32, burn_in: int | None = None,
                   measure_every: int = 10, distances=None, start: str = "random") -> MetropolisRun:
    """Run independent replicas and record magnetisation and spin correlations.

    No size restrictions apply here; ``lattice_signatures`` adds them.
    """
    if sweeps < 1 or n_replicas < 1 or measure_every < 1:
        raise ArgumentError("sweeps, n_replicas and measure_every must be positive")
    burn_in = sweeps // 5 if burn_in is None else burn_in
    if distances is None:
        distances = np.arange(lat.side // 2 + 1)
    distances = np.asarray(distances, dtype=int)
    rng = make_rng(lat.seed)
    s = _initial_stack(lat, n_replicas, start, rng)
    sweeper = _Sweeper(lat.side, lat.coupling, lat.temperature, rng)
    for _ in range(burn_in):
        sweeper.sweep(s)
    mags, corr_sum, n_meas = [], np.zeros((n_replicas, distances.size)), 0
    for i in range(1, sweeps + 1):
        sweeper.sweep(s)
        if i % measure_every == 0:
            mags.append(s.mean(axis=(-2, -1)))
            corr_sum += _correlations(s, distances)
            n_meas += 1
    if n_meas == 0:
        raise ArgumentError("sweeps shorter than measure_every; nothing recorded")
    # flips per site visit, divided by the proposal probability: the Metropolis acceptance rate
    rate = sweeper.accepted / max(sweeper.attempted, 1) / PROPOSAL_PROBABILITY
    return MetropolisRun(np.array(mags), corr_sum / n_meas, distances, rate)


@dataclass(frozen=True)
class LatticeSignatures:
    distances: np.ndarray
    spin_corr: np.ndarray
    spin_corr_stderr: np.ndarray
    mean_abs_magnetization: float
    mean_magnetization: float
    mean_magnetization_stderr: float
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    modes: tuple
    acceptance_rate: float

    @property
    def is_bimodal(self) -> bool:
        return len(self.modes) >= 2

    @property
    def mode_separation(self) -> float:
        return float(max(self.modes) - min(self.modes)) if len(self.modes) >= 2 else 0.0

    def corr_at(self, r: int) -> float:
        idx = np.flatnonzero(self.distances == r)
        if idx.size == 0:
            raise ArgumentError(f"distance {r} was not measured")
        return float(self.spin_corr[idx[0]])

    def correlation_table(self) -> dict:
        return {"r": self.distances.tolist(), "spin_corr": self.spin_corr.tolist(),
                "stderr": self.spin_corr_stderr.tolist()}

    def histogram_table(self) -> dict:
        centers = 0.5 * (self.histogram_edges[1:] + self.histogram_edges[:-1])
        return {"bin_center": centers.tolist(), "count": self.histogram_counts.tolist()}


def histogram_modes(counts: np.ndarray, centers: np.ndarray, rel_height: float = 0.1) -> tuple:
    """Centres of local maxima of the 3-bin smoothed histogram above ``rel_height`` of the peak.

    Adjacent maxima on a flat top are merged into one mode.
    """
    c = np.convolve(np.asarray(counts, dtype=float), np.ones(3) / 3, mode="same")
    if c.max() <= 0:
        return ()
    padded = np.concatenate(([-1.0], c, [-1.0]))
    is_peak = (c >= padded[:-2]) & (c >= padded[2:]) & (c >= rel_height * c.max())
    modes, run = [], []
    for k in range(c.size):
        if is_peak[k]:
            run.append(centers[k])
        elif run:
            modes.append(float(np.mean(run)))
            run = []
    if run:
        modes.append(float(np.mean(run)))
    return tuple(modes)


def lattice_signatures(lat: SpinLattice, sweeps: int, n_replicas: int = 32, n_bins: int = 41,
                       measure_every: int = 10, distances=None, start: str = "random") -> LatticeSignatures:
    """Magnetisation histogram, spin correlation and ensemble magnetisation.

    Replicas are independent chains with their own random starts, so the
    ensemble is symmetric under global spin flip.  Standard errors come from
    the spread of per-replica time averages.
    """
    if lat.side < MIN_SIDE:
        raise ArgumentError(f"side must be at least {MIN_SIDE}, got {lat.side}")
    if sweeps < MIN_SWEEPS:
        raise ArgumentError(f"sweeps must be at least {MIN_SWEEPS}, got {sweeps}")
    if n_replicas < 2:
        raise ArgumentError("need at least two replicas for error estimates")
    run = run_metropolis(lat, sweeps, n_replicas, measure_every=measure_every, distances=distances, start=start)
    m = run.magnetizations
    per_replica = m.mean(axis=0)
    edges = np.linspace(-1.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(m.ravel(), bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    root_n = math.sqrt(n_replicas)
    return LatticeSignatures(
        distances=run.distances,
        spin_corr=run.correlations.mean(axis=0),
        spin_corr_stderr=run.correlations.std(axis=0, ddof=1) / root_n,
        mean_abs_magnetization=float(np.abs(m).mean()),
        mean_magnetization=float(per_replica.mean()),
        mean_magnetization_stderr=float(per_replica.std(ddof=1) / root_n),
        histogram_edges=edges,
        histogram_counts=counts,
        modes=histogram_modes(counts, centers),
        acceptance_rate=run.acceptance_rate,
    )


def exact_magnetization_distribution(side: int, coupling: float, temperature: float) -> dict:
    """Boltzmann distribution of the magnetisation by enumerating all 2^(side²) states."""
    n = side * side
    if n > MAX_ENUMERATED_SITES:
        raise ArgumentError(f"enumeration limited to {MAX_ENUMERATED_SITES} sites")
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    states = np.array(list(itertools.product((-1, 1), repeat=n)), dtype=np.int8).reshape(-1, side, side)
    energy = lattice_energy(states, coupling)
    w = np.exp(-(energy - energy.min()) / temperature)
    w /= w.sum()
    m = np.round(states.mean(axis=(-2, -1)) * n).astype(int)
    out = {}
    for k, wk in zip(m, w):
        out[k / n] = out.get(k / n, 0.0) + wk
    return dict(sorted(out.items()))
