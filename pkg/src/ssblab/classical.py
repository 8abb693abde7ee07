"""Classical canonical ensembles, Hamiltonian trajectories and side correlations.

The side indicator X(t) = sign(q(t)) (q = 0 counts as +1) has zero ensemble
mean for every symmetric potential; its two-time correlation separates a
trapped double well from a single well or a hot double well.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ArgumentError, DomainError, IntegrationError
from .potentials import PotentialSpec, well_geometry

log = logging.getLogger(__name__)

DRIFT_BOUND = 1e-4


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) so that runs are bit-reproducible."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class CanonicalSpec:
    potential: PotentialSpec
    mass: float = 1.0
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be positive, got {self.temperature}")
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class CanonicalSample:
    q: np.ndarray
    p: np.ndarray
    acceptance_rate: float
    stride: int
    n_chains: int

    def __len__(self) -> int:
        return self.q.size

    def __iter__(self):
        return iter(zip(self.q, self.p))


def _thermal_length(spec: CanonicalSpec) -> float:
    geom = well_geometry(spec.potential, spec.mass)
    return math.sqrt(spec.temperature / (spec.mass * geom.omega**2))


def sample_canonical(spec: CanonicalSpec, n: int, stride: int = 10, n_chains: int = 64,
                     burn_in: int = 200, step: float | None = None, reflect: float = 0.5) -> CanonicalSample:
    """Draw n phase-space points from exp(−p²/2mkT) exp(−V(q)/kT).

    Momenta are exact Gaussians.  Positions come from ``n_chains`` parallel
    Metropolis chains mixing a Gaussian random-walk proposal with the
    reflection q → −q (chosen with probability ``reflect``); both proposals
    are symmetric, so acceptance is min(1, exp(−ΔV/kT)).  The reflection
    lets chains hop between the wells of a double well at any temperature.
    """
    if n < 1:
        raise ArgumentError("need at least one sample")
    rng = make_rng(spec.seed)
    kT = spec.temperature
    V = spec.potential
    step = step or 2.0 * _thermal_length(spec)
    n_chains = min(n_chains, n)
    per_chain = -(-n // n_chains)
    q = np.full(n_chains, well_geometry(V, spec.mass).x0)
    vq = np.asarray(V(q), dtype=float)
    out = np.empty((per_chain, n_chains))
    accepted = proposed = 0
    total = burn_in + per_chain * stride
    for it in range(total):
        flip = rng.random(n_chains) < reflect
        trial = np.where(flip, -q, q + step * rng.standard_normal(n_chains))
        vt = np.asarray(V(trial), dtype=float)
        accept = rng.random(n_chains) < np.exp(np.minimum(0.0, -(vt - vq) / kT))
        q = np.where(accept, trial, q)
        vq = np.where(accept, vt, vq)
        if it >= burn_in:
            accepted += int(accept.sum())
            proposed += n_chains
            k = it - burn_in
            if (k + 1) % stride == 0:
                out[k // stride] = q
    rate = accepted / max(proposed, 1)
    if rate < 0.01:
        log.warning("Metropolis acceptance rate %.4f is below 1%%; chains mix poorly", rate)
    qs = out.ravel()[:n]
    ps = rng.standard_normal(n) * math.sqrt(spec.mass * kT)
    return CanonicalSample(q=qs, p=ps, acceptance_rate=rate, stride=stride, n_chains=n_chains)


def batch_stderr(values: np.ndarray, n_batches: int = 20) -> float:
    """Standard error of the mean by batch means (robust to chain correlation)."""
    v = np.asarray(values, dtype=float)
    n_batches = max(2, min(n_batches, v.size))
    usable = v.size - v.size % n_batches
    means = v[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


@dataclass(frozen=True)
class Trajectory:
    """Trajectories sampled every ``record_every`` steps; arrays are (time, trajectory)."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy_drift: float


def _energy(V: PotentialSpec, mass: float, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    return p * p / (2.0 * mass) + np.asarray(V(q), dtype=float)


def _energy_scale(e0: np.ndarray, floor: float) -> np.ndarray:
    return np.maximum(np.abs(e0), floor)


def velocity_verlet(V: PotentialSpec, mass: float, q0, p0, dt: float, n_steps: int, record_every: int = 1,
                    drift_floor: float | None = None, drift_bound: float = DRIFT_BOUND) -> Trajectory:
    """Integrate many independent trajectories at once with velocity Verlet.

    Energy drift is measured per trajectory relative to max(|E0|, drift_floor)
    and reported as the worst case; exceeding ``drift_bound`` raises.
    """
    q = np.array(q0, dtype=float, ndmin=1)
    p = np.array(p0, dtype=float, ndmin=1)
    e0 = _energy(V, mass, q, p)
    floor = drift_floor if drift_floor is not None else 1e-12
    scale = _energy_scale(e0, floor)
    n_rec = n_steps // record_every + 1
    qs = np.empty((n_rec, q.size))
    ps = np.empty((n_rec, q.size))
    qs[0], ps[0] = q, p
    force = -np.asarray(V.derivative(q), dtype=float)
    worst = 0.0
    # a diverging orbit overflows; the drift check below reports it
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n_steps + 1):
            p = p + 0.5 * dt * force
            q = q + dt * p / mass
            force = -np.asarray(V.derivative(q), dtype=float)
            p = p + 0.5 * dt * force
            if i % record_every == 0:
                qs[i // record_every], ps[i // record_every] = q, p
                drift = float(np.max(np.abs(_energy(V, mass, q, p) - e0) / scale))
                worst = max(worst, drift) if math.isfinite(drift) else math.inf
                if worst > drift_bound:
                    break
    if worst > drift_bound:
        raise IntegrationError(f"relative energy drift {worst:.2e} exceeds {drift_bound:.0e}; reduce dt")
    times = dt * record_every * np.arange(n_rec)
    return Trajectory(times=times, q=qs, p=ps, energy_drift=worst)


def langevin_baoab(V: PotentialSpec, mass: float, q0, p0, dt: float, n_steps: int, friction: float,
                   temperature: float, rng: np.random.Generator, record_every: int = 1) -> Trajectory:
    """Underdamped Langevin dynamics with the BAOAB splitting.

    The O step applies the exact Ornstein-Uhlenbeck update for the momenta,
    so the canonical distribution is sampled for any friction.  Energy is not
    conserved; ``energy_drift`` is reported as NaN.
    """
    q = np.array(q0, dtype=float, ndmin=1)
    p = np.array(p0, dtype=float, ndmin=1)
    c1 = math.exp(-friction * dt)
    c2 = math.sqrt((1.0 - c1 * c1) * mass * temperature)
    n_rec = n_steps // record_every + 1
    qs = np.empty((n_rec, q.size))
    ps = np.empty((n_rec, q.size))
    qs[0], ps[0] = q, p
    force = -np.asarray(V.derivative(q), dtype=float)
    for i in range(1, n_steps + 1):
        p = p + 0.5 * dt * force
        q = q + 0.5 * dt * p / mass
        p = c1 * p + c2 * rng.standard_normal(q.size)
        q = q + 0.5 * dt * p / mass
        force = -np.asarray(V.derivative(q), dtype=float)
        p = p + 0.5 * dt * force
        if i % record_every == 0:
            qs[i // record_every], ps[i // record_every] = q, p
    times = dt * record_every * np.arange(n_rec)
    return Trajectory(times=times, q=qs, p=ps, energy_drift=float("nan"))


@dataclass(frozen=True)
class CorrelationSeries:
    lags: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n_samples: int
    mean_x: float
    mean_x_stderr: float
    energy_drift: float

    def to_table(self) -> dict:
        return {"lag": self.lags, "value": self.values, "stderr": self.stderr}


def side_indicator(q: np.ndarray) -> np.ndarray:
    return np.where(q >= 0.0, 1.0, -1.0)


def well_period(spec: CanonicalSpec) -> float:
    return 2.0 * math.pi / well_geometry(spec.potential, spec.mass).omega


def max_frequency(V: PotentialSpec, mass: float, q0: np.ndarray, e_max: float) -> float:
    """Largest local frequency sqrt(V''/m) over the region with V(q) <= e_max."""
    r = max(float(np.max(np.abs(q0))), 1e-6)
    while float(V(r)) <= e_max or float(V(-r)) <= e_max:
        r *= 2.0
    xs = np.linspace(-r, r, 4001)
    allowed = np.asarray(V(xs)) <= e_max
    curv = np.asarray(V.derivative(xs[allowed], 2), dtype=float)
    return math.sqrt(max(float(curv.max()), 0.0) / mass) if curv.size else 0.0


def side_correlation(spec: CanonicalSpec, horizon: float, lags, n_traj: int = 200, steps_per_period: int = 400,
                     samples_per_period: int = 20, n_origins: int = 1, init_stride: int = 20,
                     dynamics: str = "hamiltonian", friction: float | None = None) -> CorrelationSeries:
    """<X(t0) X(t0 + lag)> over canonical initial data.

    With ``n_origins > 1`` each trajectory contributes its average over that
    many time origins equally spaced in [0, horizon − max(lag)]; the canonical
    ensemble is stationary, so this is the same expectation with less noise.
    Standard errors come from the spread across trajectories.  The step is
    set from the stiffest curvature reachable at the ensemble's top energy.

    ``dynamics="hamiltonian"`` (default) conserves each trajectory's energy,
    so orbits below the barrier never change side.  ``dynamics="langevin"``
    adds thermal kicks with ``friction`` (default 0.1 ω) that re-randomise
    the energy.
    """
    if dynamics not in ("hamiltonian", "langevin"):
        raise ArgumentError(f"unknown dynamics {dynamics!r}")
    lags = np.asarray(lags, dtype=float)
    if n_traj < 100:
        raise ArgumentError("side_correlation needs at least 100 trajectories")
    if lags.ndim != 1 or lags.size == 0 or np.any(lags < 0):
        raise ArgumentError("lags must be a non-empty vector of non-negative times")
    if horizon < lags.max():
        raise ArgumentError(f"horizon {horizon} does not cover the largest lag {lags.max()}")
    if n_origins < 1:
        raise ArgumentError("n_origins must be >= 1")
    sample = sample_canonical(spec, n_traj, stride=init_stride, n_chains=n_traj, burn_in=500)
    e_max = float(np.max(_energy(spec.potential, spec.mass, sample.q, sample.p)))
    w_max = max(max_frequency(spec.potential, spec.mass, sample.q, e_max), 2.0 * math.pi / well_period(spec))
    dt = 2.0 * math.pi / w_max / steps_per_period
    record_every = max(1, steps_per_period // samples_per_period)
    dt_rec = dt * record_every
    window = horizon - lags.max()
    if n_origins > 1 and window <= 0:
        raise ArgumentError("multiple time origins need horizon > max lag")
    origins = np.linspace(0.0, window, n_origins) if n_origins > 1 else np.zeros(1)
    n_rec = int(math.ceil(horizon / dt_rec))
    if dynamics == "hamiltonian":
        traj = velocity_verlet(spec.potential, spec.mass, sample.q, sample.p, dt, n_rec * record_every,
                               record_every=record_every, drift_floor=spec.temperature)
    else:
        gamma = friction if friction is not None else 0.1 * 2.0 * math.pi / well_period(spec)
        traj = langevin_baoab(spec.potential, spec.mass, sample.q, sample.p, dt, n_rec * record_every, gamma,
                              spec.temperature, make_rng(spec.seed + 1), record_every=record_every)
    x = side_indicator(traj.q)
    o_idx = np.rint(origins / dt_rec).astype(int)
    l_idx = np.rint(lags / dt_rec).astype(int)
    x0 = x[o_idx]
    per_traj = np.stack([(x0 * x[np.minimum(o_idx + li, n_rec)]).mean(axis=0) for li in l_idx])
    values = per_traj.mean(axis=1)
    stderr = per_traj.std(axis=1, ddof=1) / math.sqrt(n_traj)
    values[l_idx == 0] = 1.0
    stderr[l_idx == 0] = 0.0
    xbar = x[o_idx].mean(axis=0)
    return CorrelationSeries(lags=lags, values=values, stderr=stderr, n_samples=n_traj,
                             mean_x=float(xbar.mean()), mean_x_stderr=float(xbar.std(ddof=1) / math.sqrt(n_traj)),
                             energy_drift=traj.energy_drift)


def boltzmann_mass(spec: CanonicalSpec, lower: float, upper: float, span: float | None = None) -> float:
    """Canonical probability that lower <= q <= upper, by quadrature of exp(−V/kT)."""
    kT = spec.temperature
    geom = well_geometry(spec.potential, spec.mass)
    span = span or (abs(geom.x0) + 40.0 * _thermal_length(spec) + 10.0 * math.sqrt(kT))
    vmin = float(spec.potential(geom.x0))

    def w(x):
        return math.exp(-(float(spec.potential(x)) - vmin) / kT)

    def quad(a, b):
        pts = [p for p in (-geom.x0, 0.0, geom.x0) if a < p < b]
        return integrate.quad(w, a, b, points=pts or None, limit=400, epsabs=0.0, epsrel=1e-10)[0]

    z = quad(-span, span)
    lo, hi = max(lower, -span), min(upper, span)
    return quad(lo, hi) / z if hi > lo else 0.0


@dataclass(frozen=True)
class MixtureDecomposition:
    w_L: float
    w_R: float
    w_stderr: float
    overlap_defect: float
    w_L_exact: float


def mixture_decomposition(spec: CanonicalSpec, n: int = 20000) -> MixtureDecomposition:
    """Split the ensemble into left and right halves.

    Weights are sampled (with batch-means error) and also integrated exactly;
    ``overlap_defect`` is the canonical mass with |q| < x0/10.
    """
    geom = well_geometry(spec.potential, spec.mass)
    if geom.barrier_height <= 0:
        raise ArgumentError("mixture decomposition needs a double-well potential")
    sample = sample_canonical(spec, n)
    left = (sample.q < 0).astype(float)
    w_l = float(left.mean())
    defect = boltzmann_mass(spec, -geom.x0 / 10.0, geom.x0 / 10.0)
    return MixtureDecomposition(w_L=w_l, w_R=1.0 - w_l, w_stderr=batch_stderr(left), overlap_defect=defect,
                                w_L_exact=boltzmann_mass(spec, -math.inf, 0.0))
