"""Grid Hilbert space: Hamiltonians, spectra, unitary evolution, density operators.

States live on a uniform 1D lattice.  A ``WaveFunction`` stores amplitudes
normalised so that ``sum(|psi|**2) * spacing == 1``; matrices act on the
Euclidean-normalised vectors ``psi * sqrt(spacing)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .errors import ArgumentError, DomainError, TruncationError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [x_min, x_max].

    With ``periodic=True`` the lattice covers [x_min, x_max) and the last
    point is identified with the first (used for the phase circle).
    """

    x_min: float
    x_max: float
    n_points: int
    periodic: bool = False

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ArgumentError(f"grid needs x_min < x_max, got {self.x_min} >= {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise ArgumentError(f"grid needs at least 8 points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        span = self.x_max - self.x_min
        return span / self.n_points if self.periodic else span / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)

    @property
    def symmetric(self) -> bool:
        return not self.periodic and math.isclose(self.x_min, -self.x_max, rel_tol=0, abs_tol=1e-12 * self.x_max)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (self.grid.n_points,):
            raise ArgumentError(f"amplitudes must have length {self.grid.n_points}, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_function(cls, grid: Grid, f: Callable, normalize: bool = True) -> "WaveFunction":
        psi = cls(grid, np.asarray(f(grid.x), dtype=complex))
        return psi.normalized() if normalize else psi

    @classmethod
    def from_vector(cls, grid: Grid, vec: np.ndarray) -> "WaveFunction":
        """Wrap a Euclidean-normalised basis vector."""
        return cls(grid, np.asarray(vec) / math.sqrt(grid.spacing))

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes * math.sqrt(self.grid.spacing)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.spacing)

    def normalized(self) -> "WaveFunction":
        n2 = self.norm2()
        if n2 == 0.0:
            raise DomainError("cannot normalise the zero state")
        return WaveFunction(self.grid, self.amplitudes / math.sqrt(n2))

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.spacing)

    def __add__(self, other: "WaveFunction") -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "WaveFunction") -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes - other.amplitudes)

    def __mul__(self, c: complex) -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes * c)

    __rmul__ = __mul__


def _check_hermitian(m: np.ndarray, tol: float = 1e-12) -> None:
    scale = max(float(np.max(np.abs(m))), 1e-300)
    if np.max(np.abs(m - m.conj().T)) >= tol * scale:
        raise ArgumentError("matrix is not Hermitian")


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray
    basis_tag: str = "grid"
    parity_symmetric: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f"operator must be square, got shape {m.shape}")
        _check_hermitian(m)
        if self.basis_tag not in ("grid", "eigen", "fourier"):
            raise ArgumentError(f"unknown basis tag {self.basis_tag!r}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _second_difference(n: int, periodic: bool) -> np.ndarray:
    lap = np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    if periodic:
        lap[0, -1] = lap[-1, 0] = 1.0
    return lap


def build_hamiltonian(grid: Grid, potential: Callable, mass: float = 1.0, hbar: float = 1.0) -> HermitianOperator:
    """H = −ħ²/2m ∂² + V on the grid (3-point stencil, Dirichlet walls unless periodic)."""
    if mass <= 0:
        raise DomainError(f"mass must be positive, got {mass}")
    if hbar <= 0:
        raise DomainError(f"hbar must be positive, got {hbar}")
    x = grid.x
    v = np.asarray(potential(x), dtype=float)
    if v.shape != x.shape:
        v = np.broadcast_to(v, x.shape).astype(float)
    bad = ~np.isfinite(v)
    if bad.any():
        raise DomainError(f"potential is not finite at x={x[np.argmax(bad)]!r}")
    h = -(hbar**2) / (2.0 * mass * grid.spacing**2) * _second_difference(grid.n_points, grid.periodic)
    h[np.diag_indices_from(h)] += v
    vscale = max(float(np.max(np.abs(v))), 1e-300)
    symmetric = grid.symmetric and bool(np.max(np.abs(v - v[::-1])) <= 1e-12 * vscale)
    return HermitianOperator(h, "grid", parity_symmetric=symmetric)


def position_operator(grid: Grid) -> HermitianOperator:
    return HermitianOperator(np.diag(grid.x), "grid")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Lowest eigenpairs.  ``vectors`` has Euclidean-orthonormal columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    grid: Grid | None = None
    hbar: float = 1.0

    def __post_init__(self):
        e = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(e) < 0):
            raise ArgumentError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", e)

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def eigenvectors(self) -> list[WaveFunction]:
        if self.grid is None:
            raise ArgumentError("spectrum has no grid attached")
        return [WaveFunction.from_vector(self.grid, self.vectors[:, i]) for i in range(len(self))]

    def state(self, n: int) -> WaveFunction:
        return WaveFunction.from_vector(self.grid, self.vectors[:, n])

    def propagator(self, t: float) -> np.ndarray:
        """U(t) restricted to the eigenbasis, as a diagonal matrix."""
        return np.diag(np.exp(-1j * self.eigenvalues * t / self.hbar))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    ph = v[i] / abs(v[i])
    return v / ph


def _parity_split(vals: np.ndarray, vecs: np.ndarray, H: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Rotate numerically degenerate pairs into definite-parity combinations."""
    vals = vals.copy()
    vecs = vecs.copy()
    i = 0
    while i < vals.size - 1:
        if vals[i + 1] - vals[i] < tol:
            sub = vecs[:, i:i + 2]
            parity = sub.conj().T @ sub[::-1, :]
            parity = 0.5 * (parity + parity.conj().T)
            _, rot = np.linalg.eigh(parity)
            # eigh orders the parity eigenvalues (-1, +1); put the even state first
            new = sub @ rot[:, ::-1]
            vecs[:, i:i + 2] = new
            # the split is below resolution, so keep the even member lower
            vals[i:i + 2] = np.sort(np.real(np.einsum("ij,ik,kj->j", new.conj(), H, new)))
            i += 2
        else:
            i += 1
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def eigendecompose(H: HermitianOperator, k: int = 32, grid: Grid | None = None, hbar: float = 1.0) -> Spectrum:
    """Lowest ``k`` eigenpairs of a Hermitian operator, ascending.

    Each eigenvector's largest-magnitude component is made real and positive.
    For parity-symmetric operators, pairs closer than 1e-9·‖H‖ are rotated into
    even/odd combinations.
    """
    n = H.dim
    if not 1 <= k <= n:
        raise ArgumentError(f"requested {k} eigenpairs from a {n}-dimensional operator")
    vals, vecs = linalg.eigh(H.matrix, subset_by_index=[0, k - 1], driver="evr")
    if H.parity_symmetric:
        vals, vecs = _parity_split(vals, vecs, H.matrix, 1e-9 * float(np.max(np.abs(H.matrix))))
    vecs = np.column_stack([_fix_phase(vecs[:, i]) for i in range(k)])
    return Spectrum(vals, vecs, grid=grid, hbar=hbar)


def solve(grid: Grid, potential: Callable, mass: float = 1.0, hbar: float = 1.0, k: int = 32) -> Spectrum:
    """Convenience: build the grid Hamiltonian and diagonalise it."""
    return eigendecompose(build_hamiltonian(grid, potential, mass, hbar), k=k, grid=grid, hbar=hbar)


def evolve(state: WaveFunction, spec: Spectrum, t: float, leakage_tol: float = 1e-6) -> WaveFunction:
    """Apply U(t) = Σ exp(−iE_n t/ħ)|n><n| in the truncated eigenbasis.

    The part of the state outside the eigenbasis (below ``leakage_tol`` of the
    norm) is carried along unevolved so that the norm is preserved exactly.
    """
    v = state.vector
    c = spec.vectors.conj().T @ v
    inside = spec.vectors @ c
    remainder = v - inside
    n2 = float(np.vdot(v, v).real)
    leaked = float(np.vdot(remainder, remainder).real)
    if leaked > leakage_tol * n2:
        raise TruncationError(f"state leaks {leaked:.3e} of its norm² {n2:.3e} outside the eigenbasis")
    if t == 0:
        return state
    out = spec.vectors @ (np.exp(-1j * spec.eigenvalues * t / spec.hbar) * c) + remainder
    return WaveFunction.from_vector(state.grid, out)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError("density operator must be square")
        _check_hermitian(m, 1e-10)
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"density operator trace is {tr}, expected 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise DomainError("density operator has negative eigenvalues")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vec: np.ndarray) -> "DensityOperator":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_wavefunction(cls, psi: WaveFunction) -> "DensityOperator":
        return cls.pure(psi.vector)

    @classmethod
    def mixture(cls, weights: Sequence[float], vecs: Sequence[np.ndarray]) -> "DensityOperator":
        w = np.asarray(weights, dtype=float)
        m = sum(wi * np.outer(v, np.conj(v)) / np.vdot(v, v).real for wi, v in zip(w / w.sum(), vecs))
        return cls(m)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityOperator":
        return cls(np.eye(d) / d)

    def factor(self, cutoff: float = 1e-15) -> np.ndarray:
        """Columns sqrt(p_k) v_k spanning the support, so that ρ = F F†."""
        p, v = np.linalg.eigh(self.matrix)
        keep = p > cutoff
        return v[:, keep] * np.sqrt(p[keep])


def expectation(rho: DensityOperator, A) -> float:
    a = np.asarray(getattr(A, "matrix", A))
    if a.shape != rho.matrix.shape:
        raise ArgumentError(f"dimension mismatch: rho {rho.matrix.shape} vs operator {a.shape}")
    val = np.trace(rho.matrix @ a)
    scale = max(1.0, abs(val.real))
    if abs(val.imag) > 1e-9 * scale:
        raise ArgumentError(f"expectation has imaginary part {val.imag}; operator not Hermitian?")
    return float(val.real)


def state_expectation(psi: WaveFunction, A) -> float:
    """<psi|A|psi> for a normalised wavefunction, without forming ρ."""
    a = np.asarray(getattr(A, "matrix", A))
    v = psi.vector
    if a.shape != (v.size, v.size):
        raise ArgumentError("dimension mismatch between state and operator")
    return float(np.vdot(v, a @ v).real)


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    rank: int = field(default=-1)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError("projector must be square")
        _check_hermitian(m, 1e-10)
        if np.max(np.abs(m @ m - m)) >= 1e-8:
            raise ArgumentError("matrix is not idempotent")
        object.__setattr__(self, "matrix", m)
        if self.rank < 0:
            object.__setattr__(self, "rank", int(round(np.trace(m).real)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def position_projector(grid: Grid, lower: float = -math.inf, upper: float = math.inf) -> Projector:
    """Projector onto grid points with lower <= x < upper (half-open).

    Half-lines use an infinite bound.  With this convention the point x = 0
    belongs to the right half-line, and {x < 0, x >= 0} partitions the grid.
    """
    if not lower < upper:
        raise ArgumentError(f"empty region [{lower}, {upper})")
    for b in (lower, upper):
        if math.isfinite(b) and not grid.x_min <= b <= grid.x_max:
            raise ArgumentError(f"region boundary {b} lies outside the grid [{grid.x_min}, {grid.x_max}]")
    x = grid.x
    mask = (x >= lower) & (x < upper)
    if not mask.any():
        raise ArgumentError(f"region [{lower}, {upper}) contains no grid points")
    return Projector(np.diag(mask.astype(float)), rank=int(mask.sum()))


def left_right_projectors(grid: Grid) -> tuple[Projector, Projector]:
    return position_projector(grid, upper=0.0), position_projector(grid, lower=0.0)


def to_basis(op: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Matrix elements V† A V of a grid operator in the span of ``vectors``."""
    return vectors.conj().T @ op @ vectors
