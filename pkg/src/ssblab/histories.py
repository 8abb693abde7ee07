"""Decoherent-histories engine.

A history assigns to each time t_i a coarse-grained projector h(t_i), the sum
of a non-empty subset of an exhaustive orthogonal family {Π_J}.  Its chain
operator is

    H(h) = h(t_n) U(t_n − t_{n−1}) ··· h(t_1) U(t_1 − t_0) h(t_0)

and the decoherence functional is D(h, h') = tr(ρ H(h)† H(h')).  Everything
here works on plain matrices in one shared basis; the propagator is any
callable ``dt -> U(dt)``.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ArgumentError, NumericError
from .hilbert import DensityOperator, Projector

log = logging.getLogger(__name__)

Propagator = Callable[[float], np.ndarray]

#: |family| ** n_times above this is refused (4 members at 12 times).
MAX_HISTORIES = 4**12
DEFAULT_EPSILON = 1e-3
EXACT_TOL = 1e-12
SKIP_DIAGONAL = 1e-14


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    members: tuple
    labels: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m.matrix if isinstance(m, Projector) else m) for m in self.members)
        labels = tuple(str(s) for s in self.labels)
        if not mats:
            raise ArgumentError("projector family is empty")
        if len(labels) != len(mats) or len(set(labels)) != len(labels):
            raise ArgumentError("family labels must be unique and match the members")
        d = mats[0].shape
        if any(m.shape != d for m in mats):
            raise ArgumentError("family members have different dimensions")
        for i, a in enumerate(mats):
            if np.max(np.abs(a @ a - a)) >= 1e-8:
                raise ArgumentError(f"member {labels[i]!r} is not idempotent")
            for b, lb in zip(mats[i + 1:], labels[i + 1:]):
                if np.max(np.abs(a @ b)) >= 1e-8:
                    raise ArgumentError(f"members {labels[i]!r} and {lb!r} are not orthogonal")
        if np.max(np.abs(sum(mats) - np.eye(d[0]))) >= 1e-8:
            raise ArgumentError("family is not complete: sum of members differs from identity")
        object.__setattr__(self, "members", mats)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    def __len__(self) -> int:
        return len(self.members)

    def projector(self, subset: Iterable[str]) -> np.ndarray:
        """Coarse-grained projector: the sum of the named members."""
        idx = {lab: i for i, lab in enumerate(self.labels)}
        out = np.zeros(self.members[0].shape, dtype=self.members[0].dtype)
        for lab in subset:
            if lab not in idx:
                raise ArgumentError(f"unknown family label {lab!r}")
            out = out + self.members[idx[lab]]
        return out


@dataclass(frozen=True)
class History:
    times: tuple
    assignments: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        assignments = tuple(frozenset([a]) if isinstance(a, str) else frozenset(a) for a in self.assignments)
        if len(times) != len(assignments) or not times:
            raise ArgumentError("history needs one assignment per time")
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ArgumentError("history times must be strictly increasing")
        if any(not a for a in assignments):
            raise ArgumentError("history assignments must be non-empty")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "assignments", assignments)

    @property
    def label(self) -> str:
        parts = []
        for a in self.assignments:
            parts.append(next(iter(a)) if len(a) == 1 else "(" + "+".join(sorted(a)) + ")")
        return "".join(parts) if all(len(p) == 1 for p in parts) else "|".join(parts)

    def is_constant(self) -> bool:
        return len(set(self.assignments)) == 1

    @classmethod
    def fine(cls, labels: Sequence[str], times: Sequence[float]) -> "History":
        return cls(tuple(times), tuple(frozenset([lab]) for lab in labels))


def equally_spaced(tau: float, n_times: int, t0: float = 0.0) -> tuple:
    if tau <= 0 or n_times < 1:
        raise ArgumentError("need tau > 0 and at least one time")
    return tuple(t0 + i * tau for i in range(n_times))


def history_count(family_size: int, n_times: int) -> int:
    return family_size**n_times


def enumerate_histories(family: ProjectorFamily, times: Sequence[float],
                        max_count: int = MAX_HISTORIES) -> list[History]:
    """All fine-grained label sequences over the family at the given times."""
    count = history_count(len(family), len(times))
    if count > max_count:
        raise ArgumentError(f"{len(family)}^{len(times)} = {count} histories exceeds the bound {max_count}")
    return [History.fine(seq, times) for seq in itertools.product(family.labels, repeat=len(times))]


def summed(h1: History, h2: History) -> History:
    """h1 + h2 for histories differing at exactly one time with disjoint assignments."""
    if h1.times != h2.times:
        raise ArgumentError("histories are defined on different times")
    diff = [i for i, (a, b) in enumerate(zip(h1.assignments, h2.assignments)) if a != b]
    if len(diff) != 1:
        raise ArgumentError(f"histories differ at {len(diff)} times; exactly one is required")
    i = diff[0]
    if h1.assignments[i] & h2.assignments[i]:
        raise ArgumentError("assignments at the differing time overlap, so the projectors are not orthogonal")
    merged = list(h1.assignments)
    merged[i] = h1.assignments[i] | h2.assignments[i]
    return History(h1.times, tuple(merged))


def _check_dims(family: ProjectorFamily, U: np.ndarray | None = None, rho: DensityOperator | None = None) -> None:
    d = family.dim
    if U is not None and U.shape != (d, d):
        raise ArgumentError(f"propagator has shape {U.shape}, family acts on dimension {d}")
    if rho is not None and rho.dim != d:
        raise ArgumentError(f"rho has dimension {rho.dim}, family acts on dimension {d}")


class _PropagatorCache:
    def __init__(self, propagator: Propagator):
        self._f = propagator
        self._cache: dict[float, np.ndarray] = {}

    def __call__(self, dt: float) -> np.ndarray:
        key = round(dt, 15)
        if key not in self._cache:
            self._cache[key] = np.asarray(self._f(dt))
        return self._cache[key]


def history_operator(h: History, family: ProjectorFamily, propagator: Propagator) -> np.ndarray:
    op = family.projector(h.assignments[0])
    for (t0, t1), a in zip(zip(h.times, h.times[1:]), h.assignments[1:]):
        U = np.asarray(propagator(t1 - t0))
        _check_dims(family, U)
        op = family.projector(a) @ (U @ op)
    return op


def decoherence_functional(rho: DensityOperator, h: History, h2: History, family: ProjectorFamily,
                           propagator: Propagator) -> complex:
    """D(h, h2) = tr(ρ H(h)† H(h2))."""
    _check_dims(family, rho=rho)
    if h.times != h2.times:
        raise ArgumentError("histories are defined on different times")
    a = history_operator(h, family, propagator)
    b = history_operator(h2, family, propagator)
    return complex(np.trace(rho.matrix @ a.conj().T @ b))


def probability(rho: DensityOperator, h: History, family: ProjectorFamily, propagator: Propagator,
                return_raw: bool = False):
    """Born probability D(h, h), clamped to [0, 1].  ``return_raw`` also gives the unclamped value."""
    raw = decoherence_functional(rho, h, h, family, propagator).real
    p = min(max(raw, 0.0), 1.0)
    if p != raw:
        log.debug("probability of %s clamped from %.3e", h.label, raw)
    return (p, raw) if return_raw else p


def additivity_violation(rho: DensityOperator, h1: History, h2: History, family: ProjectorFamily,
                         propagator: Propagator, tol: float = 1e-10) -> float:
    """Pr(h1 + h2) − Pr(h1) − Pr(h2), checked against 2 Re D(h1, h2)."""
    h = summed(h1, h2)
    _, p = probability(rho, h, family, propagator, return_raw=True)
    _, p1 = probability(rho, h1, family, propagator, return_raw=True)
    _, p2 = probability(rho, h2, family, propagator, return_raw=True)
    direct = p - p1 - p2
    interference = 2.0 * decoherence_functional(rho, h1, h2, family, propagator).real
    if abs(direct - interference) > tol:
        raise NumericError(f"additivity check failed: {direct!r} vs 2Re D = {interference!r}")
    return interference


class Classification(str, enum.Enum):
    MEDIUM_DECOHERENT = "medium_decoherent"
    CONSISTENT = "consistent"
    APPROXIMATELY_CONSISTENT = "approximately_consistent"
    INTERFERING = "interfering"


@dataclass(frozen=True, eq=False)
class DecoherenceMatrix:
    histories: tuple
    D: np.ndarray
    epsilon: float = DEFAULT_EPSILON
    classification: Classification = field(init=False)
    diagnostics: dict = field(init=False)

    def __post_init__(self):
        D = np.asarray(self.D, dtype=complex)
        if D.shape != (len(self.histories),) * 2:
            raise ArgumentError("D must be square over the history set")
        scale = max(1.0, float(np.max(np.abs(D))))
        if np.max(np.abs(D - D.conj().T)) > 1e-10 * scale:
            raise NumericError("decoherence matrix is not Hermitian")
        if np.min(np.diag(D).real) < -1e-10:
            raise NumericError("decoherence matrix has a negative diagonal entry")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "diagnostics", consistency_measures(D))
        object.__setattr__(self, "classification", classify_consistency(D, self.epsilon))

    @property
    def labels(self) -> list[str]:
        return [h.label for h in self.histories]

    @property
    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.D).real, 0.0, 1.0)

    def total_probability(self) -> float:
        return float(np.trace(self.D).real)

    def entry(self, a: str, b: str) -> complex:
        idx = {lab: i for i, lab in enumerate(self.labels)}
        return complex(self.D[idx[a], idx[b]])

    def to_record(self) -> dict:
        times = list(self.histories[0].times) if self.histories else []
        return {
            "histories": self.labels,
            "times": times,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.D],
            "classification": self.classification.value,
            "epsilon": self.epsilon,
            "diagnostics": {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                            for k, v in self.diagnostics.items()},
        }


def decoherence_matrix(rho: DensityOperator, histories: Sequence[History], family: ProjectorFamily,
                       propagator: Propagator, epsilon: float = DEFAULT_EPSILON) -> DecoherenceMatrix:
    """Full D over a history set, computed from branch vectors H(h)·sqrt(ρ).

    Histories sharing a prefix reuse the partial chain product.
    """
    if not histories:
        raise ArgumentError("empty history set")
    _check_dims(family, rho=rho)
    times = histories[0].times
    if any(h.times != times for h in histories):
        raise ArgumentError("all histories must share one time grid")
    U = _PropagatorCache(propagator)
    root = rho.factor()
    cache: dict[tuple, np.ndarray] = {}

    def branch(prefix: tuple) -> np.ndarray:
        if prefix in cache:
            return cache[prefix]
        i = len(prefix) - 1
        proj = family.projector(prefix[-1])
        if i == 0:
            out = proj @ root
        else:
            Ui = U(times[i] - times[i - 1])
            _check_dims(family, Ui)
            out = proj @ (Ui @ branch(prefix[:-1]))
        cache[prefix] = out
        return out

    B = np.stack([branch(tuple(h.assignments)).ravel(order="F") for h in histories])
    D = B.conj() @ B.T
    return DecoherenceMatrix(tuple(histories), D, epsilon)


def consistency_measures(D: np.ndarray) -> dict:
    """Off-diagonal size measures used by :func:`classify_consistency`.

    ``max_re_offdiag`` and ``max_abs_offdiag`` are absolute, i.e. relative to
    the total probability tr ρ = 1.  ``max_re_normalized`` divides by
    sqrt(D(h,h) D(h',h')) over pairs whose diagonals both exceed 1e-14; it is
    reported for reference only.
    """
    D = np.asarray(D)
    n = D.shape[0]
    off = D - np.diag(np.diag(D))
    diag = np.diag(D).real
    out = {
        "max_re_offdiag": float(np.max(np.abs(off.real))) if n > 1 else 0.0,
        "max_abs_offdiag": float(np.max(np.abs(off))) if n > 1 else 0.0,
        "total_probability": float(diag.sum()),
    }
    ok = diag >= SKIP_DIAGONAL
    mask = np.outer(ok, ok) & ~np.eye(n, dtype=bool)
    out["skipped_pairs"] = int((n * (n - 1)) - mask.sum())
    if mask.any():
        norm = np.sqrt(np.outer(np.where(ok, diag, 1.0), np.where(ok, diag, 1.0)))
        out["max_re_normalized"] = float(np.max(np.abs(off.real)[mask] / norm[mask]))
    else:
        out["max_re_normalized"] = 0.0
    return out


def classify_consistency(D, epsilon: float = DEFAULT_EPSILON) -> Classification:
    """Place a decoherence matrix on the consistency ladder.

    medium_decoherent: every off-diagonal vanishes (|D| <= 1e-12), as for
        exactly conserved families.
    consistent: every Re D(h, h') vanishes (<= 1e-12) but some Im part does not.
    approximately_consistent: max |Re D(h, h')| < epsilon.
    interfering: otherwise.
    """
    D = D.D if isinstance(D, DecoherenceMatrix) else np.asarray(D)
    if D.size == 0:
        raise ArgumentError("empty decoherence matrix")
    if not epsilon > 0:
        raise ArgumentError("epsilon must be positive")
    m = consistency_measures(D)
    if m["max_abs_offdiag"] <= EXACT_TOL:
        return Classification.MEDIUM_DECOHERENT
    if m["max_re_offdiag"] <= EXACT_TOL:
        return Classification.CONSISTENT
    if m["max_re_offdiag"] < epsilon:
        return Classification.APPROXIMATELY_CONSISTENT
    return Classification.INTERFERING


def conservation_check(propagator: Propagator, family: ProjectorFamily, t: float) -> float:
    """max_J ||U(t) Π_J U(t)† − Π_J||_max; zero iff the family is conserved at time t."""
    U = np.asarray(propagator(t))
    _check_dims(family, U)
    return max(float(np.max(np.abs(U @ P @ U.conj().T - P))) for P in family.members)


def spectral_family(n_levels: int, groups: Sequence[Sequence[int]], labels: Sequence[str] | None = None) -> ProjectorFamily:
    """Family of projectors onto groups of energy eigenstates (eigenbasis coordinates)."""
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(n_levels)):
        raise ArgumentError("groups must partition range(n_levels)")
    mats = []
    for g in groups:
        P = np.zeros((n_levels, n_levels))
        P[list(g), list(g)] = 1.0
        mats.append(P)
    labels = labels or [f"E{i}" for i in range(len(groups))]
    return ProjectorFamily(tuple(mats), tuple(labels))


def diagonal_propagator(energies: Sequence[float], hbar: float = 1.0) -> Propagator:
    e = np.asarray(energies, dtype=float)
    return lambda dt: np.diag(np.exp(-1j * e * dt / hbar))


def matrix_propagator(H: np.ndarray, hbar: float = 1.0) -> Propagator:
    """Propagator for a dense Hermitian matrix via one eigendecomposition."""
    e, v = np.linalg.eigh(np.asarray(H))
    return lambda dt: (v * np.exp(-1j * e * dt / hbar)) @ v.conj().T
