"""Potentials, well geometry and instanton asymptotics for tunnelling splittings.

All potential specs are immutable and callable: ``spec(x)`` evaluates V on a
scalar or array.  Derivatives are exact for the analytic variants and come
from a cubic spline for tabulated data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

from .errors import ArgumentError, DomainError, ShapeError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class QuarticDoubleWell:
    """V(x) = λx⁴/24 − μ²x²/2 + 3μ⁴/(2λ), zero at the minima ±x0."""

    lam: float
    mu2: float

    def __post_init__(self):
        if not (self.lam > 0 and self.mu2 > 0):
            raise DomainError(f"quartic well needs lam > 0 and mu2 > 0, got lam={self.lam}, mu2={self.mu2}")

    @property
    def x0(self) -> float:
        return math.sqrt(6.0 * self.mu2 / self.lam)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return self.lam * x**4 / 24.0 - 0.5 * self.mu2 * x**2 + 1.5 * self.mu2**2 / self.lam

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if order == 1:
            return self.lam * x**3 / 6.0 - self.mu2 * x
        if order == 2:
            return self.lam * x**2 / 2.0 - self.mu2
        raise ArgumentError(f"derivative order {order} not supported")

    @property
    def symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class Harmonic:
    """V(x) = ½ m ω² (x − center)².  The mass that sets the stiffness is part of the potential."""

    omega: float
    center: float = 0.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0 and self.mass > 0):
            raise DomainError("harmonic well needs omega > 0 and mass > 0")

    @property
    def stiffness(self) -> float:
        return self.mass * self.omega**2

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return 0.5 * self.stiffness * (x - self.center) ** 2

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if order == 1:
            return self.stiffness * (x - self.center)
        if order == 2:
            return np.full_like(x, self.stiffness)
        raise ArgumentError(f"derivative order {order} not supported")

    @property
    def symmetric(self) -> bool:
        return self.center == 0.0


@dataclass(frozen=True)
class Tilted:
    """Base potential plus a linear symmetry-breaking term: V_J(x) = V(x) − Jx."""

    base: "PotentialSpec"
    J: float

    def __post_init__(self):
        if not math.isfinite(self.J):
            raise DomainError("tilt J must be finite")

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return self.base(x) - self.J * x

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        d = self.base.derivative(x, order)
        return d - self.J if order == 1 else d

    @property
    def symmetric(self) -> bool:
        return self.J == 0.0 and self.base.symmetric


@dataclass(frozen=True)
class Tabulated:
    """Samples of V on an ascending grid, interpolated by a cubic spline."""

    x: tuple
    values: tuple
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 4:
            raise ArgumentError("tabulated potential needs matching 1D arrays with at least 4 samples")
        if np.any(np.diff(x) <= 0):
            raise ArgumentError("tabulated x must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("tabulated potential has non-finite values")
        object.__setattr__(self, "x", tuple(x))
        object.__setattr__(self, "values", tuple(v))
        object.__setattr__(self, "_spline", CubicSpline(x, v))

    @property
    def domain(self) -> tuple[float, float]:
        return self.x[0], self.x[-1]

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise DomainError(f"x outside tabulated domain [{lo}, {hi}]")
        return self._spline(x)

    def derivative(self, x: ArrayLike, order: int = 1) -> ArrayLike:
        return self._spline(np.asarray(x, dtype=float), order)

    @property
    def symmetric(self) -> bool:
        x = np.asarray(self.x)
        v = np.asarray(self.values)
        scale = max(float(np.max(np.abs(x))), 1e-300)
        vscale = max(float(np.max(np.abs(v))), 1e-300)
        return bool(np.allclose(x, -x[::-1], rtol=0, atol=1e-12 * scale)
                    and np.allclose(v, v[::-1], rtol=0, atol=1e-10 * vscale))


PotentialSpec = Union[QuarticDoubleWell, Harmonic, Tilted, Tabulated]


def evaluate(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    """Evaluate V(x); scalars in give scalars out."""
    out = spec(x)
    return float(out) if np.ndim(out) == 0 else out


def is_symmetric(spec: PotentialSpec) -> bool:
    return bool(spec.symmetric)


@dataclass(frozen=True)
class WellGeometry:
    x0: float
    barrier_height: float
    omega: float


def _local_minima(spec: PotentialSpec, lo: float, hi: float, n: int = 4001) -> list[float]:
    xs = np.linspace(lo, hi, n)
    v = np.asarray(spec(xs))
    idx = [i for i in range(1, n - 1) if v[i] <= v[i - 1] and v[i] < v[i + 1]]
    found = []
    for i in idx:
        res = optimize.minimize_scalar(spec, bounds=(xs[i - 1], xs[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        found.append(float(res.x))
    return found


def _search_window(spec: PotentialSpec) -> tuple[float, float]:
    if isinstance(spec, Tabulated):
        return spec.domain
    if isinstance(spec, Tilted):
        return _search_window(spec.base)
    if isinstance(spec, QuarticDoubleWell):
        return -3.0 * spec.x0, 3.0 * spec.x0
    if isinstance(spec, Harmonic):
        w = 10.0 / math.sqrt(spec.stiffness)
        return spec.center - w, spec.center + w
    raise ArgumentError(f"unsupported potential spec {type(spec).__name__}")


def minima(spec: PotentialSpec) -> list[float]:
    """Positions of the local minima, ascending."""
    if isinstance(spec, QuarticDoubleWell):
        return [-spec.x0, spec.x0]
    if isinstance(spec, Harmonic):
        return [spec.center]
    return _local_minima(spec, *_search_window(spec))


def well_geometry(spec: PotentialSpec, mass: float) -> WellGeometry:
    """Minimum position, barrier height and small-oscillation frequency.

    For double wells x0 is the rightmost minimum and the barrier is measured
    from it to the highest point between the outermost minima.
    """
    if mass <= 0:
        raise DomainError("mass must be positive")
    mins = minima(spec)
    if not mins:
        raise ShapeError("potential has no local minimum in its search window")
    x0 = mins[-1]
    curvature = float(spec.derivative(x0, 2))
    if curvature <= 0:
        raise ShapeError(f"non-positive curvature {curvature} at minimum x0={x0}")
    barrier = 0.0
    if len(mins) >= 2:
        res = optimize.minimize_scalar(lambda x: -spec(x), bounds=(mins[0], mins[-1]), method="bounded",
                                       options={"xatol": 1e-12})
        barrier = float(-res.fun - spec(x0))
    return WellGeometry(x0=float(x0), barrier_height=barrier, omega=math.sqrt(curvature / mass))


def _sqrt_integral(V: Callable, a: float, b: float, scale: float, what: str) -> float:
    """∫_a^b sqrt(scale·V) with a domain check; endpoint kinks are split off."""
    if b <= a:
        return 0.0
    probe = np.linspace(a, b, 2001)
    vals = np.asarray(V(probe))
    vmax = max(float(np.max(np.abs(vals))), 1e-300)
    if np.any(vals < -1e-10 * vmax):
        bad = probe[np.argmin(vals)]
        raise DomainError(f"{what}: V < 0 between the minima (at {bad:.6g})")

    def f(x):
        return math.sqrt(max(scale * float(V(x)), 0.0))

    mid = 0.5 * (a + b)
    total = 0.0
    for lo, hi in ((a, mid), (mid, b)):
        val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=500)
        total += val
    return total


def instanton_action(spec: PotentialSpec, mass: float) -> float:
    """S = ∫_{−x0}^{+x0} sqrt(2 m V(x)) dx between the outermost minima."""
    if mass <= 0:
        raise DomainError("mass must be positive")
    mins = minima(spec)
    if len(mins) < 2:
        raise ShapeError("instanton action needs a double-well potential")
    return _sqrt_integral(spec, mins[0], mins[-1], 2.0 * mass, "instanton_action")


def quartic_action_closed_form(spec: QuarticDoubleWell, mass: float) -> float:
    # V = (λ/24)(x² − x0²)² is a perfect square, so sqrt(2mV) = sqrt(mλ/12)(x0² − x²).
    return math.sqrt(mass * spec.lam / 12.0) * 4.0 * spec.x0**3 / 3.0


@dataclass(frozen=True)
class InstantonResult:
    S: float
    kappa: float
    delta_E: float
    omega_I: float
    ln_delta_E: float


def particle_splitting(geom: WellGeometry, S: float, kappa: float = 1.0, hbar: float = 1.0) -> InstantonResult:
    """ΔE = κħω (S/ħ)^{1/2} exp(−S/ħ), and ω_I = ΔE/ħ."""
    if S <= 0 or kappa <= 0 or hbar <= 0:
        raise DomainError("particle_splitting needs S > 0, kappa > 0, hbar > 0")
    s = S / hbar
    ln_dE = math.log(kappa * hbar * geom.omega) + 0.5 * math.log(s) - s
    dE = math.exp(ln_dE)
    return InstantonResult(S=S, kappa=kappa, delta_E=dE, omega_I=dE / hbar, ln_delta_E=ln_dE)


@dataclass(frozen=True)
class FieldWellSpec:
    """Field-space double well V(φ) with minima at ±φ0, in a box of side L."""

    V: Callable
    phi0: float
    L: float
    m: float

    def __post_init__(self):
        if not (self.L > 0 and self.phi0 >= 0 and self.m > 0):
            raise DomainError("field well needs L > 0, phi0 >= 0, m > 0")


def field_gap(fw: FieldWellSpec, kappa: float = 1.0, hbar: float = 1.0) -> InstantonResult:
    """S = L³ ∫ sqrt(2V(φ)) dφ over [−φ0, φ0]; ΔE = (κm/2)(S/ħ)^{1/2} exp(−S/ħ).

    ``ln_delta_E`` is always meaningful; ``delta_E`` underflows to 0 for
    macroscopic boxes.  S = 0 gives ΔE = 0 and ln ΔE = −inf.
    """
    if kappa <= 0 or hbar <= 0:
        raise DomainError("field_gap needs kappa > 0 and hbar > 0")
    S = fw.L**3 * _sqrt_integral(fw.V, -fw.phi0, fw.phi0, 2.0, "field_gap")
    if S == 0.0:
        return InstantonResult(S=0.0, kappa=kappa, delta_E=0.0, omega_I=0.0, ln_delta_E=-math.inf)
    s = S / hbar
    ln_dE = math.log(0.5 * kappa * fw.m) + 0.5 * math.log(s) - s
    dE = math.exp(ln_dE) if ln_dE > -745.0 else 0.0
    return InstantonResult(S=S, kappa=kappa, delta_E=dE, omega_I=dE / hbar, ln_delta_E=ln_dE)


def potential_from_dict(d: dict, path: str = "potential") -> PotentialSpec:
    """Build a spec from a plain mapping (the experiment config representation)."""
    d = dict(d)
    kind = d.pop("kind", None)
    try:
        if kind == "quartic":
            spec = QuarticDoubleWell(lam=float(d.pop("lam")), mu2=float(d.pop("mu2")))
        elif kind == "harmonic":
            spec = Harmonic(omega=float(d.pop("omega")), center=float(d.pop("center", 0.0)),
                            mass=float(d.pop("mass", 1.0)))
        elif kind == "tilted":
            spec = Tilted(base=potential_from_dict(d.pop("base"), f"{path}.base"), J=float(d.pop("J")))
        elif kind == "tabulated":
            spec = Tabulated(x=tuple(d.pop("x")), values=tuple(d.pop("values")))
        elif kind is None:
            raise ArgumentError(f"{path}.kind: missing")
        else:
            raise ArgumentError(f"{path}.kind: unknown kind {kind!r}")
    except KeyError as exc:
        raise ArgumentError(f"{path}.{exc.args[0]}: missing") from None
    if d:
        raise ArgumentError(f"{path}.{sorted(d)[0]}: unknown key")
    return spec


def potential_to_dict(spec: PotentialSpec) -> dict:
    if isinstance(spec, QuarticDoubleWell):
        return {"kind": "quartic", "lam": spec.lam, "mu2": spec.mu2}
    if isinstance(spec, Harmonic):
        return {"kind": "harmonic", "omega": spec.omega, "center": spec.center, "mass": spec.mass}
    if isinstance(spec, Tilted):
        return {"kind": "tilted", "base": potential_to_dict(spec.base), "J": spec.J}
    if isinstance(spec, Tabulated):
        return {"kind": "tabulated", "x": list(spec.x), "values": list(spec.values)}
    raise ArgumentError(f"unsupported potential spec {type(spec).__name__}")
