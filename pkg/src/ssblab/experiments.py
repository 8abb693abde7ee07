"""Experiment definitions behind the command-line runner.

Each experiment declares a parameter schema, a ``prepare`` step that builds
every domain object (so that module preconditions fail before any heavy
computation), a cost estimate for ``validate``, and a ``run`` step returning
tables (column name -> list) and nested records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import classical, estimates, lattice, sigma, twolevel
from .config import Param
from .errors import ConfigError, SSBLabError
from .hilbert import DensityOperator, solve
from .histories import (MAX_HISTORIES, decoherence_matrix, diagonal_propagator, enumerate_histories,
                        equally_spaced, spectral_family)
from .potentials import (instanton_action, minima, particle_splitting, potential_from_dict, potential_to_dict,
                         well_geometry)

#: a full decoherence matrix over more histories than this is not stored
MAX_MATRIX_HISTORIES = 4096
DEFAULT_WELL = {"kind": "quartic", "lam": 1.0, "mu2": 1.0}


@dataclass
class Result:
    tables: dict = field(default_factory=dict)
    records: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)


@dataclass(frozen=True)
class Experiment:
    name: str
    schema: list
    prepare: Callable[[dict, int], dict]
    cost: Callable[[dict, dict], dict]
    run: Callable[[dict, dict, int], Result]


def _as_config_error(exc: SSBLabError, default_path: str) -> ConfigError:
    """Reuse a ``path: message`` prefix when the module error carries one."""
    text = str(exc)
    head, sep, rest = text.partition(": ")
    if sep and head.startswith("parameters.") and " " not in head:
        return ConfigError(head, rest)
    return ConfigError(default_path, text)


def _potential(params: dict):
    try:
        return potential_from_dict(params["potential"], path="parameters.potential")
    except SSBLabError as exc:
        raise _as_config_error(exc, "parameters.potential") from None


def _guard(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SSBLabError as exc:
        raise _as_config_error(exc, path) from None


# --- spectrum -----------------------------------------------------------------

SPECTRUM = [
    Param("lam", "float", 1.0, check="positive", help="quartic coupling"),
    Param("mu", "floats", [0.8, 1.0, 1.2, 1.4], check="positive", help="well parameter sweep"),
    Param("mass", "float", 1.0, check="positive"),
    Param("hbar", "float", 1.0, check="positive"),
    Param("n_points", "int", 1024, check="positive"),
    Param("widths", "float", 8.0, check="positive", help="grid margin in oscillator lengths"),
    Param("kappa", "float", 1.0, check="positive", help="instanton prefactor"),
]


def _spectrum_prepare(p: dict, seed: int) -> dict:
    wells = [_guard(f"parameters.mu[{i}]", potential_from_dict, {"kind": "quartic", "lam": p["lam"], "mu2": mu ** 2})
             for i, mu in enumerate(p["mu"])]
    grids = [_guard("parameters.n_points", twolevel.default_grid, V, p["mass"], p["n_points"], p["widths"])
             for V in wells]
    return {"wells": wells, "grids": grids}


def _spectrum_cost(p: dict, prep: dict) -> dict:
    return {"matrix_dimension": p["n_points"], "eigenpairs": 2, "sweep_points": len(p["mu"])}


def _spectrum_run(p: dict, prep: dict, seed: int) -> Result:
    cols = {k: [] for k in ("mu", "S_over_hbar", "splitting", "instanton_gap", "ratio")}
    for mu, V, grid in zip(p["mu"], prep["wells"], prep["grids"]):
        sp = solve(grid, V, p["mass"], p["hbar"], k=2)
        S = instanton_action(V, p["mass"])
        inst = particle_splitting(well_geometry(V, p["mass"]), S, p["kappa"], p["hbar"])
        gap = float(sp.eigenvalues[1] - sp.eigenvalues[0])
        for k, v in zip(cols, (mu, S / p["hbar"], gap, inst.delta_E, gap / inst.delta_E)):
            cols[k].append(float(v))
    summary = [f"mu={m:g}  S/hbar={s:.4g}  E1-E0={g:.6e}  ratio={r:.4g}"
               for m, s, g, r in zip(cols["mu"], cols["S_over_hbar"], cols["splitting"], cols["ratio"])]
    return Result(tables={"spectrum": cols}, summary=summary)


# --- doublet ------------------------------------------------------------------

DOUBLET = [
    Param("potential", "mapping", DEFAULT_WELL),
    Param("mass", "float", 1.0, check="positive"),
    Param("hbar", "float", 1.0, check="positive"),
    Param("n_points", "int", 1024, check="positive"),
    Param("n_measurements", "int", 3, check="positive"),
    Param("thetas", "floats", None, help="mixing angles (E1-E0)tau/2hbar; default is a sweep over (0, pi)"),
    Param("n_thetas", "int", 16, check="positive"),
]


def _thetas(p: dict) -> list:
    if p["thetas"] is not None:
        return p["thetas"]
    n = p["n_thetas"]
    return [math.pi * (k + 1) / (n + 1) for k in range(n)]


def _doublet_prepare(p: dict, seed: int) -> dict:
    if p["n_measurements"] > 12:
        raise ConfigError("parameters.n_measurements", "at most 12 measurements (4096 outcome strings)")
    return {"potential": _potential(p)}


def _doublet_cost(p: dict, prep: dict) -> dict:
    return {"matrix_dimension": p["n_points"], "eigenpairs": 2, "angles": len(_thetas(p)),
            "outcome_strings": 2 ** p["n_measurements"]}


def _doublet_run(p: dict, prep: dict, seed: int) -> Result:
    model = twolevel.build_doublet(prep["potential"], p["mass"], p["hbar"], n_points=p["n_points"])
    system = twolevel.two_level_system(model)
    cols: dict[str, list] = {k: [] for k in ("theta", "tau", "pr_skip", "pr_sum", "violation", "interference")}
    for theta in _thetas(p):
        tau = model.tau_for_angle(theta)
        pc = twolevel.protocol_compare(model, tau)
        dist = twolevel.measurement_chain(model, tau, p["n_measurements"])
        row = (theta, tau, pc.pr_skip, pc.pr_sum, pc.violation, twolevel.interference_term(system, tau))
        for k, v in zip(("theta", "tau", "pr_skip", "pr_sum", "violation", "interference"), row):
            cols[k].append(float(v))
        for s, pr in dist.probabilities.items():
            cols.setdefault(f"P_{s}", []).append(float(pr))
    rec = {"energies": list(model.energies), "omega_gap": model.omega_gap,
           "right_localization": model.right_localization(), "potential": potential_to_dict(prep["potential"])}
    summary = [f"E1-E0 = {model.omega_gap * p['hbar']:.6e}",
               f"<Pi_x>0> on psi_R = {rec['right_localization']:.6f}"]
    return Result(tables={"doublet": cols}, records={"doublet": rec}, summary=summary)


# --- histories ----------------------------------------------------------------

HISTORIES = [
    Param("potential", "mapping", DEFAULT_WELL),
    Param("mass", "float", 1.0, check="positive"),
    Param("hbar", "float", 1.0, check="positive"),
    Param("n_points", "int", 1024, check="positive"),
    Param("family", "str", "left_right", choices=("left_right", "energy")),
    Param("n_levels", "int", 2, check="positive"),
    Param("n_times", "int", 3, check="positive"),
    Param("tau", "float", 1e-3, check="positive"),
    Param("tau_unit", "str", "gap", choices=("gap", "absolute"), help="gap: tau in units of hbar/(E1-E0)"),
    Param("initial", "str", "ground", choices=("ground", "right", "mixed")),
    Param("epsilon", "float", 1e-3, check="positive"),
]


def _histories_prepare(p: dict, seed: int) -> dict:
    members = 2 if p["family"] == "left_right" else p["n_levels"]
    if p["family"] == "left_right" and p["n_levels"] != 2:
        raise ConfigError("parameters.n_levels", "the left_right family lives on the lowest doublet; use 2")
    if p["n_levels"] < 2:
        raise ConfigError("parameters.n_levels", "need at least two levels")
    count = members ** p["n_times"]
    if count > MAX_HISTORIES:
        raise ConfigError("parameters.n_times",
                          f"{members}^{p['n_times']} = {count} histories exceeds the bound of {MAX_HISTORIES}")
    if count > MAX_MATRIX_HISTORIES:
        raise ConfigError("parameters.n_times",
                          f"{count} histories give a decoherence matrix above {MAX_MATRIX_HISTORIES}^2 entries")
    return {"potential": _potential(p), "members": members, "count": count}


def _histories_cost(p: dict, prep: dict) -> dict:
    return {"matrix_dimension": p["n_points"], "eigenpairs": p["n_levels"], "family_size": prep["members"],
            "histories": prep["count"], "decoherence_entries": prep["count"] ** 2}


def _histories_run(p: dict, prep: dict, seed: int) -> Result:
    V, n = prep["potential"], p["n_levels"]
    if p["family"] == "left_right":
        model = twolevel.build_doublet(V, p["mass"], p["hbar"], n_points=p["n_points"])
        system = twolevel.two_level_system(model)
        energies, family, U = model.energies, system.family, system.propagator
    else:
        sp = solve(twolevel.default_grid(V, p["mass"], p["n_points"]), V, p["mass"], p["hbar"], k=n)
        energies = tuple(float(e) for e in sp.eigenvalues[:n])
        family = spectral_family(n, [[i] for i in range(n)])
        U = diagonal_propagator(energies, p["hbar"])
    dim = len(energies)
    if p["initial"] == "ground":
        rho = DensityOperator.pure(np.eye(dim)[0])
    elif p["initial"] == "right":
        rho = DensityOperator.pure(np.eye(dim)[0] + np.eye(dim)[1])
    else:
        rho = DensityOperator.maximally_mixed(dim)
    gap = (energies[1] - energies[0]) / p["hbar"]
    tau = p["tau"] / gap if p["tau_unit"] == "gap" else p["tau"]
    hs = enumerate_histories(family, equally_spaced(tau, p["n_times"]))
    dm = decoherence_matrix(rho, hs, family, U, p["epsilon"])
    rec = dm.to_record()
    rec.update({"energies": list(energies), "tau": tau, "family": p["family"], "initial": p["initial"]})
    table = {"history": dm.labels, "probability": [float(x) for x in np.diag(dm.D).real]}
    summary = [f"{len(hs)} histories, tau = {tau:.6g}",
               f"max |Re D| off-diagonal = {dm.diagnostics['max_re_offdiag']:.3e}",
               f"classification: {dm.classification.value}"]
    return Result(tables={"probabilities": table}, records={"decoherence": rec}, summary=summary)


# --- classical ----------------------------------------------------------------

CLASSICAL = [
    Param("potential", "mapping", DEFAULT_WELL),
    Param("mass", "float", 1.0, check="positive"),
    Param("temperature", "float", None, check="positive", help="k_B T; overrides barrier_ratio"),
    Param("barrier_ratio", "float", 20.0, check="positive", help="barrier / k_B T"),
    Param("n_traj", "int", 200, check="positive"),
    Param("max_lag_periods", "float", 100.0, check="positive"),
    Param("n_lags", "int", 101, check="positive"),
    Param("n_origins", "int", 1, check="positive"),
    Param("dynamics", "str", "hamiltonian", choices=("hamiltonian", "langevin")),
    Param("friction", "float", None, check="positive"),
    Param("steps_per_period", "int", 400, check="positive"),
    Param("mixture_samples", "int", 20000, check="positive"),
]


def _classical_prepare(p: dict, seed: int) -> dict:
    V = _potential(p)
    if p["n_traj"] < 100:
        raise ConfigError("parameters.n_traj", "need at least 100 trajectories")
    if p["n_lags"] < 2:
        raise ConfigError("parameters.n_lags", "need at least two lags")
    geom = _guard("parameters.potential", well_geometry, V, p["mass"])
    T = p["temperature"]
    if T is None:
        if geom.barrier_height <= 0:
            raise ConfigError("parameters.temperature", "single well: give the temperature explicitly")
        T = geom.barrier_height / p["barrier_ratio"]
    spec = _guard("parameters.temperature", classical.CanonicalSpec, V, p["mass"], T, seed)
    period = classical.well_period(spec)
    return {"spec": spec, "period": period, "double": len(minima(V)) == 2, "barrier": geom.barrier_height}


def _classical_cost(p: dict, prep: dict) -> dict:
    horizon = p["max_lag_periods"] * (2 if p["n_origins"] > 1 else 1)
    return {"trajectories": p["n_traj"], "temperature": prep["spec"].temperature,
            "integration_steps_per_trajectory_approx": int(horizon * p["steps_per_period"]),
            "mixture_samples": p["mixture_samples"] if prep["double"] else 0}


def _classical_run(p: dict, prep: dict, seed: int) -> Result:
    spec, period = prep["spec"], prep["period"]
    lags = np.linspace(0.0, p["max_lag_periods"] * period, p["n_lags"])
    horizon = lags[-1] * (2 if p["n_origins"] > 1 else 1)
    c = classical.side_correlation(spec, horizon, lags, n_traj=p["n_traj"], n_origins=p["n_origins"],
                                   steps_per_period=p["steps_per_period"], dynamics=p["dynamics"],
                                   friction=p["friction"])
    table = c.to_table()
    table["lag_periods"] = [float(x) for x in lags / period]
    rec: dict[str, Any] = {"temperature": spec.temperature, "barrier": prep["barrier"], "well_period": period,
                           "mean_x": c.mean_x, "mean_x_stderr": c.mean_x_stderr,
                           "energy_drift": None if math.isnan(c.energy_drift) else c.energy_drift,
                           "dynamics": p["dynamics"], "seed": seed}
    summary = [f"k_B T = {spec.temperature:.4g}, <X> = {c.mean_x:.4f} +- {c.mean_x_stderr:.4f}",
               f"min <XX> = {float(np.min(c.values)):.4f}, last <XX> = {float(c.values[-1]):.4f}"]
    if prep["double"]:
        mix = classical.mixture_decomposition(spec, p["mixture_samples"])
        rec["mixture"] = {"w_L": mix.w_L, "w_R": mix.w_R, "w_stderr": mix.w_stderr,
                          "overlap_defect": mix.overlap_defect, "w_L_exact": mix.w_L_exact}
        summary.append(f"w_L = {mix.w_L:.4f} +- {mix.w_stderr:.4f}, overlap defect = {mix.overlap_defect:.3e}")
    return Result(tables={"correlation": table}, records={"classical": rec}, summary=summary)


# --- lattice ------------------------------------------------------------------

LATTICE = [
    Param("side", "int", 32, check="positive"),
    Param("coupling", "float", 1.0),
    Param("temperature", "float", 1.5, check="positive"),
    Param("sweeps", "int", 10000, check="positive"),
    Param("n_replicas", "int", 32, check="positive"),
    Param("n_bins", "int", 41, check="positive"),
    Param("start", "str", "random", choices=("random", "ordered")),
]


def _lattice_prepare(p: dict, seed: int) -> dict:
    if p["side"] < lattice.MIN_SIDE:
        raise ConfigError("parameters.side", f"must be at least {lattice.MIN_SIDE}")
    if p["sweeps"] < lattice.MIN_SWEEPS:
        raise ConfigError("parameters.sweeps", f"must be at least {lattice.MIN_SWEEPS}")
    if p["n_replicas"] < 2:
        raise ConfigError("parameters.n_replicas", "need at least two replicas")
    make = lattice.SpinLattice.ordered if p["start"] == "ordered" else lattice.SpinLattice.random
    lat = _guard("parameters", make, p["side"], p["coupling"], p["temperature"], seed=seed)
    return {"lattice": lat}


def _lattice_cost(p: dict, prep: dict) -> dict:
    return {"sites": p["side"] ** 2, "sweeps": p["sweeps"], "replicas": p["n_replicas"],
            "site_updates": p["side"] ** 2 * p["sweeps"] * p["n_replicas"] * 6 // 5}


def _lattice_run(p: dict, prep: dict, seed: int) -> Result:
    start = "given" if p["start"] == "ordered" else "random"
    sig = lattice.lattice_signatures(prep["lattice"], p["sweeps"], p["n_replicas"], n_bins=p["n_bins"], start=start)
    rec = {"modes": list(sig.modes), "bimodal": sig.is_bimodal, "mode_separation": sig.mode_separation,
           "mean_abs_magnetization": sig.mean_abs_magnetization, "mean_magnetization": sig.mean_magnetization,
           "mean_magnetization_stderr": sig.mean_magnetization_stderr, "acceptance_rate": sig.acceptance_rate,
           "seed": seed}
    summary = [f"modes: {', '.join(f'{m:+.3f}' for m in sig.modes)}",
               f"<|m|> = {sig.mean_abs_magnetization:.4f}, <m> = {sig.mean_magnetization:.4f} "
               f"+- {sig.mean_magnetization_stderr:.4f}"]
    return Result(tables={"spin_corr": sig.correlation_table(), "histogram": sig.histogram_table()},
                  records={"lattice": rec}, summary=summary)


# --- sigma --------------------------------------------------------------------

SIGMA = [
    Param("rho0", "float", 1.0, check="positive"),
    Param("L", "float", 1.0, check="positive"),
    Param("hbar", "float", 1.0, check="positive"),
    Param("packet_width", "float", 1.0, check="positive"),
    Param("mass", "float", None, check="positive", help="packet mass; default m_eff"),
    Param("spread_times", "floats", [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0], check="nonnegative",
          help="times in units of m width^2 / hbar"),
    Param("n_sectors", "int", 8, check="positive"),
    Param("n_modes", "int", 256, check="positive"),
    Param("n_intervals", "int", 2, check="positive"),
    Param("span_fractions", "floats", [1e-3, 10.0], check="positive", help="n tau / t_CH"),
    Param("epsilon", "float", 1e-3, check="positive"),
    Param("tilt_width", "float", math.pi / 100, check="positive"),
]


def _sigma_prepare(p: dict, seed: int) -> dict:
    system = _guard("parameters", sigma.PhaseSystem, p["rho0"], p["L"], p["hbar"])
    family = _guard("parameters.n_modes", sigma.sector_family, p["n_sectors"], p["n_modes"])
    count = p["n_sectors"] ** (p["n_intervals"] + 1)
    if count > sigma.MAX_SECTOR_HISTORIES:
        raise ConfigError("parameters.n_intervals",
                          f"{count} sector histories exceed the bound of {sigma.MAX_SECTOR_HISTORIES}")
    if p["tilt_width"] >= sigma.MAX_TILT_WIDTH:
        raise ConfigError("parameters.tilt_width", "must be below pi/4 for the small-angle expansion")
    return {"system": system, "family": family, "count": count}


def _sigma_cost(p: dict, prep: dict) -> dict:
    return {"circle_dimension": 2 * p["n_modes"], "sector_histories": prep["count"],
            "histories_runs": len(p["span_fractions"]), "survival_points": len(p["spread_times"])}


def _sigma_run(p: dict, prep: dict, seed: int) -> Result:
    system, family = prep["system"], prep["family"]
    mass = p["mass"] or system.m_eff
    packet = sigma.SquareWavePacket(p["packet_width"])
    scale = packet.spreading_time(mass, system.hbar)
    surv = {k: [] for k in ("t_over_scale", "t", "re", "im", "abs", "grid_difference")}
    for f in p["spread_times"]:
        t = f * scale
        a = sigma.survival_amplitude(packet, mass, system.hbar, t)
        g = sigma.survival_amplitude_grid(packet, mass, system.hbar, t)
        for k, v in zip(surv, (f, t, a.real, a.imag, abs(a), abs(a - g))):
            surv[k].append(float(v))
    t_ch = sigma.consistency_timescale(system, family.width)
    sect = {k: [] for k in ("span_fraction", "tau", "max_re_offdiag", "total_probability", "classification")}
    for frac in p["span_fractions"]:
        tau = frac * t_ch / p["n_intervals"]
        dm = sigma.sector_histories(system, family, tau, p["n_intervals"], epsilon=p["epsilon"])
        for k, v in zip(sect, (frac, tau, dm.diagnostics["max_re_offdiag"], dm.total_probability(),
                               dm.classification.value)):
            sect[k].append(v if isinstance(v, str) else float(v))
    J = sigma.tilt_for_width(system, p["tilt_width"])
    gauss = sigma.tilted_ground_state(system, J)
    _, exact = sigma.cosine_trap_ground_state(system, J)
    rec = {"m_eff": system.m_eff, "t_CH": t_ch, "sector_width": family.width,
           "tilt": {"J": J, "width": p["tilt_width"], "variance_predicted": sigma.tilted_variance(system, J),
                    "variance_eigensolve": sigma.angle_variance(exact), "fidelity": sigma.fidelity(gauss, exact)}}
    summary = [f"m_eff = {system.m_eff:.4g}, t_CH = {t_ch:.4g}",
               *(f"n tau / t_CH = {f:g}: {c}" for f, c in zip(sect["span_fraction"], sect["classification"])),
               f"tilted ground state fidelity = {rec['tilt']['fidelity']:.6f}"]
    return Result(tables={"survival": surv, "sectors": sect}, records={"sigma": rec}, summary=summary)


# --- estimates ----------------------------------------------------------------

ESTIMATES = [
    Param("m", "float", estimates.PROTON_MASS, dimension="mass", check="positive"),
    Param("E", "float", estimates.ELECTRON_VOLT, dimension="energy", check="positive"),
    Param("l", "float", 1e-10, dimension="length", check="positive"),
    Param("alpha", "float", 1.0, check="positive"),
    Param("L", "float", 1e-3, dimension="length", check="positive"),
    Param("c_sound", "float", 1e3, dimension="speed", check="positive"),
    Param("Delta", "floats", [1e-6, 1e-3, 0.1, 1.0, 6.0], check="positive"),
    Param("margin", "float", estimates.DEFAULT_MARGIN, check="positive"),
]


def _estimates_prepare(p: dict, seed: int) -> dict:
    for i, d in enumerate(p["Delta"]):
        if not d < 2 * math.pi:
            raise ConfigError(f"parameters.Delta[{i}]", "must lie in (0, 2 pi)")
    inp = _guard("parameters", estimates.SolidStateInputs, p["m"], p["E"], p["l"], p["alpha"], p["L"], p["c_sound"])
    return {"inputs": inp}


def _estimates_cost(p: dict, prep: dict) -> dict:
    return {"formula_evaluations": len(p["Delta"]) + 3}


def _estimates_run(p: dict, prep: dict, seed: int) -> Result:
    inp = prep["inputs"]
    gap = estimates.discrete_gap(inp)
    cond = {k: [] for k in ("Delta", "t_CH", "t_mu", "ratio", "condition_ok")}
    for d in p["Delta"]:
        c = estimates.continuous_conditions(inp, d, p["margin"])
        for k, v in zip(cond, (d, c.t_CH, c.t_mu, c.ratio, c.condition_ok)):
            cond[k].append(v)
    threshold = estimates.continuous_conditions(inp, 1.0, p["margin"]).delta2_threshold
    sweep = estimates.alpha_sweep(inp)
    rec = {"action_density_Js_per_m3": estimates.action_density(inp),
           "gap_exponent": estimates.discrete_gap_exponent(inp),
           "gap": {"ln_value": gap.ln_value, "reference_J": gap.reference, "rendered": gap.render()},
           "ln_decoherence_time_s": estimates.ln_decoherence_time(inp),
           "t_CH_coefficient_s_per_m3": estimates.ch_coefficient(inp),
           "delta2_threshold": threshold, "margin": p["margin"]}
    summary = [f"S/V ~ {rec['action_density_Js_per_m3']:.3g} J s/m^3",
               f"S L^3/(hbar V) ~ {rec['gap_exponent']:.3g}; Delta E / E ~ {gap.render()}",
               f"decoherent for t << e^({rec['ln_decoherence_time_s']:.3g}) s",
               f"t_CH ~ {rec['t_CH_coefficient_s_per_m3']:.3g} L^3 Delta^2 s (SI)",
               f"Delta^2 >> {threshold:.3g} (margin {p['margin']:g})"]
    return Result(tables={"conditions": cond,
                          "alpha_sweep": {"alpha": [a for a, _, _ in sweep], "action_density": [s for _, s, _ in sweep],
                                          "gap_exponent": [g for _, _, g in sweep]}},
                  records={"estimates": rec}, summary=summary)


EXPERIMENTS = {e.name: e for e in (
    Experiment("spectrum", SPECTRUM, _spectrum_prepare, _spectrum_cost, _spectrum_run),
    Experiment("doublet", DOUBLET, _doublet_prepare, _doublet_cost, _doublet_run),
    Experiment("histories", HISTORIES, _histories_prepare, _histories_cost, _histories_run),
    Experiment("classical", CLASSICAL, _classical_prepare, _classical_cost, _classical_run),
    Experiment("lattice", LATTICE, _lattice_prepare, _lattice_cost, _lattice_run),
    Experiment("sigma", SIGMA, _sigma_prepare, _sigma_cost, _sigma_run),
    Experiment("estimates", ESTIMATES, _estimates_prepare, _estimates_cost, _estimates_run),
)}
