"""Run orchestration: execute a validated config and emit result files.

Output layout (all in the chosen output directory):

* ``trajectory.csv``   -- one row per time point: column ``t`` followed by
  Re/Im pairs per (L, M) in flattened order, headers ``rho_L<+M>_re`` /
  ``rho_L<+M>_im`` with the sign of M always written.  Stochastic runs
  append standard-error columns (suffix ``_se``).
* ``oracle_deviation.csv`` -- compare_oracle mode: the direct
  density-matrix oracle's multipoles plus a per-time ``max_abs_deviation``
  column against the engine trajectory.
* ``rates.json``       -- rates mode: the full rate table, regime flags and
  cross terms.
* ``angular.csv``      -- columns theta, W: the angular distribution of the
  final trajectory state (evolve mode, when requested).
* ``report.json``      -- run summary: config echo, versions, residuals,
  fitted frequencies/rates, wall time.

Angles are radians and frequencies angular (rad/s) everywhere; every CSV
states that in a comment line.  Identical configs produce byte-identical
CSVs and rates.json; report.json is deterministic except for its
``wall_time_s`` field.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, SimulationConfig
from .fitting import fit_frequency
from .interactions import hamiltonian_matrix
from .liouville import FluctuationModel, evolve_liouville, stochastic_evolve
from .multipoles import (
    AngularDistributionSpec,
    angular_distribution,
    decompose,
    multipole_norm,
    reconstruct,
)
from .precession import apply_relaxation, build_generator, evolve
from .relaxation import rate_report
from .tensors import basis_for, lm_pairs
from .trajectory import Trajectory

__all__ = ["RunReport", "run"]

_FLOAT_FMT = ".17g"


@dataclass
class RunReport:
    """Summary of one run; every residual is recomputed from emitted data."""

    mode: str
    consistency_ok: bool
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    config_echo: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "consistency_ok": self.consistency_ok,
            "results": self.results,
            "residuals": self.residuals,
            "files": self.files,
            "wall_time_s": self.wall_time_s,
            "config": self.config_echo,
            "versions": {
                "spinmultipoles": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
        }


def _fmt(x: float) -> str:
    return format(float(x), _FLOAT_FMT)


def _component_names(max_rank: int) -> list[str]:
    return [f"rho_{L}{M:+d}" for L, M in lm_pairs(max_rank)]


def _write_trajectory_csv(path: Path, traj: Trajectory, max_rank: int) -> None:
    names = _component_names(max_rank)
    lines = ["# multipole trajectory; times in s, frequencies angular (rad/s)"]
    header = ["t"]
    for n in names:
        header += [f"{n}_re", f"{n}_im"]
    if traj.standard_errors is not None:
        for n in names:
            header += [f"{n}_re_se", f"{n}_im_se"]
    lines.append(",".join(header))
    coeffs = traj.coefficients()
    for i, t in enumerate(traj.times):
        row = [_fmt(t)]
        for c in coeffs[i]:
            row += [_fmt(c.real), _fmt(c.imag)]
        if traj.standard_errors is not None:
            for s in traj.standard_errors[i]:
                row += [_fmt(s.real), _fmt(s.imag)]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_oracle_csv(path: Path, traj: Trajectory, deviations: np.ndarray, max_rank: int) -> None:
    names = _component_names(max_rank)
    lines = ["# direct Liouville oracle multipoles; times in s, angles radians"]
    header = ["t"]
    for n in names:
        header += [f"{n}_re", f"{n}_im"]
    header.append("max_abs_deviation")
    lines.append(",".join(header))
    coeffs = traj.coefficients()
    for i, t in enumerate(traj.times):
        row = [_fmt(t)]
        for c in coeffs[i]:
            row += [_fmt(c.real), _fmt(c.imag)]
        row.append(_fmt(deviations[i]))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_angular_csv(path: Path, theta: np.ndarray, values: np.ndarray) -> None:
    lines = ["# angular distribution of the final state; theta in radians", "theta,W"]
    for th, w in zip(theta, values):
        lines.append(f"{_fmt(th)},{_fmt(w)}")
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _fitted_frequencies(traj: Trajectory, max_rank: int) -> dict[str, float]:
    out = {}
    coeffs = traj.coefficients()
    scale = float(np.max(np.abs(coeffs))) or 1.0
    for idx, name in enumerate(_component_names(max_rank)):
        # fit whichever quadrature carries the oscillation; skip components
        # whose candidate signal is numerical noise
        re, im = coeffs[:, idx].real, coeffs[:, idx].imag
        signal = re if np.max(np.abs(re)) >= np.max(np.abs(im)) else im
        if np.max(np.abs(signal)) < 1e-9 * scale:
            continue
        freq = fit_frequency(traj.times, signal)
        if freq is not None:
            out[name] = freq
    return out


def _conservation_residuals(traj: Trajectory, coherent: bool) -> dict[str, float]:
    coeffs = traj.coefficients()
    rho00_drift = float(np.max(np.abs(coeffs[:, 0] - coeffs[0, 0])))
    herm = float(max(s.hermiticity_defect() for s in traj.states))
    out = {"rho00_drift": rho00_drift, "hermiticity_defect": herm}
    if coherent:
        norms = np.array([multipole_norm(s) for s in traj.states])
        out["purity_drift"] = float(np.max(np.abs(norms - norms[0])))
    return out


def run(
    config: SimulationConfig,
    out_dir,
    tolerance: float | None = None,
    threads: int = 1,
) -> RunReport:
    """Execute one validated config, writing outputs into ``out_dir``.

    ``tolerance`` overrides the config's compare_oracle tolerance;
    ``threads`` parallelizes stochastic trajectories without changing any
    result.  Returns the RunReport (also written as report.json).
    """
    t_start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tol = config.tolerance if tolerance is None else tolerance

    basis = basis_for(config.spin)
    report = RunReport(mode=config.run_mode, consistency_ok=True, config_echo=config.raw)

    if config.run_mode == "evolve":
        _run_evolve(config, basis, out, report)
    elif config.run_mode == "compare_oracle":
        _run_compare(config, basis, out, report, tol)
    elif config.run_mode == "rates":
        _run_rates(config, basis, out, report)
    elif config.run_mode == "stochastic":
        _run_stochastic(config, basis, out, report, threads)
    else:  # pragma: no cover - validate_config rejects unknown modes
        raise ConfigError(f"unknown run mode {config.run_mode!r}")

    report.wall_time_s = time.perf_counter() - t_start
    _write_json(out / "report.json", report.to_dict())
    report.files.append("report.json")
    return report


def _build_generator_with_relaxation(config: SimulationConfig, basis):
    tensor = config.interaction_tensor()
    gen = build_generator(tensor, basis)
    relax = config.relaxation_spec()
    if relax is None and config.fluctuation is not None:
        omega_f, tau_c = config.fluctuation
        model = FluctuationModel(tensor, omega_f, tau_c)
        relax = rate_report(model, basis).to_relaxation_spec()
    if relax is not None:
        gen = apply_relaxation(gen, relax)
    return gen


def _run_evolve(config, basis, out, report):
    gen = _build_generator_with_relaxation(config, basis)
    traj = evolve(gen, config.initial_multipoles(), config.times())
    _write_trajectory_csv(out / "trajectory.csv", traj, basis.max_rank)
    report.files.append("trajectory.csv")
    report.residuals = _conservation_residuals(traj, coherent=not gen.relaxation_applied)
    report.results["fitted_frequencies_rad_s"] = _fitted_frequencies(traj, basis.max_rank)
    report.results["generator_norm"] = gen.norm()
    if config.angular_n_theta is not None:
        theta = np.linspace(0.0, np.pi, config.angular_n_theta)
        dist = angular_distribution(
            traj.states[-1], AngularDistributionSpec(theta, config.angular_r)
        )
        _write_angular_csv(out / "angular.csv", theta, dist.values)
        report.files.append("angular.csv")
        report.results["angular_imag_warning"] = dist.imag_warning

    if config.magnetic is not None and config.quadrupole is None:
        report.results["larmor_frequency_rad_s"] = config.magnetic.larmor_frequency


def _run_compare(config, basis, out, report, tol):
    tensor = config.interaction_tensor()
    gen = _build_generator_with_relaxation(config, basis)
    if gen.relaxation_applied:
        raise ConfigError(
            "compare_oracle checks coherent evolution: remove the relaxation block"
        )
    initial = config.initial_multipoles()
    rho0 = reconstruct(initial, basis)
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ConfigError(
            "compare_oracle: the initial state must be hermitian "
            "(rho_{L,-M} = (-1)^M conj(rho_LM))"
        )
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ConfigError("compare_oracle: the initial state must have unit trace")

    times = config.times()
    traj = evolve(gen, initial, times)
    H = hamiltonian_matrix(tensor, basis)
    oracle_raw = evolve_liouville(H, rho0, times)
    oracle = Trajectory(
        times=times,
        states=[decompose(m, basis) for m in oracle_raw.states],
        metadata=oracle_raw.metadata,
    )
    engine_coeffs = traj.coefficients()
    oracle_coeffs = oracle.coefficients()
    deviations = np.max(np.abs(engine_coeffs - oracle_coeffs), axis=1)
    max_dev = float(np.max(deviations))

    _write_trajectory_csv(out / "trajectory.csv", traj, basis.max_rank)
    _write_oracle_csv(out / "oracle_deviation.csv", oracle, deviations, basis.max_rank)
    report.files += ["trajectory.csv", "oracle_deviation.csv"]
    report.residuals = _conservation_residuals(traj, coherent=True)
    report.results["max_oracle_deviation"] = max_dev
    report.results["oracle_tolerance"] = tol
    report.consistency_ok = max_dev <= tol


def _run_rates(config, basis, out, report):
    omega_f, tau_c = config.fluctuation
    model = FluctuationModel(config.interaction_tensor(), omega_f, tau_c)
    rep = rate_report(model, basis)
    payload = {
        "regime": rep.regime,
        "rates": [
            {"L": L, "M": M, "rate": rate} for (L, M), rate in sorted(rep.rates.items())
        ],
        "cross_terms": [
            {
                "L_bra": bra[0],
                "M_bra": bra[1],
                "L_ket": ket[0],
                "M_ket": ket[1],
                "re": value.real,
                "im": value.imag,
            }
            for (bra, ket), value in sorted(rep.cross_terms.items())
        ],
    }
    _write_json(out / "rates.json", payload)
    report.files.append("rates.json")
    report.results["rates"] = {f"{L},{M}": rate for (L, M), rate in sorted(rep.rates.items())}
    report.results["regime"] = rep.regime


def _run_stochastic(config, basis, out, report, threads):
    omega_f, tau_c = config.fluctuation
    tensor = config.interaction_tensor()
    model = FluctuationModel(tensor, omega_f, tau_c)
    rho0 = reconstruct(config.initial_multipoles(), basis)
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ConfigError("stochastic: the initial state must be hermitian")
    try:
        traj = stochastic_evolve(
            model,
            rho0,
            config.times(),
            n_traj=config.n_traj,
            seed=config.seed,
            basis=basis,
            workers=max(1, threads),
        )
    except ValueError as err:
        # step-size preconditions are config problems, not numeric failures
        raise ConfigError(f"stochastic: {err}") from err
    _write_trajectory_csv(out / "trajectory.csv", traj, basis.max_rank)
    report.files.append("trajectory.csv")
    report.residuals = _conservation_residuals(traj, coherent=False)
    report.results["n_traj"] = config.n_traj
    report.results["seed"] = config.seed
    report.results["max_standard_error"] = float(np.max(np.abs(traj.standard_errors)))
