"""Command-line scenario runner.

Subcommands: structure | blockade | thermal | blockade-demo | cnot |
entangle | doppler | fit.  Outputs are CSV (SI base units in the column
headers) or JSON, each carrying a metadata header with the config hash,
seed, and package version.  Exit codes: 0 ok, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    FidelityReport,
    TimeSeries,
    cnot_fidelity,
    fit_damped_sinusoid,
    fit_parity,
    ideal_cnot_table,
    phase_fidelity,
)
from .config import RunConfig, load_config
from .constants import H_PLANCK, K_BOLTZMANN
from .errors import ConfigurationError, DomainError, NumericalError, RydbellError
from .gate import (
    DopplerSpec,
    ErrorModel,
    PulseTiming,
    blockade_demo,
    cnot_truth_table,
    entangle_and_parity,
    phase_scan,
)
from .pair import (
    CHANNEL_PRESETS,
    Geometry,
    PairBasis,
    blockade_shift,
    build_excitation_coupling,
    build_foerster_hamiltonian,
    build_pair_basis,
    spectral_average_probability,
)
from .species import FieldConfig, RydbergLevel, get_species, load_species_file
from .structure import dipole_matrix_element, level_energy, quantum_defect, zeeman_shift
from .thermal import (
    OffsetDistribution,
    ThermalState,
    TrapParams,
    doppler_dephasing_factor,
    doppler_dephasing_mc,
    reduced_mass,
    thermal_average,
)

_LEVEL_FAMILIES = [
    (79, 2, 2.5),
    (80, 1, 1.5),
    (81, 1, 1.5),
    (78, 3, 2.5),
    (78, 3, 3.5),
    (77, 3, 2.5),
    (77, 3, 3.5),
]


def _species_pair(cfg: RunConfig):
    if cfg.species_data_file:
        table = load_species_file(cfg.species_data_file)
        try:
            return table["Rb87"], table["Rb85"]
        except KeyError as exc:
            raise ConfigurationError(f"species file lacks {exc} entry") from exc
    return get_species("Rb87"), get_species("Rb85")


def _basis(cfg: RunConfig) -> PairBasis:
    sp87, sp85 = _species_pair(cfg)
    channels = CHANNEL_PRESETS[cfg.channel_preset]()
    return build_pair_basis(channels, sp87, sp85)


def _offset_distribution(cfg: RunConfig) -> OffsetDistribution:
    sp87, sp85 = _species_pair(cfg)
    trap = TrapParams(omega_y=cfg.omega_y, omega_r=cfg.omega_r)
    thermal = ThermalState(t1=cfg.t87, t2=cfg.t85, m1=sp87.mass, m2=sp85.mass)
    return OffsetDistribution.from_experiment(trap, thermal)


def _metadata(cfg: RunConfig, extra: dict | None = None) -> dict:
    md = {"version": __version__, "config_hash": cfg.config_hash, "seed": cfg.seed}
    if extra:
        md.update(extra)
    return md


def _write_rows(path: Path, columns: list[str], rows: list[list], metadata: dict,
                fmt: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        doc = {"metadata": metadata, "columns": columns, "rows": rows}
        path.with_suffix(".json").write_text(json.dumps(doc, indent=2))
        return
    with path.open("w", newline="") as fh:
        for key, val in metadata.items():
            fh.write(f"# {key}: {json.dumps(val)}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2))


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _p85_of_y(cfg: RunConfig, basis: PairBasis, field: FieldConfig):
    """Callable y -> time-averaged double-excitation probability."""
    w = build_excitation_coupling(basis, cfg.omega_eff_85).matrix

    def p85(y: float) -> float:
        h = build_foerster_hamiltonian(basis, Geometry(y=float(y), z=cfg.z), field)
        return spectral_average_probability(h.matrix + w, basis.bystander_index)

    return p85


def _auto_blockade(cfg: RunConfig, basis: PairBasis) -> float:
    """Effective gate blockade shift from the thermally averaged leak."""
    field = FieldConfig(cfg.b_gauss)
    dist = _offset_distribution(cfg)
    avg = thermal_average(
        _p85_of_y(cfg, basis, field), dist, "quadrature", max(cfg.average_n, 16)
    )
    return blockade_shift(avg.value, cfg.omega_eff_85)


def _error_model(cfg: RunConfig, basis: PairBasis | None = None) -> ErrorModel:
    doppler = None
    if cfg.doppler_enabled:
        sp87, _ = _species_pair(cfg)
        doppler = DopplerSpec(
            temperature=cfg.t87,
            dt=cfg.doppler_dt,
            lambda1=cfg.doppler_lambda1,
            lambda2=cfg.doppler_lambda2,
            mass=sp87.mass,
        )
    if cfg.blockade == "auto":
        blockade = _auto_blockade(cfg, basis if basis is not None else _basis(cfg))
    elif cfg.blockade == "inf":
        blockade = math.inf
    else:
        blockade = float(cfg.blockade)
    return ErrorModel(
        excitation_efficiency_87=cfg.excitation_efficiency_87,
        excitation_efficiency_85=cfg.excitation_efficiency_85,
        detection_efficiency=cfg.detection_efficiency,
        rydberg_lifetime=cfg.rydberg_lifetime,
        blockade_shift=blockade,
        doppler=doppler,
        raman_amplitude_drift=cfg.raman_amplitude_drift,
    )


def _timing(cfg: RunConfig) -> PulseTiming:
    return PulseTiming(
        omega_ryd_87=cfg.omega_eff_87,
        omega_ryd_85=cfg.omega_eff_85,
        raman_duration=0.0,
        pi_pi_gap=cfg.doppler_dt,
    )


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_structure(cfg: RunConfig, out: Path, fmt: str) -> None:
    sp87, _ = _species_pair(cfg)
    field = FieldConfig(cfg.b_gauss)
    level_rows = []
    for n, l, j in _LEVEL_FAMILIES:
        defect = quantum_defect(sp87, n, l, j)
        for m2 in range(-round(2 * j), round(2 * j) + 1, 2):
            lvl = RydbergLevel(sp87, n, l, j, m2 / 2.0)
            level_rows.append(
                [
                    sp87.name, n, l, j, m2 / 2.0, defect,
                    level_energy(lvl), zeeman_shift(lvl, field),
                ]
            )
    _write_rows(
        out / "levels.csv",
        ["species", "n", "l", "j", "m_j", "quantum_defect", "energy_J", "zeeman_shift_J"],
        level_rows,
        _metadata(cfg, {"b_gauss": cfg.b_gauss}),
        fmt,
    )

    ref = RydbergLevel(sp87, 79, 2, 2.5, 2.5)
    dipole_rows = []
    for n, l, j in _LEVEL_FAMILIES[1:]:
        for m2 in range(-round(2 * j), round(2 * j) + 1, 2):
            b = RydbergLevel(sp87, n, l, j, m2 / 2.0)
            for q in (-1, 0, 1):
                el = dipole_matrix_element(ref, b, q)
                if el != 0.0:
                    dipole_rows.append([ref.label(), b.label(), q, el])
    _write_rows(
        out / "dipoles.csv",
        ["from_level", "to_level", "q", "element_Cm"],
        dipole_rows,
        _metadata(cfg),
        fmt,
    )


def cmd_blockade(cfg: RunConfig, out: Path, fmt: str) -> None:
    basis = _basis(cfg)
    field = FieldConfig(cfg.b_gauss)
    p85 = _p85_of_y(cfg, basis, field)
    y_grid = np.linspace(0.0, cfg.y_scan_max, cfg.y_scan_points)

    values = _parallel_map(p85, y_grid, cfg.jobs)
    rows = [
        [float(y), float(p), blockade_shift(p, cfg.omega_eff_85) / H_PLANCK]
        for y, p in zip(y_grid, values)
    ]
    md = _metadata(
        cfg,
        {
            "basis_size": basis.size,
            "channels": [str(c) for c in basis.channels],
            "B_gauss": cfg.b_gauss,
            "z_m": cfg.z,
            "omega85_rad_s": cfg.omega_eff_85,
        },
    )
    _write_rows(out / "blockade.csv", ["y_m", "P85", "deltaE_over_h_Hz"], rows, md, fmt)


def cmd_thermal(cfg: RunConfig, out: Path, fmt: str) -> None:
    basis = _basis(cfg)
    sp87, sp85 = _species_pair(cfg)
    m_red = reduced_mass(sp87.mass, sp85.mass)
    t_grid = np.linspace(cfg.t_scan_min, cfg.t_scan_max, cfg.t_scan_points)
    rows = []
    for b in (0.0, cfg.b_gauss):
        field = FieldConfig(b)
        p85 = _p85_of_y(cfg, basis, field)

        def one_temperature(t: float):
            sigma = math.sqrt(K_BOLTZMANN * t / (m_red * cfg.omega_y**2))
            dist = OffsetDistribution(
                sigma=sigma, m_red=m_red, temperature=float(t), omega_y=cfg.omega_y
            )
            avg = thermal_average(
                p85,
                dist,
                cfg.average_method,
                cfg.average_n if cfg.average_method == "quadrature" else max(cfg.average_n, 1000),
                seed=cfg.seed,
            )
            return sigma, avg

        for t, (sigma, avg) in zip(t_grid, _parallel_map(one_temperature, t_grid, cfg.jobs)):
            rows.append(
                [
                    float(b), float(t), sigma, avg.value,
                    avg.standard_error if avg.standard_error is not None else math.nan,
                ]
            )
    md = _metadata(cfg, {"basis_size": basis.size, "z_m": cfg.z,
                         "omega85_rad_s": cfg.omega_eff_85})
    _write_rows(
        out / "thermal.csv",
        ["B_gauss", "T_K", "sigma_m", "P85_mean", "P85_stderr"],
        rows,
        md,
        fmt,
    )


def _thermal_blockade_mixture(cfg: RunConfig, basis: PairBasis, n: int = 16):
    """(weight, deltaE) nodes over the thermal offset distribution."""
    field = FieldConfig(cfg.b_gauss)
    p85 = _p85_of_y(cfg, basis, field)
    dist = _offset_distribution(cfg)
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    mixture = []
    for x, w in zip(nodes, weights):
        y = abs(math.sqrt(2.0) * dist.sigma * x)
        de = blockade_shift(p85(y), cfg.omega_eff_85)
        mixture.append((float(w / math.sqrt(math.pi)), de))
    return mixture


def cmd_blockade_demo(cfg: RunConfig, out: Path, fmt: str) -> None:
    basis = _basis(cfg)
    em = _error_model(cfg, basis)
    t_grid = np.linspace(cfg.demo_t_max / cfg.demo_points, cfg.demo_t_max, cfg.demo_points)
    result_free = blockade_demo(
        t_grid, with_control=False, error_model=em,
        omega85=cfg.omega_eff_85, omega87=cfg.omega_eff_87,
    )
    mixture = _thermal_blockade_mixture(cfg, basis)
    result_blocked = blockade_demo(
        t_grid, with_control=True, error_model=em,
        omega85=cfg.omega_eff_85, omega87=cfg.omega_eff_87,
        blockade_mixture=mixture,
    )
    rows = [
        [float(t), float(p_free), float(p_blk)]
        for t, p_free, p_blk in zip(
            t_grid, result_free.excitation_signal, result_blocked.excitation_signal
        )
    ]
    md = _metadata(
        cfg,
        {
            "peak_to_peak_no_control": result_free.peak_to_peak,
            "peak_to_peak_with_control": result_blocked.peak_to_peak,
        },
    )
    _write_rows(
        out / "blockade_demo.csv",
        ["t85_s", "excitation_no_control", "excitation_with_control"],
        rows,
        md,
        fmt,
    )
    _write_json(
        out / "blockade_demo_fit.json",
        {
            "metadata": _metadata(cfg),
            "peak_to_peak_no_control": result_free.peak_to_peak,
            "peak_to_peak_with_control": result_blocked.peak_to_peak,
        },
    )


def cmd_cnot(cfg: RunConfig, out: Path, fmt: str) -> None:
    basis = _basis(cfg)
    em = _error_model(cfg, basis)
    timing = _timing(cfg)

    phases = np.linspace(0.0, 2.0 * math.pi, cfg.scan_points)
    scan = phase_scan(phases, error_model=em, timing=timing)
    columns = ["relative_phase_rad"] + [k for k in scan[0] if k != "relative_phase"]
    rows = [[r["relative_phase"]] + [r[k] for k in columns[1:]] for r in scan]
    _write_rows(out / "cnot_phase_scan.csv", columns, rows, _metadata(cfg), fmt)

    table = cnot_truth_table(0.0, em, timing)
    labels = ["dd", "du", "ud", "uu"]
    t_rows = [
        [labels[i]] + [float(x) for x in table.matrix[i]] + [float(table.loss[i])]
        for i in range(4)
    ]
    _write_rows(
        out / "cnot_truth_table.csv",
        ["input"] + [f"p_out_{o}" for o in labels] + ["p_loss"],
        t_rows,
        _metadata(cfg, {"blockade_shift_over_h_Hz": em.blockade_shift / H_PLANCK
                        if math.isfinite(em.blockade_shift) else "inf"}),
        fmt,
    )
    fidelity = cnot_fidelity(table, ideal_cnot_table())
    _write_json(
        out / "cnot_fidelity.json",
        {"metadata": _metadata(cfg), "f_cnot": fidelity},
    )


def cmd_entangle(cfg: RunConfig, out: Path, fmt: str) -> None:
    basis = _basis(cfg)
    em = _error_model(cfg, basis)
    timing = _timing(cfg)

    phis = np.linspace(0.0, 2.0 * math.pi, cfg.scan_points)
    result = entangle_and_parity(phis, em, timing)
    rows = [
        [r["phi1"], r["p_uu"], r["p_dd"], r["p_ud"], r["p_du"], r["parity"], r["loss"]]
        for r in result.parity_rows
    ]
    _write_rows(
        out / "entangle_parity.csv",
        ["phi1_rad", "p_uu", "p_dd", "p_ud", "p_du", "parity", "p_loss"],
        rows,
        _metadata(cfg),
        fmt,
    )

    parity_fit = fit_parity(
        TimeSeries.parity(
            np.array([r["phi1"] for r in result.parity_rows]),
            np.array([r["parity"] for r in result.parity_rows]),
        )
    )
    coherence = min(parity_fit.params["c1_abs"], 0.5)
    table = cnot_truth_table(0.0, em, timing)
    f_cnot = cnot_fidelity(table, ideal_cnot_table())
    doppler_factor = em.doppler.mean_phase_factor if em.doppler else 1.0
    report = FidelityReport.from_measurements(
        p_uu=result.bell_populations[("upper", "upper")],
        p_dd=result.bell_populations[("lower", "lower")],
        coherence=coherence,
        f_cnot=f_cnot,
        doppler_factor=doppler_factor,
    )
    _write_json(
        out / "fidelity_report.json",
        {
            "metadata": _metadata(cfg),
            "report": report.as_dict(),
            "parity_fit": parity_fit.as_dict(),
            "doppler_factor": doppler_factor,
            "f_phase": phase_fidelity(doppler_factor),
            "bell_loss": result.bell_loss,
        },
    )


def cmd_doppler(cfg: RunConfig, out: Path, fmt: str) -> None:
    sp87, _ = _species_pair(cfg)
    factor = doppler_dephasing_factor(
        cfg.t87, sp87.mass, cfg.doppler_dt, cfg.doppler_lambda1, cfg.doppler_lambda2
    )
    if cfg.seed is None:
        raise ConfigurationError("doppler Monte-Carlo cross-check requires a seed")
    rng = np.random.default_rng(cfg.seed)
    mc_mean, mc_err = doppler_dephasing_mc(
        cfg.t87, sp87.mass, cfg.doppler_dt, cfg.doppler_lambda1, cfg.doppler_lambda2,
        n=1_000_000, rng=rng,
    )
    _write_json(
        out / "doppler.json",
        {
            "metadata": _metadata(cfg),
            "analytic_factor": factor,
            "mc_factor": mc_mean,
            "mc_stderr": mc_err,
            "f_phase": phase_fidelity(factor),
            "T_K": cfg.t87,
            "dt_s": cfg.doppler_dt,
        },
    )


def read_table(path: Path):
    """Read a CSV with optional '# key: value' metadata lines and a header row."""
    lines = [l for l in Path(path).read_text().splitlines() if l and not l.startswith("#")]
    if not lines:
        raise ConfigurationError(f"no data rows in {path}")
    return np.genfromtxt(lines, delimiter=",", names=True)


def cmd_fit(cfg: RunConfig, out: Path, fmt: str, file: str, model: str) -> None:
    path = Path(file)
    if not path.exists():
        raise ConfigurationError(f"fit input not found: {path}")
    data = read_table(path)
    names = data.dtype.names
    if names is None or len(names) < 2:
        raise ConfigurationError("fit input must be CSV with columns x,y[,stderr]")
    x = np.asarray(data[names[0]], dtype=float)
    y = np.asarray(data[names[1]], dtype=float)
    stderr = np.asarray(data[names[2]], dtype=float) if len(names) > 2 else None

    if model == "damped_sinusoid":
        result = fit_damped_sinusoid(TimeSeries(x, y, stderr))
    elif model == "parity":
        result = fit_parity(TimeSeries.parity(x, y, stderr))
    else:
        raise ConfigurationError(f"unknown fit model '{model}'")
    doc = {"metadata": _metadata(cfg), "model": model, "fit": result.as_dict()}
    print(json.dumps(doc, indent=2))
    _write_json(out / "fit_result.json", doc)


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydbell",
        description="Heteronuclear Rydberg-blockade gate and Bell-state simulations",
    )
    parser.add_argument("--config", type=str, default=None, help="TOML config file")
    parser.add_argument("--seed", type=int, default=None, help="override RNG seed")
    parser.add_argument("--jobs", type=int, default=None, help="parallel map width")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="tabular output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("structure", "blockade", "thermal", "blockade-demo", "cnot",
                 "entangle", "doppler"):
        sub.add_parser(name)
    fit = sub.add_parser("fit")
    fit.add_argument("--file", required=True, help="CSV with columns x,y[,stderr]")
    fit.add_argument(
        "--model", required=True, choices=("damped_sinusoid", "parity")
    )
    return parser


_COMMANDS = {
    "structure": cmd_structure,
    "blockade": cmd_blockade,
    "thermal": cmd_thermal,
    "blockade-demo": cmd_blockade_demo,
    "cnot": cmd_cnot,
    "entangle": cmd_entangle,
    "doppler": cmd_doppler,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if args.out is not None:
            overrides["out_dir"] = args.out
        cfg = load_config(args.config, overrides)
        out = Path(cfg.out_dir)
        if args.command == "fit":
            cmd_fit(cfg, out, args.format, args.file, args.model)
        else:
            _COMMANDS[args.command](cfg, out, args.format)
        return 0
    except (ConfigurationError, DomainError) as exc:
        _emit_error(exc, 2)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        _emit_error(exc, 3)
        return 3
    except RydbellError as exc:
        _emit_error(exc, 3)
        return 3


def _emit_error(exc: Exception, code: int) -> None:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(doc), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
