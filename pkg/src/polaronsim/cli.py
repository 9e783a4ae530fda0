"""Command-line interface.

Six subcommands cover the pipeline: ``simulate`` (trajectories), ``compile``
(model to circuit design), ``transform`` (star bath to chains),
``feasibility`` (hardware checks), ``estimate`` (classical memory frontier),
and ``spectrum`` (absorption).  Every run prints a JSON summary to stdout and
writes its declared files atomically; report subcommands render a matplotlib
figure next to each delimited output unless ``--no-figures`` is given.  Exit
codes: 0 success, 2 validation or input error, 3 feasibility failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bath as bath_mod
from . import circuit as circuit_mod
from . import dynamics as dyn_mod
from . import model as model_mod
from . import resources as res_mod
from . import spectral as spectral_mod

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3

GB = 10 ** 9


# ---------------------------------------------------------------------------
# small utilities


def _round_sig(value, digits: int = 12):
    """Recursively round floats to `digits` significant digits for output."""
    if isinstance(value, float):
        if value == 0.0 or not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: _round_sig(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_sig(v, digits) for v in value]
    return value


def _atomic_write(path: Path, writer) -> None:
    """Write through a temp file in the same directory, then rename."""
    tmp = path.parent / f".{path.stem}.tmp{os.getpid()}{path.suffix}"
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _write_json(path: Path, data: dict) -> None:
    payload = json.dumps(_round_sig(data), indent=2) + "\n"

    def writer(tmp: Path):
        tmp.write_text(payload, encoding="utf-8")

    _atomic_write(path, writer)


def _emit(summary: dict) -> None:
    print(json.dumps(_round_sig(summary), indent=2))


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_model_or_design(path: str):
    """Return ("model", model) or ("design", design) based on the document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON in {path}: {exc}") from exc
    if isinstance(data, dict) and "sites" in data:
        return "model", model_mod.model_from_dict(data)
    if isinstance(data, dict) and "qubits" in data:
        return "design", circuit_mod.design_from_dict(data)
    raise ValueError(f"{path} is neither a model (sites) nor a design (qubits) document")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> tuple[int, dict]:
    out = _out_dir(args)
    kind, obj = _load_model_or_design(args.model)
    trunc = model_mod.TruncationSpec(fock_dim=args.fock_dim)
    if kind == "model":
        model = obj
        ham = model_mod.assemble_hamiltonian(model, trunc)
    else:
        ham = circuit_mod.assemble_from_design(obj, trunc)
        model, baths = circuit_mod.design_to_model(obj)
        if baths and args.temperature_k > 0:
            raise ValueError(
                "thermal sampling is defined for star-form oscillators; "
                "simulate the model file rather than a chain design at T > 0"
            )
    n_sites = ham.basis.n_sites
    site = args.init_site - 1
    if not 0 <= site < n_sites:
        raise ValueError(f"--init-site {args.init_site} out of range for {n_sites} sites")
    times = np.arange(0.0, args.t_max + args.dt / 2.0, args.dt)

    if args.temperature_k > 0 and kind == "model" and model.mode_count:
        ensemble = dyn_mod.thermal_initial_state(
            model, trunc, args.temperature_k,
            n_samples=args.samples, seed=args.seed, site=site,
        )
        pops = np.zeros((times.size, n_sites))
        for s in range(ensemble.n_samples):
            traj = dyn_mod.propagate(ham, ensemble.state(s), times)
            pops += traj.populations
        pops /= ensemble.n_samples
        n_samples = ensemble.n_samples
    else:
        psi0 = np.zeros(ham.dimension, dtype=complex)
        if ham.basis.sector == "single_excitation":
            electronic = site
        else:
            electronic = model_mod.excited_site_index(n_sites, site)
        psi0[ham.basis.index_of(electronic, (0,) * len(ham.basis.fock_dims))] = 1.0
        traj = dyn_mod.propagate(ham, psi0, times)
        pops = traj.populations
        n_samples = 1

    csv_path = out / "trajectory.csv"
    _atomic_write(csv_path, lambda tmp: dyn_mod.write_trajectory_csv(times, pops, tmp))
    outputs = [str(csv_path)]
    if not args.no_figures:
        from . import plotting

        fig_path = out / "trajectory.png"
        _atomic_write(fig_path, lambda tmp: plotting.save_trajectory_figure(times, pops, tmp))
        outputs.append(str(fig_path))
    summary = {
        "subcommand": "simulate",
        "input": args.model,
        "input_kind": kind,
        "n_sites": n_sites,
        "hilbert_dimension": ham.dimension,
        "t_max_ns": args.t_max,
        "dt_ns": args.dt,
        "temperature_k": args.temperature_k,
        "samples": n_samples,
        "seed": args.seed,
        "final_populations": [float(p) for p in pops[-1]],
        "outputs": outputs,
    }
    return EXIT_OK, summary


def cmd_compile(args) -> tuple[int, dict]:
    out = _out_dir(args)
    model = model_mod.load_model(args.model)
    if (args.rescale_from is None) != (args.rescale_to is None):
        raise ValueError("--rescale-from and --rescale-to must be given together")
    if args.rescale_from is not None:
        model = spectral_mod.rescale(model, args.rescale_from, args.rescale_to)
    baths = None
    max_len = 0
    if args.chains is not None:
        baths = {}
        stripped = []
        for n in range(model.n_sites):
            if not model.modes[n]:
                stripped.append(())
                continue
            mode_set = spectral_mod.ModeSet.from_modes(model.modes[n])
            baths[n] = bath_mod.star_to_chain_bath(mode_set, args.chains, args.strategy)
            max_len = max(max_len, baths[n].max_length)
            stripped.append(())
        model = model_mod.GeneralizedHolsteinModel(
            n_sites=model.n_sites,
            coupling_matrix=model.coupling_matrix,
            site_energy=model.site_energy,
            shift=model.shift,
            modes=tuple(stripped),
        )
    design = circuit_mod.compile_circuit(model, baths, delta_ghz=args.delta)
    design_path = out / "design.json"
    _write_json(design_path, circuit_mod.design_to_dict(design))
    etas = [o.eta_ghz for o in design.head_oscillators]
    summary = {
        "subcommand": "compile",
        "input": args.model,
        "n_qubits": design.n_qubits,
        "n_couplers": len(design.couplers),
        "n_oscillators": len(design.oscillators),
        "chains_per_site": args.chains,
        "max_chain_length": max_len or None,
        "delta_ghz": args.delta,
        "eta_range_ghz": [min(etas), max(etas)] if etas else None,
        "outputs": [str(design_path)],
    }
    return EXIT_OK, summary


def cmd_transform(args) -> tuple[int, dict]:
    out = _out_dir(args)
    density = spectral_mod.load_csv(args.modes, kind="discrete_modes")
    mode_set = spectral_mod.to_mode_set(density, scheme="direct")
    chain_bath = bath_mod.star_to_chain_bath(mode_set, args.chains, args.strategy)
    path = out / "chains.json"
    _write_json(path, bath_mod.chain_bath_to_dict(chain_bath))
    heads = [c.head_coupling for c in chain_bath.chains]
    links = [b for c in chain_bath.chains for b in c.link_coupling]
    freqs = [w for c in chain_bath.chains for w in c.site_freq]
    outputs = [str(path)]
    if not args.no_figures:
        from . import plotting

        fig_path = out / "chains.png"
        _atomic_write(fig_path, lambda tmp: plotting.save_chain_figure(chain_bath, tmp))
        outputs.append(str(fig_path))
    summary = {
        "subcommand": "transform",
        "input": args.modes,
        "n_modes": mode_set.n_modes,
        "n_chains": chain_bath.n_chains,
        "max_chain_length": chain_bath.max_length,
        "any_truncated": any(c.truncated for c in chain_bath.chains),
        "head_range_ghz": [min(heads), max(heads)],
        "link_range_ghz": [min(links), max(links)] if links else None,
        "frequency_range_ghz": [min(freqs), max(freqs)],
        "outputs": outputs,
    }
    return EXIT_OK, summary


def cmd_feasibility(args) -> tuple[int, dict]:
    out = _out_dir(args)
    design = circuit_mod.load_design(args.design)
    hardware = circuit_mod.load_hardware(args.hardware) if args.hardware else None
    limits = circuit_mod.FeasibilityLimits(
        g_min_ghz=args.g_min,
        g_max_ghz=args.g_max,
        eta_max_ghz=args.eta_max,
        beta_max=args.beta_max,
        impedance_max_ohm=args.z_max,
    )
    report = circuit_mod.check_feasibility(design, hardware, limits)
    path = out / "report.json"
    _write_json(path, report.to_dict())
    summary = {
        "subcommand": "feasibility",
        "input": args.design,
        "passed": report.passed,
        "failed_checks": [c.label for c in report.checks if not c.passed],
        "skipped_checks": list(report.skipped),
        "outputs": [str(path)],
    }
    return (EXIT_OK if report.passed else EXIT_INFEASIBLE), summary


def cmd_estimate(args) -> tuple[int, dict]:
    out = _out_dir(args)
    if args.max_sites < args.min_sites:
        raise ValueError("--max-sites must be >= --min-sites")
    budget = int(args.budget_gb * GB)
    points = res_mod.frontier(
        budget_bytes=budget,
        depth=args.depth,
        matsubara_terms=args.matsubara,
        site_range=range(args.min_sites, args.max_sites + 1),
    )
    path = out / "frontier.csv"
    _atomic_write(path, lambda tmp: res_mod.write_frontier_csv(points, tmp))
    outputs = [str(path)]
    if not args.no_figures:
        from . import plotting

        fig_path = out / "frontier.png"
        _atomic_write(fig_path, lambda tmp: plotting.save_frontier_figure(points, tmp))
        outputs.append(str(fig_path))
    summary = {
        "subcommand": "estimate",
        "budget_bytes": budget,
        "depth": args.depth,
        "matsubara_terms": args.matsubara,
        "n_points": len(points),
        "max_feasible_sites": max((p.n_sites for p in points if p.feasible), default=None),
        "outputs": outputs,
    }
    return EXIT_OK, summary


def cmd_spectrum(args) -> tuple[int, dict]:
    out = _out_dir(args)
    model = model_mod.load_model(args.model)
    if args.dipoles:
        dipoles = [float(x) for x in args.dipoles.split(",")]
    else:
        dipoles = [1.0] * model.n_sites
    trunc = model_mod.TruncationSpec(fock_dim=args.fock_dim)
    omega, intensity = dyn_mod.absorption_spectrum(
        model, trunc, dipoles, t_max=args.t_max, dt=args.dt
    )
    path = out / "spectrum.csv"
    _atomic_write(path, lambda tmp: dyn_mod.write_spectrum_csv(omega, intensity, tmp))
    outputs = [str(path)]
    if not args.no_figures:
        from . import plotting

        fig_path = out / "spectrum.png"
        _atomic_write(
            fig_path, lambda tmp: plotting.save_spectrum_figure(omega, intensity, tmp)
        )
        outputs.append(str(fig_path))
    inner = np.arange(1, intensity.size - 1)
    local_max = inner[
        (intensity[inner] >= intensity[inner - 1])
        & (intensity[inner] > intensity[inner + 1])
        & (intensity[inner] > 0.05 * intensity.max())
    ]
    top = sorted(local_max, key=lambda i: -intensity[i])[:5]
    summary = {
        "subcommand": "spectrum",
        "input": args.model,
        "resolution_ghz": 1.0 / args.t_max,
        "main_peaks_ghz": [float(omega[i]) for i in sorted(top)],
        "outputs": outputs,
    }
    return EXIT_OK, summary


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polaronsim",
        description="Holstein model toolkit: dynamics, bath transforms, "
        "circuit compilation, feasibility checks, and cost estimates.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, figures=False):
        p.add_argument("--out-dir", default=".", help="directory for output files")
        if figures:
            p.add_argument("--no-figures", action="store_true",
                           help="skip PNG rendering next to the delimited output")

    p = sub.add_parser("simulate", help="propagate an excitation and write a trajectory")
    p.add_argument("--model", required=True, help="model or design JSON file")
    p.add_argument("--t-max", type=float, default=2.0, help="final time in ns")
    p.add_argument("--dt", type=float, default=0.01, help="output grid spacing in ns")
    p.add_argument("--fock-dim", type=int, default=8, help="Fock truncation per oscillator")
    p.add_argument("--init-site", type=int, default=1, help="1-based initially excited site")
    p.add_argument("--temperature-k", type=float, default=0.0,
                   help="initial bath temperature (0 = vacuum)")
    p.add_argument("--samples", type=int, default=100,
                   help="thermal ensemble size when temperature > 0")
    p.add_argument("--seed", type=int, default=0, help="seed for thermal sampling")
    add_common(p, figures=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compile", help="map a model onto a circuit design")
    p.add_argument("--model", required=True)
    p.add_argument("--chains", type=int, default=None,
                   help="transform each site's modes into this many chains")
    p.add_argument("--strategy", choices=["round_robin", "contiguous"],
                   default="round_robin")
    p.add_argument("--rescale-from", type=float, default=None,
                   help="source temperature in K for energy rescaling")
    p.add_argument("--rescale-to", type=float, default=None,
                   help="target temperature in K for energy rescaling")
    p.add_argument("--delta", type=float, default=circuit_mod.DEFAULT_DELTA_GHZ,
                   help="uniform qubit splitting in GHz")
    add_common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("transform", help="turn a mode list into parallel chains")
    p.add_argument("--modes", required=True,
                   help="CSV of discrete modes (frequency, squared-coupling weight)")
    p.add_argument("--chains", type=int, required=True)
    p.add_argument("--strategy", choices=["round_robin", "contiguous"],
                   default="round_robin")
    add_common(p, figures=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("feasibility", help="check a design against hardware limits")
    p.add_argument("--design", required=True)
    p.add_argument("--hardware", default=None,
                   help="per-oscillator hardware JSON (beta, current, impedance)")
    p.add_argument("--g-min", type=float, default=0.0)
    p.add_argument("--g-max", type=float, default=1.0)
    p.add_argument("--eta-max", type=float, default=10.0)
    p.add_argument("--beta-max", type=float, default=0.2)
    p.add_argument("--z-max", type=float, default=100.0)
    add_common(p)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("estimate", help="memory frontier of hierarchical benchmarks")
    p.add_argument("--budget-gb", type=float, default=250.0,
                   help="memory budget in decimal GB")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--matsubara", type=int, default=0)
    p.add_argument("--min-sites", type=int, default=1)
    p.add_argument("--max-sites", type=int, default=30)
    add_common(p, figures=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("spectrum", help="absorption spectrum of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--t-max", type=float, default=8.0,
                   help="correlation length in ns (resolution = 1/t_max GHz)")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--dipoles", default=None,
                   help="comma-separated site dipole amplitudes (default all 1)")
    p.add_argument("--fock-dim", type=int, default=8)
    add_common(p, figures=True)
    p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        code, summary = args.func(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _emit(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
