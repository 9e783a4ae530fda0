"""Mapping site-boson models onto superconducting analog hardware.

A :class:`CircuitDesign` lists qubits (one per site), exchange couplers
carrying the site-site amplitudes, and oscillators attached either directly
to a qubit or as positions along a transformed chain.  The energy dictionary
is one-to-one: coupler g <-> J, oscillator eta <-> kappa (or chain head /
link coupling), oscillator omega' <-> mode frequency, so compiling and
reading back is lossless.  Feasibility checks compare the design against
flux-qubit hardware limits, including the qubit-oscillator coupling ratio

    kappa / (h omega) = 5.48 * beta * (I_p / 50 nA) * sqrt(Z_r / 100 Ohm)
                             / (omega / 2 pi GHz)

evaluated with frequencies as ordinary GHz values.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bath import Chain, ChainBath
from .model import (
    GeneralizedHolsteinModel,
    Mode,
    SparseOperator,
    TruncationSpec,
    _assemble_core,
    build_basis,
)

RATIO_PREFACTOR = 5.48
REF_CURRENT_NA = 50.0
REF_IMPEDANCE_OHM = 100.0
DEFAULT_DELTA_GHZ = 5.0


@dataclass(frozen=True)
class QubitSpec:
    """Two-level site: tunnel splitting and (optional) energy bias, GHz."""

    delta_ghz: float = DEFAULT_DELTA_GHZ
    bias_ghz: float = 0.0


@dataclass(frozen=True)
class CouplerSpec:
    """Exchange coupler between two qubits (0-based indices), amplitude g in GHz."""

    site_i: int
    site_j: int
    g_ghz: float


@dataclass(frozen=True)
class OscillatorSpec:
    """One LC oscillator in the design.

    Direct oscillators have chain None and couple to their qubit with eta.
    Chain oscillators carry (chain, position); position 0 couples to the
    qubit with the chain's head coupling, later positions couple to their
    predecessor with the link strength, both stored as eta.
    """

    qubit: int
    omega_prime_ghz: float
    eta_ghz: float
    chain: int | None = None
    position: int = 0

    def __post_init__(self):
        if self.omega_prime_ghz <= 0:
            raise ValueError("oscillator frequency must be positive")
        if self.position < 0:
            raise ValueError("chain position must be >= 0")
        if self.chain is None and self.position != 0:
            raise ValueError("direct oscillators sit at position 0")


@dataclass(frozen=True)
class CircuitDesign:
    qubits: tuple[QubitSpec, ...]
    couplers: tuple[CouplerSpec, ...]
    oscillators: tuple[OscillatorSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "couplers", tuple(self.couplers))
        object.__setattr__(self, "oscillators", tuple(self.oscillators))
        n = self.n_qubits
        for c in self.couplers:
            if not (0 <= c.site_i < n and 0 <= c.site_j < n) or c.site_i == c.site_j:
                raise ValueError(f"coupler joins invalid qubits ({c.site_i}, {c.site_j})")
        for o in self.oscillators:
            if not 0 <= o.qubit < n:
                raise ValueError(f"oscillator attached to invalid qubit {o.qubit}")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def head_oscillators(self) -> tuple[OscillatorSpec, ...]:
        """Oscillators coupled directly to a qubit (direct or chain head)."""
        return tuple(o for o in self.oscillators if o.position == 0)


@dataclass(frozen=True)
class OscillatorHardware:
    """Flux-qubit-side knobs for one oscillator's coupler."""

    beta: float
    persistent_current_na: float = REF_CURRENT_NA
    impedance_ohm: float = REF_IMPEDANCE_OHM

    def __post_init__(self):
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0, 1); far below 1 in practice")
        if self.persistent_current_na <= 0:
            raise ValueError("persistent current must be positive")
        if self.impedance_ohm <= 0:
            raise ValueError("impedance must be positive")


@dataclass(frozen=True)
class FeasibilityLimits:
    g_min_ghz: float = 0.0
    g_max_ghz: float = 1.0
    eta_max_ghz: float = 10.0
    beta_max: float = 0.2
    impedance_max_ohm: float = 100.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    label: str
    passed: bool
    margin: float
    detail: str


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[CheckResult, ...]
    skipped: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "label": c.label,
                    "passed": c.passed,
                    "margin": c.margin,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
            "skipped": list(self.skipped),
        }


# ---------------------------------------------------------------------------
# coupling-ratio engineering formula


def coupling_ratio(hw: OscillatorHardware, freq_ghz: float) -> float:
    """Achievable kappa/(h omega) for one qubit-oscillator coupler.

    Linear in beta and persistent current, square-root in impedance, inverse
    in frequency; equals sqrt(huang_rhys) of the mode the coupler realises.
    """
    if freq_ghz <= 0:
        raise ValueError("frequency must be positive")
    return (
        RATIO_PREFACTOR
        * hw.beta
        * (hw.persistent_current_na / REF_CURRENT_NA)
        * math.sqrt(hw.impedance_ohm / REF_IMPEDANCE_OHM)
        / freq_ghz
    )


def required_beta(sqrt_huang_rhys: float, hw: OscillatorHardware, freq_ghz: float) -> float:
    """Invert the coupling-ratio formula for the beta a target sqrt(R) needs."""
    if freq_ghz <= 0:
        raise ValueError("frequency must be positive")
    return (
        sqrt_huang_rhys
        * freq_ghz
        / (
            RATIO_PREFACTOR
            * (hw.persistent_current_na / REF_CURRENT_NA)
            * math.sqrt(hw.impedance_ohm / REF_IMPEDANCE_OHM)
        )
    )


# ---------------------------------------------------------------------------
# compilation


def compile_circuit(
    model: GeneralizedHolsteinModel,
    baths: Mapping[int, ChainBath] | ChainBath | None = None,
    delta_ghz: float = DEFAULT_DELTA_GHZ,
) -> CircuitDesign:
    """Map a model onto a circuit design.

    Couplers copy the nonzero entries of J, oscillators copy each site's
    modes (or, when chain baths are supplied, each chain's frequencies and
    couplings), and every qubit gets the same tunnel splitting, which only
    contributes a global phase in the mapped sector.  No arithmetic touches
    the energies, so reading g, eta, omega' back recovers J, kappa, omega
    bit-exactly when no bath transform is involved.
    """
    if isinstance(baths, ChainBath):
        if model.n_sites != 1:
            raise ValueError("a bare ChainBath is only unambiguous for a 1-site model")
        baths = {0: baths}
    baths = dict(baths or {})
    for site in baths:
        if not 0 <= site < model.n_sites:
            raise ValueError(f"bath attached to invalid site {site}")
        if model.modes[site]:
            raise ValueError(f"site {site} has both direct modes and a chain bath")

    qubits = tuple(QubitSpec(delta_ghz=delta_ghz) for _ in range(model.n_sites))
    couplers = []
    for i in range(model.n_sites):
        for j in range(i + 1, model.n_sites):
            g = model.coupling_matrix[i, j]
            if g != 0.0:
                couplers.append(CouplerSpec(site_i=i, site_j=j, g_ghz=float(g)))
    oscillators = []
    for n in range(model.n_sites):
        for m in model.modes[n]:
            oscillators.append(
                OscillatorSpec(qubit=n, omega_prime_ghz=m.omega_ghz, eta_ghz=m.kappa_ghz)
            )
        if n in baths:
            for c_idx, chain in enumerate(baths[n].chains):
                for pos, alpha in enumerate(chain.site_freq):
                    eta = chain.head_coupling if pos == 0 else chain.link_coupling[pos - 1]
                    oscillators.append(
                        OscillatorSpec(
                            qubit=n,
                            omega_prime_ghz=alpha,
                            eta_ghz=eta,
                            chain=c_idx,
                            position=pos,
                        )
                    )
    return CircuitDesign(qubits, tuple(couplers), tuple(oscillators))


def design_to_model(
    design: CircuitDesign,
) -> tuple[GeneralizedHolsteinModel, dict[int, ChainBath] | None]:
    """Invert :func:`compile_circuit`: rebuild the model and any chain baths."""
    n = design.n_qubits
    j = np.zeros((n, n))
    for c in design.couplers:
        j[c.site_i, c.site_j] = c.g_ghz
        j[c.site_j, c.site_i] = c.g_ghz
    site_modes: list[list[Mode]] = [[] for _ in range(n)]
    chain_parts: dict[tuple[int, int], list[OscillatorSpec]] = {}
    for o in design.oscillators:
        if o.chain is None:
            site_modes[o.qubit].append(
                Mode(o.omega_prime_ghz, (o.eta_ghz / o.omega_prime_ghz) ** 2)
            )
        else:
            chain_parts.setdefault((o.qubit, o.chain), []).append(o)
    baths: dict[int, ChainBath] = {}
    if chain_parts:
        per_site: dict[int, list[Chain]] = {}
        for (site, _), oscs in sorted(chain_parts.items()):
            oscs = sorted(oscs, key=lambda o: o.position)
            if [o.position for o in oscs] != list(range(len(oscs))):
                raise ValueError(f"chain on qubit {site} has missing or duplicate positions")
            per_site.setdefault(site, []).append(
                Chain(
                    head_coupling=oscs[0].eta_ghz,
                    site_freq=tuple(o.omega_prime_ghz for o in oscs),
                    link_coupling=tuple(o.eta_ghz for o in oscs[1:]),
                )
            )
        for site, chains in per_site.items():
            if site_modes[site]:
                raise ValueError(f"qubit {site} mixes direct and chain oscillators")
            baths[site] = ChainBath(tuple(chains))
    model = GeneralizedHolsteinModel(
        n_sites=n,
        coupling_matrix=j,
        site_energy=(0.0,) * n,
        shift=(0.0,) * n,
        modes=tuple(tuple(m) for m in site_modes),
    )
    return model, (baths or None)


def assemble_from_design(design: CircuitDesign, trunc: TruncationSpec) -> SparseOperator:
    """Assemble the simulator Hamiltonian straight from design fields.

    Uses eta values as couplings without passing through Huang-Rhys factors,
    so the matrix matches the source model's assembly bit-for-bit.  The
    uniform tunnel splitting is excluded (global phase in the mapped sector).
    """
    n = design.n_qubits
    j = np.zeros((n, n))
    for c in design.couplers:
        j[c.site_i, c.site_j] = c.g_ghz
        j[c.site_j, c.site_i] = c.g_ghz

    slot_site: list[int] = []
    slot_omega: list[float] = []
    slot_kappa: list[float] = []
    links: list[tuple[int, int, float]] = []
    placeholder: list[list[Mode]] = [[] for _ in range(n)]
    # slots grouped by qubit, direct modes first, then chains by (chain, position)
    for q in range(n):
        mine = [o for o in design.oscillators if o.qubit == q]
        direct = [o for o in mine if o.chain is None]
        chains: dict[int, list[OscillatorSpec]] = {}
        for o in mine:
            if o.chain is not None:
                chains.setdefault(o.chain, []).append(o)
        for o in direct:
            slot_site.append(q)
            slot_omega.append(o.omega_prime_ghz)
            slot_kappa.append(o.eta_ghz)
            placeholder[q].append(Mode(o.omega_prime_ghz, 0.0))
        for c_idx in sorted(chains):
            oscs = sorted(chains[c_idx], key=lambda o: o.position)
            first = len(slot_omega)
            for pos, o in enumerate(oscs):
                slot_site.append(q)
                slot_omega.append(o.omega_prime_ghz)
                slot_kappa.append(o.eta_ghz if pos == 0 else 0.0)
                if pos > 0:
                    links.append((first + pos - 1, first + pos, o.eta_ghz))
                placeholder[q].append(Mode(o.omega_prime_ghz, 0.0))

    shell = GeneralizedHolsteinModel(
        n_sites=n,
        coupling_matrix=j,
        site_energy=(0.0,) * n,
        shift=(0.0,) * n,
        modes=tuple(tuple(p) for p in placeholder),
    )
    basis = build_basis(shell, trunc)
    h = _assemble_core(basis, j, slot_site, slot_omega, slot_kappa, links)
    return SparseOperator(h, basis, hermitian=True)


# ---------------------------------------------------------------------------
# feasibility


def check_feasibility(
    design: CircuitDesign,
    hardware: Sequence[OscillatorHardware] | None = None,
    limits: FeasibilityLimits | None = None,
) -> FeasibilityReport:
    """Run the hardware-limit checks and report margins.

    Design-level checks (coupler range, qubit-oscillator coupling strength)
    always run.  Hardware-level checks (beta ratio, impedance, and the beta
    each oscillator's sqrt(R) would require) need a per-oscillator hardware
    list aligned with design.oscillators and are reported as skipped when it
    is absent.  Margins are distances to the nearest bound, so tightening a
    limit can only shrink them.
    """
    limits = limits or FeasibilityLimits()
    checks: list[CheckResult] = []
    skipped: list[str] = []

    g_values = [c.g_ghz for c in design.couplers]
    if g_values:
        margins = [min(g - limits.g_min_ghz, limits.g_max_ghz - g) for g in g_values]
        worst = int(np.argmin(margins))
        bad = [
            f"coupler ({c.site_i + 1},{c.site_j + 1}) g = {c.g_ghz:.6g} GHz"
            for c, m in zip(design.couplers, margins)
            if m < 0
        ]
        checks.append(
            CheckResult(
                name="g_range",
                label="g range",
                passed=not bad,
                margin=float(margins[worst]),
                detail="; ".join(bad)
                or f"all couplers inside [{limits.g_min_ghz:.6g}, {limits.g_max_ghz:.6g}] GHz",
            )
        )
    else:
        checks.append(
            CheckResult("g_range", "g range", True, limits.g_max_ghz - limits.g_min_ghz,
                        "no couplers in design")
        )

    heads = design.head_oscillators
    if heads:
        margins = [limits.eta_max_ghz - o.eta_ghz for o in heads]
        worst = int(np.argmin(margins))
        bad = [
            f"qubit {o.qubit + 1} oscillator eta = {o.eta_ghz:.6g} GHz"
            for o, m in zip(heads, margins)
            if m <= 0
        ]
        checks.append(
            CheckResult(
                name="eta_range",
                label="eta range",
                passed=not bad,
                margin=float(margins[worst]),
                detail="; ".join(bad) or f"all couplings below {limits.eta_max_ghz:.6g} GHz",
            )
        )
    else:
        checks.append(
            CheckResult("eta_range", "eta range", True, limits.eta_max_ghz,
                        "no oscillators in design")
        )

    if hardware is None:
        skipped.extend(["beta_ratio", "impedance", "required_beta"])
    else:
        hardware = list(hardware)
        if len(hardware) != len(design.oscillators):
            raise ValueError(
                f"hardware list has {len(hardware)} entries for "
                f"{len(design.oscillators)} oscillators"
            )
        beta_margins = [limits.beta_max - hw.beta for hw in hardware]
        z_margins = [limits.impedance_max_ohm - hw.impedance_ohm for hw in hardware]
        req_margins = []
        for o, hw in zip(design.oscillators, hardware):
            sqrt_r = o.eta_ghz / o.omega_prime_ghz
            req_margins.append(limits.beta_max - required_beta(sqrt_r, hw, o.omega_prime_ghz))
        for name, label, margins, what in (
            ("beta_ratio", "beta ratio", beta_margins, "beta"),
            ("impedance", "impedance", z_margins, "Z_r"),
            ("required_beta", "required beta", req_margins, "required beta"),
        ):
            worst = int(np.argmin(margins)) if margins else 0
            passed = all(m >= 0 for m in margins)
            checks.append(
                CheckResult(
                    name=name,
                    label=label,
                    passed=passed,
                    margin=float(margins[worst]) if margins else 0.0,
                    detail=(
                        f"worst oscillator #{worst + 1}: margin {margins[worst]:.6g}"
                        if margins
                        else "no oscillators in design"
                    ),
                )
            )

    return FeasibilityReport(tuple(checks), tuple(skipped))


# ---------------------------------------------------------------------------
# serialisation


def design_to_dict(design: CircuitDesign) -> dict:
    oscillators = []
    for o in design.oscillators:
        entry = {
            "qubit": o.qubit + 1,
            "omega_prime_ghz": o.omega_prime_ghz,
            "eta_ghz": o.eta_ghz,
        }
        if o.chain is not None:
            entry["chain"] = o.chain
            entry["position"] = o.position
        oscillators.append(entry)
    return {
        "qubits": [
            {"delta_ghz": q.delta_ghz, "bias_ghz": q.bias_ghz} for q in design.qubits
        ],
        "couplers": [
            {"i": c.site_i + 1, "j": c.site_j + 1, "g_ghz": c.g_ghz} for c in design.couplers
        ],
        "oscillators": oscillators,
    }


def design_from_dict(data: dict) -> CircuitDesign:
    try:
        qubits = tuple(
            QubitSpec(delta_ghz=q.get("delta_ghz", DEFAULT_DELTA_GHZ),
                      bias_ghz=q.get("bias_ghz", 0.0))
            for q in data["qubits"]
        )
        couplers = tuple(
            CouplerSpec(site_i=c["i"] - 1, site_j=c["j"] - 1, g_ghz=c["g_ghz"])
            for c in data.get("couplers", [])
        )
        oscillators = tuple(
            OscillatorSpec(
                qubit=o["qubit"] - 1,
                omega_prime_ghz=o["omega_prime_ghz"],
                eta_ghz=o["eta_ghz"],
                chain=o.get("chain"),
                position=o.get("position", 0),
            )
            for o in data.get("oscillators", [])
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed design document: {exc}") from exc
    return CircuitDesign(qubits, couplers, oscillators)


def load_design(path: str | os.PathLike) -> CircuitDesign:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed design file {path}: {exc}") from exc
    return design_from_dict(data)


def load_hardware(path: str | os.PathLike) -> list[OscillatorHardware]:
    """Read a per-oscillator hardware JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed hardware file {path}: {exc}") from exc
    try:
        return [
            OscillatorHardware(
                beta=o["beta"],
                persistent_current_na=o.get("persistent_current_na", REF_CURRENT_NA),
                impedance_ohm=o.get("impedance_ohm", REF_IMPEDANCE_OHM),
            )
            for o in data["oscillators"]
        ]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed hardware file {path}: {exc}") from exc
