"""Star-to-chain transformation of oscillator baths.

A set of oscillators coupled directly to one site (a "star") is unitarily
equivalent to one or more nearest-neighbour oscillator chains whose head
couples to the site.  The transformation is a Lanczos tridiagonalisation of
diag(omega) started from the normalised coupling vector; it preserves the
coupling-weighted spectral moments sum(kappa^2 omega^p) and maps the mode
frequencies to the eigenvalues of the chain's tridiagonal matrix.  Splitting
the star into several parallel chains first (round-robin over the
frequency-sorted modes) bounds each chain's length, which is what limits
per-site hardware depth.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from typing import Literal, Mapping, Sequence

import numpy as np

from .model import (
    GeneralizedHolsteinModel,
    SparseOperator,
    TruncationSpec,
    _assemble_core,
    assemble_hamiltonian,
    build_basis,
)
from .spectral import ModeSet

BREAKDOWN_RTOL = 1e-12

PartitionStrategy = Literal["round_robin", "contiguous"]


@dataclass(frozen=True)
class Chain:
    """One nearest-neighbour oscillator chain.

    head_coupling is the site-to-first-oscillator coupling; site_freq are the
    oscillator frequencies alpha_j along the chain and link_coupling the
    beta_j between neighbours (one fewer than sites).  ``truncated`` marks a
    chain cut short by Lanczos breakdown (degenerate source frequencies).
    """

    head_coupling: float
    site_freq: tuple[float, ...]
    link_coupling: tuple[float, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "head_coupling", float(self.head_coupling))
        object.__setattr__(self, "site_freq", tuple(float(x) for x in self.site_freq))
        object.__setattr__(self, "link_coupling", tuple(float(x) for x in self.link_coupling))
        if len(self.site_freq) == 0:
            raise ValueError("a chain must contain at least one oscillator")
        if len(self.link_coupling) != len(self.site_freq) - 1:
            raise ValueError("need exactly len(site_freq) - 1 link couplings")

    @property
    def length(self) -> int:
        return len(self.site_freq)

    def tridiagonal(self) -> np.ndarray:
        t = np.diag(self.site_freq).astype(float)
        if self.link_coupling:
            t += np.diag(self.link_coupling, k=1) + np.diag(self.link_coupling, k=-1)
        return t


@dataclass(frozen=True)
class ChainBath:
    """Parallel chains replacing one site's star-coupled bath."""

    chains: tuple[Chain, ...]

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(self.chains))
        if not self.chains:
            raise ValueError("a chain bath must contain at least one chain")

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @property
    def total_oscillators(self) -> int:
        return sum(c.length for c in self.chains)

    @property
    def max_length(self) -> int:
        return max(c.length for c in self.chains)


# ---------------------------------------------------------------------------
# partitioning and tridiagonalisation


def partition(
    modes: ModeSet,
    n_chains: int,
    strategy: PartitionStrategy = "round_robin",
) -> list[ModeSet]:
    """Split a mode set into n_chains balanced groups by frequency.

    Modes are sorted by frequency (ties keep input order) and dealt
    round-robin, so group sizes differ by at most one and the longest group
    has ceil(M / n_chains) modes.  The contiguous strategy instead assigns
    consecutive sorted blocks, keeping each chain spectrally narrow.
    """
    m = modes.n_modes
    if n_chains < 1:
        raise ValueError("n_chains must be >= 1")
    if n_chains > m:
        raise ValueError(f"n_chains = {n_chains} exceeds the number of modes {m}")
    order = np.argsort(modes.omega_ghz, kind="stable")
    if strategy == "round_robin":
        groups = [order[i::n_chains] for i in range(n_chains)]
    elif strategy == "contiguous":
        groups = [idx for idx in np.array_split(order, n_chains)]
    else:
        raise ValueError(f"unknown partition strategy {strategy!r}")
    return [
        ModeSet(modes.omega_ghz[idx], modes.kappa_ghz[idx]) for idx in groups
    ]


def star_to_chain(modes: ModeSet) -> Chain:
    """Lanczos tridiagonalisation of one star-coupled group.

    Start vector proportional to the coupling vector, head coupling equal to
    its Euclidean norm.  Full reorthogonalisation keeps the high spectral
    moments honest.  An off-diagonal below 1e-12 * max|omega| signals an
    invariant subspace (degenerate frequencies); the chain stops there and is
    flagged truncated.
    """
    omega = np.asarray(modes.omega_ghz, dtype=float)
    kappa = np.asarray(modes.kappa_ghz, dtype=float)
    m = omega.size
    if m == 0:
        raise ValueError("empty mode set")
    head = float(np.linalg.norm(kappa))
    if head == 0.0:
        raise ValueError("all-zero couplings; the chain start vector is undefined")
    scale = float(np.abs(omega).max())
    v = np.zeros((m, m))
    v[0] = kappa / head
    alphas: list[float] = []
    betas: list[float] = []
    truncated = False
    for j in range(m):
        w = omega * v[j]
        alpha = float(v[j] @ w)
        alphas.append(alpha)
        w = w - alpha * v[j]
        if j > 0:
            w = w - betas[j - 1] * v[j - 1]
        for _ in range(2):  # full reorthogonalisation, twice for safety
            w = w - v[: j + 1].T @ (v[: j + 1] @ w)
        beta = float(np.linalg.norm(w))
        if j == m - 1:
            break
        if beta < BREAKDOWN_RTOL * scale:
            truncated = True
            break
        betas.append(beta)
        v[j + 1] = w / beta
    return Chain(
        head_coupling=head,
        site_freq=tuple(alphas),
        link_coupling=tuple(betas),
        truncated=truncated,
    )


def star_to_chain_bath(
    modes: ModeSet,
    n_chains: int,
    strategy: PartitionStrategy = "round_robin",
) -> ChainBath:
    """Partition a star bath and tridiagonalise every group."""
    return ChainBath(tuple(star_to_chain(g) for g in partition(modes, n_chains, strategy)))


def star_moment(modes: ModeSet, p: int) -> float:
    """Coupling-weighted spectral moment sum_k kappa_k^2 omega_k^p."""
    return float(np.sum(modes.kappa_ghz ** 2 * modes.omega_ghz ** p))


def chain_moment(chain: Chain, p: int) -> float:
    """Same moment evaluated from the chain side: head^2 * (T^p)[0, 0]."""
    t = chain.tridiagonal()
    tp = np.linalg.matrix_power(t, p)
    return float(chain.head_coupling ** 2 * tp[0, 0])


# ---------------------------------------------------------------------------
# serialisation


def chain_bath_to_dict(bath: ChainBath) -> dict:
    chains = []
    for c in bath.chains:
        entry = {
            "head_ghz": c.head_coupling,
            "omegas_ghz": list(c.site_freq),
            "links_ghz": list(c.link_coupling),
        }
        if c.truncated:
            entry["truncated"] = True
        chains.append(entry)
    return {"chains": chains}


def chain_bath_from_dict(data: dict) -> ChainBath:
    try:
        chains = tuple(
            Chain(
                head_coupling=c["head_ghz"],
                site_freq=tuple(c["omegas_ghz"]),
                link_coupling=tuple(c["links_ghz"]),
                truncated=bool(c.get("truncated", False)),
            )
            for c in data["chains"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed chain bath document: {exc}") from exc
    return ChainBath(chains)


def load_chain_bath(path: str | os.PathLike) -> ChainBath:
    with open(path, "r", encoding="utf-8") as fh:
        return chain_bath_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# chain-form assembly and the dynamical equivalence check


def assemble_with_baths(
    model: GeneralizedHolsteinModel,
    baths: Mapping[int, ChainBath],
    trunc: TruncationSpec,
) -> SparseOperator:
    """Assemble a Hamiltonian in which chain baths replace per-site modes.

    ``model`` supplies the electronic part only (its own mode lists must be
    empty wherever a bath is attached).  Chain oscillators occupy slots in
    (site, chain, position) order; the head couples to sigma_z of its site
    with the chain's head coupling and consecutive oscillators exchange with
    the link couplings.
    """
    slot_site: list[int] = []
    slot_omega: list[float] = []
    slot_kappa: list[float] = []
    links: list[tuple[int, int, float]] = []
    site_mode_counts = []
    for n in range(model.n_sites):
        if n in baths and model.modes[n]:
            raise ValueError(f"site {n} has both direct modes and a chain bath")
        count = 0
        for m in model.modes[n]:
            slot_site.append(n)
            slot_omega.append(m.omega_ghz)
            slot_kappa.append(m.kappa_ghz)
            count += 1
        if n in baths:
            for chain in baths[n].chains:
                first = len(slot_omega)
                for pos, alpha in enumerate(chain.site_freq):
                    slot_site.append(n)
                    slot_omega.append(alpha)
                    slot_kappa.append(chain.head_coupling if pos == 0 else 0.0)
                    if pos > 0:
                        links.append((first + pos - 1, first + pos, chain.link_coupling[pos - 1]))
                    count += 1
        site_mode_counts.append(count)

    shell = GeneralizedHolsteinModel(
        n_sites=model.n_sites,
        coupling_matrix=model.coupling_matrix,
        site_energy=model.site_energy,
        shift=model.shift,
        modes=tuple(
            tuple(
                # placeholder modes carrying the slot frequencies so that the
                # basis descriptor records one label per oscillator
                _placeholder_mode(w)
                for w in _site_slice(slot_omega, slot_site, n)
            )
            for n in range(model.n_sites)
        ),
    )
    basis = build_basis(shell, trunc)
    h = _assemble_core(basis, model.coupling_matrix, slot_site, slot_omega, slot_kappa, links)
    return SparseOperator(h, basis, hermitian=True)


def _site_slice(values: Sequence[float], slot_site: Sequence[int], site: int) -> list[float]:
    return [v for v, s in zip(values, slot_site) if s == site]


def _placeholder_mode(omega: float):
    from .model import Mode

    return Mode(omega, 0.0)


def _strip_modes(model: GeneralizedHolsteinModel) -> GeneralizedHolsteinModel:
    return replace(model, modes=tuple(() for _ in range(model.n_sites)))


def _reduced_qubit(state: np.ndarray, boson_dim: int) -> np.ndarray:
    psi = state.reshape(2, boson_dim)
    return psi @ psi.conj().T


def _trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho_a - rho_b))))


def chain_dynamics_equivalence(
    model: GeneralizedHolsteinModel,
    trunc: TruncationSpec,
    t_grid: Sequence[float],
) -> float:
    """Max trace distance between the reduced two-level states propagated
    under the star form and under its chain transform.

    The single site is treated as a full two-level system (the one-excitation
    electronic space of one site is trivial), prepared in (|e> + |g>)/sqrt(2) with
    the oscillators in vacuum, which probes the dephasing dynamics that the
    bath structure controls.  Exact equivalence holds in the untruncated
    space because the transform is an orthogonal rotation of the mode
    operators that leaves the vacuum invariant; at finite Fock truncation the
    residual distance measures the truncation mismatch.
    """
    from .dynamics import propagate

    if model.n_sites != 1:
        raise ValueError("the equivalence check takes a single-site model")
    modes = ModeSet.from_modes(model.modes[0])
    if modes.n_modes == 0:
        raise ValueError("the model carries no oscillators to transform")
    ftl = TruncationSpec(fock_dim=trunc.fock_dim, sector="full_two_level")
    h_star = assemble_hamiltonian(model, ftl)
    if np.all(modes.kappa_ghz == 0.0):
        # decoupled bath: the transform is the identity arrangement
        bath = ChainBath(
            (
                Chain(
                    head_coupling=0.0,
                    site_freq=tuple(modes.omega_ghz),
                    link_coupling=(0.0,) * (modes.n_modes - 1),
                ),
            )
        )
    else:
        bath = star_to_chain_bath(modes, 1)
    h_chain = assemble_with_baths(_strip_modes(model), {0: bath}, ftl)

    bdim = h_star.basis.boson_dim
    psi0 = np.zeros(h_star.dimension, dtype=complex)
    psi0[0] = 1.0 / np.sqrt(2.0)  # |e> (x) vacuum
    psi0[bdim] = 1.0 / np.sqrt(2.0)  # |g> (x) vacuum

    traj_star = propagate(h_star, psi0, t_grid, store_states=True)
    traj_chain = propagate(h_chain, psi0, t_grid, store_states=True)
    worst = 0.0
    for a, b in zip(traj_star.states, traj_chain.states):
        worst = max(worst, _trace_distance(_reduced_qubit(a, bdim), _reduced_qubit(b, bdim)))
    return worst
