"""Holstein-chain and multi-mode site-boson models on truncated Hilbert spaces.

Two model types are provided.  :class:`HolsteinModel` is the standard
nearest-neighbour chain: one excitation hopping between N sites, each site
carrying one local oscillator that couples to the site occupation.
:class:`GeneralizedHolsteinModel` allows an arbitrary symmetric coupling
matrix between sites and any number of oscillators per site, parameterised by
(frequency, Huang-Rhys factor) pairs.

Hamiltonians are assembled as sparse matrices over a truncated product basis:
the electronic factor first (slowest index), then every oscillator in
(site, mode) lexicographic order.  Two electronic sectors are supported, the
single-excitation subspace (dimension N) and the full register of two-level
sites (dimension 2^N).  In the single-excitation sector the Pauli operator
sigma_z on site n acts as 2|n><n| - 1; the "-1" part multiplies the bath
displacement and is kept exactly rather than being absorbed into a frame
shift.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from jsonschema import validate as _validate_schema
from jsonschema.exceptions import ValidationError as SchemaError

DEFAULT_DIM_CAP = 2_000_000
DIM_CAP_ENV = "POLARON_DIM_CAP"
HERMITICITY_TOL = 1e-12

Sector = Literal["single_excitation", "full_two_level"]
_SECTORS = ("single_excitation", "full_two_level")

# Pauli matrices with the excited state as index 0, ground as index 1.
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class DimensionCapExceeded(ValueError):
    """Raised when a requested truncated space exceeds the dimension cap."""


def dimension_cap() -> int:
    """Hard cap on assembled Hilbert-space dimension.

    Defaults to 2e6 basis states; the environment variable POLARON_DIM_CAP
    overrides it (read at call time, so tests and long-running sessions can
    change it).
    """
    raw = os.environ.get(DIM_CAP_ENV, "").strip()
    if raw:
        cap = int(raw)
        if cap < 1:
            raise ValueError(f"{DIM_CAP_ENV} must be a positive integer, got {cap}")
        return cap
    return DEFAULT_DIM_CAP


# ---------------------------------------------------------------------------
# model types


@dataclass(frozen=True)
class Mode:
    """One local oscillator: frequency in GHz and dimensionless Huang-Rhys factor."""

    omega_ghz: float
    huang_rhys: float

    def __post_init__(self):
        object.__setattr__(self, "omega_ghz", float(self.omega_ghz))
        object.__setattr__(self, "huang_rhys", float(self.huang_rhys))
        if not self.omega_ghz > 0:
            raise ValueError(f"mode frequency must be positive, got {self.omega_ghz}")
        if self.huang_rhys < 0:
            raise ValueError(f"Huang-Rhys factor must be >= 0, got {self.huang_rhys}")

    @property
    def kappa_ghz(self) -> float:
        """Site-oscillator coupling kappa = omega * sqrt(huang_rhys), in GHz."""
        return self.omega_ghz * math.sqrt(self.huang_rhys)


@dataclass(frozen=True)
class HolsteinModel:
    """Nearest-neighbour chain with one oscillator per site.

    Parameters
    ----------
    n_sites : number of sites N (>= 1).
    hop : N-1 hopping amplitudes V_n between sites n and n+1, GHz.
    mode_freq : N oscillator frequencies, GHz, all positive.
    mode_coupling : N occupation-displacement couplings kappa_n, GHz.
    """

    n_sites: int
    hop: tuple[float, ...]
    mode_freq: tuple[float, ...]
    mode_coupling: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "n_sites", int(self.n_sites))
        lengths = {"hop": self.n_sites - 1, "mode_freq": self.n_sites,
                   "mode_coupling": self.n_sites}
        for name, n in lengths.items():
            value = getattr(self, name)
            if np.isscalar(value):
                value = (float(value),) * n
            object.__setattr__(self, name, tuple(float(x) for x in value))
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if len(self.hop) != self.n_sites - 1:
            raise ValueError(
                f"expected {self.n_sites - 1} hopping amplitudes, got {len(self.hop)}"
            )
        for name in ("mode_freq", "mode_coupling"):
            if len(getattr(self, name)) != self.n_sites:
                raise ValueError(
                    f"expected {self.n_sites} entries in {name}, got {len(getattr(self, name))}"
                )
        if any(w <= 0 for w in self.mode_freq):
            raise ValueError("all mode frequencies must be positive")


@dataclass(frozen=True)
class GeneralizedHolsteinModel:
    """Sites with arbitrary pairwise couplings and several oscillators each.

    Parameters
    ----------
    n_sites : number of sites N.
    coupling_matrix : symmetric N x N matrix J with zero diagonal, GHz.
    site_energy : N site energies epsilon_n, GHz.
    shift : N environment shifts D_n, GHz.
    modes : per-site tuples of :class:`Mode`.

    The per-site constant C_n = epsilon_n + sum_k omega_nk * R_nk + D_n is
    reported by :attr:`constant_offsets` but never enters assembled dynamics;
    within one excitation sector it only moves spectra, which is where
    :func:`polaronsim.dynamics.absorption_spectrum` reintroduces it.
    """

    n_sites: int
    coupling_matrix: np.ndarray
    site_energy: tuple[float, ...] | None = None
    shift: tuple[float, ...] | None = None
    modes: tuple[tuple[Mode, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if self.site_energy is None:
            object.__setattr__(self, "site_energy", (0.0,) * self.n_sites)
        if self.shift is None:
            object.__setattr__(self, "shift", (0.0,) * self.n_sites)
        if self.modes is None:
            object.__setattr__(self, "modes", ((),) * self.n_sites)
        j = np.array(self.coupling_matrix, dtype=float)
        if j.shape != (self.n_sites, self.n_sites):
            raise ValueError(
                f"coupling matrix shape {j.shape} does not match {self.n_sites} sites"
            )
        if not np.allclose(j, j.T, rtol=0.0, atol=1e-12):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.abs(np.diag(j)) > 1e-12):
            raise ValueError("coupling matrix diagonal must be zero")
        j.setflags(write=False)
        object.__setattr__(self, "coupling_matrix", j)
        object.__setattr__(self, "site_energy", tuple(float(x) for x in self.site_energy))
        object.__setattr__(self, "shift", tuple(float(x) for x in self.shift))
        object.__setattr__(
            self,
            "modes",
            tuple(tuple(m if isinstance(m, Mode) else Mode(*m) for m in site)
                  for site in self.modes),
        )
        for name in ("site_energy", "shift", "modes"):
            if len(getattr(self, name)) != self.n_sites:
                raise ValueError(f"{name} must have one entry per site")

    @property
    def mode_count(self) -> int:
        return sum(len(site) for site in self.modes)

    @property
    def constant_offsets(self) -> tuple[float, ...]:
        """Per-site constants C_n = epsilon_n + sum_k omega_nk R_nk + D_n."""
        return tuple(
            eps + sum(m.omega_ghz * m.huang_rhys for m in site) + d
            for eps, d, site in zip(self.site_energy, self.shift, self.modes)
        )

    def mode_slots(self) -> tuple[tuple[int, int], ...]:
        """(site, k) labels of every oscillator in lexicographic order."""
        return tuple((n, k) for n in range(self.n_sites) for k in range(len(self.modes[n])))


def promote(model: HolsteinModel) -> GeneralizedHolsteinModel:
    """Embed the standard chain into the generalized parameterisation.

    J gains the hopping amplitudes on the first off-diagonals, every site
    keeps its single oscillator with huang_rhys = (kappa/omega)^2, and the
    site energies and shifts are zero.
    """
    n = model.n_sites
    j = np.zeros((n, n))
    for i, v in enumerate(model.hop):
        j[i, i + 1] = v
        j[i + 1, i] = v
    modes = tuple(
        (Mode(w, (k / w) ** 2),)
        for w, k in zip(model.mode_freq, model.mode_coupling)
    )
    return GeneralizedHolsteinModel(
        n_sites=n,
        coupling_matrix=j,
        site_energy=(0.0,) * n,
        shift=(0.0,) * n,
        modes=modes,
    )


# ---------------------------------------------------------------------------
# truncation and basis bookkeeping


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation of the bosonic factors and choice of electronic sector.

    fock_dim is either a single dimension applied to every oscillator or a
    per-oscillator tuple in (site, mode) lexicographic order.
    """

    fock_dim: int | tuple[int, ...] = 8
    sector: Sector = "single_excitation"

    def __post_init__(self):
        if self.sector not in _SECTORS:
            raise ValueError(f"unknown sector {self.sector!r}; choose from {_SECTORS}")
        fd = self.fock_dim
        if isinstance(fd, Iterable) and not isinstance(fd, (str, bytes)):
            fd = tuple(int(d) for d in fd)
        else:
            fd = int(fd)
        object.__setattr__(self, "fock_dim", fd)
        dims = fd if isinstance(fd, tuple) else (fd,)
        if any(d < 1 for d in dims):
            raise ValueError("every Fock dimension must be >= 1")

    def fock_dims(self, n_modes: int) -> tuple[int, ...]:
        if isinstance(self.fock_dim, tuple):
            if len(self.fock_dim) != n_modes:
                raise ValueError(
                    f"per-mode truncation lists {len(self.fock_dim)} dimensions "
                    f"but the model has {n_modes} oscillators"
                )
            return self.fock_dim
        return (self.fock_dim,) * n_modes


@dataclass(frozen=True)
class BasisDescriptor:
    """Index bookkeeping for the electronic (x) oscillator product basis.

    Flat index = electronic * prod(fock_dims) + mixed-radix oscillator index,
    with the last oscillator fastest.  This descriptor alone fixes the map
    between flat indices and physical states.
    """

    sector: Sector
    n_sites: int
    fock_dims: tuple[int, ...]
    mode_labels: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.fock_dims) != len(self.mode_labels):
            raise ValueError("fock_dims and mode_labels must have equal length")

    @property
    def electronic_dim(self) -> int:
        if self.sector == "single_excitation":
            return self.n_sites
        return 2 ** self.n_sites

    @property
    def boson_dim(self) -> int:
        return int(np.prod(self.fock_dims, dtype=object)) if self.fock_dims else 1

    @property
    def dimension(self) -> int:
        return self.electronic_dim * self.boson_dim

    def index_of(self, electronic: int, occupations: Sequence[int] = ()) -> int:
        if not 0 <= electronic < self.electronic_dim:
            raise ValueError(f"electronic index {electronic} out of range")
        occ = tuple(occupations)
        if len(occ) != len(self.fock_dims):
            raise ValueError("one occupation per oscillator required")
        idx = electronic
        for n, d in zip(occ, self.fock_dims):
            if not 0 <= n < d:
                raise ValueError(f"occupation {n} outside truncation {d}")
            idx = idx * d + n
        return idx

    def state_of(self, index: int) -> tuple[int, tuple[int, ...]]:
        if not 0 <= index < self.dimension:
            raise ValueError(f"index {index} out of range")
        occ = []
        for d in reversed(self.fock_dims):
            occ.append(index % d)
            index //= d
        return index, tuple(reversed(occ))


def build_basis(model: GeneralizedHolsteinModel, trunc: TruncationSpec) -> BasisDescriptor:
    """Basis descriptor for a model at a given truncation, cap enforced."""
    labels = model.mode_slots()
    dims = trunc.fock_dims(len(labels))
    basis = BasisDescriptor(trunc.sector, model.n_sites, dims, labels)
    cap = dimension_cap()
    if basis.dimension > cap:
        raise DimensionCapExceeded(
            f"requested space has {basis.dimension} basis states, cap is {cap} "
            f"(override with {DIM_CAP_ENV})"
        )
    return basis


@dataclass(frozen=True)
class SparseOperator:
    """A sparse matrix tied to the basis descriptor it acts on."""

    matrix: sp.csr_matrix
    basis: BasisDescriptor
    hermitian: bool = True

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if m.shape[0] != self.basis.dimension:
            raise ValueError(
                f"matrix dimension {m.shape[0]} does not match basis "
                f"dimension {self.basis.dimension}"
            )
        if self.hermitian:
            delta = (m - m.getH()).tocoo()
            dev = np.abs(delta.data).max() if delta.nnz else 0.0
            if dev > HERMITICITY_TOL:
                raise ValueError(
                    f"operator flagged hermitian deviates from H = H^dagger by {dev:.3e}"
                )
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def as_dense(self) -> np.ndarray:
        return self.matrix.toarray()


# ---------------------------------------------------------------------------
# elementary operators


def destroy_op(dim: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1)


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(float(dim)))


def displacement_op(dim: int) -> np.ndarray:
    """Position-like combination b^dagger + b in the truncated Fock space."""
    a = destroy_op(dim)
    return a + a.T


def spin_operator(n_sites: int, site: int, op: np.ndarray) -> sp.csr_matrix:
    """Embed a 2x2 operator on one site of the 2^N register (site 0 slowest)."""
    factors = [sp.identity(2, format="csr", dtype=complex)] * n_sites
    factors[site] = sp.csr_matrix(op.astype(complex))
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def excited_site_index(n_sites: int, site: int) -> int:
    """Register index of the configuration with only `site` excited.

    The excited single-site state is index 0 of its factor, ground is 1, and
    site 0 is the slowest index.
    """
    return (2 ** n_sites - 1) - 2 ** (n_sites - 1 - site)


def embed_operator(
    basis: BasisDescriptor,
    electronic_op: np.ndarray | sp.spmatrix | None,
    mode_ops: Mapping[int, np.ndarray] | None = None,
) -> sp.csr_matrix:
    """Kronecker-embed operators acting on the electronic factor and/or on
    individual oscillator slots, identities elsewhere."""
    mode_ops = mode_ops or {}
    if electronic_op is None:
        out = sp.identity(basis.electronic_dim, format="csr", dtype=complex)
    else:
        out = sp.csr_matrix(electronic_op, dtype=complex)
    for slot, d in enumerate(basis.fock_dims):
        op = mode_ops.get(slot)
        factor = (
            sp.identity(d, format="csr", dtype=complex)
            if op is None
            else sp.csr_matrix(np.asarray(op, dtype=complex))
        )
        out = sp.kron(out, factor, format="csr")
    return out


# ---------------------------------------------------------------------------
# assembly


def _sigma_z_site(basis: BasisDescriptor, site: int) -> sp.csr_matrix:
    """sigma_z of one site on the electronic factor, per the sector convention."""
    if basis.sector == "single_excitation":
        sz = -np.eye(basis.n_sites)
        sz[site, site] = 1.0
        return sp.csr_matrix(sz.astype(complex))
    return spin_operator(basis.n_sites, site, PAULI_Z)


def _electronic_coupling(basis: BasisDescriptor, coupling_matrix: np.ndarray) -> sp.csr_matrix:
    """Excitation-exchange part: matrix element J_nm between site states.

    In the full register this is sum_{n<m} (J_nm/2)(sx sx + sy sy), whose
    one-excitation block is exactly the single-excitation form.
    """
    n = basis.n_sites
    if basis.sector == "single_excitation":
        return sp.csr_matrix(coupling_matrix.astype(complex))
    dim = 2 ** n
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            g = coupling_matrix[i, j]
            if g == 0.0:
                continue
            out = out + (g / 2.0) * (
                spin_operator(n, i, PAULI_X) @ spin_operator(n, j, PAULI_X)
                + spin_operator(n, i, PAULI_Y) @ spin_operator(n, j, PAULI_Y)
            )
    return out.tocsr()


def _assemble_core(
    basis: BasisDescriptor,
    coupling_matrix: np.ndarray,
    slot_site: Sequence[int],
    slot_omega: Sequence[float],
    slot_kappa: Sequence[float],
    links: Sequence[tuple[int, int, float]] = (),
) -> sp.csr_matrix:
    """Shared Hamiltonian builder.

    Terms: electronic exchange from the coupling matrix, per-oscillator
    kappa * sigma_z(site) * (b^dagger + b) and omega * b^dagger b, and
    optional oscillator-oscillator exchange links beta (a_i^dagger a_j + h.c.).
    """
    h = embed_operator(basis, _electronic_coupling(basis, coupling_matrix))
    for slot, (site, omega, kappa) in enumerate(zip(slot_site, slot_omega, slot_kappa)):
        d = basis.fock_dims[slot]
        if kappa != 0.0 and d > 1:
            h = h + kappa * embed_operator(
                basis, _sigma_z_site(basis, site), {slot: displacement_op(d)}
            )
        h = h + omega * embed_operator(basis, None, {slot: number_op(d)})
    for i, j, strength in links:
        if strength == 0.0:
            continue
        di, dj = basis.fock_dims[i], basis.fock_dims[j]
        adag_i_a_j = embed_operator(basis, None, {i: destroy_op(di).T, j: destroy_op(dj)})
        h = h + strength * (adag_i_a_j + adag_i_a_j.getH())
    return h.tocsr()


def assemble_hamiltonian(
    model: GeneralizedHolsteinModel | HolsteinModel,
    trunc: TruncationSpec,
) -> SparseOperator:
    """Assemble the model Hamiltonian on the truncated product basis.

    Standard models are promoted first.  The assembled operator contains the
    exchange term (element J_nm between site states), the occupation-
    displacement couplings kappa_nk sigma_z_n (b^dagger + b), and the bare
    oscillator energies; the per-site constants C_n are excluded.

    Raises
    ------
    DimensionCapExceeded
        if the truncated space is larger than :func:`dimension_cap`.
    """
    if isinstance(model, HolsteinModel):
        model = promote(model)
    basis = build_basis(model, trunc)
    slots = model.mode_slots()
    flat = [model.modes[n][k] for n, k in slots]
    h = _assemble_core(
        basis,
        model.coupling_matrix,
        slot_site=[n for n, _ in slots],
        slot_omega=[m.omega_ghz for m in flat],
        slot_kappa=[m.kappa_ghz for m in flat],
    )
    return SparseOperator(h, basis, hermitian=True)


# ---------------------------------------------------------------------------
# dual-assembly consistency check


def _one_particle_dense(model: GeneralizedHolsteinModel, dims: tuple[int, ...]) -> np.ndarray:
    """Occupation-form Hamiltonian, assembled directly in the one-particle
    sector with dense Kronecker products: exchange J_nm, coupling
    kappa_nk |n><n| (b^dagger + b), bare oscillator energies."""
    n = model.n_sites
    slots = model.mode_slots()
    bdim = int(np.prod(dims)) if dims else 1

    def embed_mode(op: np.ndarray, slot: int) -> np.ndarray:
        out = np.eye(1)
        for s, d in enumerate(dims):
            out = np.kron(out, op if s == slot else np.eye(d))
        return out

    h = np.kron(np.asarray(model.coupling_matrix), np.eye(bdim)).astype(complex)
    for slot, (site, k) in enumerate(slots):
        mode = model.modes[site][k]
        proj = np.zeros((n, n))
        proj[site, site] = 1.0
        d = dims[slot]
        h += mode.kappa_ghz * np.kron(proj, embed_mode(displacement_op(d), slot))
        h += mode.omega_ghz * np.kron(np.eye(n), embed_mode(number_op(d), slot))
    return h


def jordan_wigner_check(
    model: HolsteinModel | GeneralizedHolsteinModel, trunc: TruncationSpec
) -> float:
    """Max entrywise deviation between two independent assemblies of the model
    restricted to the one-excitation sector, after aligning any constant
    diagonal offset.

    The occupation form couples oscillators to the site occupation
    kappa |n><n| (b+b^dagger) and is assembled directly in the one-particle
    basis.  The spin form is assembled over the full 2^N register from Pauli
    operators, (1/2) sum_{n<m} J_nm (sx sx + sy sy) plus the sigma_z-frame
    coupling written with the exact occupation dictionary
    |n><n| = (1 + sigma_z)/2: half the coupling multiplies
    sigma_z (b+b^dagger) and the other half an electron-independent bath
    displacement, which is kept rather than dropped.  The spin assembly is
    then projected onto the one-excitation block.  A literal same-coefficient
    sigma_z reading would differ by a non-constant displacement operator and
    cannot satisfy the equivalence this check enforces; the halved-coupling
    dictionary is the faithful one.
    """
    if trunc.sector != "single_excitation":
        raise ValueError("the equivalence check is defined in the single-excitation sector")
    if isinstance(model, HolsteinModel):
        model = promote(model)
    n = model.n_sites
    slots = model.mode_slots()
    dims = trunc.fock_dims(len(slots))
    h_occ = _one_particle_dense(model, dims)

    # spin-register assembly
    reg = 2 ** n
    bdim = int(np.prod(dims)) if dims else 1
    full = sp.csr_matrix((reg * bdim, reg * bdim), dtype=complex)

    def lift(el: sp.spmatrix | None, slot_ops: Mapping[int, np.ndarray]) -> sp.csr_matrix:
        out = sp.identity(reg, format="csr", dtype=complex) if el is None else el.tocsr()
        for s, d in enumerate(dims):
            op = slot_ops.get(s)
            factor = sp.identity(d, format="csr", dtype=complex) if op is None \
                else sp.csr_matrix(op.astype(complex))
            out = sp.kron(out, factor, format="csr")
        return out

    j = np.asarray(model.coupling_matrix)
    for a in range(n):
        for b in range(a + 1, n):
            if j[a, b] == 0.0:
                continue
            pair = spin_operator(n, a, PAULI_X) @ spin_operator(n, b, PAULI_X) \
                + spin_operator(n, a, PAULI_Y) @ spin_operator(n, b, PAULI_Y)
            full = full + (j[a, b] / 2.0) * lift(pair, {})
    for slot, (site, k) in enumerate(slots):
        mode = model.modes[site][k]
        d = dims[slot]
        if mode.kappa_ghz != 0.0 and d > 1:
            x = displacement_op(d)
            full = full + (mode.kappa_ghz / 2.0) * lift(
                spin_operator(n, site, PAULI_Z), {slot: x})
            full = full + (mode.kappa_ghz / 2.0) * lift(None, {slot: x})
        full = full + mode.omega_ghz * lift(None, {slot: number_op(d)})

    keep = np.concatenate([
        excited_site_index(n, site) * bdim + np.arange(bdim) for site in range(n)
    ])
    h_spin = full.tocsc()[:, keep][keep, :].toarray()

    delta = h_spin - h_occ
    offset = np.mean(np.real(np.diag(delta)))
    delta -= offset * np.eye(delta.shape[0])
    return float(np.abs(delta).max())


# ---------------------------------------------------------------------------
# model file format


MODEL_SCHEMA = {
    "type": "object",
    "required": ["sites"],
    "additionalProperties": False,
    "properties": {
        "sites": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["modes"],
                "additionalProperties": False,
                "properties": {
                    "epsilon_ghz": {"type": "number"},
                    "d_shift_ghz": {"type": "number"},
                    "modes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["omega_ghz", "huang_rhys"],
                            "additionalProperties": False,
                            "properties": {
                                "omega_ghz": {"type": "number", "exclusiveMinimum": 0},
                                "huang_rhys": {"type": "number", "minimum": 0},
                            },
                        },
                    },
                },
            },
        },
        "couplings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "j", "J_ghz"],
                "additionalProperties": False,
                "properties": {
                    "i": {"type": "integer", "minimum": 1},
                    "j": {"type": "integer", "minimum": 1},
                    "J_ghz": {"type": "number"},
                },
            },
        },
    },
}


def model_from_dict(data: dict) -> GeneralizedHolsteinModel:
    """Build a model from the JSON document structure (1-based site indices)."""
    try:
        _validate_schema(instance=data, schema=MODEL_SCHEMA)
    except SchemaError as exc:
        raise ValueError(f"model document rejected: {exc.message}") from exc
    sites = data["sites"]
    n = len(sites)
    j = np.zeros((n, n))
    seen = set()
    for c in data.get("couplings", []):
        i, k = c["i"] - 1, c["j"] - 1
        if not (0 <= i < n and 0 <= k < n):
            raise ValueError(f"coupling site index out of range: ({c['i']}, {c['j']})")
        if i == k:
            raise ValueError(f"coupling must join two distinct sites, got ({c['i']}, {c['j']})")
        key = (min(i, k), max(i, k))
        if key in seen:
            raise ValueError(f"duplicate coupling for sites ({key[0] + 1}, {key[1] + 1})")
        seen.add(key)
        j[i, k] = c["J_ghz"]
        j[k, i] = c["J_ghz"]
    return GeneralizedHolsteinModel(
        n_sites=n,
        coupling_matrix=j,
        site_energy=tuple(s.get("epsilon_ghz", 0.0) for s in sites),
        shift=tuple(s.get("d_shift_ghz", 0.0) for s in sites),
        modes=tuple(
            tuple(Mode(m["omega_ghz"], m["huang_rhys"]) for m in s["modes"]) for s in sites
        ),
    )


def model_to_dict(model: GeneralizedHolsteinModel) -> dict:
    couplings = []
    for i in range(model.n_sites):
        for j in range(i + 1, model.n_sites):
            if model.coupling_matrix[i, j] != 0.0:
                couplings.append(
                    {"i": i + 1, "j": j + 1, "J_ghz": float(model.coupling_matrix[i, j])}
                )
    return {
        "sites": [
            {
                "epsilon_ghz": model.site_energy[n],
                "d_shift_ghz": model.shift[n],
                "modes": [
                    {"omega_ghz": m.omega_ghz, "huang_rhys": m.huang_rhys}
                    for m in model.modes[n]
                ],
            }
            for n in range(model.n_sites)
        ],
        "couplings": couplings,
    }


def load_model(path: str | os.PathLike) -> GeneralizedHolsteinModel:
    """Load and validate a model JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed model file {path}: {exc}") from exc
    try:
        return model_from_dict(data)
    except SchemaError as exc:
        raise ValueError(f"model file {path} failed validation: {exc.message}") from exc


def save_model(model: GeneralizedHolsteinModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
