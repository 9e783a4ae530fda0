"""Spectral densities, thermal weighting, temperature rescaling, and mode
discretisation.

A :class:`SpectralDensity` is a sampled function J(omega) on a positive,
strictly increasing frequency grid.  ``discrete_modes`` samples are delta
weights (value = kappa^2 for a mode at that frequency); ``sampled_continuous``
samples are pointwise values of a density interpreted piecewise-linearly
between grid points.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import GeneralizedHolsteinModel, Mode
from .units import CM1_TO_GHZ, kelvin_to_ghz

DensityKind = Literal["discrete_modes", "sampled_continuous"]

_CSV_HEADERS = {
    ("wavenumber_cm1", "value_cm1"): CM1_TO_GHZ,
    ("omega_ghz", "value_ghz"): 1.0,
}

DETAILED_BALANCE_TOL = 1e-10


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpectralDensity:
    """Sampled bath spectral density J(omega) on a positive frequency grid."""

    omega_ghz: np.ndarray
    value_ghz: np.ndarray
    kind: DensityKind = "sampled_continuous"

    def __post_init__(self):
        w = _frozen_array(self.omega_ghz)
        v = _frozen_array(self.value_ghz)
        if w.ndim != 1 or v.shape != w.shape:
            raise ValueError("omega and value grids must be equal-length 1-d arrays")
        if w.size == 0:
            raise ValueError("no samples")
        if np.any(w <= 0):
            raise ValueError("all sample frequencies must be positive")
        if np.any(np.diff(w) <= 0):
            raise ValueError("non-strictly-increasing frequency grid")
        if np.any(v < 0):
            raise ValueError("spectral density values must be >= 0")
        if self.kind not in ("discrete_modes", "sampled_continuous"):
            raise ValueError(f"unknown spectral density kind {self.kind!r}")
        object.__setattr__(self, "omega_ghz", w)
        object.__setattr__(self, "value_ghz", v)

    @property
    def n_samples(self) -> int:
        return self.omega_ghz.size

    def reorganization_energy(self) -> float:
        """Total reorganization energy sum(kappa^2/omega) resp. int J/omega domega."""
        if self.kind == "discrete_modes":
            return float(np.sum(self.value_ghz / self.omega_ghz))
        return _pl_integral(self.omega_ghz, self.value_ghz / self.omega_ghz)


@dataclass(frozen=True)
class ThermalSpectralDensity:
    """Temperature-weighted density C(omega, T) on a signed frequency grid.

    Every constructed instance satisfies detailed balance
    C(-omega)/C(omega) = exp(-h omega / k_B T) wherever both sides are
    positive; the constructor enforces it.
    """

    omega_ghz: np.ndarray
    value: np.ndarray
    temperature_k: float

    def __post_init__(self):
        w = _frozen_array(self.omega_ghz)
        v = _frozen_array(self.value)
        if w.ndim != 1 or v.shape != w.shape:
            raise ValueError("omega and value grids must be equal-length 1-d arrays")
        if w.size == 0:
            raise ValueError("no samples")
        if np.any(np.diff(w) <= 0):
            raise ValueError("non-strictly-increasing frequency grid")
        if np.any(v < 0):
            raise ValueError("thermal weights must be >= 0")
        if not self.temperature_k > 0:
            raise ValueError("temperature must be positive")
        kt = kelvin_to_ghz(self.temperature_k)
        lookup = {wi: vi for wi, vi in zip(w, v)}
        for wi, vi in lookup.items():
            if wi <= 0:
                continue
            vm = lookup.get(-wi)
            if vm is None or vi <= 0 or vm <= 0:
                continue
            expected = math.exp(-wi / kt)
            if abs(vm / vi - expected) > DETAILED_BALANCE_TOL * expected:
                raise ValueError(
                    f"detailed balance violated at omega = {wi} GHz: "
                    f"C(-w)/C(w) = {vm / vi:.12e}, expected {expected:.12e}"
                )
        object.__setattr__(self, "omega_ghz", w)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "temperature_k", float(self.temperature_k))

    @property
    def zero_frequency_limit(self) -> float:
        """lim_{omega -> 0} C(omega) = 2 k_B T J(omega)/omega at the smallest
        sampled frequency."""
        pos = self.omega_ghz > 0
        w0 = self.omega_ghz[pos][0]
        c0 = self.value[pos][0]
        x = w0 / (2.0 * kelvin_to_ghz(self.temperature_k))
        j0 = c0 * 0.5 * (1.0 - math.exp(-2.0 * x))  # invert the (1 + coth) factor
        return 2.0 * kelvin_to_ghz(self.temperature_k) * j0 / w0


@dataclass(frozen=True)
class ModeSet:
    """Discrete oscillators (frequency, coupling) attached to a single site."""

    omega_ghz: np.ndarray
    kappa_ghz: np.ndarray

    def __post_init__(self):
        w = _frozen_array(self.omega_ghz)
        k = _frozen_array(self.kappa_ghz)
        if w.ndim != 1 or k.shape != w.shape:
            raise ValueError("frequencies and couplings must be equal-length 1-d arrays")
        if w.size and np.any(w <= 0):
            raise ValueError("all mode frequencies must be positive")
        if k.size and np.any(k < 0):
            raise ValueError("mode couplings must be >= 0")
        object.__setattr__(self, "omega_ghz", w)
        object.__setattr__(self, "kappa_ghz", k)

    @property
    def n_modes(self) -> int:
        return self.omega_ghz.size

    def reorganization_energy(self) -> float:
        return float(np.sum(self.kappa_ghz ** 2 / self.omega_ghz))

    def to_modes(self) -> tuple[Mode, ...]:
        return tuple(
            Mode(w, (k / w) ** 2) for w, k in zip(self.omega_ghz, self.kappa_ghz)
        )

    @classmethod
    def from_modes(cls, modes) -> "ModeSet":
        return cls(
            omega_ghz=np.array([m.omega_ghz for m in modes]),
            kappa_ghz=np.array([m.kappa_ghz for m in modes]),
        )


# ---------------------------------------------------------------------------
# CSV input / output


def load_csv(path: str | os.PathLike, kind: DensityKind = "sampled_continuous") -> SpectralDensity:
    """Read a two-column spectral density CSV.

    Accepted headers are ``wavenumber_cm1,value_cm1`` (converted to GHz on
    load) and ``omega_ghz,value_ghz``.  Rows are sorted by frequency; a
    duplicated frequency is rejected as a non-strictly-increasing grid.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("no samples") from None
        key = tuple(h.strip() for h in header)
        if key not in _CSV_HEADERS:
            raise ValueError(
                f"unknown CSV header {','.join(key)!r}; expected "
                "'wavenumber_cm1,value_cm1' or 'omega_ghz,value_ghz'"
            )
        scale = _CSV_HEADERS[key]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"line {lineno}: expected two columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise ValueError(f"line {lineno}: non-numeric entry") from None
    if not rows:
        raise ValueError("no samples")
    rows.sort(key=lambda r: r[0])
    omega = np.array([r[0] for r in rows]) * scale
    value = np.array([r[1] for r in rows]) * scale
    return SpectralDensity(omega, value, kind=kind)


def write_signed_csv(tsd: ThermalSpectralDensity, path: str | os.PathLike) -> None:
    """Write a thermal density as a signed-frequency two-column CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("omega_ghz,value_ghz\n")
        for w, v in zip(tsd.omega_ghz, tsd.value):
            fh.write(f"{w:.12g},{v:.12g}\n")


# ---------------------------------------------------------------------------
# thermal weighting


def thermal_factors(omega_ghz, temperature_k: float):
    """(1 + coth(h omega / 2 k_B T)) for +omega and its -omega counterpart,
    evaluated in underflow-safe form: 2/(1 - exp(-2x)) and 2/expm1(2x)."""
    if not temperature_k > 0:
        raise ValueError("temperature must be positive")
    w = np.asarray(omega_ghz, dtype=float)
    x = w / (2.0 * kelvin_to_ghz(temperature_k))
    with np.errstate(over="ignore"):
        plus = 2.0 / (1.0 - np.exp(-2.0 * x))
        minus = 2.0 / np.expm1(2.0 * x)
    minus = np.where(np.isfinite(minus), minus, 0.0)
    return plus, minus


def thermal_transform(density: SpectralDensity, temperature_k: float) -> ThermalSpectralDensity:
    """Thermal weighting C(omega, T) = (1 + coth(h omega / 2 k_B T)) J^A(omega)
    with J^A antisymmetrically extended to negative frequencies.

    Emission (negative-frequency) weights are computed via expm1 so the
    detailed-balance ratio C(-w)/C(w) = exp(-h w / k_B T) survives to relative
    precision even deep in the Boltzmann tail.
    """
    plus, minus = thermal_factors(density.omega_ghz, temperature_k)
    w_signed = np.concatenate([-density.omega_ghz[::-1], density.omega_ghz])
    c_signed = np.concatenate([
        (minus * density.value_ghz)[::-1],
        plus * density.value_ghz,
    ])
    return ThermalSpectralDensity(w_signed, c_signed, temperature_k)


# ---------------------------------------------------------------------------
# temperature rescaling


def rescale(obj, t_source_k: float, t_target_k: float):
    """Scale every energy-dimensioned parameter by t_target/t_source.

    Accepts a :class:`ModeSet` (scales omega and kappa) or a
    :class:`GeneralizedHolsteinModel` (scales J, epsilon, shifts, and mode
    frequencies; Huang-Rhys factors are dimensionless and unchanged).
    Applying the inverse ratio undoes the scaling.
    """
    if not (t_source_k > 0 and t_target_k > 0):
        raise ValueError("temperatures must be positive")
    r = t_target_k / t_source_k
    if isinstance(obj, ModeSet):
        return ModeSet(obj.omega_ghz * r, obj.kappa_ghz * r)
    if isinstance(obj, GeneralizedHolsteinModel):
        return GeneralizedHolsteinModel(
            n_sites=obj.n_sites,
            coupling_matrix=obj.coupling_matrix * r,
            site_energy=tuple(e * r for e in obj.site_energy),
            shift=tuple(d * r for d in obj.shift),
            modes=tuple(
                tuple(Mode(m.omega_ghz * r, m.huang_rhys) for m in site)
                for site in obj.modes
            ),
        )
    raise TypeError(f"cannot rescale object of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# discretisation to a mode set


def _pl_integral(x: np.ndarray, y: np.ndarray) -> float:
    """Exact integral of the piecewise-linear interpolant."""
    return float(np.trapezoid(y, x))


def _pl_first_moment(x: np.ndarray, y: np.ndarray) -> float:
    """Exact integral of omega * y(omega) for piecewise-linear y."""
    a, b = x[:-1], x[1:]
    ya, yb = y[:-1], y[1:]
    return float(np.sum((b - a) / 6.0 * (ya * (2.0 * a + b) + yb * (a + 2.0 * b))))


def _restrict(x: np.ndarray, y: np.ndarray, lo: float, hi: float):
    """Sample grid of the interpolant restricted to [lo, hi]."""
    inner = (x > lo) & (x < hi)
    xs = np.concatenate([[lo], x[inner], [hi]])
    ys = np.interp(xs, x, y)
    return xs, ys

def _cum_edges(x: np.ndarray, y: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Positions where the cumulative integral of the piecewise-linear
    interpolant reaches each target (targets increasing, within range)."""
    seg = (x[1:] - x[:-1]) * (y[1:] + y[:-1]) / 2.0
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    out = []
    for t in targets:
        i = int(np.searchsorted(cum, t, side="right") - 1)
        i = min(max(i, 0), x.size - 2)
        rem = t - cum[i]
        x0, x1 = x[i], x[i + 1]
        y0, y1 = y[i], y[i + 1]
        slope = (y1 - y0) / (x1 - x0)
        if abs(slope) < 1e-300:
            dx = rem / y0 if y0 > 0 else 0.0
        else:
            # solve y0*dx + slope*dx^2/2 = rem for the stable root
            disc = max(y0 * y0 + 2.0 * slope * rem, 0.0)
            dx = (math.sqrt(disc) - y0) / slope
        out.append(min(max(x0 + dx, x0), x1))
    return np.array(out)


def to_mode_set(
    density: SpectralDensity,
    n_modes: int | None = None,
    scheme: Literal["direct", "equal_weight", "linear_grid"] = "direct",
) -> ModeSet:
    """Discretise a spectral density into coupled oscillators.

    direct
        Identity on discrete inputs: kappa_k = sqrt(weight_k).  ``n_modes``
        may be omitted; if given it must equal the sample count (requesting
        more raises the exceeds-count error).
    equal_weight
        Split the support of a sampled density into ``n_modes`` bins of equal
        integrated weight; each bin becomes a mode at its weight centroid
        carrying kappa^2 = bin weight.
    linear_grid
        ``n_modes`` equally spaced frequencies over the sampled support; each
        carries the integrated weight of its half-open cell.
    """
    if scheme == "direct":
        if density.kind != "discrete_modes":
            raise ValueError("direct scheme requires a discrete_modes density")
        count = density.n_samples
        if n_modes is not None:
            if n_modes > count:
                raise ValueError(f"n_modes = {n_modes} exceeds sample count {count}")
            if n_modes < count:
                raise ValueError(
                    "direct scheme passes every sample through; "
                    f"n_modes = {n_modes} does not match sample count {count}"
                )
        return ModeSet(density.omega_ghz.copy(), np.sqrt(density.value_ghz))

    if density.kind != "sampled_continuous":
        raise ValueError(f"{scheme} scheme requires a sampled_continuous density")
    if n_modes is None or n_modes < 1:
        raise ValueError("n_modes must be a positive integer for quadrature schemes")
    x, y = density.omega_ghz, density.value_ghz
    total = _pl_integral(x, y)
    if total <= 0:
        raise ValueError("density integrates to zero; nothing to discretise")

    if scheme == "equal_weight":
        targets = total * np.arange(1, n_modes) / n_modes
        edges = np.concatenate([[x[0]], _cum_edges(x, y, targets), [x[-1]]])
        omegas, kappas = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs, ys = _restrict(x, y, lo, hi)
            w = _pl_integral(xs, ys)
            omegas.append(_pl_first_moment(xs, ys) / w)
            kappas.append(math.sqrt(w))
        return ModeSet(np.array(omegas), np.array(kappas))

    if scheme == "linear_grid":
        grid = np.linspace(x[0], x[-1], n_modes) if n_modes > 1 \
            else np.array([(x[0] + x[-1]) / 2.0])
        mids = (grid[:-1] + grid[1:]) / 2.0
        edges = np.concatenate([[x[0]], mids, [x[-1]]])
        kappas = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs, ys = _restrict(x, y, lo, hi)
            kappas.append(math.sqrt(max(_pl_integral(xs, ys), 0.0)))
        return ModeSet(grid, np.array(kappas))

    raise ValueError(f"unknown discretisation scheme {scheme!r}")
