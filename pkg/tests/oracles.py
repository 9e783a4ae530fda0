"""Independent reference implementations used only by the test suite.

Everything here is deliberately written with a different construction style
than the package (explicit basis enumeration and matrix exponentials instead
of operator embedding and Krylov stepping) so agreement is meaningful.
"""

import itertools
import math

import numpy as np
import scipy.linalg as sla


def enumerate_basis(n_sites, dims):
    """All (electronic, occupations) labels, electronic slowest."""
    occs = list(itertools.product(*(range(d) for d in dims))) if dims else [()]
    return [(el, occ) for el in range(n_sites) for occ in occs]


def dense_one_excitation(coupling_matrix, slot_site, slot_omega, slot_kappa, dims,
                         site_energy=None):
    """One-excitation Holstein Hamiltonian assembled element by element.

    States are (site, fock occupation tuple).  Rules: exchange J[n,m] between
    equal occupations, bare oscillator energy on the diagonal, and the
    sigma_z-frame coupling: slot s changes its occupation by one quantum with
    weight kappa_s sqrt(v+1), signed +1 when the excitation sits on the
    slot's site and -1 otherwise (sigma_z = 2|n><n| - 1, the -1 part kept).
    """
    j = np.asarray(coupling_matrix, dtype=float)
    n = j.shape[0]
    states = enumerate_basis(n, tuple(dims))
    index = {s: i for i, s in enumerate(states)}
    h = np.zeros((len(states), len(states)), dtype=complex)
    for (el, occ), row in index.items():
        for m in range(n):
            if m != el and j[el, m] != 0.0:
                h[index[(m, occ)], row] += j[el, m]
        diag = sum(w * v for w, v in zip(slot_omega, occ))
        if site_energy is not None:
            diag += site_energy[el]
        h[row, row] += diag
        for s, v in enumerate(occ):
            if slot_kappa[s] == 0.0:
                continue
            sign = 1.0 if slot_site[s] == el else -1.0
            if v + 1 < dims[s]:
                up = occ[:s] + (v + 1,) + occ[s + 1:]
                h[index[(el, up)], row] += sign * slot_kappa[s] * math.sqrt(v + 1)
            if v > 0:
                down = occ[:s] + (v - 1,) + occ[s + 1:]
                h[index[(el, down)], row] += sign * slot_kappa[s] * math.sqrt(v)
    return h


def dense_from_model(model, dims, include_site_energy=False):
    """Element-wise assembly driven by a GeneralizedHolsteinModel."""
    slots = model.mode_slots()
    flat = [model.modes[a][k] for a, k in slots]
    return dense_one_excitation(
        model.coupling_matrix,
        [a for a, _ in slots],
        [m.omega_ghz for m in flat],
        [m.kappa_ghz for m in flat],
        dims,
        site_energy=model.site_energy if include_site_energy else None,
    )


def expm_states(h_dense, psi0, times):
    """Exact propagation by repeated scipy matrix exponentials."""
    psi = np.asarray(psi0, dtype=complex).copy()
    out = [psi.copy()]
    for prev, cur in zip(times[:-1], times[1:]):
        u = sla.expm(-2j * np.pi * h_dense * (cur - prev))
        psi = u @ psi
        out.append(psi.copy())
    return out


def householder_chain(omega, kappa):
    """Chain coefficients from a bordered Householder reduction.

    The (M+1)-dimensional matrix [[0, kappa^T], [kappa, diag(omega)]] is
    brought to Hessenberg (here tridiagonal) form; the reduction fixes the
    first basis vector, so the border row yields the head coupling and the
    trailing block the chain itself.
    """
    omega = np.asarray(omega, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    m = omega.size
    b = np.zeros((m + 1, m + 1))
    b[0, 1:] = kappa
    b[1:, 0] = kappa
    b[1:, 1:] = np.diag(omega)
    t = sla.hessenberg(b)
    head = abs(t[0, 1])
    alphas = np.diag(t)[1:].copy()
    betas = np.abs(np.diag(t, 1)[1:]).copy()
    return head, alphas, betas


def count_bounded_multi_indices(k, depth):
    """Brute-force count of n in N^k with sum(n) <= depth."""
    if k == 0:
        return 1
    return sum(
        1 for tup in itertools.product(range(depth + 1), repeat=k) if sum(tup) <= depth
    )


def cumulative_weight_edges(x, y, n_bins, n_fine=200_001):
    """Equal-weight bin edges from a densely resampled cumulative integral."""
    fine = np.linspace(x[0], x[-1], n_fine)
    vals = np.interp(fine, x, y)
    cum = np.concatenate([[0.0], np.cumsum((vals[1:] + vals[:-1]) / 2.0 * np.diff(fine))])
    targets = np.linspace(0.0, cum[-1], n_bins + 1)
    return np.interp(targets, cum, fine)


def pl_integral(x, y, lo=None, hi=None, n_fine=200_001):
    """Piecewise-linear integral by dense resampling."""
    lo = x[0] if lo is None else lo
    hi = x[-1] if hi is None else hi
    fine = np.linspace(lo, hi, n_fine)
    vals = np.interp(fine, x, y)
    return float(np.trapezoid(vals, fine))
