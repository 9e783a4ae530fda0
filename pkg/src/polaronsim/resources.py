"""Classical memory cost of hierarchical benchmark propagation.

The auxiliary-operator count for a hierarchy over K = n_sites * n_peaks *
(1 + matsubara_terms) dissipation channels truncated at a given depth is the
number of multi-indices with total order <= depth, C(depth + K, K).  Each
auxiliary operator is a dense complex n_sites x n_sites matrix (16 bytes per
entry).  Exact integer arithmetic keeps the counts honest at sizes where
floats would overflow.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

BYTES_PER_ENTRY = 16
DEFAULT_PEAK_SEARCH_CAP = 10_000


def ado_count(n_sites: int, n_peaks: int, depth: int, matsubara_terms: int = 0) -> int:
    """Number of auxiliary operators: C(depth + K, K) with
    K = n_sites * n_peaks * (1 + matsubara_terms)."""
    for name, v in (("n_sites", n_sites), ("n_peaks", n_peaks),
                    ("depth", depth), ("matsubara_terms", matsubara_terms)):
        if v < 0 or (name == "n_sites" and v < 1):
            raise ValueError(f"{name} must be {'>= 1' if name == 'n_sites' else '>= 0'}")
    k = n_sites * n_peaks * (1 + matsubara_terms)
    return math.comb(depth + k, k)


def hierarchy_memory_bytes(
    n_sites: int, n_peaks: int, depth: int, matsubara_terms: int = 0
) -> int:
    """Memory for the full hierarchy state in bytes (exact integer)."""
    return ado_count(n_sites, n_peaks, depth, matsubara_terms) * n_sites ** 2 * BYTES_PER_ENTRY


@dataclass(frozen=True)
class FrontierPoint:
    n_sites: int
    n_peaks: int
    depth: int
    matsubara_terms: int
    ado_count: int
    memory_bytes: int
    feasible: bool


def frontier(
    budget_bytes: int,
    depth: int = 4,
    matsubara_terms: int = 0,
    site_range: Iterable[int] = range(1, 31),
    peak_search_cap: int = DEFAULT_PEAK_SEARCH_CAP,
) -> list[FrontierPoint]:
    """Largest per-site peak count whose hierarchy fits the memory budget,
    for each system size.

    Memory grows with both n_sites and n_peaks, so the frontier is
    non-increasing in n_sites and expanding the budget never lowers it.  A
    size whose zero-peak hierarchy already exceeds the budget is reported
    infeasible.  ``peak_search_cap`` bounds the search when depth = 0 makes
    the count independent of the peak number.
    """
    if budget_bytes < 1:
        raise ValueError("budget must be positive")
    points = []
    for n in site_range:
        if hierarchy_memory_bytes(n, 0, depth, matsubara_terms) > budget_bytes:
            points.append(
                FrontierPoint(n, 0, depth, matsubara_terms,
                              ado_count(n, 0, depth, matsubara_terms),
                              hierarchy_memory_bytes(n, 0, depth, matsubara_terms),
                              feasible=False)
            )
            continue
        p = 0
        while p < peak_search_cap and \
                hierarchy_memory_bytes(n, p + 1, depth, matsubara_terms) <= budget_bytes:
            p += 1
        points.append(
            FrontierPoint(n, p, depth, matsubara_terms,
                          ado_count(n, p, depth, matsubara_terms),
                          hierarchy_memory_bytes(n, p, depth, matsubara_terms),
                          feasible=True)
        )
    return points


def write_frontier_csv(points: Sequence[FrontierPoint], path: str | os.PathLike) -> None:
    lines = ["n_sites,max_peaks,memory_bytes"]
    for pt in points:
        lines.append(f"{pt.n_sites},{pt.n_peaks},{pt.memory_bytes}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
