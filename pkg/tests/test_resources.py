import math

import pytest

from polaronsim.resources import (
    FrontierPoint,
    ado_count,
    frontier,
    hierarchy_memory_bytes,
    write_frontier_csv,
)

import oracles


class TestAdoCount:
    def test_reference_value(self):
        # 1 site, 1 peak, no Matsubara, depth 4 on a 24-site register scale:
        # K = 24, C(28, 24) would be the register count; the per-channel
        # example below pins the formula itself
        assert ado_count(n_sites=24, n_peaks=1, depth=4) == math.comb(28, 24)
        assert ado_count(n_sites=24, n_peaks=1, depth=4) == 20475

    def test_small_closed_forms(self):
        assert ado_count(1, 1, 0) == 1  # depth 0 keeps only the root
        assert ado_count(1, 0, 7) == 1  # no channels, nothing to index
        assert ado_count(1, 1, 7) == 8  # single channel: orders 0..7
        assert ado_count(2, 2, 1) == 5  # root plus one per channel

    def test_matsubara_multiplies_channels(self):
        assert ado_count(3, 2, 4, matsubara_terms=1) == ado_count(3, 4, 4)
        assert ado_count(2, 1, 3, matsubara_terms=2) == ado_count(2, 3, 3)

    def test_against_brute_force_enumeration(self):
        # one site with k peaks realises exactly k channels
        for k in range(0, 9):
            for depth in range(0, 6):
                expected = oracles.count_bounded_multi_indices(k, depth)
                assert ado_count(1, k, depth) == expected

    def test_channel_factorization_against_brute_force(self):
        # sites x peaks only enters through the product K
        for n_sites, n_peaks in ((2, 3), (3, 2), (4, 2)):
            k = n_sites * n_peaks
            for depth in range(0, 4):
                assert ado_count(n_sites, n_peaks, depth) == \
                    oracles.count_bounded_multi_indices(k, depth)

    def test_symmetry_in_depth_and_channels(self):
        # C(d + K, K) = C(d + K, d)
        assert ado_count(5, 2, 3) == math.comb(13, 3)

    def test_validation(self):
        with pytest.raises(ValueError):
            ado_count(0, 1, 1)
        with pytest.raises(ValueError):
            ado_count(1, -1, 1)
        with pytest.raises(ValueError):
            ado_count(1, 1, -1)
        with pytest.raises(ValueError):
            ado_count(1, 1, 1, matsubara_terms=-1)

    def test_exact_at_large_arguments(self):
        # must not fall back to float arithmetic
        big = ado_count(30, 4, 6)
        assert big == math.comb(6 + 120, 120)
        assert isinstance(big, int)


class TestMemory:
    def test_reference_value(self):
        assert hierarchy_memory_bytes(24, 1, 4) == 20475 * 24 * 24 * 16
        assert hierarchy_memory_bytes(24, 1, 4) == 188_697_600

    def test_scales_with_matrix_size(self):
        assert hierarchy_memory_bytes(2, 1, 3) == ado_count(2, 1, 3) * 4 * 16

    def test_zero_depth(self):
        assert hierarchy_memory_bytes(5, 3, 0) == 5 * 5 * 16


class TestFrontier:
    def test_non_increasing_in_sites(self):
        pts = frontier(budget_bytes=10 ** 9, depth=4)
        peaks = [p.n_peaks for p in pts if p.feasible]
        assert all(a >= b for a, b in zip(peaks, peaks[1:]))

    def test_budget_growth_never_shrinks(self):
        small = frontier(budget_bytes=10 ** 8, depth=4)
        large = frontier(budget_bytes=2 * 10 ** 8, depth=4)
        for a, b in zip(small, large):
            assert b.n_peaks >= a.n_peaks
            assert b.feasible >= a.feasible

    def test_points_respect_budget(self):
        budget = 5 * 10 ** 7
        for p in frontier(budget_bytes=budget, depth=3):
            if p.feasible:
                assert p.memory_bytes <= budget
                assert hierarchy_memory_bytes(p.n_sites, p.n_peaks + 1, 3) > budget
            else:
                assert hierarchy_memory_bytes(p.n_sites, 0, 3) > budget

    def test_infeasible_zero_peak_point(self):
        # pick a budget below even the zero-peak hierarchy of the largest size
        pts = frontier(budget_bytes=1000, depth=4, site_range=range(1, 10))
        assert any(not p.feasible for p in pts)
        worst = [p for p in pts if not p.feasible][0]
        assert worst.n_peaks == 0

    def test_depth_zero_respects_search_cap(self):
        # depth 0 keeps memory flat in n_peaks, so the cap stops the scan
        pts = frontier(budget_bytes=10 ** 6, depth=0, site_range=[2],
                       peak_search_cap=17)
        assert pts[0].n_peaks == 17

    def test_site_range_respected(self):
        pts = frontier(budget_bytes=10 ** 9, depth=4, site_range=range(3, 7))
        assert [p.n_sites for p in pts] == [3, 4, 5, 6]

    def test_validation(self):
        with pytest.raises(ValueError):
            frontier(budget_bytes=0)

    def test_csv_format(self, tmp_path):
        pts = [FrontierPoint(2, 3, 4, 0, 10, 640, True),
               FrontierPoint(3, 1, 4, 0, 5, 720, True)]
        p = tmp_path / "frontier.csv"
        write_frontier_csv(pts, p)
        lines = p.read_text().strip().splitlines()
        assert lines[0] == "n_sites,max_peaks,memory_bytes"
        assert lines[1] == "2,3,640"
        assert lines[2] == "3,1,720"
