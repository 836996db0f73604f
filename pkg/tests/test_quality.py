"""Tests for relaxed packing/covering quality and delta optimization."""

import math

import numpy as np
import pytest

from overlatt.lattice import (
    DistortedLattice,
    covering_radius,
    packing_radius,
    unit_ball_volume,
)
from overlatt.measures import OverlapMeasure, vol_overlap
from overlatt.quality import (
    NoCrossoverError,
    OptimizeResult,
    QualityMode,
    QualityQuery,
    QualityResult,
    crossover_omega,
    max_radius_for_overlap,
    optimize_delta,
    qual_covering,
    qual_packing,
)

DIST = OverlapMeasure.DISTANCE_BASED
VOL = OverlapMeasure.VOLUME_BASED
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
BCC_COVER_DENSITY = 5.0 * math.sqrt(5.0) * math.pi / 24.0


def branchwise_distance_density(n: int, delta: float, omega: float) -> float:
    """Closed-form density of the distance-measure packing quality."""
    vn = unit_ball_volume(n)
    scale = (1.0 - omega) ** n
    if delta <= 1.0 / math.sqrt(n + 1.0):
        return vn * n ** (n / 2.0) * delta ** (n - 1) / (2.0 ** n * scale)
    if delta <= math.sqrt(n + 1.0):
        middle = (1.0 + (delta ** 2 - 1.0) / n) ** (n / 2.0)
        return vn * middle / (2.0 ** n * scale * delta)
    return vn / (2.0 ** (n / 2.0) * scale * delta)


class TestMaxRadiusForOverlap:
    def test_distance_closed_form(self):
        lat = DistortedLattice(3, 2.0)
        assert max_radius_for_overlap(lat, DIST, 0.0) == pytest.approx(
            SQRT2 / 2.0, abs=1e-15)
        assert max_radius_for_overlap(lat, DIST, 0.5) == pytest.approx(
            SQRT2, abs=1e-15)

    def test_volume_zero_budget_is_packing_radius(self):
        for n, delta in ((2, 0.7), (3, 1.4)):
            lat = DistortedLattice(n, delta)
            assert max_radius_for_overlap(lat, VOL, 0.0) == packing_radius(lat)

    def test_volume_recovers_bcc_covering_radius(self):
        lat = DistortedLattice(3, 0.5)
        omega = BCC_COVER_DENSITY - 1.0
        r = max_radius_for_overlap(lat, VOL, omega)
        assert r == pytest.approx(math.sqrt(5.0) / 4.0, abs=1e-9)
        assert vol_overlap(lat, r) <= omega

    def test_volume_budget_is_met_with_equality(self):
        for delta, omega in ((0.4, 0.05), (0.8, 0.3), (1.0, 0.7)):
            lat = DistortedLattice(2, delta)
            r = max_radius_for_overlap(lat, VOL, omega)
            got = vol_overlap(lat, r)
            assert got <= omega
            assert got == pytest.approx(omega, abs=1e-9)

    def test_rejects_bad_omega(self):
        lat = DistortedLattice(2, 1.0)
        with pytest.raises(ValueError):
            max_radius_for_overlap(lat, DIST, 1.0)
        with pytest.raises(ValueError):
            max_radius_for_overlap(lat, DIST, -0.1)
        with pytest.raises(ValueError):
            max_radius_for_overlap(lat, VOL, math.nan)


class TestQualPacking:
    def test_fcc_density(self):
        res = qual_packing(DistortedLattice(3, 2.0), DIST, 0.0)
        assert res.density == pytest.approx(math.pi / math.sqrt(18.0),
                                            abs=1e-12)

    def test_hexagonal_density_both_measures(self):
        lat = DistortedLattice(2, 1.0 / SQRT3)
        for measure in (DIST, VOL):
            res = qual_packing(lat, measure, 0.0)
            assert res.density == pytest.approx(math.pi / math.sqrt(12.0),
                                                abs=1e-12)

    def test_fcc_bcc_meet_near_crossover(self):
        a = qual_packing(DistortedLattice(3, 0.5), VOL, 0.1).density
        b = qual_packing(DistortedLattice(3, 2.0), VOL, 0.1).density
        assert a == pytest.approx(1.03, abs=0.01)
        assert b == pytest.approx(1.03, abs=0.01)

    def test_distance_measure_matches_branchwise_form(self):
        for n in (2, 3, 4):
            for delta in np.geomspace(0.1, 10.0, 13):
                for omega in (0.0, 0.3, 0.8):
                    res = qual_packing(DistortedLattice(n, float(delta)),
                                       DIST, omega)
                    expect = branchwise_distance_density(n, float(delta),
                                                         omega)
                    assert abs(res.density - expect) < 1e-9

    def test_third_branch_value(self):
        res = qual_packing(DistortedLattice(3, 2.0), DIST, 0.5)
        expect = unit_ball_volume(3) / (2.0 ** 1.5 * 0.125 * 2.0)
        assert res.density == pytest.approx(expect, abs=1e-12)
        assert res.density == pytest.approx(5.9238, abs=1e-4)

    def test_nondecreasing_in_omega(self):
        for measure in (DIST, VOL):
            lat = DistortedLattice(2, 0.8)
            vals = [qual_packing(lat, measure, w).density
                    for w in np.linspace(0.0, 0.9, 10)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_constraint_attained(self):
        for measure in (DIST, VOL):
            for omega in (0.0, 0.2, 0.6):
                res = qual_packing(DistortedLattice(2, 1.3), measure, omega)
                assert res.overlap <= omega + 1e-9

    def test_beats_integer_lattice(self):
        for omega in (0.0, 0.1, 0.3):
            cube = qual_packing(DistortedLattice(3, 1.0), VOL, omega).density
            for delta in (0.5, 2.0):
                better = qual_packing(DistortedLattice(3, delta), VOL,
                                      omega).density
                assert better > cube

    def test_result_fields(self):
        res = qual_packing(DistortedLattice(3, 2.0), DIST, 0.25)
        assert QualityResult._fields == (
            "delta", "omega", "r", "density", "union", "overlap", "mode",
            "measure")
        assert res.mode == "packing" and res.measure == "dist"
        assert res.delta == 2.0 and res.omega == 0.25
        assert tuple(res.as_dict()) == QualityResult._fields

    def test_high_dim_union_is_nan(self):
        res = qual_packing(DistortedLattice(5, 1.0), DIST, 0.25)
        assert math.isnan(res.union)
        assert res.density > 0.0


class TestQualCovering:
    def test_bcc_density(self):
        res = qual_covering(DistortedLattice(3, 0.5), 0.0)
        assert res.density == pytest.approx(BCC_COVER_DENSITY, abs=1e-12)
        assert res.union == pytest.approx(1.0, abs=1e-12)

    def test_hexagonal_density(self):
        res = qual_covering(DistortedLattice(2, 1.0 / SQRT3), 0.0)
        assert res.density == pytest.approx(2.0 * math.pi / math.sqrt(27.0),
                                            abs=1e-12)

    def test_unit_budget_halves_radius(self):
        res = qual_covering(DistortedLattice(3, 1.0), 1.0)
        assert res.r == pytest.approx(SQRT3 / 4.0, abs=1e-15)
        assert res.density == pytest.approx(
            unit_ball_volume(3) * (SQRT3 / 4.0) ** 3, abs=1e-12)

    def test_budget_attained_exactly(self):
        for omega in (0.0, 0.4, 2.0):
            res = qual_covering(DistortedLattice(2, 0.9), omega)
            assert res.overlap == pytest.approx(omega, abs=1e-12)
            assert res.overlap <= omega + 1e-9
        assert qual_covering(DistortedLattice(2, 0.9), 0.4).measure == "free"


class TestOptimizeDelta:
    def test_packing_distance_3d(self):
        query = QualityQuery(n=3, mode=QualityMode.PACKING, measure=DIST,
                             omega=0.5)
        res = optimize_delta(query)
        assert res.delta_star == pytest.approx(2.0, abs=1e-6)
        assert not res.plateau
        assert len(res.ties) == 1

    def test_covering_3d(self):
        query = QualityQuery(n=3, mode=QualityMode.COVERING, omega=0.5)
        res = optimize_delta(query)
        assert res.delta_star == pytest.approx(0.5, abs=1e-6)

    def test_packing_distance_2d_tie(self):
        query = QualityQuery(n=2, mode=QualityMode.PACKING, measure=DIST,
                             omega=0.25)
        res = optimize_delta(query)
        assert len(res.ties) == 2
        assert res.ties[0] == pytest.approx(1.0 / SQRT3, abs=1e-6)
        assert res.ties[1] == pytest.approx(SQRT3, abs=1e-6)

    def test_covering_2d_tie(self):
        query = QualityQuery(n=2, mode=QualityMode.COVERING, omega=0.0)
        res = optimize_delta(query)
        assert any(abs(t - 1.0 / SQRT3) < 1e-6 for t in res.ties)
        assert any(abs(t - SQRT3) < 1e-6 for t in res.ties)

    def test_packing_volume_2d_sharp(self):
        query = QualityQuery(n=2, mode=QualityMode.PACKING, measure=VOL,
                             omega=0.1, delta_range=(0.05, 1.0))
        res = optimize_delta(query)
        assert res.delta_star == pytest.approx(1.0 / SQRT3, abs=1e-5)
        assert not res.plateau

    def test_packing_volume_2d_plateau(self):
        # with a big enough budget the covering configuration is feasible
        # on a whole delta interval and the density caps at 1 + omega
        query = QualityQuery(n=2, mode=QualityMode.PACKING, measure=VOL,
                             omega=0.5, delta_range=(0.05, 1.0))
        res = optimize_delta(query)
        assert res.plateau
        assert len(res.plateau_ranges) == 1
        left, right = res.plateau_ranges[0]
        assert left < 1.0 / SQRT3 < right
        assert res.result.density == pytest.approx(1.5, abs=1e-8)
        # the edges sit where the covering overlap equals the budget
        for edge in (left, right):
            omega_cov = (math.pi * (edge ** 2 + 1.0) ** 2 / (8.0 * edge)
                         - 1.0)
            assert omega_cov == pytest.approx(0.5, abs=1e-3)

    def test_argmax_independent_of_omega(self):
        stars = []
        for omega in (0.0, 0.3, 0.6, 0.9):
            query = QualityQuery(n=3, mode=QualityMode.PACKING, measure=DIST,
                                 omega=omega)
            stars.append(optimize_delta(query).delta_star)
        assert all(abs(s - stars[0]) < 1e-6 for s in stars)

    def test_branch_shape_of_distance_density(self):
        # increasing up to 1/sqrt(n+1), interior minimum at delta = 1,
        # decreasing beyond sqrt(n+1)
        n, omega = 3, 0.2
        f = lambda d: branchwise_distance_density(n, d, omega)
        lows = np.linspace(0.06, 1.0 / 2.0 - 0.01, 12)
        assert all(f(b) > f(a) for a, b in zip(lows, lows[1:]))
        highs = np.linspace(2.01, 12.0, 12)
        assert all(f(b) < f(a) for a, b in zip(highs, highs[1:]))
        assert f(1.0) < f(0.9) and f(1.0) < f(1.1)

    def test_result_matches_delta_star(self):
        query = QualityQuery(n=3, mode=QualityMode.COVERING, omega=0.25)
        res = optimize_delta(query)
        assert isinstance(res, OptimizeResult)
        assert res.result.delta == res.delta_star
        assert res.result.mode == "covering"

    def test_validation(self):
        with pytest.raises(ValueError):
            optimize_delta(QualityQuery(n=3, mode=QualityMode.PACKING,
                                        measure=None, omega=0.1))
        with pytest.raises(ValueError):
            optimize_delta(QualityQuery(n=3, mode=QualityMode.COVERING,
                                        delta_range=(1.0, 0.5)))
        with pytest.raises(ValueError):
            optimize_delta(QualityQuery(n=3, mode=QualityMode.COVERING,
                                        delta_range=(-1.0, 0.5)))
        with pytest.raises(ValueError):
            optimize_delta(QualityQuery(n=3, mode=QualityMode.PACKING,
                                        measure=DIST, omega=0.5,
                                        scan_points=1))


class TestCrossoverOmega:
    def test_crossover_location_and_level(self):
        omega_star = crossover_omega()
        assert 0.08 <= omega_star <= 0.12
        for delta in (0.5, 2.0):
            dens = qual_packing(DistortedLattice(3, delta), VOL,
                                omega_star).density
            assert 1.01 <= dens <= 1.05

    def test_order_flips_across_crossover(self):
        omega_star = crossover_omega()
        lo, hi = omega_star - 0.03, omega_star + 0.03
        bcc = DistortedLattice(3, 0.5)
        fcc = DistortedLattice(3, 2.0)
        assert (qual_packing(fcc, VOL, lo).density
                > qual_packing(bcc, VOL, lo).density)
        assert (qual_packing(fcc, VOL, hi).density
                < qual_packing(bcc, VOL, hi).density)

    def test_no_crossover_raises(self):
        with pytest.raises(NoCrossoverError):
            crossover_omega(omega_hi=0.05, grid=11)
