"""Tests for the dispersion relations and the width-mode solvers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from app.core.dispersion import (
    de_surface_frequency,
    dipole_exchange_frequency,
    dispersion_curve,
    fixed_point_mode_frequency,
    inside_wavenumber,
    ks_frequency,
    mode_residual,
    outside_wavenumber,
    reduction_factor,
    solve_mode_frequency,
    width_ordering_report,
    width_wavenumber,
)
from app.core.materials import resonance_bounds
from app.errors import InvalidArgument, NegativeArgument, NoSolutionInBand
from app.models.dispersion import EngineName, OrderingOutcome, PointStatus
from app.models.film import BiasField, FerriteFilm
from tools.dense_scan import lowest_root


class TestReductionFactor:
    def test_at_one(self) -> None:
        assert reduction_factor(1.0) == pytest.approx(0.3678794412, rel=1e-10)

    def test_zero(self) -> None:
        assert reduction_factor(0.0) == 0.0

    @pytest.mark.parametrize("x", [0.99e-4, 1.01e-4, 1e-3])
    def test_series_matches_closed_form(self, x: float) -> None:
        closed = 1.0 - (1.0 - math.exp(-x)) / x
        assert reduction_factor(x) == pytest.approx(closed, rel=1e-6)

    def test_large_argument(self) -> None:
        assert reduction_factor(1e6) == pytest.approx(1.0, abs=1e-5)

    def test_negative(self) -> None:
        with pytest.raises(NegativeArgument):
            reduction_factor(-0.1)

    def test_strictly_increasing_below_one(self) -> None:
        xs = np.concatenate([[0.0], np.logspace(-8, 2, 2000)])
        values = np.array([reduction_factor(x) for x in xs])
        assert np.all(np.diff(values) > 0)
        assert values[0] == 0.0 and values[-1] < 1.0


class TestClosedForms:
    def test_dipole_exchange_reference(self, film: FerriteFilm, bias: BiasField) -> None:
        f = dipole_exchange_frequency(film, bias, 500.0, 0.0, 500.0)
        assert f == pytest.approx(8.551634e9, rel=1e-6)

    @pytest.mark.parametrize("h0", [800.0, 1500.0, 2500.0, 4500.0, 9800.0])
    def test_long_wave_limit_is_f_min(self, film: FerriteFilm, h0: float) -> None:
        bias = BiasField(h0)
        f = dipole_exchange_frequency(film, bias, 1e-6, 0.0, 1e-6)
        assert f == pytest.approx(resonance_bounds(film, bias)[0], rel=5e-4)

    def test_k_z_must_bound_components(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(InvalidArgument):
            dipole_exchange_frequency(film, bias, 500.0, 0.0, 400.0)

    def test_surface_oracle_reference(self, film: FerriteFilm, bias: BiasField) -> None:
        assert de_surface_frequency(film, bias, 500.0) == pytest.approx(9.378868e9, rel=1e-6)

    @pytest.mark.parametrize("h0", [800.0, 2500.0, 9800.0])
    def test_surface_oracle_edges(self, film: FerriteFilm, h0: float) -> None:
        bias = BiasField(h0)
        f_min, f_max = resonance_bounds(film, bias)
        assert de_surface_frequency(film, bias, 0.0) == pytest.approx(f_min, rel=1e-12)
        upper = de_surface_frequency(film, bias, 10.0 / film.thickness)
        assert upper == pytest.approx(f_max, rel=5e-4)

    def test_surface_oracle_is_monotone_and_bounded(self, film: FerriteFilm) -> None:
        rng = np.random.default_rng(1234)
        for h0, k_x in zip(
            rng.uniform(100.0, 1e4, 1000), rng.uniform(1.0, 2000.0, 1000), strict=True
        ):
            bias = BiasField(float(h0))
            f_min, f_max = resonance_bounds(film, bias)
            f = de_surface_frequency(film, bias, float(k_x))
            assert f_min < f <= f_max * (1 + 1e-12)
            assert de_surface_frequency(film, bias, float(k_x) * 1.001) > f

    def test_ks_long_wave_limit(self, film: FerriteFilm, bias: BiasField) -> None:
        assert ks_frequency(film, bias, 0.0, 0.0) == pytest.approx(
            resonance_bounds(film, bias)[0], rel=1e-12
        )

    def test_ks_lowest_cavity_modes(self, film: FerriteFilm, bias: BiasField) -> None:
        k_x = math.pi / film.length
        assert ks_frequency(film, bias, k_x, width_wavenumber(film, 1)) == pytest.approx(
            8.5624e9, rel=1e-4
        )
        assert ks_frequency(film, bias, k_x, width_wavenumber(film, 3)) == pytest.approx(
            7.7064e9, rel=1e-4
        )

    def test_wavenumbers(self, film: FerriteFilm, bias: BiasField) -> None:
        k_y = width_wavenumber(film, 2)
        assert k_y == pytest.approx(2 * math.pi / film.width)
        assert outside_wavenumber(film, 300.0, 2) == pytest.approx(math.hypot(300.0, k_y))
        # inside the film k_z grows as mu1 < 1
        assert inside_wavenumber(film, bias, 300.0, 2, 9.3e9) > outside_wavenumber(
            film, 300.0, 2
        )


class TestSelfConsistentSolve:
    @pytest.mark.parametrize(
        ("h0", "k_x", "m", "expected"),
        [(50.0, 10.0, 1, 0.858137423e9), (100.0, 50.0, 3, 1.275187709e9)],
    )
    def test_lowest_root(
        self, film: FerriteFilm, h0: float, k_x: float, m: int, expected: float
    ) -> None:
        point = solve_mode_frequency(film, BiasField(h0), k_x, m)
        assert point.f == pytest.approx(expected, rel=1e-6)
        assert point.engine == EngineName.PAPER
        assert abs(mode_residual(film, BiasField(h0), k_x, m, point.f)) < 1.0

    @pytest.mark.parametrize(
        ("h0", "k_x", "m", "expected"),
        [(50.0, 10.0, 1, 1.272266002e9), (100.0, 50.0, 3, 1.899029250e9)],
    )
    def test_fixed_point_finds_attracting_root(
        self, film: FerriteFilm, h0: float, k_x: float, m: int, expected: float
    ) -> None:
        point = fixed_point_mode_frequency(film, BiasField(h0), k_x, m)
        assert point.f == pytest.approx(expected, rel=1e-6)

    def test_no_root_at_operating_field(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(NoSolutionInBand):
            solve_mode_frequency(film, bias, 300.0, 1)

    @pytest.mark.parametrize("h0", [800.0, 4500.0, 9800.0])
    @pytest.mark.parametrize("k_x", [50.0, 600.0, 2000.0])
    def test_no_root_across_operating_domain(
        self, film: FerriteFilm, h0: float, k_x: float
    ) -> None:
        with pytest.raises(NoSolutionInBand):
            solve_mode_frequency(film, BiasField(h0), k_x, 2)

    def test_rejects_zero_order(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(InvalidArgument):
            solve_mode_frequency(film, bias, 100.0, 0)

    def test_matches_dense_scan(self, film: FerriteFilm) -> None:
        rng = np.random.default_rng(20240611)
        cells = 200_000
        solved = 0
        for _ in range(100):
            h0 = float(rng.uniform(40.0, 100.0))
            k_x = float(rng.uniform(5.0, 60.0))
            m = int(rng.integers(1, 4))
            expected = lowest_root(h0, k_x, m, cells=cells)
            if expected is None:
                with pytest.raises(NoSolutionInBand):
                    solve_mode_frequency(film, BiasField(h0), k_x, m, scan_points=cells)
                continue
            point = solve_mode_frequency(film, BiasField(h0), k_x, m, scan_points=cells)
            assert point.f == pytest.approx(expected, rel=1e-6)
            solved += 1
        assert solved > 0


class TestDispersionCurve:
    def test_surface_oracle_curve(self, film: FerriteFilm, bias: BiasField) -> None:
        points = dispersion_curve(film, bias, 0, [0.0, 500.0, 1000.0], EngineName.DE_ORACLE)
        assert [p.k_x for p in points] == [0.0, 500.0, 1000.0]
        freqs = [p.f for p in points]
        assert freqs == sorted(freqs)
        assert points[1].f == pytest.approx(9.378868e9, rel=1e-6)

    def test_paper_m0_is_direct_evaluation(self, film: FerriteFilm, bias: BiasField) -> None:
        (point,) = dispersion_curve(film, bias, 0, [500.0], "paper")
        assert point.f == pytest.approx(8.551634e9, rel=1e-6)
        assert point.k_z == 500.0

    def test_gaps_are_marked(self, film: FerriteFilm, bias: BiasField) -> None:
        points = dispersion_curve(film, bias, 1, [100.0, 300.0], EngineName.PAPER)
        assert all(p.is_gap and p.f is None for p in points)
        assert all(p.status == PointStatus.GAP for p in points)

    def test_zero_wavenumber_width_mode_is_a_gap(
        self, film: FerriteFilm, bias: BiasField
    ) -> None:
        points = dispersion_curve(film, bias, 1, [0.0, 100.0], EngineName.PAPER)
        assert [p.k_x for p in points] == [0.0, 100.0]
        assert points[0].status == PointStatus.GAP
        assert "k_x = 0" in points[0].reason

    def test_oracle_rejects_width_orders(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(InvalidArgument):
            dispersion_curve(film, bias, 1, [100.0], "de")

    def test_grid_must_increase(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(InvalidArgument):
            dispersion_curve(film, bias, 0, [100.0, 100.0], EngineName.KS)

    def test_grid_must_be_non_negative(self, film: FerriteFilm, bias: BiasField) -> None:
        with pytest.raises(InvalidArgument):
            dispersion_curve(film, bias, 0, [-1.0, 100.0], EngineName.KS)

    def test_empty_grid(self, film: FerriteFilm, bias: BiasField) -> None:
        assert dispersion_curve(film, bias, 1, [], EngineName.KS) == []

    def test_worker_count_does_not_change_output(
        self, film: FerriteFilm, bias: BiasField
    ) -> None:
        grid = np.linspace(10.0, 2000.0, 40)
        serial = dispersion_curve(film, bias, 3, grid, EngineName.KS, jobs=1)
        pooled = dispersion_curve(film, bias, 3, grid, EngineName.KS, jobs=4)
        assert serial == pooled


class TestWidthOrdering:
    def test_paper_engine_records_discrepancy(self, film: FerriteFilm, bias: BiasField) -> None:
        report = width_ordering_report(film, bias)
        assert len(report.points) == 15
        assert report.outcome == OrderingOutcome.UNSOLVED
        assert "known discrepancy" in report.discrepancy
        assert "'ks'" in report.discrepancy

    def test_ordered_report_has_no_discrepancy(
        self, film: FerriteFilm, bias: BiasField
    ) -> None:
        report = width_ordering_report(film, bias, k_values=(600.0,), orders=(1, 2, 3), engine="ks")
        assert report.outcome == OrderingOutcome.ORDERED
        assert report.discrepancy == ""
