"""Tests for port matching, response synthesis and filter metrics."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import trapezoid

from app.core.cavity import enumerate_modes
from app.core.response import (
    default_frequency_grid,
    dual_cavity_crossover,
    electrode_impedance,
    extract_metrics,
    fit_electrode_inductance,
    fit_loaded_q,
    lorentzian,
    mismatch_factor,
    passband_modes,
    reflection_coefficient,
    smith_report,
    synthesize_from_spectrum,
    synthesize_response,
    transmission_at,
)
from app.core.sweep import compare_shapes
from app.core.transducer import mode_coupling
from app.errors import (
    DegenerateLoad,
    EmptyModeSet,
    InvalidArgument,
    NonConvergence,
    NonPositiveFrequency,
    NoPassband,
)
from app.models.cavity import CavityMode, ModeStatus
from app.models.film import BiasField
from app.models.response import DEFAULT_ELECTRODE_L, DeviceConfig, FrequencyResponse
from app.models.transducer import CouplingSpectrum, TransducerShape


@pytest.fixture
def matched() -> DeviceConfig:
    """Purely resistive 50 Ω electrodes: no mismatch anywhere."""
    return DeviceConfig(electrode_r=50.0, electrode_l=0.0)


def _single_mode(f0: float = 10e9) -> list[CavityMode]:
    return [CavityMode(1, 1, 100.0, 80.0, f0)]


class TestPorts:
    def test_dual_cavity_halves_impedance(self, device: DeviceConfig) -> None:
        f = np.linspace(1e9, 20e9, 50)
        single = electrode_impedance(device, f)
        dual = electrode_impedance(replace(device, cavities=2), f)
        assert np.array_equal(dual, single / 2)

    def test_dual_cavity_matches_better_for_lossy_electrodes(self, device: DeviceConfig) -> None:
        lossy = replace(device, electrode_r=300.0)
        f = np.linspace(1e9, 20e9, 200)
        z1 = electrode_impedance(lossy, f)
        assert np.all(z1.real > 100.0)
        m1 = mismatch_factor(z1, 50.0)
        m2 = mismatch_factor(electrode_impedance(replace(lossy, cavities=2), f), 50.0)
        assert np.all(m2 > m1)

    def test_matched_load(self) -> None:
        assert reflection_coefficient(50.0 + 0j, 50.0) == 0
        assert mismatch_factor(50.0 + 0j, 50.0) == pytest.approx(1.0)

    def test_degenerate_load(self) -> None:
        with pytest.raises(DegenerateLoad):
            reflection_coefficient(-50.0 + 0j, 50.0)

    def test_active_load(self) -> None:
        with pytest.raises(InvalidArgument):
            reflection_coefficient(-10.0 + 5j, 50.0)

    def test_impedance_needs_positive_frequency(self, device: DeviceConfig) -> None:
        with pytest.raises(NonPositiveFrequency):
            electrode_impedance(device, 0.0)

    def test_inductance_fit(self) -> None:
        assert fit_electrode_inductance(15.75e9) == pytest.approx(DEFAULT_ELECTRODE_L, rel=1e-6)

    def test_crossover_of_default_device(self, device: DeviceConfig) -> None:
        assert dual_cavity_crossover(device) == pytest.approx(15.75e9, rel=1e-6)

    def test_no_crossover_without_inductance(self, matched: DeviceConfig) -> None:
        assert dual_cavity_crossover(matched) is None

    def test_dual_wins_above_crossover(self, device: DeviceConfig) -> None:
        dual = replace(device, cavities=2)
        for f, dual_better in ((12e9, False), (20e9, True)):
            m1 = mismatch_factor(electrode_impedance(device, f), 50.0)
            m2 = mismatch_factor(electrode_impedance(dual, f), 50.0)
            assert (m2 > m1) is dual_better


class TestLineShape:
    def test_unit_peak_and_half_power(self) -> None:
        f0, q = 10e9, 500.0
        assert abs(lorentzian(np.array([f0]), np.array([f0]), q)[0, 0]) == pytest.approx(1.0)
        edge = f0 * (1 + 1 / (2 * q))
        assert abs(lorentzian(np.array([edge]), np.array([f0]), q)[0, 0]) == pytest.approx(
            1 / math.sqrt(2)
        )

    def test_default_grid(self, device: DeviceConfig) -> None:
        grid = default_frequency_grid(device.film, BiasField(2500.0))
        assert grid.size == 10000
        assert grid[0] == pytest.approx(9.126883e9 - 1.5e9, rel=1e-6)
        assert grid[-1] == pytest.approx(9.45e9 + 1.5e9, rel=1e-9)

    def test_default_grid_stays_positive(self, device: DeviceConfig) -> None:
        grid = default_frequency_grid(device.film, BiasField(100.0))
        assert grid[0] > 0


class TestSynthesis:
    def test_single_mode_bandwidth(self, matched: DeviceConfig) -> None:
        f0 = 10e9
        modes = _single_mode(f0)
        spectrum = CouplingSpectrum(entries={(1, 1): 1 + 0j})
        grid = np.linspace(9.8e9, 10.2e9, 40001)
        r = synthesize_from_spectrum(matched, modes, spectrum, grid)
        assert np.max(np.abs(r.s21)) == pytest.approx(1.0, abs=1e-12)
        metrics = extract_metrics(r, modes)
        assert metrics.f_center == pytest.approx(f0)
        assert metrics.il_db == pytest.approx(0.0, abs=1e-9)
        assert metrics.bw3_hz == pytest.approx(f0 / 500.0, abs=grid[1] - grid[0])
        assert abs(r.s11[np.argmax(np.abs(r.s21))]) < 1e-12

    def test_zero_coupling_is_silent(self, matched: DeviceConfig) -> None:
        grid = np.linspace(9e9, 11e9, 101)
        r = synthesize_from_spectrum(matched, _single_mode(), CouplingSpectrum.zero([(1, 1)]), grid)
        assert np.all(r.s21 == 0)
        with pytest.raises(NoPassband):
            extract_metrics(r, _single_mode())

    def test_unsolved_modes_are_skipped(self, matched: DeviceConfig) -> None:
        modes = [*_single_mode(), CavityMode(1, 2, 100.0, 160.0, None, ModeStatus.NO_SOLUTION)]
        spectrum = CouplingSpectrum(entries={(1, 1): 1 + 0j, (1, 2): 0.5 + 0j})
        r = synthesize_from_spectrum(matched, modes, spectrum, np.linspace(9e9, 11e9, 11))
        assert r.skipped == ["p1w2"]
        assert [t.label for t in r.terms] == ["p1w1"]

    def test_empty_mode_set(self, matched: DeviceConfig) -> None:
        modes = [CavityMode(1, 1, 100.0, 80.0, None, ModeStatus.NO_SOLUTION)]
        with pytest.raises(EmptyModeSet):
            synthesize_from_spectrum(matched, modes, CouplingSpectrum(), np.linspace(1e9, 2e9, 3))

    def test_grid_must_increase(self, matched: DeviceConfig) -> None:
        with pytest.raises(InvalidArgument):
            synthesize_from_spectrum(
                matched, _single_mode(), CouplingSpectrum(), np.array([2e9, 1e9])
            )

    def test_passive_device(self, device: DeviceConfig) -> None:
        r = synthesize_response(device, BiasField(2500.0))
        power = np.abs(r.s21) ** 2 + np.abs(r.s11) ** 2
        assert np.all(np.abs(r.s21) <= 1.0)
        assert np.all(power <= 1.0 + 1e-12)
        assert r.config_digest
        assert r.f_min == pytest.approx(9.126883e9, rel=1e-6)

    def test_trace_matches_independent_evaluation(self, matched: DeviceConfig) -> None:
        rng = np.random.default_rng(7)
        fine = np.linspace(8.5e9, 10.5e9, 200_001)
        span = fine[-1] - fine[0]
        for _ in range(20):
            centers = np.sort(rng.uniform(9e9, 10e9, 3))
            weights = rng.uniform(0.1, 1.0, 3)
            modes = [
                CavityMode(1, m, 100.0, 80.0 * m, float(f0))
                for m, f0 in enumerate(centers, start=1)
            ]
            spectrum = CouplingSpectrum(
                entries={(1, m): complex(w) for m, w in enumerate(weights, start=1)}
            )
            r = synthesize_from_spectrum(matched, modes, spectrum, fine)
            direct = sum(
                w**2 / (1 + 2j * 500.0 * (fine - f0) / f0)
                for w, f0 in zip(weights, centers, strict=True)
            ) / r.normalization
            assert trapezoid(np.abs(r.s21 - direct), fine) / span < 1e-8
            assert r.normalization >= 1.0
            resampled = transmission_at(r, matched, fine[::5000])
            assert np.allclose(resampled, r.s21[::5000], rtol=1e-12, atol=0)


class TestLoadedQFit:
    def test_single_mode_recovers_line_width(self, matched: DeviceConfig) -> None:
        grid = np.linspace(9e9, 11e9, 200_001)
        q = fit_loaded_q(matched, BiasField(2500.0), 200e6, modes=_single_mode(), f_grid=grid)
        assert q == pytest.approx(50.0, rel=1e-3)

    def test_fitted_q_reproduces_target(self, matched: DeviceConfig) -> None:
        grid = np.linspace(9e9, 11e9, 200_001)
        bias = BiasField(2500.0)
        q = fit_loaded_q(matched, bias, 40e6, modes=_single_mode(), f_grid=grid)
        trial = replace(matched, film=replace(matched.film, q_loaded=q))
        spectrum = CouplingSpectrum(entries={(1, 1): 1 + 0j})
        r = synthesize_from_spectrum(trial, _single_mode(), spectrum, grid, bias)
        assert extract_metrics(r, _single_mode()).bw3_hz == pytest.approx(40e6, rel=1e-3)

    def test_unreachable_bandwidth(self, matched: DeviceConfig) -> None:
        grid = np.linspace(9.9e9, 10.1e9, 2001)
        with pytest.raises(NonConvergence):
            fit_loaded_q(matched, BiasField(2500.0), 1e3, modes=_single_mode(), f_grid=grid)

    @pytest.mark.parametrize("bounds", [(0.0, 100.0), (500.0, 50.0)])
    def test_bounds_validated(self, matched: DeviceConfig, bounds: tuple[float, float]) -> None:
        with pytest.raises(InvalidArgument):
            fit_loaded_q(matched, BiasField(2500.0), 200e6, modes=_single_mode(), q_bounds=bounds)


class TestMetrics:
    def test_flat_response(self) -> None:
        f = np.linspace(1e9, 2e9, 101)
        r = FrequencyResponse(f, np.ones(101, dtype=complex), np.zeros(101, dtype=complex))
        m = extract_metrics(r, [])
        assert m.il_db == 0.0
        assert m.bw3_hz == pytest.approx(1e9)
        assert m.spur_suppression_db == 0.0
        assert m.ripple_db == 0.0

    def test_no_passband(self) -> None:
        f = np.linspace(1e9, 2e9, 11)
        r = FrequencyResponse(f, np.zeros(11, dtype=complex), np.zeros(11, dtype=complex))
        with pytest.raises(NoPassband):
            extract_metrics(r, [])

    def test_apodization_improves_spur_suppression(self, device: DeviceConfig) -> None:
        bias = BiasField(2500.0)
        s = device.solver
        modes = enumerate_modes(device.film, bias, s.n_max, s.m_max, s.engine, s)
        passband = passband_modes(modes)
        straight = replace(
            device, transducer=replace(device.transducer, shape=TransducerShape.STRAIGHT)
        )
        half = extract_metrics(synthesize_response(device, bias, modes=modes), passband)
        flat = extract_metrics(synthesize_response(straight, bias, modes=modes), passband)
        assert half.spur_suppression_db - flat.spur_suppression_db >= 10.0
        assert 9.126883e9 <= half.f_center <= 9.45e9

    def test_swapping_ports_keeps_transmission(self, device: DeviceConfig) -> None:
        bias = BiasField(2500.0)
        tilted = replace(
            device,
            transducer=replace(device.transducer, shape=TransducerShape.STRAIGHT, tilt_deg=35.0),
        )
        modes = enumerate_modes(tilted.film, bias, 6, 4)
        forward = mode_coupling(tilted.transducer, tilted.film, modes)
        # the reverse path sees the same aperture phase with the opposite sign
        backward = CouplingSpectrum(
            entries={k: v.conjugate() for k, v in forward.entries.items()},
            scale=forward.scale,
            weight_integral=forward.weight_integral,
        )
        grid = default_frequency_grid(tilted.film, bias, points=4000)
        a = synthesize_from_spectrum(tilted, modes, forward, grid, bias)
        b = synthesize_from_spectrum(tilted, modes, backward, grid, bias)
        assert np.array_equal(np.abs(a.s21), np.abs(b.s21))

    def test_coupling_scale_leaves_spur_suppression(self, device: DeviceConfig) -> None:
        bias = BiasField(2500.0)
        modes = enumerate_modes(device.film, bias, 6, 4)
        spectrum = mode_coupling(device.transducer, device.film, modes)
        grid = default_frequency_grid(device.film, bias, points=4000)
        passband = passband_modes(modes)
        base = extract_metrics(
            synthesize_from_spectrum(device, modes, spectrum, grid, bias), passband
        )
        for factor in (0.9, 0.5, 0.2):
            scaled = CouplingSpectrum(
                entries={k: factor * v for k, v in spectrum.entries.items()}
            )
            m = extract_metrics(
                synthesize_from_spectrum(device, modes, scaled, grid, bias), passband
            )
            assert m.spur_suppression_db == pytest.approx(base.spur_suppression_db, abs=1e-9)
            assert m.il_db - base.il_db == pytest.approx(-40.0 * math.log10(factor), abs=1e-9)
            assert m.f_center == pytest.approx(base.f_center)

    def test_full_cone_loses_high_order_primary(self, device: DeviceConfig) -> None:
        rows = compare_shapes(
            device, BiasField(2500.0), [TransducerShape.HALF_CONE, TransducerShape.FULL_CONE]
        )
        half, full = rows
        assert half.top_primary_label == "p10w1"
        assert full.top_primary_s21 < half.top_primary_s21

    def test_smith_report_matched(self, matched: DeviceConfig) -> None:
        spectrum = CouplingSpectrum(entries={(1, 1): 1 + 0j})
        r = synthesize_from_spectrum(
            matched, _single_mode(), spectrum, np.linspace(9.9e9, 10.1e9, 201)
        )
        report = smith_report(r)
        assert report.f_hz == pytest.approx(10e9)
        assert abs(report.gamma) < 1e-12
        assert report.z_ohm == pytest.approx(50.0 + 0j)
        assert report.mismatch == pytest.approx(1.0)

    def test_smith_report_inductive(self, device: DeviceConfig) -> None:
        r = synthesize_response(device, BiasField(2500.0))
        report = smith_report(r)
        assert report.z_ohm.imag > 0
        assert 0 < report.mismatch < 1
