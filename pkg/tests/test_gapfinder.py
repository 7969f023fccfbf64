import math

import numpy as np
import pytest

from gaplab import (
    DataError,
    Filter,
    perturbative_gap_guess,
    GapSearchConfig,
    GapSearchError,
    InputOrientation,
    NumericError,
    ParameterError,
    SpinModel,
    TimeGrid,
    TrotterPlan,
    default_grid,
    empirical_depth_cutoff,
    exact_diagonalize,
    exact_spectrum_oracle,
    filter_fourier,
    find_gap,
    gap_error,
    prepare_input,
    run_time_series,
    spectral_error,
    spectral_error_bound,
    spectral_function,
    theta_sweep,
)
from gaplab import TimeSeries
from gaplab.spectral import Spectrum, transform


def lineshape_spectrum(center, filt, d_omega=0.01, width=6.0):
    omegas = np.arange(1, int(width / d_omega)) * d_omega
    return Spectrum(omegas=omegas, values=filter_fourier(filt, omegas - center),
                    d_omega=d_omega, filter=filt)


class TestFindGap:
    def test_isolated_peak(self):
        filt = Filter.lorentzian(0.25)
        spec = lineshape_spectrum(1.2, filt)
        est = find_gap(spec, GapSearchConfig(initial_guess=1.3))
        assert abs(est.gap - 1.2) <= spec.d_omega / 2 + 1e-12
        assert est.window_used == pytest.approx(0.5)

    def test_widening_reaches_displaced_peak(self):
        filt = Filter.lorentzian(0.1)
        spec = lineshape_spectrum(2.0, filt)
        est = find_gap(spec, GapSearchConfig(initial_guess=1.7))
        assert abs(est.gap - 2.0) <= spec.d_omega
        assert est.window_used > 0.2

    def test_flat_tail_fails_after_widening(self):
        filt = Filter.lorentzian(0.1)
        spec = lineshape_spectrum(1.0, filt)
        with pytest.raises(GapSearchError):
            find_gap(spec, GapSearchConfig(initial_guess=4.0))

    def test_plain_argmax_mode(self):
        filt = Filter.lorentzian(0.1)
        spec = lineshape_spectrum(1.0, filt)
        est = find_gap(spec, GapSearchConfig(initial_guess=4.0,
                                             require_local_max=False))
        # monotone tail: argmax sits at the window edge nearest the peak
        assert est.gap < 4.0

    def test_never_returns_zero_frequency(self):
        filt = Filter.lorentzian(0.3)
        omegas = np.arange(0, 400) * 0.01
        spec = Spectrum(omegas=omegas, values=filter_fourier(filt, omegas),
                        d_omega=0.01, filter=filt)
        with pytest.raises(GapSearchError):
            find_gap(spec, GapSearchConfig(initial_guess=0.05,
                                           initial_window=0.2, max_window=0.4))

    def test_validation(self):
        with pytest.raises(ParameterError):
            GapSearchConfig(initial_guess=-1.0)
        filt = Filter.lorentzian(0.1)
        spec = lineshape_spectrum(1.0, filt)
        with pytest.raises(ParameterError):
            find_gap(spec, GapSearchConfig(initial_guess=1.0, initial_window=2.0,
                                           max_window=1.0))

    def test_oracle_spectrum_recovers_ed_gap(self):
        model = SpinModel(4, 0.4, 1.0)
        eig = exact_diagonalize(model)
        filt = Filter.gaussian(0.3)
        oracle = exact_spectrum_oracle(
            eig, InputOrientation.uniform(4, 0.27 * math.pi), filt,
            default_grid(filt))
        est = find_gap(oracle, GapSearchConfig(initial_guess=1.4))
        assert abs(est.gap - (eig.energies[1] - eig.energies[0])) <= filt.eta


class TestErrorMeasures:
    def test_gap_error_values(self):
        assert gap_error(1.2, 1.2) == 0.0
        assert gap_error(1.3, 1.2) == pytest.approx(1.0 / 12.0)
        with pytest.raises(ParameterError):
            gap_error(1.0, 0.0)

    def test_spectral_error_identical(self):
        filt = Filter.lorentzian(0.2)
        spec = lineshape_spectrum(1.0, filt)
        assert spectral_error(spec, spec) == 0.0

    def test_spectral_error_constant_offset_identity(self):
        filt = Filter.lorentzian(0.2)
        spec = lineshape_spectrum(1.0, filt)
        offset = 0.05
        shifted = Spectrum(omegas=spec.omegas, values=spec.values + offset,
                           d_omega=spec.d_omega, filter=filt)
        got = spectral_error(spec, shifted)
        n_pts = len(spec.values)
        ref = math.sqrt(n_pts * offset**2
                        / np.sum((spec.values - spec.values.mean()) ** 2))
        assert got == pytest.approx(ref, rel=1e-12)

    def test_spectral_error_guards(self):
        filt = Filter.lorentzian(0.2)
        spec = lineshape_spectrum(1.0, filt)
        flat = Spectrum(omegas=spec.omegas, values=np.ones_like(spec.values),
                        d_omega=spec.d_omega, filter=filt)
        with pytest.raises(NumericError):
            spectral_error(flat, spec)
        short = Spectrum(omegas=spec.omegas[:-1], values=spec.values[:-1],
                         d_omega=spec.d_omega, filter=filt)
        with pytest.raises(DataError):
            spectral_error(short, spec)


class TestSpectralErrorBound:
    def setup_method(self):
        self.model = SpinModel(4, 0.4, 1.0)
        self.filt = Filter.gaussian(0.3)
        self.grid = default_grid(self.filt)

    def test_vanishes_at_large_depth(self):
        eps = spectral_error_bound(self.model, TrotterPlan(1, 10**9),
                                   self.filt, self.grid)
        assert eps < 1e-6

    def test_deviation_kernel_scales_as_inverse_depth(self):
        from gaplab.model import commutator_norm_bounds
        c = commutator_norm_bounds(self.model, 1).prefactor
        for depth in (10, 35):
            dev = c * np.abs(self.grid.times) ** 2 / depth
            dev2 = c * np.abs(self.grid.times) ** 2 / (2 * depth)
            a = transform(self.grid, dev, dev, self.filt)
            b = transform(self.grid, dev2, dev2, self.filt)
            assert np.allclose(a, 2 * b, rtol=1e-12)

    def test_monotone_decreasing_in_depth(self):
        vals = [spectral_error_bound(self.model, TrotterPlan(1, m),
                                     self.filt, self.grid)
                for m in (5, 10, 20, 40, 80)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_dominates_measured_spectral_error(self):
        eig = exact_diagonalize(self.model)
        orientation = InputOrientation.uniform(4, 0.27 * math.pi)
        oracle = exact_spectrum_oracle(eig, orientation, self.filt, self.grid)
        for depth in (10, 35, 100):
            plan = TrotterPlan(1, depth)
            spec = spectral_function(
                run_time_series(self.model, plan, orientation, self.grid),
                self.filt)
            assert (spectral_error_bound(self.model, plan, self.filt, self.grid)
                    >= spectral_error(spec, oracle))


class TestEmpiricalCutoff:
    def test_plateau_detection(self):
        depths = [10, 20, 40, 80, 160]
        errors = [0.5, 0.2, 0.031, 0.030, 0.030]
        assert empirical_depth_cutoff(depths, errors) == 40

    def test_validation(self):
        with pytest.raises(DataError):
            empirical_depth_cutoff([1], [0.1])

    def test_gaussian_cutoff_not_above_lorentzian(self):
        # the more concentrated line shape converges at or before the wider one
        model = SpinModel(4, 0.4, 1.0)
        orientation = InputOrientation.uniform(4, 0.27 * math.pi)
        eig = exact_diagonalize(model)
        exact_gap = eig.energies[1] - eig.energies[0]
        depths = [5, 8, 12, 18, 25, 35, 50]
        cutoffs = {}
        for family in ("gaussian", "lorentzian"):
            filt = Filter(family, 0.3)
            grid = default_grid(filt)
            errs = []
            for m in depths:
                spec = spectral_function(
                    run_time_series(model, TrotterPlan(1, m), orientation, grid),
                    filt)
                est = find_gap(spec, GapSearchConfig(initial_guess=1.4))
                errs.append(gap_error(est, exact_gap))
            cutoffs[family] = empirical_depth_cutoff(
                [4 * m for m in depths], errs)
        assert cutoffs["gaussian"] <= cutoffs["lorentzian"]


class TestThetaSweep:
    def test_records_and_unfavored_zone(self):
        model = SpinModel(4, 0.4, 1.0)
        filt = Filter.gaussian(0.2)
        grid = default_grid(filt)
        thetas = [math.pi * l / 50 for l in range(0, 25, 4)]
        result = theta_sweep(model, TrotterPlan(1, 100), filt, grid, thetas)
        assert len(result.records) == len(thetas)
        assert not result.failed()
        unfavored = result.unfavored_thetas()
        assert unfavored, "small-theta zone should exceed the error threshold"
        assert result.best_theta() not in unfavored
        for r in result.records:
            assert r.eps_bound >= r.eps_spect
            assert r.D == 4 * 100

    def test_buried_peak_fails_and_survivors_win(self):
        # at theta = 0 the neighbor peak's tail buries the target peak, so a
        # capped window finds no local maximum; theta = 0.27 pi still succeeds
        model = SpinModel(4, 0.4, 1.0)
        filt = Filter.gaussian(0.3)
        grid = default_grid(filt)
        search = GapSearchConfig(initial_guess=1.4, max_window=0.6)
        result = theta_sweep(model, TrotterPlan(1, 35), filt, grid,
                             [0.0, 0.27 * math.pi], search=search)
        assert len(result.failed()) == 1
        assert result.failed()[0].theta == 0.0
        assert result.best_theta() == pytest.approx(0.27 * math.pi)

        alone = theta_sweep(model, TrotterPlan(1, 35), filt, grid, [0.0],
                            search=search)
        with pytest.raises(GapSearchError):
            alone.best_theta()

    def test_shot_mode_records_derived_seeds(self):
        model = SpinModel(3, 0.4, 1.0)
        filt = Filter.gaussian(0.3)
        grid = default_grid(filt)
        result = theta_sweep(model, TrotterPlan(1, 20), filt, grid,
                             [0.2 * math.pi, 0.3 * math.pi], shots=512, seed=4)
        seeds = [r.seed for r in result.records]
        assert len(set(seeds)) == 2 and all(s is not None for s in seeds)

    def test_error_grows_toward_small_theta_at_wide_broadening(self):
        # the neighbor peak's tail drags the estimate as theta -> 0, so the
        # error decays monotonically onto the resolution plateau
        model = SpinModel(4, 0.4, 1.0)
        filt = Filter.gaussian(0.3)
        grid = default_grid(filt)
        thetas = [math.pi * l / 50 for l in range(0, 25, 4)]
        result = theta_sweep(model, TrotterPlan(1, 100), filt, grid, thetas)
        eps = [r.eps_gap for r in result.records]
        assert all(b <= a + 1e-12 for a, b in zip(eps, eps[1:]))
        assert eps[0] >= 10 * min(eps)


class TestResolutionFloor:
    @pytest.mark.parametrize("family", ["lorentzian", "gaussian"])
    @pytest.mark.parametrize("eta", [0.1, 0.3])
    def test_converged_error_below_resolution_limit(self, family, eta):
        model = SpinModel(4, 0.4, 1.0)
        filt = Filter(family, eta)
        grid = default_grid(filt)
        orientation = InputOrientation.uniform(4, 0.27 * math.pi)
        eig = exact_diagonalize(model)
        exact_gap = eig.energies[1] - eig.energies[0]
        spec = spectral_function(
            run_time_series(model, TrotterPlan(1, 150), orientation, grid), filt)
        est = find_gap(spec, GapSearchConfig(initial_guess=1.4))
        assert gap_error(est, exact_gap) <= 2 * eta / exact_gap


class TestUnfilteredInvariance:
    def test_gap_estimate_independent_of_orientation(self):
        # raw delta-grid spectra from the exactly evolved chain: the argmax
        # bin must not move with theta wherever the peak weight survives
        model = SpinModel(3, 0.4, 1.0)
        eig = exact_diagonalize(model)
        grid = TimeGrid(dt=0.25, length=512)
        found = set()
        for theta in (0.1 * math.pi, 0.2 * math.pi, 0.3 * math.pi, 0.45 * math.pi):
            orientation = InputOrientation.uniform(3, theta)
            weights = np.abs(eig.overlaps(prepare_input(orientation))) ** 2
            amps = np.exp(-1j * np.outer(grid.times, eig.energies)) \
                @ weights.astype(complex)
            p = np.abs(amps) ** 2
            series = TimeSeries(grid=grid, p_plus=p, p_minus=p.copy())
            spec = spectral_function(series, Filter.none())
            est = find_gap(spec, GapSearchConfig(
                initial_guess=perturbative_gap_guess(model),
                initial_window=0.5, max_window=0.5))
            found.add(round(est.gap, 12))
        assert len(found) == 1
