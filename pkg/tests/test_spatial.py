"""Correlation models, variograms and the masked-correlation integral."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from geomasklik.rice import RiceParams, rice_pdf
from geomasklik.spatial import (
    EmpiricalVariogram,
    GaussianLimit,
    GeoDataset,
    Matern,
    ModelParams,
    corrected_variogram,
    correlation,
    empirical_variogram,
    gaussian_masked_correlation_closed_form,
    masked_correlation,
    practical_range,
    true_variogram,
)


class TestCorrelation:
    def test_exponential_case(self):
        # kappa = 1/2 reduces to exp(-u/phi)
        u = np.array([0.0, 0.1, 1.0, 5.0])
        assert correlation(Matern(0.5), u, 2.0) == pytest.approx(np.exp(-u / 2.0), rel=1e-14)

    def test_kappa_three_halves(self):
        u, phi = np.array([0.3, 1.7]), 0.8
        x = u / phi
        assert correlation(Matern(1.5), u, phi) == pytest.approx((1 + x) * np.exp(-x), rel=1e-13)

    def test_generic_kappa_against_closed_form(self):
        # kappa = 5/2 has the closed form (1 + x + x^2/3) e^{-x}
        u, phi = np.linspace(0.01, 6.0, 40), 1.3
        x = u / phi
        expected = (1 + x + x**2 / 3) * np.exp(-x)
        assert correlation(Matern(2.5), u, phi) == pytest.approx(expected, rel=1e-10)

    def test_gaussian_limit(self):
        u, phi = np.array([0.0, 0.5, 2.0]), 1.0
        assert correlation(GaussianLimit(), u, phi) == pytest.approx(np.exp(-(u**2)), rel=1e-14)

    def test_zero_distance_is_one(self):
        for kind in (Matern(0.5), Matern(1.5), Matern(2.2), GaussianLimit()):
            assert correlation(kind, 0.0, 0.7) == 1.0

    def test_large_distance_underflows_cleanly(self):
        val = correlation(Matern(2.2), 1e4, 1.0)
        assert 0.0 <= val < 1e-300 or val == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            correlation(Matern(0.5), 1.0, 0.0)
        with pytest.raises(ValueError):
            correlation(Matern(0.5), -1.0, 1.0)
        with pytest.raises(ValueError):
            Matern(kappa=0.0)


class TestMaskedCorrelation:
    def test_gaussian_closed_form_vs_quadrature(self):
        phi, scale = 1.0, 0.45
        for u in (0.0, 0.5, 1.5, 3.0):
            closed = gaussian_masked_correlation_closed_form(u, phi, scale)
            if u == 0.0:
                # Rayleigh limit: direct integral of exp(-(t/phi)^2) pdf
                num, _ = quad(
                    lambda t: math.exp(-((t / phi) ** 2)) * rice_pdf(RiceParams(u, scale), t),
                    0.0, u + 12 * scale, limit=200,
                )
            else:
                num, _ = quad(
                    lambda t: math.exp(-((t / phi) ** 2)) * rice_pdf(RiceParams(u, scale), t),
                    0.0, u + 12 * scale, limit=200,
                )
            assert closed == pytest.approx(num, rel=1e-9)

    def test_qmc_converges_to_closed_form(self):
        # the Halton-quantile average converges like ~1/B in absolute terms;
        # at B = 2^16 - 1 the gap is well inside 2e-5
        phi = 1.0
        for r in (0.2, 0.6, 1.0):
            scale = math.sqrt(2) * r * phi
            for u in (0.0, 0.5, 1.0, 2.0):
                qmc = masked_correlation(
                    GaussianLimit(), u, phi, scale, n_nodes=2**16 - 1, method="qmc"
                )
                closed = gaussian_masked_correlation_closed_form(u, phi, scale)
                assert qmc == pytest.approx(closed, abs=2e-5)

    def test_matern_qmc_vs_quadrature(self):
        phi, scale = 1.0, 0.5
        for kappa in (0.5, 1.5):
            for u in (0.4, 1.0, 2.5):
                num, _ = quad(
                    lambda t: correlation(Matern(kappa), t, phi)
                    * rice_pdf(RiceParams(u, scale), t),
                    0.0, u + 12 * scale, limit=300,
                )
                qmc = masked_correlation(Matern(kappa), u, phi, scale, n_nodes=2**16 - 1)
                assert qmc == pytest.approx(num, abs=5e-5)

    def test_method_validation(self):
        with pytest.raises(ValueError):
            masked_correlation(Matern(0.5), 1.0, 1.0, 0.3, method="closed-form")
        with pytest.raises(ValueError):
            masked_correlation(GaussianLimit(), 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            masked_correlation(GaussianLimit(), 1.0, 1.0, 0.3, n_nodes=0)


class TestVariograms:
    def test_true_variogram_shape(self):
        params = ModelParams(beta=np.zeros(1), sigma2=1.2, phi=0.7, tau2=0.3, kappa=0.5)
        kind = params.kind()
        assert true_variogram(params, kind, 0.0) == pytest.approx(params.tau2)
        assert true_variogram(params, kind, 1e6) == pytest.approx(params.tau2 + params.sigma2)

    def test_corrected_exceeds_true_at_origin(self):
        # positional error lifts the variogram near the origin
        params = ModelParams(beta=np.zeros(1), sigma2=1.0, phi=0.25, tau2=0.0, kappa=0.5)
        kind = params.kind()
        scale = math.sqrt(2) * 0.6 * params.phi
        assert corrected_variogram(params, kind, 1e-9, scale) > true_variogram(
            params, kind, 1e-9
        )

    def test_degenerate_scale_recovers_true(self):
        params = ModelParams(beta=np.zeros(1), sigma2=1.0, phi=0.5, tau2=0.1, kappa=1.5)
        kind = params.kind()
        for u in np.linspace(0.05, 3.0, 12):
            assert corrected_variogram(params, kind, float(u), 1e-9) == pytest.approx(
                true_variogram(params, kind, u), abs=1e-6
            )


class TestEmpiricalVariogram:
    def _small_dataset(self):
        coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [5.0, 1.0]])
        y = np.array([0.3, -0.2, 1.1, 0.5, -0.8])
        return GeoDataset(coords=coords, y=y)

    def test_brute_force_oracle(self):
        data = self._small_dataset()
        beta = np.array([np.mean(data.y)])
        h, max_dist = 1.5, 6.0
        ev = empirical_variogram(data, beta, h=h, max_dist=max_dist)
        # brute force: all pairs, bins (k-1)h < u <= kh
        resid = data.y - beta[0]
        bins: dict[int, list[float]] = {}
        n = data.n
        for i in range(n):
            for j in range(i + 1, n):
                u = float(np.hypot(*(data.coords[i] - data.coords[j])))
                if u <= 0 or u > max_dist:
                    continue
                k = math.ceil(u / h)
                bins.setdefault(k, []).append(0.5 * (resid[i] - resid[j]) ** 2)
        mids = sorted(bins)
        assert ev.midpoints == pytest.approx([(k - 0.5) * h for k in mids])
        assert ev.counts.tolist() == [len(bins[k]) for k in mids]
        assert ev.ordinates == pytest.approx([np.mean(bins[k]) for k in mids])

    def test_default_settings(self):
        data = self._small_dataset()
        ev = empirical_variogram(data, np.array([0.0]))
        d = data.pair_distances()
        assert ev.bin_width == pytest.approx(0.5 * d.max() / 15.0)

    def test_empty_raises(self):
        data = self._small_dataset()
        with pytest.raises(ValueError):
            empirical_variogram(data, np.array([0.0]), max_dist=1e-6)

    def test_csv_roundtrip(self):
        ev = EmpiricalVariogram(
            bin_width=0.5,
            midpoints=np.array([0.25, 0.75]),
            ordinates=np.array([0.1, 0.4]),
            counts=np.array([3, 7]),
        )
        lines = ev.to_csv().strip().splitlines()
        assert lines[0] == "u_k,v_k,n_k"
        assert [float(tok) for tok in lines[1].split(",")] == [0.25, 0.1, 3]


class TestGeoDataset:
    def test_validation(self):
        with pytest.raises(ValueError):
            GeoDataset(coords=np.zeros((1, 2)), y=np.zeros(1))
        with pytest.raises(ValueError):
            GeoDataset(coords=np.zeros((3, 3)), y=np.zeros(3))
        with pytest.raises(ValueError):
            GeoDataset(coords=np.zeros((3, 2)), y=np.array([0.0, np.nan, 1.0]))
        with pytest.raises(ValueError):
            GeoDataset(
                coords=np.zeros((3, 2)),
                y=np.zeros(3),
                covariates=np.ones((3, 2)),  # duplicated intercept column
            )
        with pytest.raises(ValueError):
            GeoDataset(
                coords=np.random.default_rng(0).normal(size=(3, 2)),
                y=np.zeros(3),
                nugget_weights=np.array([1.0, 0.0, 2.0]),
            )

    def test_defaults(self):
        data = GeoDataset(coords=np.array([[0.0, 0.0], [1.0, 1.0]]), y=np.array([1.0, 2.0]))
        assert data.covariates.shape == (2, 1)
        assert data.pair_distances() == pytest.approx([math.sqrt(2)])


class TestPracticalRange:
    def test_exponential_closed_form(self):
        # exp(-u/phi) = 0.05  =>  u = phi ln 20
        phi = 0.7
        assert practical_range(Matern(0.5), phi) == pytest.approx(phi * math.log(20), rel=1e-7)

    def test_gaussian_closed_form(self):
        phi = 1.4
        assert practical_range(GaussianLimit(), phi) == pytest.approx(
            phi * math.sqrt(math.log(20)), rel=1e-7
        )

    def test_level_validation(self):
        with pytest.raises(ValueError):
            practical_range(Matern(0.5), 1.0, level=0.0)
