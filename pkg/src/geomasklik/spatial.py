"""Correlation models, true and geomask-corrected variograms, empirical variogram.

The corrected variogram replaces the correlation at the (unobservable) true
pair distance with its expectation over the Rice law of that distance given
the observed one.  For the Gaussian correlation limit the expectation has a
closed form; for the Matern family it is computed by quasi-Monte-Carlo over
Rice quantiles at Halton nodes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.optimize import brentq
from scipy.spatial.distance import pdist

from .rice import rice_quantile_nodes
from .specialfn import halton_nodes


@dataclass(frozen=True)
class Matern:
    """Matern correlation, shape kappa > 0 (kappa fixed, never estimated)."""

    kappa: float

    def __post_init__(self):
        if not (self.kappa > 0):
            raise ValueError(f"Matern kappa must be > 0, got {self.kappa}")


@dataclass(frozen=True)
class GaussianLimit:
    """Gaussian correlation exp(-(u/phi)^2), the kappa -> infinity Matern limit."""


CorrelationKind = Matern | GaussianLimit


@dataclass
class ModelParams:
    """Parameters of the linear Gaussian model: beta, partial sill, scale, nugget.

    kappa is carried along for bookkeeping when the correlation is Matern;
    it is fixed, never estimated.
    """

    beta: np.ndarray
    sigma2: float
    phi: float
    tau2: float
    kappa: float | None = None

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if not (self.sigma2 > 0):
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")
        if not (self.phi > 0):
            raise ValueError(f"phi must be > 0, got {self.phi}")
        if not (self.tau2 >= 0):
            raise ValueError(f"tau2 must be >= 0, got {self.tau2}")

    def kind(self) -> CorrelationKind:
        return GaussianLimit() if self.kappa is None else Matern(self.kappa)


@dataclass(eq=False)
class GeoDataset:
    """Observed (possibly masked) coordinates, outcomes and covariates.

    The first covariate column is the intercept by convention.  Optional
    nugget weights n_i turn the nugget into tau^2 / n_i per record.
    """

    coords: np.ndarray
    y: np.ndarray
    covariates: np.ndarray | None = None
    nugget_weights: np.ndarray | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        n = self.y.size
        if n < 2:
            raise ValueError(f"need at least 2 observations, got {n}")
        if self.coords.shape != (n, 2):
            raise ValueError(f"coords must have shape ({n}, 2), got {self.coords.shape}")
        if self.covariates is None:
            self.covariates = np.ones((n, 1))
        self.covariates = np.asarray(self.covariates, dtype=float)
        if self.covariates.shape[0] != n:
            raise ValueError("covariates row count must match y")
        for name, arr in (("coords", self.coords), ("y", self.y), ("covariates", self.covariates)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        if np.linalg.matrix_rank(self.covariates) < self.covariates.shape[1]:
            raise ValueError("covariate matrix is rank deficient")
        if self.nugget_weights is not None:
            self.nugget_weights = np.asarray(self.nugget_weights, dtype=float)
            if self.nugget_weights.shape != (n,) or np.any(self.nugget_weights <= 0):
                raise ValueError("nugget_weights must be n positive reals")

    @property
    def n(self) -> int:
        return self.y.size

    def pair_distances(self) -> np.ndarray:
        """Condensed pairwise distance vector (scipy pdist ordering, i < j)."""
        return pdist(self.coords)


@dataclass
class EmpiricalVariogram:
    """Binned variogram: midpoints u_k = (k - 0.5) h, ordinates v_k, pair counts n_k."""

    bin_width: float
    midpoints: np.ndarray
    ordinates: np.ndarray
    counts: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("u_k,v_k,n_k\n")
        for u, v, c in zip(self.midpoints, self.ordinates, self.counts):
            buf.write(f"{float(u)!r},{float(v)!r},{int(c)}\n")
        return buf.getvalue()


def correlation(kind: CorrelationKind, u, phi: float):
    """Correlation rho(u; phi) in (0, 1]; rho(0) = 1 handled explicitly."""
    if not (phi > 0):
        raise ValueError(f"phi must be > 0, got {phi}")
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("distance must be >= 0")
    # phi can be denormal-tiny during log-scale optimization; u/phi -> inf is
    # the right limit (zero correlation), so silence the overflow warning.
    with np.errstate(over="ignore"):
        x = u / phi
        xsq = x * x
    if isinstance(kind, GaussianLimit):
        out = np.exp(-xsq)
    else:
        k = kind.kappa
        if k == 0.5:
            out = np.exp(-x)
        elif k == 1.5:
            out = (1.0 + x) * np.exp(-x)
        else:
            # log-space Matern: {2^(k-1) Gamma(k)}^-1 x^k K_k(x), with the
            # exponentially scaled Bessel kve so large x underflows cleanly.
            out = np.ones_like(x)
            pos = x > 0
            xp = x[pos]
            with np.errstate(divide="ignore"):
                log_rho = (
                    -(k - 1.0) * np.log(2.0)
                    - special.gammaln(k)
                    + k * np.log(xp)
                    + np.log(special.kve(k, xp))
                    - xp
                )
            out[pos] = np.exp(log_rho)
        out = np.where(x == 0.0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def true_variogram(params: ModelParams, kind: CorrelationKind, u):
    """tau^2 + sigma^2 (1 - rho(u)); the no-positional-error variogram."""
    rho = correlation(kind, u, params.phi)
    return params.tau2 + params.sigma2 * (1.0 - rho)


def gaussian_masked_correlation_closed_form(u, phi: float, pair_scale: float):
    """E[rho(U*) | u] for Gaussian correlation and Rice(u, pair_scale) distance law.

    Equals {1 + 2 s^2/phi^2}^-1 exp{-u^2 / (phi^2 + 2 s^2)}; with the
    two-endpoint Gaussian scale s = sqrt(2) delta this is the familiar
    {1 + (2r)^2}^-1 exp{-(u / (phi sqrt(1 + (2r)^2)))^2}, r = delta/phi.
    """
    u = np.asarray(u, dtype=float)
    c = 1.0 + 2.0 * pair_scale**2 / phi**2
    out = np.exp(-(u**2) / (phi**2 + 2.0 * pair_scale**2)) / c
    return float(out) if out.ndim == 0 else out


def masked_correlation(
    kind: CorrelationKind,
    u: float,
    phi: float,
    pair_scale: float,
    n_nodes: int = 500,
    *,
    method: str = "auto",
) -> float:
    """E[rho(U*) | u] with [U* | u] ~ Rice(u, pair_scale).

    method: "auto" uses the closed form for the Gaussian correlation limit
    and QMC otherwise; "qmc" forces the Halton-node quantile average
    (1/B) sum_b rho(Q(s_b; u, pair_scale)); "closed-form" requires
    GaussianLimit.
    """
    if n_nodes < 1:
        raise ValueError(f"need at least one QMC node, got {n_nodes}")
    if not (pair_scale > 0):
        raise ValueError(f"pair_scale must be > 0, got {pair_scale}")
    if method not in ("auto", "qmc", "closed-form"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed-form" or (method == "auto" and isinstance(kind, GaussianLimit)):
        if not isinstance(kind, GaussianLimit):
            raise ValueError("closed form only exists for the Gaussian correlation limit")
        return float(gaussian_masked_correlation_closed_form(u, phi, pair_scale))
    s = halton_nodes(n_nodes)
    q = rice_quantile_nodes(float(u), pair_scale, s)
    return float(np.mean(correlation(kind, q, phi)))


def corrected_variogram(
    params: ModelParams,
    kind: CorrelationKind,
    u: float,
    pair_scale: float,
    n_nodes: int = 500,
    *,
    method: str = "auto",
) -> float:
    """tau^2 + sigma^2 {1 - E[rho(U*) | u]}; the variogram under geomasking."""
    ebar = masked_correlation(kind, u, params.phi, pair_scale, n_nodes, method=method)
    return params.tau2 + params.sigma2 * (1.0 - ebar)


def empirical_variogram(
    data: GeoDataset,
    beta_tilde: np.ndarray,
    h: float | None = None,
    max_dist: float | None = None,
) -> EmpiricalVariogram:
    """Binned average of half squared residual differences.

    Residuals r_i = y_i - d(x_i)' beta_tilde; pair ordinates (r_i - r_j)^2 / 2
    binned by (k-1) h < u_ij <= k h up to max_dist.  Defaults: max_dist is
    half the maximum pairwise distance, h = max_dist / 15.
    """
    beta_tilde = np.atleast_1d(np.asarray(beta_tilde, dtype=float))
    resid = data.y - data.covariates @ beta_tilde
    d = data.pair_distances()
    if max_dist is None:
        max_dist = 0.5 * float(d.max())
    if h is None:
        h = max_dist / 15.0
    if not (h > 0):
        raise ValueError(f"bin width must be > 0, got {h}")
    i, j = np.triu_indices(data.n, k=1)
    v = 0.5 * (resid[i] - resid[j]) ** 2
    keep = (d > 0) & (d <= max_dist)
    if not np.any(keep):
        raise ValueError("no pair within max_dist; empty variogram")
    # bin k (1-based) collects (k-1) h < u <= k h
    k = np.ceil(d[keep] / h).astype(int)
    v = v[keep]
    nbins = int(k.max())
    counts = np.bincount(k, minlength=nbins + 1)[1:]
    sums = np.bincount(k, weights=v, minlength=nbins + 1)[1:]
    nonzero = counts > 0
    mids = (np.arange(1, nbins + 1) - 0.5) * h
    return EmpiricalVariogram(
        bin_width=float(h),
        midpoints=mids[nonzero],
        ordinates=sums[nonzero] / counts[nonzero],
        counts=counts[nonzero],
    )


def practical_range(kind: CorrelationKind, phi: float, level: float = 0.05) -> float:
    """Distance at which the correlation falls to `level`, by bracketed root-finding."""
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must be in (0, 1), got {level}")
    hi = phi
    while correlation(kind, hi, phi) > level:
        hi *= 2.0
        if hi > 1e12 * phi:
            raise ArithmeticError("practical range bracket expansion failed")
    return float(
        brentq(lambda u: correlation(kind, u, phi) - level, 0.0, hi, xtol=1e-8 * phi)
    )
