"""Estimators for the linear Gaussian model under geomasking.

Methods
-------
* variogram weighted least squares, naive or corrected for positional error
  (:func:`wls_variogram_fit`);
* full-likelihood maximum likelihood that ignores positional error
  (:func:`geonaive_fit`);
* pairwise composite likelihood with quasi-Monte-Carlo integration over the
  Rice law of the perturbed pair distance (:func:`cl_fit`), with optional
  distance thresholding driven by a correlation cutoff (the ACL variants);
* the Monte-Carlo full likelihood (:func:`mcfl_loglik`), kept as a small-n
  oracle only.

All simplex searches run on log-transformed variance/scale parameters and
declare convergence when the simplex diameter falls below 1e-6 in that
space, restarting up to three times from a perturbed start on failure.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError
from scipy.optimize import minimize
from scipy.spatial.distance import squareform

from ._clkernel import _CORR_CAP, head_sum
from .geomask import PositionalErrorSpec, mask_locations, pair_distance_scale
from .rice import rice_quantile_matrix, rice_quantile_nodes
from .spatial import (
    CorrelationKind,
    EmpiricalVariogram,
    GaussianLimit,
    GeoDataset,
    Matern,
    ModelParams,
    correlation,
    empirical_variogram,
    gaussian_masked_correlation_closed_form,
)
from .specialfn import halton_nodes

_TAU2_FLOOR_FRAC = 1e-10
PARAM_NAMES = ("sigma2", "phi", "tau2")


@dataclass
class CLConfig:
    """Composite-likelihood settings.

    n_nodes: QMC node count B.  threshold: fixed distance beyond which pairs
    are treated as independent (inf = never).  corr_cutoff: if set, the
    threshold is instead found by inverting the outcome correlation
    sigma^2 rho_bar(u) / (sigma^2 + tau^2) at this cutoff at every parameter
    evaluation.  pair_scale: Rice scale of [U* | u]; pair_scales optionally
    gives a per-pair scale (heterogeneous masking).
    """

    pair_scale: float
    n_nodes: int = 500
    threshold: float = math.inf
    corr_cutoff: float | None = None
    pair_scales: np.ndarray | None = None

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"need at least one QMC node, got {self.n_nodes}")
        if not (self.threshold > 0):
            raise ValueError(f"threshold must be > 0, got {self.threshold}")
        if self.pair_scales is None and not (self.pair_scale > 0):
            raise ValueError(f"pair_scale must be > 0, got {self.pair_scale}")


@dataclass
class FitResult:
    """Point estimates, 95% confidence bounds, objective and diagnostics."""

    params: ModelParams
    ci_lower: dict[str, float]
    ci_upper: dict[str, float]
    objective: float
    method: str
    converged: bool
    evaluations: int
    extras: dict = field(default_factory=dict)

    def estimates(self) -> dict[str, float]:
        out = {f"beta{i}": float(b) for i, b in enumerate(self.params.beta)}
        out["sigma2"] = self.params.sigma2
        out["phi"] = self.params.phi
        out["tau2"] = self.params.tau2
        return out


# ---------------------------------------------------------------------------
# simplex driver


def _simplex(fn, x0, *, xatol=1e-6, maxfev=4000, restarts=3, seed=0):
    """Nelder-Mead with convergence on simplex diameter only, plus restarts."""
    rng = np.random.default_rng(seed)
    x0 = np.asarray(x0, dtype=float)
    best = None
    evals = 0
    for attempt in range(restarts + 1):
        res = minimize(
            fn,
            x0,
            method="Nelder-Mead",
            options={"xatol": xatol, "fatol": 1e308, "maxfev": maxfev, "maxiter": maxfev},
        )
        evals += res.nfev
        if best is None or res.fun < best.fun:
            best = res
        if res.success:
            return best, evals, True
        x0 = best.x + 0.25 * rng.standard_normal(x0.size)
    return best, evals, bool(best.success)


# ---------------------------------------------------------------------------
# exact Gaussian likelihood


def _covariance(data: GeoDataset, params: ModelParams, kind: CorrelationKind) -> np.ndarray:
    rho = correlation(kind, data.pair_distances(), params.phi)
    cov = params.sigma2 * squareform(rho)
    w = data.nugget_weights if data.nugget_weights is not None else np.ones(data.n)
    cov[np.diag_indices(data.n)] = params.sigma2 + params.tau2 / w
    return cov


def gaussian_loglik(data: GeoDataset, params: ModelParams, kind: CorrelationKind) -> float:
    """Exact multivariate-normal log density at the observed coordinates."""
    cov = _covariance(data, params, kind)
    try:
        chol = cho_factor(cov, lower=True)
    except LinAlgError as exc:
        raise LinAlgError(
            f"singular covariance at sigma2={params.sigma2}, phi={params.phi}, "
            f"tau2={params.tau2}"
        ) from exc
    resid = data.y - data.covariates @ params.beta
    alpha = cho_solve(chol, resid)
    logdet = 2.0 * np.sum(np.log(np.diag(chol[0])))
    return float(-0.5 * (data.n * np.log(2 * np.pi) + logdet + resid @ alpha))


def _gls_beta(y, X, chol):
    xt = cho_solve(chol, X)
    beta = np.linalg.solve(X.T @ xt, xt.T @ y)
    return np.atleast_1d(beta)


def _hessian_ci(loglik_full, x_hat, names):
    """95% CIs from the observed-information numerical Hessian (central diffs)."""
    k = x_hat.size
    h = 1e-4 * np.maximum(np.abs(x_hat), 1e-3)
    hess = np.zeros((k, k))
    f0 = loglik_full(x_hat)
    for a in range(k):
        for b in range(a, k):
            xa = np.zeros(k)
            xa[a] = h[a]
            xb = np.zeros(k)
            xb[b] = h[b]
            if a == b:
                val = (loglik_full(x_hat + xa) - 2 * f0 + loglik_full(x_hat - xa)) / h[a] ** 2
            else:
                val = (
                    loglik_full(x_hat + xa + xb)
                    - loglik_full(x_hat + xa - xb)
                    - loglik_full(x_hat - xa + xb)
                    + loglik_full(x_hat - xa - xb)
                ) / (4 * h[a] * h[b])
            hess[a, b] = hess[b, a] = val
    lower = {nm: math.nan for nm in names}
    upper = {nm: math.nan for nm in names}
    try:
        cov = np.linalg.inv(-hess)
        se = np.sqrt(np.diag(cov))
        for nm, x, s in zip(names, x_hat, se):
            if np.isfinite(s):
                lower[nm] = float(x - 1.96 * s)
                upper[nm] = float(x + 1.96 * s)
    except (np.linalg.LinAlgError, FloatingPointError):
        pass
    return lower, upper


def _mom_init(data: GeoDataset, kind: CorrelationKind) -> ModelParams:
    """Method-of-moments start: split residual variance 50/50, phi from the
    distance at which the empirical variogram reaches 63% of its sill."""
    X = data.covariates
    beta = np.linalg.lstsq(X, data.y, rcond=None)[0]
    resid = data.y - X @ beta
    s2 = max(float(np.var(resid)), 1e-12)
    ev = empirical_variogram(data, beta)
    target = 0.63 * s2
    above = np.nonzero(ev.ordinates >= target)[0]
    if above.size:
        phi0 = float(ev.midpoints[above[0]])
    else:
        phi0 = float(ev.midpoints[-1])
    if isinstance(kind, Matern):
        # exponential-family practical ranges differ; crude shape adjustment
        phi0 = max(phi0 / max(1.0, 2.0 * kind.kappa), 1e-6)
    kappa = kind.kappa if isinstance(kind, Matern) else None
    return ModelParams(beta=beta, sigma2=0.5 * s2, phi=max(phi0, 1e-6), tau2=0.5 * s2, kappa=kappa)


def geonaive_fit(
    data: GeoDataset,
    kind: CorrelationKind,
    init: ModelParams | None = None,
    *,
    ci: bool = True,
) -> FitResult:
    """Maximum likelihood ignoring positional error; beta profiled by GLS."""
    if init is None:
        init = _mom_init(data, kind)
    var_y = max(float(np.var(data.y)), 1e-12)
    tau2_floor = _TAU2_FLOOR_FRAC * var_y
    w = data.nugget_weights if data.nugget_weights is not None else np.ones(data.n)
    d = data.pair_distances()
    X, y = data.covariates, data.y

    def unpack(t):
        sigma2 = math.exp(min(t[0], 700.0))
        phi = math.exp(min(t[1], 700.0))
        tau2 = math.exp(min(max(t[2], math.log(tau2_floor)), 700.0))
        return sigma2, phi, tau2

    def neg_profile(t):
        sigma2, phi, tau2 = unpack(t)
        cov = sigma2 * squareform(correlation(kind, d, phi))
        cov[np.diag_indices(data.n)] = sigma2 + tau2 / w
        try:
            chol = cho_factor(cov, lower=True)
        except LinAlgError:
            return 1e300
        beta = _gls_beta(y, X, chol)
        resid = y - X @ beta
        alpha = cho_solve(chol, resid)
        logdet = 2.0 * np.sum(np.log(np.diag(chol[0])))
        return 0.5 * (data.n * np.log(2 * np.pi) + logdet + resid @ alpha)

    t0 = np.log([init.sigma2, init.phi, max(init.tau2, tau2_floor)])
    res, evals, ok = _simplex(neg_profile, t0)
    sigma2, phi, tau2 = unpack(res.x)
    cov = sigma2 * squareform(correlation(kind, d, phi))
    cov[np.diag_indices(data.n)] = sigma2 + tau2 / w
    beta = _gls_beta(y, X, cho_factor(cov, lower=True))
    at_floor = res.x[2] <= math.log(tau2_floor) + 1e-9
    kappa = kind.kappa if isinstance(kind, Matern) else None
    params = ModelParams(beta=beta, sigma2=sigma2, phi=phi, tau2=tau2, kappa=kappa)

    names = [f"beta{i}" for i in range(beta.size)] + list(PARAM_NAMES)
    lower = {nm: math.nan for nm in names}
    upper = {nm: math.nan for nm in names}
    if ci:
        def loglik_full(x):
            p = ModelParams(
                beta=x[: beta.size],
                sigma2=max(x[beta.size], 1e-12),
                phi=max(x[beta.size + 1], 1e-12),
                tau2=max(x[beta.size + 2], 0.0),
                kappa=kappa,
            )
            try:
                return gaussian_loglik(data, p, kind)
            except LinAlgError:
                return -1e300
        x_hat = np.concatenate([beta, [sigma2, phi, tau2]])
        lower, upper = _hessian_ci(loglik_full, x_hat, names)
    return FitResult(
        params=params,
        ci_lower=lower,
        ci_upper=upper,
        objective=float(-res.fun),
        method="geoNaive",
        converged=ok,
        evaluations=evals,
        extras={"tau2_at_floor": bool(at_floor)},
    )


# ---------------------------------------------------------------------------
# variogram weighted least squares


def wls_variogram_fit(
    ev: EmpiricalVariogram,
    kind: CorrelationKind,
    corrected: bool,
    pair_scale: float,
    init: ModelParams,
    *,
    n_nodes: int = 500,
) -> FitResult:
    """Minimize sum_k n_k {v_k - V_Y(u_k; theta)}^2 over theta = (tau2, sigma2, phi).

    corrected=False fits the true variogram (variogNaive); corrected=True
    fits the geomask-corrected variogram with the given Rice pair scale
    (variogAdj).  Confidence intervals are not produced by this method.
    """
    if ev.midpoints.size == 0:
        raise ValueError("empty empirical variogram")
    u_k, v_k, n_k = ev.midpoints, ev.ordinates, ev.counts.astype(float)
    sill = max(float(v_k.max()), 1e-12)
    tau2_floor = _TAU2_FLOOR_FRAC * sill
    if corrected and not isinstance(kind, GaussianLimit):
        s_nodes = halton_nodes(n_nodes)
        Q = np.vstack([rice_quantile_nodes(float(u), pair_scale, s_nodes) for u in u_k])

    def model_variogram(sigma2, phi, tau2):
        if not corrected:
            return tau2 + sigma2 * (1.0 - correlation(kind, u_k, phi))
        if isinstance(kind, GaussianLimit):
            ebar = gaussian_masked_correlation_closed_form(u_k, phi, pair_scale)
        else:
            ebar = correlation(kind, Q, phi).mean(axis=1)
        return tau2 + sigma2 * (1.0 - ebar)

    def unpack(t):
        return (
            math.exp(min(t[0], 700.0)),
            math.exp(min(t[1], 700.0)),
            math.exp(min(max(t[2], math.log(tau2_floor)), 700.0)),
        )

    def objective(t):
        sigma2, phi, tau2 = unpack(t)
        return float(np.sum(n_k * (v_k - model_variogram(sigma2, phi, tau2)) ** 2))

    t0 = np.log([init.sigma2, init.phi, max(init.tau2, tau2_floor)])
    res, evals, ok = _simplex(objective, t0)
    sigma2, phi, tau2 = unpack(res.x)
    at_floor = res.x[2] <= math.log(tau2_floor) + 1e-9
    kappa = kind.kappa if isinstance(kind, Matern) else None
    na = {nm: math.nan for nm in PARAM_NAMES}
    return FitResult(
        params=ModelParams(beta=init.beta, sigma2=sigma2, phi=phi, tau2=tau2, kappa=kappa),
        ci_lower=dict(na),
        ci_upper=dict(na),
        objective=float(res.fun),
        method="variogAdj" if corrected else "variogNaive",
        converged=ok,
        evaluations=evals,
        extras={"tau2_at_floor": bool(at_floor)},
    )


# ---------------------------------------------------------------------------
# composite likelihood


def _biv_logpdf(zi, zj, vi, vj, c):
    det = vi * vj - c**2
    return -np.log(2 * np.pi) - 0.5 * np.log(det) - 0.5 * (
        vj * zi**2 - 2.0 * c * zi * zj + vi * zj**2
    ) / det


def _indep_logpdf(z, v):
    return -0.5 * np.log(2 * np.pi * v) - z**2 / (2.0 * v)


def cl_pair_loglik(
    yi: float,
    yj: float,
    mi: float,
    mj: float,
    u: float,
    params: ModelParams,
    kind: CorrelationKind,
    cfg: CLConfig,
    wi: float = 1.0,
    wj: float = 1.0,
) -> float:
    """Log of the QMC-integrated bivariate density of one pair.

    For u <= threshold: log{(1/B) sum_b phi2(yi, yj; cov = sigma2 rho(U*_b))}
    with U*_b the Rice(u, pair_scale) quantile at the b-th Halton node.
    Beyond the threshold the pair factorizes into independent (mean
    subtracted) normals.
    """
    vi = params.sigma2 + params.tau2 / wi
    vj = params.sigma2 + params.tau2 / wj
    zi, zj = yi - mi, yj - mj
    if u > cfg.threshold:
        return float(_indep_logpdf(zi, vi) + _indep_logpdf(zj, vj))
    s = halton_nodes(cfg.n_nodes)
    q = rice_quantile_nodes(float(u), cfg.pair_scale, s)
    rho = correlation(kind, q, params.phi)
    c = np.minimum(params.sigma2 * rho, _CORR_CAP * math.sqrt(vi * vj))
    lp = _biv_logpdf(zi, zj, vi, vj, c)
    mx = lp.max()
    return float(mx + np.log(np.mean(np.exp(lp - mx))))


class _CLWorkspace:
    """Per-(dataset, config) cache: sorted pair structure and quantile matrices.

    Pairs are grouped by Rice scale (one group unless per-record masking
    magnitudes are in play).  Each group stores its quantile matrix at the
    Halton nodes plus a coarse distance-grid quantile matrix; the grid makes
    averaged correlations (threshold searches, GLS profiling of beta) cheap
    at every parameter evaluation.
    """

    def __init__(self, data: GeoDataset, cfg: CLConfig):
        d = data.pair_distances()
        i, j = np.triu_indices(data.n, k=1)
        order = np.argsort(d, kind="stable")
        self.u = d[order]
        self.i = i[order]
        self.j = j[order]
        self.s_nodes = halton_nodes(cfg.n_nodes)
        if cfg.pair_scales is not None:
            scales = np.asarray(cfg.pair_scales, dtype=float)[order]
        else:
            scales = np.full(self.u.size, float(cfg.pair_scale))
        self.umax = float(self.u.max()) if self.u.size else 0.0
        self.groups = []  # (pair_indices, scale, Q_rows, u_grid, Q_grid)
        for scale in np.unique(scales):
            rows = np.nonzero(scales == scale)[0]
            Q = rice_quantile_matrix(self.u[rows], float(scale), self.s_nodes)
            near = min(15.0 * float(scale), self.umax)
            grid = np.unique(np.concatenate(
                [np.linspace(0.0, near, 48), np.linspace(near, self.umax, 192)]
            ))
            Qg = rice_quantile_matrix(
                grid, float(scale), self.s_nodes, exact_below=grid.size * cfg.n_nodes + 1
            )
            self.groups.append((rows, float(scale), np.ascontiguousarray(Q), grid, Qg))

    @staticmethod
    def mean_rho_grid(Q_grid: np.ndarray, kind, phi: float) -> np.ndarray:
        """Masked-correlation average at the group's distance-grid points."""
        return correlation(kind, Q_grid, phi).mean(axis=1)


def _get_workspace(data: GeoDataset, cfg: CLConfig) -> _CLWorkspace:
    key = (
        cfg.n_nodes,
        float(cfg.pair_scale) if cfg.pair_scales is None else None,
        None if cfg.pair_scales is None else cfg.pair_scales.tobytes(),
    )
    cache = getattr(data, "_cl_workspaces", None)
    if cache is None:
        cache = {}
        data._cl_workspaces = cache
    if key not in cache:
        cache[key] = _CLWorkspace(data, cfg)
    return cache[key]


def _threshold_for(
    ws: _CLWorkspace, grid: np.ndarray, Q_grid: np.ndarray, params: ModelParams, kind, cutoff: float
) -> float:
    """Distance at which sigma2 rho_bar(u) / (sigma2 + tau2) crosses the cutoff.

    rho_bar is monotone decreasing in distance; the crossing is located by
    inverse interpolation on the workspace distance grid.
    """
    target = cutoff * (params.sigma2 + params.tau2) / params.sigma2
    rho_g = ws.mean_rho_grid(Q_grid, kind, params.phi)
    if rho_g[-1] >= target:
        return math.inf
    if rho_g[0] < target:
        return 0.0
    # interp wants increasing abscissae; rho_g decreases along the grid
    return float(np.interp(target, rho_g[::-1], grid[::-1]))


def cl_loglik(
    data: GeoDataset,
    params: ModelParams,
    kind: CorrelationKind,
    cfg: CLConfig,
) -> float:
    """Composite log likelihood: sum over i < j of the pair log density.

    Pairs are processed in ascending-distance order with a fixed reduction
    order, so the value is invariant to observation reordering.
    """
    ws = _get_workspace(data, cfg)
    m = data.covariates @ params.beta
    z = data.y - m
    w = data.nugget_weights if data.nugget_weights is not None else np.ones(data.n)
    v = params.sigma2 + params.tau2 / w
    li = _indep_logpdf(z, v)
    total = 0.0
    for rows, scale, Q, grid, Qg in ws.groups:
        if cfg.corr_cutoff is not None:
            t = _threshold_for(ws, grid, Qg, params, kind, cfg.corr_cutoff)
        else:
            t = cfg.threshold
        u_rows = ws.u[rows]
        nhead = int(np.searchsorted(u_rows, t, side="right"))
        head = rows[:nhead]
        tail = rows[nhead:]
        if head.size:
            gi, gj = ws.i[head], ws.j[head]
            total += head_sum(
                Q[:nhead], z[gi], z[gj], v[gi], v[gj], params.sigma2, params.phi, kind
            )
        if tail.size:
            total += float(np.sum(li[ws.i[tail]]) + np.sum(li[ws.j[tail]]))
    return total


def _corrected_cov_matrix(data, ws, params, kind, cfg):
    """Approximate marginal covariance of Y under masking, for GLS profiling of beta."""
    if isinstance(kind, GaussianLimit) and cfg.pair_scales is None:
        rho_bar = gaussian_masked_correlation_closed_form(ws.u, params.phi, cfg.pair_scale)
        rho_pairs = np.empty_like(rho_bar)
        rho_pairs[:] = rho_bar
    else:
        rho_pairs = np.empty_like(ws.u)
        for rows, scale, Q, grid, Qg in ws.groups:
            rho_pairs[rows] = np.interp(
                ws.u[rows], grid, correlation(kind, Qg, params.phi).mean(axis=1)
            )
    condensed = np.empty(ws.u.size)
    # restore pdist ordering from the sorted pair structure
    idx = ws.i * (2 * data.n - ws.i - 3) // 2 + ws.j - 1
    condensed[idx] = rho_pairs
    cov = params.sigma2 * squareform(condensed)
    w = data.nugget_weights if data.nugget_weights is not None else np.ones(data.n)
    cov[np.diag_indices(data.n)] = params.sigma2 + params.tau2 / w
    return cov


def cl_fit(
    data: GeoDataset,
    kind: CorrelationKind,
    cfg: CLConfig,
    init: ModelParams | None = None,
    *,
    method_label: str | None = None,
    ci_method: str = "bootstrap",
    mask_spec: PositionalErrorSpec | None = None,
    n_boot: int = 200,
    seed: int | None = None,
    workers: int = 1,
) -> FitResult:
    """Maximize the composite likelihood over (beta, sigma2, phi, tau2).

    The simplex runs on log(sigma2, phi, tau2); beta is profiled at every
    evaluation by GLS under the masking-corrected covariance approximation.
    ci_method: "bootstrap" (parametric, simulate + mask + refit, percentile
    interval), "hessian" (naive observed information; composite-likelihood
    Hessians understate variance -- use for diagnostics only), or "none".
    """
    if ci_method not in ("bootstrap", "hessian", "none"):
        raise ValueError(f"unknown ci_method {ci_method!r}")
    if ci_method == "bootstrap" and mask_spec is None:
        raise ValueError("bootstrap CIs need the masking spec to re-mask simulated data")
    if init is None:
        init = _mom_init(data, kind)
    ws = _get_workspace(data, cfg)
    var_y = max(float(np.var(data.y)), 1e-12)
    tau2_floor = _TAU2_FLOOR_FRAC * var_y
    X, y = data.covariates, data.y
    kappa = kind.kappa if isinstance(kind, Matern) else None

    def unpack(t):
        return (
            math.exp(min(t[0], 700.0)),
            math.exp(min(t[1], 700.0)),
            math.exp(min(max(t[2], math.log(tau2_floor)), 700.0)),
        )

    def profile_beta(p: ModelParams) -> np.ndarray:
        try:
            chol = cho_factor(_corrected_cov_matrix(data, ws, p, kind, cfg), lower=True)
            return _gls_beta(y, X, chol)
        except LinAlgError:
            return np.linalg.lstsq(X, y, rcond=None)[0]

    def neg_cl(t):
        sigma2, phi, tau2 = unpack(t)
        p = ModelParams(beta=init.beta, sigma2=sigma2, phi=phi, tau2=tau2, kappa=kappa)
        p.beta = profile_beta(p)
        return -cl_loglik(data, p, kind, cfg)

    t0 = np.log([init.sigma2, init.phi, max(init.tau2, tau2_floor)])
    res, evals, ok = _simplex(neg_cl, t0)
    sigma2, phi, tau2 = unpack(res.x)
    params = ModelParams(beta=init.beta, sigma2=sigma2, phi=phi, tau2=tau2, kappa=kappa)
    params.beta = profile_beta(params)
    at_floor = res.x[2] <= math.log(tau2_floor) + 1e-9
    label = method_label or ("CL" if cfg.corr_cutoff is None else f"ACL({cfg.corr_cutoff:g})")
    names = [f"beta{i}" for i in range(params.beta.size)] + list(PARAM_NAMES)
    lower = {nm: math.nan for nm in names}
    upper = {nm: math.nan for nm in names}
    extras: dict = {"tau2_at_floor": bool(at_floor)}

    if ci_method == "hessian":
        nb = params.beta.size

        def loglik_full(x):
            p = ModelParams(
                beta=x[:nb],
                sigma2=max(x[nb], 1e-12),
                phi=max(x[nb + 1], 1e-12),
                tau2=max(x[nb + 2], 0.0),
                kappa=kappa,
            )
            return cl_loglik(data, p, kind, cfg)

        x_hat = np.concatenate([params.beta, [sigma2, phi, tau2]])
        lower, upper = _hessian_ci(loglik_full, x_hat, names)
    elif ci_method == "bootstrap":
        ests, failures = _cl_bootstrap(
            data, kind, cfg, params, mask_spec, n_boot, seed, workers
        )
        extras["bootstrap_failures"] = failures
        extras["bootstrap_replicates"] = n_boot
        if ests.shape[0] >= 10:
            lo = np.percentile(ests, 2.5, axis=0)
            hi = np.percentile(ests, 97.5, axis=0)
            for k_, nm in enumerate(names):
                lower[nm] = float(lo[k_])
                upper[nm] = float(hi[k_])

    return FitResult(
        params=params,
        ci_lower=lower,
        ci_upper=upper,
        objective=float(-res.fun),
        method=label,
        converged=ok,
        evaluations=evals,
        extras=extras,
    )


def _cl_bootstrap_rep(args):
    (coords, covariates, weights, kind, cfg_fields, spec, psi, seed) = args
    rng = np.random.default_rng(seed)
    from .simstudy import _gp_outcomes

    params = ModelParams(
        beta=np.asarray(psi[0]), sigma2=psi[1], phi=psi[2], tau2=psi[3], kappa=psi[4]
    )
    y_new = covariates @ params.beta + _gp_outcomes(coords, params, kind, rng, weights)
    coords_new = mask_locations(coords, spec, rng)
    boot = GeoDataset(coords=coords_new, y=y_new, covariates=covariates, nugget_weights=weights)
    cfg = CLConfig(
        pair_scale=cfg_fields[0],
        n_nodes=cfg_fields[1],
        threshold=cfg_fields[2],
        corr_cutoff=cfg_fields[3],
        pair_scales=cfg_fields[4],
    )
    try:
        fr = cl_fit(boot, kind, cfg, init=params, ci_method="none")
    except (LinAlgError, ValueError, ArithmeticError):
        return None
    if not fr.converged:
        return None
    return np.concatenate([fr.params.beta, [fr.params.sigma2, fr.params.phi, fr.params.tau2]])


def _cl_bootstrap(data, kind, cfg, params, spec, n_boot, seed, workers):
    ss = np.random.SeedSequence(seed)
    child_seeds = ss.spawn(n_boot)
    psi = (params.beta.tolist(), params.sigma2, params.phi, params.tau2, params.kappa)
    cfg_fields = (cfg.pair_scale, cfg.n_nodes, cfg.threshold, cfg.corr_cutoff, cfg.pair_scales)
    tasks = [
        (data.coords, data.covariates, data.nugget_weights, kind, cfg_fields, spec, psi, s)
        for s in child_seeds
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cl_bootstrap_rep, tasks))
    else:
        results = [_cl_bootstrap_rep(t) for t in tasks]
    good = [r for r in results if r is not None]
    failures = n_boot - len(good)
    return (np.vstack(good) if good else np.empty((0, 0))), failures


# ---------------------------------------------------------------------------
# Monte-Carlo full likelihood (small-n oracle)


def mcfl_loglik(
    data: GeoDataset,
    params: ModelParams,
    kind: CorrelationKind,
    spec: PositionalErrorSpec,
    n_draws: int,
    rng: np.random.Generator,
    *,
    with_se: bool = False,
):
    """Monte-Carlo full likelihood: average the exact likelihood over draws of
    the true locations from the positional-error law around the observed ones.

    O(n_draws * n^3); intended as an oracle for small n (<= 50).
    """
    if data.n > 50:
        raise ValueError("mcfl_loglik is a small-n oracle; n must be <= 50")
    resid = data.y - data.covariates @ params.beta
    w = data.nugget_weights if data.nugget_weights is not None else np.ones(data.n)
    if data.n == 2:
        # vectorized over draws: bivariate normal density in closed form
        c1 = mask_locations(np.broadcast_to(data.coords[0], (n_draws, 2)).copy(), spec, rng)
        c2 = mask_locations(np.broadcast_to(data.coords[1], (n_draws, 2)).copy(), spec, rng)
        u = np.hypot(c1[:, 0] - c2[:, 0], c1[:, 1] - c2[:, 1])
        vi = params.sigma2 + params.tau2 / w[0]
        vj = params.sigma2 + params.tau2 / w[1]
        c = np.minimum(
            params.sigma2 * correlation(kind, u, params.phi),
            _CORR_CAP * math.sqrt(vi * vj),
        )
        ll = _biv_logpdf(resid[0], resid[1], vi, vj, c)
    else:
        ll = np.empty(n_draws)
        for b in range(n_draws):
            coords_b = mask_locations(data.coords, spec, rng)
            db = GeoDataset(
                coords=coords_b, y=data.y, covariates=data.covariates, nugget_weights=data.nugget_weights
            )
            ll[b] = gaussian_loglik(db, params, kind)
    mx = ll.max()
    wgt = np.exp(ll - mx)
    mean_w = float(np.mean(wgt))
    value = float(mx + np.log(mean_w))
    if not with_se:
        return value
    se = float(np.std(wgt, ddof=1) / (mean_w * np.sqrt(n_draws)))
    return value, se
