"""Simulation-study harness: generate locations, simulate the process, mask
the coordinates, fit a panel of estimators, and aggregate bias/RMSE.

Protocol per replicate: draw a homogeneous Poisson number of uniform
locations over a rectangle, simulate the Gaussian outcome at the true
locations with mean zero, displace the coordinates with Gaussian geomasking
of magnitude delta = r * phi, then hand the masked dataset to each method.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .geomask import PositionalErrorSpec, mask_locations, pair_distance_scale
from .inference import CLConfig, _mom_init, cl_fit, geonaive_fit, wls_variogram_fit
from .spatial import CorrelationKind, GeoDataset, ModelParams, correlation, empirical_variogram

METHOD_TAGS = ("variogNaive", "variogAdj", "geoNaive", "CL", "ACL1", "ACL2")
STUDY_PARAMS = ("sigma2", "phi", "tau2")
ACL1_CUTOFF = 0.05
ACL2_CUTOFF = 5e-6

Region = tuple[tuple[float, float], tuple[float, float]]


@dataclass
class Scenario:
    region: Region
    n: int
    truth: ModelParams
    kind: CorrelationKind
    r_values: tuple[float, ...]
    methods: tuple[str, ...]
    replicates: int
    seed: int
    fixed_count: bool = False
    cl_nodes: int = 64

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"expected point count must be >= 2, got {self.n}")
        if self.replicates < 1:
            raise ValueError(f"need at least one replicate, got {self.replicates}")
        if any(r <= 0 for r in self.r_values):
            raise ValueError(f"r values must be positive, got {self.r_values}")
        unknown = set(self.methods) - set(METHOD_TAGS)
        if unknown:
            raise ValueError(f"unknown method tags: {sorted(unknown)}")
        (x0, x1), (y0, y1) = self.region
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate region {self.region}")


@dataclass
class StudyResult:
    """Bias/RMSE table: cells[(method, r, param)] = (bias, rmse, replicates, failures)."""

    scenario: Scenario
    cells: dict[tuple[str, float, str], tuple[float, float, int, int]]

    def __post_init__(self):
        for key, (bias, rmse, nrep, fails) in self.cells.items():
            if nrep > 0 and rmse < abs(bias) - 1e-12:
                raise AssertionError(f"rmse < |bias| at cell {key}: {rmse} < {abs(bias)}")

    def to_csv(self) -> str:
        lines = ["method,r,param,bias,rmse,failures"]
        for method in self.scenario.methods:
            for r in self.scenario.r_values:
                for param in STUDY_PARAMS:
                    bias, rmse, _, fails = self.cells[(method, r, param)]
                    lines.append(f"{method},{r!r},{param},{bias!r},{rmse!r},{fails}")
        return "\n".join(lines) + "\n"


def generate_locations(
    region: Region, n: int, rng: np.random.Generator, *, fixed_count: bool = False
) -> np.ndarray:
    """Homogeneous Poisson process with expected count n over a rectangle.

    Counts below 2 give a degenerate dataset and are redrawn.  fixed_count
    replaces the Poisson draw with exactly n points (binomial process).
    """
    (x0, x1), (y0, y1) = region
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate region {region}")
    count = n if fixed_count else int(rng.poisson(n))
    while count < 2:
        count = int(rng.poisson(n))
    pts = rng.uniform(size=(count, 2))
    pts[:, 0] = x0 + (x1 - x0) * pts[:, 0]
    pts[:, 1] = y0 + (y1 - y0) * pts[:, 1]
    return pts


def _gp_outcomes(
    coords: np.ndarray,
    params: ModelParams,
    kind: CorrelationKind,
    rng: np.random.Generator,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """S(x) + noise at the given coordinates, mean zero.

    The noise variance is tau2 (or tau2 / w_i when per-record weights are
    given).  Cholesky failure triggers a single jitter retry with 1e-10*sigma2
    added to the diagonal before raising.
    """
    n = coords.shape[0]
    diff = coords[:, None, :] - coords[None, :, :]
    u = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    cov = params.sigma2 * correlation(kind, u, params.phi)
    try:
        lower = cholesky(cov, lower=True)
    except LinAlgError:
        cov[np.diag_indices(n)] += 1e-10 * params.sigma2
        lower = cholesky(cov, lower=True)
    s = lower @ rng.standard_normal(n)
    if params.tau2 > 0:
        w = np.ones(n) if weights is None else weights
        s = s + rng.standard_normal(n) * np.sqrt(params.tau2 / w)
    return s


def simulate_gp(
    coords: np.ndarray, truth: ModelParams, kind: CorrelationKind, rng: np.random.Generator
) -> np.ndarray:
    """Zero-mean Gaussian outcome at the coordinates: L z + Normal(0, tau2) noise."""
    return _gp_outcomes(coords, truth, kind, rng)


def _fit_one_method(method, data, kind, pair_scale, truth, cl_nodes, ev_cache):
    """One (method, dataset) fit; returns (sigma2, phi, tau2) or None on failure."""
    init = _mom_init(data, kind)
    if method in ("variogNaive", "variogAdj"):
        if "ev" not in ev_cache:
            beta_ols = np.linalg.lstsq(data.covariates, data.y, rcond=None)[0]
            ev_cache["ev"] = empirical_variogram(data, beta_ols)
        fr = wls_variogram_fit(
            ev_cache["ev"], kind, corrected=(method == "variogAdj"),
            pair_scale=pair_scale, init=init,
        )
    elif method == "geoNaive":
        fr = geonaive_fit(data, kind, init=init, ci=False)
    else:
        cutoff = {"CL": None, "ACL1": ACL1_CUTOFF, "ACL2": ACL2_CUTOFF}[method]
        cfg = CLConfig(pair_scale=pair_scale, n_nodes=cl_nodes, corr_cutoff=cutoff)
        fr = cl_fit(data, kind, cfg, init=init, ci_method="none")
    if not fr.converged:
        return None
    return (fr.params.sigma2, fr.params.phi, fr.params.tau2)


def _study_rep(args):
    (region, n, fixed_count, truth_t, kappa, kind, r, methods, cl_nodes, seed_key) = args
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    truth = ModelParams(
        beta=np.asarray(truth_t[0]), sigma2=truth_t[1], phi=truth_t[2], tau2=truth_t[3],
        kappa=kappa,
    )
    coords_true = generate_locations(region, n, rng, fixed_count=fixed_count)
    y = simulate_gp(coords_true, truth, kind, rng)
    delta = r * truth.phi
    spec = PositionalErrorSpec(kind="gaussian", delta=delta)
    coords_obs = mask_locations(coords_true, spec, rng)
    data = GeoDataset(coords=coords_obs, y=y)
    pair_scale = pair_distance_scale(spec)
    ev_cache: dict = {}
    out = {}
    for method in methods:
        try:
            out[method] = _fit_one_method(
                method, data, kind, pair_scale, truth, cl_nodes, ev_cache
            )
        except (LinAlgError, ValueError, ArithmeticError):
            out[method] = None
    return out


def run_study(sc: Scenario, *, workers: int = 1) -> StudyResult:
    """Run the full replicate grid and aggregate bias and RMSE per cell.

    Non-converged or erroring fits are excluded from the aggregates and
    counted as failures.  Results are bit-for-bit reproducible for a fixed
    Scenario regardless of the worker count: each replicate owns a random
    stream derived from (seed, r index, replicate index) and aggregation
    order is fixed.
    """
    truth_t = (sc.truth.beta.tolist(), sc.truth.sigma2, sc.truth.phi, sc.truth.tau2)
    tasks = []
    for ri, r in enumerate(sc.r_values):
        for rep in range(sc.replicates):
            seed_key = (sc.seed, ri, rep)
            tasks.append(
                (sc.region, sc.n, sc.fixed_count, truth_t, sc.truth.kappa, sc.kind,
                 float(r), sc.methods, sc.cl_nodes, seed_key)
            )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_study_rep, tasks, chunksize=1))
    else:
        results = [_study_rep(t) for t in tasks]

    truth_vals = {"sigma2": sc.truth.sigma2, "phi": sc.truth.phi, "tau2": sc.truth.tau2}
    cells = {}
    for ri, r in enumerate(sc.r_values):
        block = results[ri * sc.replicates : (ri + 1) * sc.replicates]
        for method in sc.methods:
            ests = [rep[method] for rep in block if rep[method] is not None]
            failures = sc.replicates - len(ests)
            for pi, param in enumerate(STUDY_PARAMS):
                if ests:
                    err = np.array([e[pi] for e in ests]) - truth_vals[param]
                    bias = float(np.mean(err))
                    rmse = float(np.sqrt(np.mean(err**2)))
                else:
                    bias = rmse = math.nan
                cells[(method, float(r), param)] = (bias, rmse, len(ests), failures)
    return StudyResult(scenario=sc, cells=cells)
