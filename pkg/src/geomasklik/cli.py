"""Command-line interface.

Subcommands: fit | variogram | mask-check | study | gen-synthetic.

Settings come from an INI config file (one section per subcommand) with
command-line flags taking precedence over the file and the file over
built-in defaults.  All data interchange is headered UTF-8 CSV with '.' as
the decimal separator; distances are planar Euclidean in the coordinate
units of the input (projection is the caller's responsibility).  Every
command is deterministic given its settings and seed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from .geomask import PositionalErrorSpec, approximation_check, pair_distance_scale
from .inference import CLConfig, FitResult, _mom_init, cl_fit, geonaive_fit, wls_variogram_fit
from .simstudy import METHOD_TAGS, Scenario, run_study, _gp_outcomes
from .spatial import (
    GaussianLimit,
    GeoDataset,
    Matern,
    ModelParams,
    corrected_variogram,
    empirical_variogram,
    practical_range,
    true_variogram,
)


class CliError(Exception):
    """User-facing configuration or input error; message only, no traceback."""


# ---------------------------------------------------------------------------
# option plumbing: flag > config file > built-in default


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip())


def _strs(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in str(text).split(",") if tok.strip())


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _resolve(args: argparse.Namespace, section: str, schema: dict) -> dict:
    """Merge flag values, config-file section and defaults per the schema.

    schema: key -> (default, cast).  Flags arrive pre-cast by argparse; file
    values are cast here.  Returns the effective settings dict.
    """
    file_vals: dict = {}
    if args.config is not None:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise CliError(f"config file not found: {args.config}")
        if parser.has_section(section):
            file_vals = dict(parser.items(section))
    out = {}
    for key, (default, cast) in schema.items():
        val = getattr(args, key, None)
        if val is None and key in file_vals:
            try:
                val = cast(file_vals[key])
            except ValueError as exc:
                raise CliError(f"config [{section}] {key}: {exc}") from exc
        if val is None:
            val = default
        out[key] = val
    return out


def _require(settings: dict, key: str, command: str):
    if settings[key] is None:
        raise CliError(f"{command}: missing required setting '{key.replace('_', '-')}'")
    return settings[key]


def _correlation_kind(settings: dict):
    kind_name = settings["kind"]
    if kind_name == "gaussian":
        return GaussianLimit()
    if kind_name == "matern":
        return Matern(kappa=settings["kappa"])
    raise CliError(f"unknown correlation kind {kind_name!r} (use 'matern' or 'gaussian')")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _report_text(title: str, settings: dict, body_lines: list[str]) -> str:
    lines = [title, "=" * len(title), "", "settings:"]
    for key in sorted(settings):
        lines.append(f"  {key} = {settings[key]}")
    lines.append("")
    lines.extend(body_lines)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dataset ingestion


def _parse_float(token: str, column: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise CliError(
            f"line {line_no}: could not parse {token!r} in column '{column}'"
        ) from None


def read_dataset_csv(path: str):
    """Read a point dataset CSV: columns x, y, outcome, optional weight and
    delta, all remaining columns treated as covariates.

    Returns (coords, outcome, weights, deltas, covariates, covariate_names);
    weights/deltas are None when the column is absent.  Errors carry the
    1-based line number of the offending row.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot open input: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError("empty input: no header row") from None
        header = [name.strip() for name in header]
        for required in ("x", "y", "outcome"):
            if required not in header:
                raise CliError(f"input is missing required column '{required}'")
        idx = {name: k for k, name in enumerate(header)}
        if len(idx) != len(header):
            raise CliError("duplicate column names in header")
        special = {"x", "y", "outcome", "weight", "delta"}
        cov_names = [name for name in header if name not in special]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not tok.strip() for tok in row):
                continue
            if len(row) != len(header):
                raise CliError(
                    f"line {line_no}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append(
                [_parse_float(tok, header[k], line_no) for k, tok in enumerate(row)]
            )
    if len(rows) < 2:
        raise CliError(f"need at least 2 data rows, got {len(rows)}")
    table = np.asarray(rows, dtype=float)
    coords = table[:, [idx["x"], idx["y"]]]
    outcome = table[:, idx["outcome"]]
    weights = table[:, idx["weight"]] if "weight" in idx else None
    deltas = table[:, idx["delta"]] if "delta" in idx else None
    covs = np.column_stack(
        [np.ones(table.shape[0])] + [table[:, idx[name]] for name in cov_names]
    )
    return coords, outcome, weights, deltas, covs, ["intercept"] + cov_names


def _per_pair_scales(deltas: np.ndarray, mask_kind: str) -> np.ndarray:
    """Rice scale per pair (pdist order) from per-record masking magnitudes.

    Both endpoints are treated as displaced: Gaussian gives
    sqrt(delta_i^2 + delta_j^2); the uniform-disc law is variance-matched to
    sqrt((delta_i^2 + delta_j^2) / 6).
    """
    i, j = np.triu_indices(deltas.size, k=1)
    ssq = deltas[i] ** 2 + deltas[j] ** 2
    if mask_kind == "gaussian":
        return np.sqrt(ssq)
    return np.sqrt(ssq / 6.0)


def _estimates_csv(result: FitResult) -> str:
    lines = ["parameter,estimate,ci_lower,ci_upper"]
    for name, value in result.estimates().items():
        lo = result.ci_lower.get(name, math.nan)
        hi = result.ci_upper.get(name, math.nan)
        lines.append(f"{name},{value!r},{lo!r},{hi!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# fit


_FIT_SCHEMA = {
    "input": (None, str),
    "output_dir": (".", str),
    "method": ("CL", str),
    "kind": ("matern", str),
    "kappa": (0.5, float),
    "mask_kind": ("gaussian", str),
    "delta": (None, float),
    "endpoint_mode": (None, str),
    "nodes": (500, int),
    "threshold": (math.inf, float),
    "ci": ("bootstrap", str),
    "bootstrap_reps": (200, int),
    "seed": (0, int),
    "threads": (os.cpu_count() or 1, int),
}


def cmd_fit(args) -> int:
    st = _resolve(args, "fit", _FIT_SCHEMA)
    path = _require(st, "input", "fit")
    method = st["method"]
    if method not in METHOD_TAGS:
        raise CliError(f"unknown method {method!r}; choose one of {', '.join(METHOD_TAGS)}")
    kind = _correlation_kind(st)
    coords, outcome, weights, deltas, covs, cov_names = read_dataset_csv(path)
    data = GeoDataset(coords=coords, y=outcome, covariates=covs, nugget_weights=weights)
    out_dir = Path(st["output_dir"])
    notes: list[str] = []

    needs_mask = method in ("variogAdj", "CL", "ACL1", "ACL2")
    spec = None
    pair_scales = None
    pair_scale = None
    if needs_mask:
        if deltas is not None:
            if st["mask_kind"] not in ("gaussian", "uniform"):
                raise CliError(f"unknown mask-kind {st['mask_kind']!r}")
            pair_scales = _per_pair_scales(deltas, st["mask_kind"])
            notes.append(
                "per-record delta column in use: pair-level Rice scale "
                "sqrt(delta_i^2 + delta_j^2) (Gaussian; /6 inside the root for "
                "uniform-disc), an extension of the single-delta formulas"
            )
        else:
            if st["delta"] is None:
                raise CliError(
                    f"method {method} needs positional-error magnitude: "
                    "set --delta or provide a 'delta' column"
                )
            spec = PositionalErrorSpec(
                kind=st["mask_kind"],
                delta=st["delta"],
                endpoint_mode=st["endpoint_mode"] or "",
            )
            pair_scale = pair_distance_scale(spec)
            if spec.kind == "uniform":
                notes.append(
                    "uniform-disc masking handled through its variance-matched "
                    "Rice (Gaussian-counterpart) pair-distance law"
                )

    init = _mom_init(data, kind)
    if method == "variogNaive" or method == "variogAdj":
        if method == "variogAdj" and pair_scales is not None:
            raise CliError(
                "variogAdj needs a single delta; per-record delta columns are "
                "only supported by CL/ACL1/ACL2"
            )
        beta_ols = np.linalg.lstsq(data.covariates, data.y, rcond=None)[0]
        ev = empirical_variogram(data, beta_ols)
        result = wls_variogram_fit(
            ev,
            kind,
            corrected=(method == "variogAdj"),
            pair_scale=pair_scale if pair_scale is not None else 1.0,
            init=init,
        )
        result.params.beta = beta_ols
        notes.append("beta reported from ordinary least squares (variogram methods)")
        _write(out_dir / "variogram.csv", ev.to_csv())
    elif method == "geoNaive":
        result = geonaive_fit(data, kind, init=init, ci=True)
    else:
        cutoff = {"CL": None, "ACL1": 0.05, "ACL2": 5e-6}[method]
        cfg = CLConfig(
            pair_scale=pair_scale if pair_scale is not None else 1.0,
            n_nodes=st["nodes"],
            threshold=st["threshold"],
            corr_cutoff=cutoff,
            pair_scales=pair_scales,
        )
        ci = st["ci"]
        if ci == "bootstrap" and pair_scales is not None:
            raise CliError(
                "bootstrap CIs are not available with a per-record delta column; "
                "use --ci hessian or --ci none"
            )
        result = cl_fit(
            data,
            kind,
            cfg,
            init=init,
            method_label=method,
            ci_method=ci,
            mask_spec=spec,
            n_boot=st["bootstrap_reps"],
            seed=st["seed"],
            workers=st["threads"],
        )
        if "bootstrap_failures" in result.extras:
            notes.append(
                f"bootstrap: {result.extras['bootstrap_failures']} of "
                f"{result.extras['bootstrap_replicates']} replicates failed and "
                "were excluded"
            )

    prange = practical_range(kind, result.params.phi)
    body = [
        f"method = {result.method}",
        f"observations = {data.n}",
        f"covariates = {', '.join(cov_names)}",
        f"converged = {result.converged}",
        f"objective = {result.objective!r}",
        f"objective evaluations = {result.evaluations}",
        "",
        "estimates (95% CI):",
    ]
    for name, value in result.estimates().items():
        lo, hi = result.ci_lower.get(name, math.nan), result.ci_upper.get(name, math.nan)
        body.append(f"  {name} = {value:.6g}  ({lo:.6g}, {hi:.6g})")
    body.append("")
    body.append(f"practical range (correlation 0.05) = {prange:.6g}")
    if result.extras.get("tau2_at_floor"):
        body.append("note: tau2 estimate is at its lower floor (effectively zero)")
    for note in notes:
        body.append(f"note: {note}")
    _write(out_dir / "estimates.csv", _estimates_csv(result))
    _write(out_dir / "report.txt", _report_text("model fit", st, body))
    return 0 if result.converged else 2


# ---------------------------------------------------------------------------
# variogram


_VARIOGRAM_SCHEMA = {
    "input": (None, str),
    "output_dir": (".", str),
    "kind": ("matern", str),
    "kappa": (0.5, float),
    "sigma2": (1.0, float),
    "phi": (None, float),
    "tau2": (0.0, float),
    "r_values": ((0.2, 0.4, 0.6, 0.8, 1.0), _floats),
    "bin_width": (None, float),
    "max_dist": (None, float),
    "grid_max": (None, float),
    "grid_points": (200, int),
    "nodes": (500, int),
}


def cmd_variogram(args) -> int:
    st = _resolve(args, "variogram", _VARIOGRAM_SCHEMA)
    kind = _correlation_kind(st)
    phi = _require(st, "phi", "variogram")
    if any(r <= 0 for r in st["r_values"]):
        raise CliError("r values must be positive")
    params = ModelParams(
        beta=np.zeros(1), sigma2=st["sigma2"], phi=phi, tau2=st["tau2"],
        kappa=st["kappa"] if st["kind"] == "matern" else None,
    )
    out_dir = Path(st["output_dir"])
    grid_max = st["grid_max"]

    if st["input"] is not None:
        coords, outcome, weights, _, covs, _ = read_dataset_csv(st["input"])
        data = GeoDataset(coords=coords, y=outcome, covariates=covs, nugget_weights=weights)
        beta_ols = np.linalg.lstsq(data.covariates, data.y, rcond=None)[0]
        ev = empirical_variogram(data, beta_ols, h=st["bin_width"], max_dist=st["max_dist"])
        _write(out_dir / "variogram.csv", ev.to_csv())
        if grid_max is None:
            grid_max = float(ev.midpoints[-1]) + 0.5 * ev.bin_width
    if grid_max is None:
        grid_max = 1.5 * practical_range(kind, phi)

    u_grid = np.linspace(0.0, grid_max, st["grid_points"])
    columns = [u_grid, true_variogram(params, kind, u_grid)]
    names = ["u", "true"]
    for r in st["r_values"]:
        # Gaussian geomasking of both endpoints: Rice pair scale sqrt(2) r phi
        scale = math.sqrt(2.0) * r * phi
        col = np.array(
            [corrected_variogram(params, kind, float(u), scale, st["nodes"]) for u in u_grid]
        )
        columns.append(col)
        names.append(f"corrected_r{r:g}")
    lines = [",".join(names)]
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    _write(out_dir / "curves.csv", "\n".join(lines) + "\n")
    body = [f"theoretical curves on [0, {grid_max!r}] with {st['grid_points']} points"]
    _write(out_dir / "report.txt", _report_text("variogram", st, body))
    return 0


# ---------------------------------------------------------------------------
# mask-check


_MASK_CHECK_SCHEMA = {
    "output_dir": (".", str),
    "u_values": ((1.0, 5.0, 10.0, 20.0), _floats),
    "deltas": ((2.0, 5.0), _floats),
    "samples": (100_000, int),
    "grid_size": (200, int),
    "detail": (False, _bool),
    "seed": (0, int),
}


def cmd_mask_check(args) -> int:
    st = _resolve(args, "mask-check", _MASK_CHECK_SCHEMA)
    out_dir = Path(st["output_dir"])
    lines = ["u,delta,n_samples,max_cdf_gap"]
    panel = 0
    for delta in st["deltas"]:
        for u in st["u_values"]:
            rng = np.random.default_rng(np.random.SeedSequence((st["seed"], panel)))
            gap, table = approximation_check(
                u, delta, n_samples=st["samples"], rng=rng, grid_size=st["grid_size"]
            )
            lines.append(f"{u!r},{delta!r},{st['samples']},{gap!r}")
            if st["detail"]:
                detail = ["u_grid,empirical_cdf,rice_cdf"]
                detail += [",".join(repr(float(v)) for v in row) for row in table]
                _write(
                    out_dir / f"mask_check_u{u:g}_delta{delta:g}.csv",
                    "\n".join(detail) + "\n",
                )
            panel += 1
    _write(out_dir / "mask_check.csv", "\n".join(lines) + "\n")
    body = [f"{panel} panels checked; see mask_check.csv"]
    _write(out_dir / "report.txt", _report_text("mask-check", st, body))
    return 0


# ---------------------------------------------------------------------------
# study


_STUDY_SCHEMA = {
    "output_dir": (".", str),
    "n": (200, int),
    "replicates": (50, int),
    "r_values": ((0.2, 0.6, 1.0), _floats),
    "methods": (METHOD_TAGS, _strs),
    "sigma2": (1.0, float),
    "phi": (0.25, float),
    "tau2": (0.0, float),
    "kind": ("matern", str),
    "kappa": (0.5, float),
    "region_size": (15.0, float),
    "cl_nodes": (64, int),
    "fixed_count": (False, _bool),
    "seed": (0, int),
    "threads": (os.cpu_count() or 1, int),
}


def cmd_study(args) -> int:
    st = _resolve(args, "study", _STUDY_SCHEMA)
    kind = _correlation_kind(st)
    truth = ModelParams(
        beta=np.zeros(1), sigma2=st["sigma2"], phi=st["phi"], tau2=st["tau2"],
        kappa=st["kappa"] if st["kind"] == "matern" else None,
    )
    sc = Scenario(
        region=((0.0, st["region_size"]), (0.0, st["region_size"])),
        n=st["n"],
        truth=truth,
        kind=kind,
        r_values=tuple(st["r_values"]),
        methods=tuple(st["methods"]),
        replicates=st["replicates"],
        seed=st["seed"],
        fixed_count=st["fixed_count"],
        cl_nodes=st["cl_nodes"],
    )
    try:
        result = run_study(sc, workers=st["threads"])
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out_dir = Path(st["output_dir"])
    _write(out_dir / "study.csv", result.to_csv())
    total_fail = sum(cell[3] for cell in result.cells.values())
    body = [
        f"replicates per r = {sc.replicates}",
        f"total failed fits across cells = {total_fail}",
        "see study.csv for the bias/RMSE table",
    ]
    _write(out_dir / "report.txt", _report_text("simulation study", st, body))
    return 0


# ---------------------------------------------------------------------------
# gen-synthetic


_GEN_SCHEMA = {
    "output_dir": (".", str),
    "clusters": (384, int),
    "urban": (122, int),
    "children_mean": (10.0, float),
    "delta_urban": (2.0, float),
    "delta_rural": (5.0, float),
    "beta0": (-1.16, float),
    "sigma2": (0.2, float),
    "phi": (26.0, float),
    "tau2": (0.46, float),
    "kind": ("matern", str),
    "kappa": (0.5, float),
    "region_size": (350.0, float),
    "seed": (0, int),
}


def cmd_gen_synthetic(args) -> int:
    """Generate a synthetic cluster-survey dataset matching the application
    schema: per-cluster mean outcomes, per-cluster child counts as nugget
    weights, uniform-disc masking with a smaller urban and larger rural
    maximum displacement, and a 'delta' column recording each cluster's
    masking magnitude."""
    st = _resolve(args, "gen-synthetic", _GEN_SCHEMA)
    if not (0 <= st["urban"] <= st["clusters"]):
        raise CliError("urban cluster count must be between 0 and the total")
    kind = _correlation_kind(st)
    truth = ModelParams(
        beta=np.array([st["beta0"]]), sigma2=st["sigma2"], phi=st["phi"], tau2=st["tau2"],
        kappa=st["kappa"] if st["kind"] == "matern" else None,
    )
    rng = np.random.default_rng(st["seed"])
    n = st["clusters"]
    coords_true = rng.uniform(0.0, st["region_size"], (n, 2))
    weights = 1.0 + rng.poisson(max(st["children_mean"] - 1.0, 0.0), n)
    outcome = truth.beta[0] + _gp_outcomes(coords_true, truth, kind, rng, weights)
    is_urban = np.zeros(n, dtype=bool)
    is_urban[rng.permutation(n)[: st["urban"]]] = True
    deltas = np.where(is_urban, st["delta_urban"], st["delta_rural"])
    radius = rng.uniform(0.0, 1.0, n) * deltas
    angle = rng.uniform(0.0, 2.0 * np.pi, n)
    coords = coords_true + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    lines = ["x,y,outcome,weight,delta"]
    for k in range(n):
        lines.append(
            f"{float(coords[k, 0])!r},{float(coords[k, 1])!r},{float(outcome[k])!r},"
            f"{int(weights[k])},{float(deltas[k])!r}"
        )
    out_dir = Path(st["output_dir"])
    _write(out_dir / "synthetic.csv", "\n".join(lines) + "\n")
    body = [
        f"clusters = {n} ({st['urban']} urban, {n - st['urban']} rural)",
        f"true beta0 = {float(truth.beta[0])!r}",
        f"true sigma2 = {truth.sigma2!r}",
        f"true phi = {truth.phi!r}",
        f"true tau2 = {truth.tau2!r}",
        "masking: uniform-disc, delta column records the per-cluster maximum "
        "displacement",
    ]
    _write(out_dir / "report.txt", _report_text("synthetic data", st, body))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub):
    sub.add_argument("--config", help="INI config file; section name = subcommand")
    sub.add_argument("--output-dir", dest="output_dir", help="directory for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomasklik",
        description="geostatistical model estimation under geomasking",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fit", help="fit a model to a point dataset CSV")
    _add_common(p)
    p.add_argument("--input", help="CSV with columns x, y, outcome [, weight, delta, covariates...]")
    p.add_argument("--method", choices=METHOD_TAGS, help="estimator (default CL)")
    p.add_argument("--kind", choices=("matern", "gaussian"), help="correlation family")
    p.add_argument("--kappa", type=float, help="Matern shape (fixed, default 0.5)")
    p.add_argument("--mask-kind", dest="mask_kind", choices=("gaussian", "uniform"))
    p.add_argument("--delta", type=float, help="positional-error magnitude")
    p.add_argument("--endpoint-mode", dest="endpoint_mode", choices=("single", "double"))
    p.add_argument("--nodes", type=int, help="QMC nodes for the pair integral (default 500)")
    p.add_argument("--threshold", type=float, help="independence distance threshold")
    p.add_argument("--ci", choices=("bootstrap", "hessian", "none"))
    p.add_argument("--bootstrap-reps", dest="bootstrap_reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("variogram", help="empirical variogram and theoretical curves")
    _add_common(p)
    p.add_argument("--input", help="optional dataset CSV for the empirical variogram")
    p.add_argument("--kind", choices=("matern", "gaussian"))
    p.add_argument("--kappa", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--tau2", type=float)
    p.add_argument("--r-values", dest="r_values", type=_floats, help="comma-separated r = delta/phi")
    p.add_argument("--bin-width", dest="bin_width", type=float)
    p.add_argument("--max-dist", dest="max_dist", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--nodes", type=int)
    p.set_defaults(func=cmd_variogram)

    p = subs.add_parser("mask-check", help="uniform-vs-Rice pair-distance CDF gap")
    _add_common(p)
    p.add_argument("--u-values", dest="u_values", type=_floats)
    p.add_argument("--deltas", type=_floats)
    p.add_argument("--samples", type=int)
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--detail", action="store_const", const=True, help="write per-panel CDF tables")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_mask_check)

    p = subs.add_parser("study", help="run the bias/RMSE simulation study")
    _add_common(p)
    p.add_argument("--n", type=int, help="expected location count per replicate")
    p.add_argument("--replicates", type=int)
    p.add_argument("--r-values", dest="r_values", type=_floats)
    p.add_argument("--methods", type=_strs)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--tau2", type=float)
    p.add_argument("--kind", choices=("matern", "gaussian"))
    p.add_argument("--kappa", type=float)
    p.add_argument("--region-size", dest="region_size", type=float)
    p.add_argument("--cl-nodes", dest="cl_nodes", type=int)
    p.add_argument("--fixed-count", dest="fixed_count", action="store_const", const=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_study)

    p = subs.add_parser("gen-synthetic", help="generate a synthetic cluster dataset")
    _add_common(p)
    p.add_argument("--clusters", type=int)
    p.add_argument("--urban", type=int)
    p.add_argument("--children-mean", dest="children_mean", type=float)
    p.add_argument("--delta-urban", dest="delta_urban", type=float)
    p.add_argument("--delta-rural", dest="delta_rural", type=float)
    p.add_argument("--beta0", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--tau2", type=float)
    p.add_argument("--kind", choices=("matern", "gaussian"))
    p.add_argument("--kappa", type=float)
    p.add_argument("--region-size", dest="region_size", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
