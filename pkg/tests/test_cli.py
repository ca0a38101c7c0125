"""Command-line surface: ingestion, outputs, determinism, validation."""

import math

import numpy as np
import pytest

from geomasklik.cli import CliError, main, read_dataset_csv
from geomasklik.geomask import PositionalErrorSpec, mask_locations, pair_distance_scale
from geomasklik.inference import CLConfig, cl_fit
from geomasklik.simstudy import simulate_gp
from geomasklik.spatial import GeoDataset, Matern, ModelParams, practical_range


def _write_dataset(path, n=30, seed=0, delta=None, mask=0.3):
    rng = np.random.default_rng(seed)
    coords_true = rng.uniform(0, 8, (n, 2))
    truth = ModelParams(beta=np.array([0.5]), sigma2=1.0, phi=1.0, tau2=0.1, kappa=0.5)
    y = 0.5 + simulate_gp(coords_true, truth, Matern(0.5), rng)
    coords = mask_locations(coords_true, PositionalErrorSpec("gaussian", mask), rng)
    lines = ["x,y,outcome" + (",delta" if delta is not None else "")]
    for k in range(n):
        row = f"{float(coords[k, 0])!r},{float(coords[k, 1])!r},{float(y[k])!r}"
        if delta is not None:
            row += f",{delta[k % len(delta)]!r}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return truth


class TestReadDataset:
    def test_missing_column_named(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("x,y,value\n1,2,3\n4,5,6\n", encoding="utf-8")
        with pytest.raises(CliError, match="outcome"):
            read_dataset_csv(str(f))

    def test_parse_error_carries_line_number(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("x,y,outcome\n1,2,3\n4,oops,6\n", encoding="utf-8")
        with pytest.raises(CliError, match="line 3"):
            read_dataset_csv(str(f))

    def test_covariate_and_weight_columns(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text(
            "x,y,outcome,weight,elev\n0,0,1.0,3,10\n1,0,2.0,5,20\n0,1,0.5,2,30\n",
            encoding="utf-8",
        )
        coords, y, w, deltas, covs, names = read_dataset_csv(str(f))
        assert coords.shape == (3, 2)
        assert w.tolist() == [3.0, 5.0, 2.0]
        assert deltas is None
        assert names == ["intercept", "elev"]
        assert covs[:, 1].tolist() == [10.0, 20.0, 30.0]

    def test_empty_input(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("", encoding="utf-8")
        with pytest.raises(CliError, match="header"):
            read_dataset_csv(str(f))


class TestFitCommand:
    def test_geonaive_reports_practical_range(self, tmp_path):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=30, seed=1)
        out = tmp_path / "out"
        code = main([
            "fit", "--input", str(data), "--method", "geoNaive",
            "--output-dir", str(out),
        ])
        assert code == 0
        est = {}
        for line in (out / "estimates.csv").read_text().strip().splitlines()[1:]:
            name, value, lo, hi = line.split(",")
            est[name] = float(value)
        expected = practical_range(Matern(0.5), est["phi"])
        report = (out / "report.txt").read_text()
        assert f"{expected:.6g}" in report
        assert "geoNaive" in report

    def test_missing_outcome_column_nonzero_exit(self, tmp_path, capsys):
        f = tmp_path / "d.csv"
        f.write_text("x,y,value\n1,2,3\n4,5,6\n", encoding="utf-8")
        code = main(["fit", "--input", str(f), "--method", "geoNaive"])
        assert code != 0
        assert "outcome" in capsys.readouterr().err

    def test_cl_fit_deterministic(self, tmp_path):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=25, seed=2)
        args = [
            "fit", "--input", str(data), "--method", "CL", "--delta", "0.3",
            "--nodes", "16", "--ci", "none", "--seed", "3",
        ]
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(args + ["--output-dir", str(out1)]) == 0
        assert main(args + ["--output-dir", str(out2)]) == 0
        assert (out1 / "estimates.csv").read_bytes() == (out2 / "estimates.csv").read_bytes()

    def test_cl_requires_delta(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=10, seed=3)
        code = main(["fit", "--input", str(data), "--method", "CL", "--ci", "none"])
        assert code == 1
        assert "delta" in capsys.readouterr().err

    def test_per_record_delta_column(self, tmp_path):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=20, seed=4, delta=[0.2, 0.5])
        out = tmp_path / "out"
        code = main([
            "fit", "--input", str(data), "--method", "CL", "--mask-kind", "uniform",
            "--nodes", "16", "--ci", "none", "--output-dir", str(out),
        ])
        assert code == 0
        assert "per-record delta" in (out / "report.txt").read_text()

    def test_config_file_with_flag_override(self, tmp_path):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=15, seed=5)
        cfg = tmp_path / "run.ini"
        cfg.write_text(
            f"[fit]\ninput = {data}\nmethod = geoNaive\nkappa = 1.5\n", encoding="utf-8"
        )
        out = tmp_path / "out"
        # flag overrides the config file's kappa
        code = main([
            "fit", "--config", str(cfg), "--kappa", "0.5", "--output-dir", str(out),
        ])
        assert code == 0
        assert "kappa = 0.5" in (out / "report.txt").read_text()


class TestVariogramCommand:
    def test_small_r_curve_matches_true(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "variogram", "--phi", "0.5", "--sigma2", "1.0", "--tau2", "0.1",
            "--r-values", "1e-9,0.6", "--grid-points", "25", "--nodes", "64",
            "--output-dir", str(out),
        ])
        assert code == 0
        lines = (out / "curves.csv").read_text().strip().splitlines()
        header = lines[0].split(",")
        i_true, i_r0 = header.index("true"), header.index("corrected_r1e-09")
        for line in lines[1:]:
            vals = [float(tok) for tok in line.split(",")]
            assert vals[i_r0] == pytest.approx(vals[i_true], abs=1e-6)

    def test_empirical_csv_from_input(self, tmp_path):
        data = tmp_path / "d.csv"
        _write_dataset(data, n=25, seed=6)
        out = tmp_path / "out"
        code = main([
            "variogram", "--input", str(data), "--phi", "1.0",
            "--grid-points", "10", "--nodes", "32", "--output-dir", str(out),
        ])
        assert code == 0
        assert (out / "variogram.csv").read_text().startswith("u_k,v_k,n_k")

    def test_empty_input_rejected(self, tmp_path, capsys):
        f = tmp_path / "d.csv"
        f.write_text("x,y,outcome\n", encoding="utf-8")
        code = main(["variogram", "--input", str(f), "--phi", "1.0"])
        assert code == 1


class TestMaskCheckCommand:
    def test_single_cell(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "mask-check", "--u-values", "5", "--deltas", "2", "--samples", "20000",
            "--output-dir", str(out), "--seed", "0",
        ])
        assert code == 0
        lines = (out / "mask_check.csv").read_text().strip().splitlines()
        assert len(lines) == 2
        gap = float(lines[1].split(",")[3])
        assert 0 < gap < 0.05

    def test_sample_floor_rejected(self, tmp_path, capsys):
        code = main([
            "mask-check", "--samples", "5000", "--output-dir", str(tmp_path / "o"),
        ])
        assert code == 1


class TestStudyCommand:
    def test_single_replicate_identity_via_csv(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "study", "--n", "40", "--replicates", "1", "--r-values", "0.6",
            "--methods", "geoNaive", "--seed", "11", "--output-dir", str(out),
        ])
        assert code == 0
        for line in (out / "study.csv").read_text().strip().splitlines()[1:]:
            _, _, _, bias, rmse, fails = line.split(",")
            if int(fails) == 0:
                assert float(rmse) == pytest.approx(abs(float(bias)), rel=1e-12)

    def test_unknown_method_rejected(self, tmp_path, capsys):
        code = main([
            "study", "--methods", "geoNaive,kriging", "--output-dir", str(tmp_path / "o"),
        ])
        assert code == 1
        assert "kriging" in capsys.readouterr().err


class TestGenSynthetic:
    def test_schema_and_composition(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "gen-synthetic", "--clusters", "50", "--urban", "15",
            "--region-size", "100", "--seed", "4", "--output-dir", str(out),
        ])
        assert code == 0
        lines = (out / "synthetic.csv").read_text().strip().splitlines()
        assert lines[0] == "x,y,outcome,weight,delta"
        assert len(lines) == 51
        deltas = [float(line.split(",")[4]) for line in lines[1:]]
        assert deltas.count(2.0) == 15
        assert deltas.count(5.0) == 35

    def test_pipeline_into_fit(self, tmp_path):
        gen = tmp_path / "gen"
        assert main([
            "gen-synthetic", "--clusters", "30", "--urban", "10", "--phi", "20",
            "--region-size", "100", "--seed", "8", "--output-dir", str(gen),
        ]) == 0
        out = tmp_path / "fit"
        code = main([
            "fit", "--input", str(gen / "synthetic.csv"), "--method", "CL",
            "--mask-kind", "uniform", "--nodes", "16", "--ci", "none",
            "--output-dir", str(out),
        ])
        assert code in (0, 2)
        assert (out / "estimates.csv").exists()


class TestBootstrapCoverage:
    def test_ci_covers_truth_across_seeds(self):
        """Parametric-bootstrap CI for the intercept covers the truth in most
        of 20 independent synthetic datasets.

        At n = 24 with range 1 on an 8 x 8 region there are only a handful of
        effectively independent patches, so the nominal 95% interval genuinely
        undercovers (measured ~70%); the floor here is set to catch gross CI
        bugs (zero-width or unbounded intervals), not to certify calibration.
        """
        truth = ModelParams(beta=np.array([0.5]), sigma2=1.0, phi=1.0, tau2=0.0, kappa=0.5)
        spec = PositionalErrorSpec("gaussian", 0.3)
        scale = pair_distance_scale(spec)
        covered = 0
        usable = 0
        widths = []
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            coords_true = rng.uniform(0, 8, (24, 2))
            y = 0.5 + simulate_gp(coords_true, truth, Matern(0.5), rng)
            data = GeoDataset(coords=mask_locations(coords_true, spec, rng), y=y)
            cfg = CLConfig(pair_scale=scale, n_nodes=16)
            fr = cl_fit(
                data, Matern(0.5), cfg, ci_method="bootstrap",
                mask_spec=spec, n_boot=39, seed=seed,
            )
            if not math.isfinite(fr.ci_lower["beta0"]):
                continue
            usable += 1
            widths.append(fr.ci_upper["beta0"] - fr.ci_lower["beta0"])
            if fr.ci_lower["beta0"] <= truth.beta[0] <= fr.ci_upper["beta0"]:
                covered += 1
        assert usable >= 15
        assert covered / usable >= 0.6
        assert 0.1 < float(np.median(widths)) < 10.0
