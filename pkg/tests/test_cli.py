import json

import pytest

from planarwind import DEFAULT_COEFFICIENTS, GridSpec, inductance, read_csv, read_geometry_csv
from planarwind.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def small_spec_file(tmp_path, **overrides):
    spec = GridSpec(
        D1_values=(70.0, 80.0, 90.0, 100.0),
        D2_values=(70.0, 80.0, 90.0, 100.0),
        w_values=(3.0, 4.0),
        s_values=(0.1, 0.5),
        O_values=(0.5, 1.5),
        NT_values=(6, 8),
        NL_values=(1, 2, 3),
    )
    mapping = spec.to_mapping()
    mapping.update(overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(mapping))
    return path


class TestEstimate:
    GOLDEN = ["--D1", "100", "--D2", "100", "--w", "5", "--s", "1",
              "--NT", "5", "--NL", "4", "--O", "1.6"]

    def test_text_output(self, capsys):
        code, out, err = run(capsys, "estimate", *self.GOLDEN)
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "L_uH = 34.45"
        assert "d1_mm = 42.0000" in lines
        assert "Dbar1_mm = 71.0000" in lines

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "estimate", *self.GOLDEN, "--format", "json")
        assert code == 0
        fields = json.loads(out)
        assert fields["model"] == "full"
        assert fields["L_uH"] == pytest.approx(34.445510610569656, rel=1e-12)
        assert fields["d2_mm"] == pytest.approx(42.0, abs=1e-9)

    def test_csv_output(self, capsys):
        code, out, _ = run(capsys, "estimate", *self.GOLDEN, "--format", "csv")
        assert code == 0
        header, values = out.splitlines()
        assert header == "model,L_uH,d1_mm,d2_mm,Dbar1_mm,Dbar2_mm"
        assert values.split(",")[0] == "full"

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "est.txt"
        code, out, _ = run(capsys, "estimate", *self.GOLDEN, "--output", str(target))
        assert code == 0 and out == ""
        assert target.read_text().splitlines()[0] == "L_uH = 34.45"

    def test_single_layer_needs_no_gap(self, capsys):
        code, out, _ = run(capsys, "estimate", "--D1", "100", "--D2", "163",
                           "--w", "3", "--s", "0.5", "--NT", "10", "--NL", "1")
        assert code == 0
        assert out.splitlines()[0] == "L_uH = 13.79"

    def test_multilayer_requires_gap(self, capsys):
        code, _, err = run(capsys, "estimate", "--D1", "100", "--D2", "100",
                           "--w", "5", "--s", "1", "--NT", "5", "--NL", "2")
        assert code == 2
        assert "error:" in err and "--O" in err

    def test_swapped_sides_give_the_same_answer(self, capsys):
        args = ["--w", "5", "--s", "0.5", "--NT", "8", "--NL", "1"]
        code1, out1, _ = run(capsys, "estimate", "--D1", "120", "--D2", "160", *args)
        code2, out2, _ = run(capsys, "estimate", "--D1", "160", "--D2", "120", *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_square_model_matches_full_on_squares(self, capsys):
        _, full_out, _ = run(capsys, "estimate", *self.GOLDEN, "--format", "json")
        code, square_out, _ = run(capsys, "estimate", *self.GOLDEN,
                                  "--model", "square", "--format", "json")
        assert code == 0
        assert json.loads(square_out)["L_uH"] == json.loads(full_out)["L_uH"]

    def test_square_model_rejects_rectangles(self, capsys):
        code, _, err = run(capsys, "estimate", "--D1", "100", "--D2", "163",
                           "--w", "3", "--s", "0.5", "--NT", "10", "--NL", "1",
                           "--model", "square")
        assert code == 2 and "square" in err

    def test_mohan_model(self, capsys):
        code, out, _ = run(capsys, "estimate", "--D1", "100", "--D2", "100",
                           "--w", "4", "--s", "2", "--NT", "5", "--NL", "1",
                           "--model", "mohan")
        assert code == 0
        assert out.splitlines()[0] == "L_uH = 2.71"

    def test_mohan_model_is_single_layer(self, capsys):
        code, _, err = run(capsys, "estimate", *self.GOLDEN, "--model", "mohan")
        assert code == 2 and "single-layer" in err

    def test_coeffs_rejected_for_fixed_models(self, capsys):
        code, _, err = run(capsys, "estimate", *self.GOLDEN,
                           "--model", "simplified", "--coeffs", "default")
        assert code == 2 and "--coeffs" in err

    def test_custom_coefficients_scale_the_answer(self, capsys, tmp_path):
        mapping = DEFAULT_COEFFICIENTS.to_mapping()
        mapping["a0"] = 2.0 * mapping["a0"]
        coeffs = tmp_path / "double.json"
        coeffs.write_text(json.dumps(mapping))
        _, base, _ = run(capsys, "estimate", *self.GOLDEN, "--format", "json")
        code, doubled, _ = run(capsys, "estimate", *self.GOLDEN,
                               "--coeffs", str(coeffs), "--format", "json")
        assert code == 0
        ratio = json.loads(doubled)["L_uH"] / json.loads(base)["L_uH"]
        assert ratio == pytest.approx(2.0, rel=1e-12)

    def test_infeasible_turns(self, capsys):
        code, _, err = run(capsys, "estimate", "--D1", "20", "--D2", "30",
                           "--w", "5", "--s", "1", "--NT", "5", "--NL", "1")
        assert code == 4 and "error:" in err

    def test_units_flag(self, capsys):
        code, out, _ = run(capsys, "--units", "mm-uH", "estimate", *self.GOLDEN)
        assert code == 0 and out.splitlines()[0] == "L_uH = 34.45"
        code, _, _ = run(capsys, "--units", "inch", "estimate", *self.GOLDEN)
        assert code == 2


class TestGrid:
    def test_builtin_corpus(self, capsys, tmp_path):
        out_csv = tmp_path / "a.csv"
        code, out, _ = run(capsys, "grid", "--spec", "A", "--out", str(out_csv))
        assert code == 0
        assert out.strip() == f"wrote 2060 windings to {out_csv}"
        assert len(read_geometry_csv(out_csv)) == 2060

    def test_custom_spec_with_labels(self, capsys, tmp_path):
        spec = small_spec_file(tmp_path)
        out_csv = tmp_path / "labeled.csv"
        code, out, _ = run(capsys, "grid", "--spec", str(spec),
                           "--labels", "default", "--out", str(out_csv))
        assert code == 0 and "labeled windings" in out
        samples = read_csv(out_csv)
        for sample in samples[:25]:
            model = inductance(sample.geometry, DEFAULT_COEFFICIENTS)
            assert sample.L_ref == pytest.approx(model, rel=1e-11)

    def test_noise_needs_labels(self, capsys, tmp_path):
        code, _, err = run(capsys, "grid", "--spec", "A",
                           "--out", str(tmp_path / "x.csv"), "--noise", "0.01")
        assert code == 2 and "--labels" in err

    def test_missing_spec_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "grid", "--spec", str(tmp_path / "nope.json"),
                           "--out", str(tmp_path / "x.csv"))
        assert code == 3 and "error:" in err

    def test_malformed_spec_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "grid", "--spec", str(bad),
                           "--out", str(tmp_path / "x.csv"))
        assert code == 3 and "bad JSON" in err


class TestSynth:
    def test_labels_unlabeled_geometry(self, capsys, tmp_path):
        spec = small_spec_file(tmp_path, NL_values=[1], w_values=[3.0])
        geo_csv = tmp_path / "geo.csv"
        run(capsys, "grid", "--spec", str(spec), "--out", str(geo_csv))
        labeled = tmp_path / "labeled.csv"
        code, out, _ = run(capsys, "synth", "--in", str(geo_csv),
                           "--coeffs", "default", "--out", str(labeled))
        assert code == 0 and "labeled windings" in out
        samples = read_csv(labeled)
        assert len(samples) == len(read_geometry_csv(geo_csv))
        model = inductance(samples[0].geometry, DEFAULT_COEFFICIENTS)
        assert samples[0].L_ref == pytest.approx(model, rel=1e-11)


@pytest.fixture()
def labeled_corpus(capsys, tmp_path):
    spec = small_spec_file(tmp_path)
    path = tmp_path / "samples.csv"
    code, _, _ = run(capsys, "grid", "--spec", str(spec),
                     "--labels", "default", "--out", str(path))
    assert code == 0
    return path


class TestFitAndEval:
    def test_noiseless_closure(self, capsys, tmp_path, labeled_corpus):
        coeffs_json = tmp_path / "coeffs.json"
        report_json = tmp_path / "report.json"
        code, out, _ = run(capsys, "fit", "--in", str(labeled_corpus),
                           "--out", str(coeffs_json), "--report", str(report_json))
        assert code == 0
        assert "MAE 0.0000%" in out
        fitted = json.loads(coeffs_json.read_text())
        for name, want in DEFAULT_COEFFICIENTS.to_mapping().items():
            if name == "label":
                continue
            assert fitted[name] == pytest.approx(want, rel=1e-8)
        report = json.loads(report_json.read_text())
        assert report["mae_pct"] <= 1e-8
        assert report["n_train"] + report["n_eval"] == len(read_csv(labeled_corpus))
        assert report["seed"] == 0 and report["repeats"] == 1
        assert "dispersion" not in report

        eval_json = tmp_path / "eval.json"
        hist_csv = tmp_path / "hist.csv"
        code, out, _ = run(capsys, "eval", "--in", str(labeled_corpus),
                           "--coeffs", str(coeffs_json),
                           "--report", str(eval_json), "--hist", str(hist_csv))
        assert code == 0 and "MAE 0.0000%" in out
        evaluation = json.loads(eval_json.read_text())
        assert evaluation["mae_pct"] <= 1e-8
        hist_lines = hist_csv.read_text().splitlines()
        assert hist_lines[0] == "bin_center_pct,count"
        counts = [int(line.split(",")[1]) for line in hist_lines[1:]]
        assert sum(counts) == evaluation["n_eval"]

    def test_repeats_add_dispersion(self, capsys, tmp_path, labeled_corpus):
        coeffs_json = tmp_path / "c.json"
        report_json = tmp_path / "r.json"
        code, _, _ = run(capsys, "fit", "--in", str(labeled_corpus),
                         "--repeats", "2", "--out", str(coeffs_json),
                         "--report", str(report_json))
        assert code == 0
        report = json.loads(report_json.read_text())
        assert set(report["dispersion"]) == {"mean", "std", "spread"}
        assert report["repeats"] == 2

    def test_eval_with_builtin_coefficients(self, capsys, tmp_path, labeled_corpus):
        eval_json = tmp_path / "eval.json"
        code, out, _ = run(capsys, "eval", "--in", str(labeled_corpus),
                           "--coeffs", "default", "--report", str(eval_json))
        assert code == 0 and "evaluated" in out

    def test_too_few_samples(self, capsys, tmp_path, labeled_corpus):
        lines = labeled_corpus.read_text().splitlines()
        short = tmp_path / "short.csv"
        short.write_text("\n".join(lines[:9]) + "\n")
        code, _, err = run(capsys, "fit", "--in", str(short),
                           "--out", str(tmp_path / "c.json"))
        assert code == 3 and "error:" in err

    def test_rank_deficient_corpus(self, capsys, tmp_path):
        spec = small_spec_file(tmp_path, w_values=[3.0], NL_values=[1])
        samples = tmp_path / "flat.csv"
        run(capsys, "grid", "--spec", str(spec), "--labels", "default",
            "--out", str(samples))
        code, _, err = run(capsys, "fit", "--in", str(samples),
                           "--out", str(tmp_path / "c.json"))
        assert code == 5
        assert "rank" in err

    def test_corrupt_row_reports_its_line(self, capsys, tmp_path, labeled_corpus):
        lines = labeled_corpus.read_text().splitlines()
        fields = lines[2].split(",")
        fields[4] = "x"
        lines[2] = ",".join(fields)
        corrupt = tmp_path / "corrupt.csv"
        corrupt.write_text("\n".join(lines) + "\n")
        code, _, err = run(capsys, "eval", "--in", str(corrupt),
                           "--coeffs", "default", "--report", str(tmp_path / "r.json"))
        assert code == 3
        assert ":3:" in err and "w_mm" in err


class TestOptimize:
    def test_reference_problem(self, capsys, tmp_path):
        out_json = tmp_path / "opt.json"
        code, out, _ = run(capsys, "optimize", "--problem", "default",
                           "--restarts", "2", "--seed", "0", "--out", str(out_json))
        assert code == 0
        assert out.startswith("best L = ")
        mapping = json.loads(out_json.read_text())
        assert mapping["feasible_found"] is True
        assert mapping["best"]["N_T"] == 8
        assert mapping["restarts_run"] == 16

    def test_oracle_comparison(self, capsys, tmp_path):
        out_json = tmp_path / "opt.json"
        code, out, _ = run(capsys, "optimize", "--problem", "default",
                           "--restarts", "2", "--seed", "0",
                           "--oracle", "--out", str(out_json))
        assert code == 0 and "oracle L = " in out
        mapping = json.loads(out_json.read_text())
        oracle = mapping["oracle"]
        assert "restarts" not in oracle and "restarts_run" not in oracle
        assert oracle["feasible_found"] is True
        assert abs(mapping["oracle_agreement_pct"]) <= 0.1

    def test_bad_resolution(self, capsys, tmp_path):
        for resolution in ("q=1", "w=abc"):
            code, _, err = run(capsys, "optimize", "--problem", "default",
                               "--restarts", "2", "--oracle",
                               "--resolution", resolution,
                               "--out", str(tmp_path / "x.json"))
            assert code == 2 and "error:" in err

    def test_infeasible_problem_is_reported_not_raised(self, capsys, tmp_path):
        problem = {
            "D1": [12, 54], "D2": [55, 101], "d1": [53, 54], "d2": [54, 99],
            "w": [2.5, 5], "s": [0.1, 1], "NT": [8], "NL": 4, "O_mm": 0.5,
        }
        path = tmp_path / "tight.json"
        path.write_text(json.dumps(problem))
        out_json = tmp_path / "opt.json"
        code, out, _ = run(capsys, "optimize", "--problem", str(path),
                           "--restarts", "2", "--oracle", "--out", str(out_json))
        assert code == 0
        assert "no feasible point found" in out
        assert "skipping the oracle" in out
        mapping = json.loads(out_json.read_text())
        assert mapping["best"] is None and "oracle" not in mapping

    def test_malformed_problem_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        code, _, err = run(capsys, "optimize", "--problem", str(path),
                           "--out", str(tmp_path / "x.json"))
        assert code == 3 and "bad JSON" in err

    def test_incomplete_problem_json(self, capsys, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps({"D1": [12, 54]}))
        code, _, err = run(capsys, "optimize", "--problem", str(path),
                           "--out", str(tmp_path / "x.json"))
        assert code == 3 and "missing" in err

    def test_bad_restart_count(self, capsys, tmp_path):
        code, _, err = run(capsys, "optimize", "--problem", "default",
                           "--restarts", "0", "--out", str(tmp_path / "x.json"))
        assert code == 3 and "restarts" in err


class TestDeterminism:
    def test_estimate_repeats_byte_identical(self, capsys):
        args = ["estimate", "--D1", "100", "--D2", "165", "--w", "3", "--s", "0.1",
                "--NT", "10", "--NL", "4", "--O", "0.45", "--format", "json"]
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_optimize_repeats_byte_identical(self, capsys, tmp_path):
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        for path in (first, second):
            code, _, _ = run(capsys, "optimize", "--problem", "default",
                             "--restarts", "3", "--seed", "7", "--out", str(path))
            assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_fit_repeats_byte_identical(self, capsys, tmp_path, labeled_corpus):
        first = tmp_path / "c1.json"
        second = tmp_path / "c2.json"
        for path in (first, second):
            code, _, _ = run(capsys, "fit", "--in", str(labeled_corpus),
                             "--out", str(path))
            assert code == 0
        assert first.read_bytes() == second.read_bytes()
