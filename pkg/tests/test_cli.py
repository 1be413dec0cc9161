import json

from wronoc import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    return code, json.loads(out), err


class TestMaxParallelism:
    def test_worked_example(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["max-parallelism", "--instance", table1_file, "--delta", "0",
             "--n-radii", "3"],
        )
        assert code == 0
        assert doc["status"] == "optimal"
        assert doc["result"]["P"] == 4
        assert doc["result"]["selected_radii"] == [1, 2, 3]
        assert doc["command"]["delta_policy"] == {
            "mode": "symmetric-half-width",
            "half_width_pm": 0,
        }

    def test_oversized_is_infeasible_exit_1(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["max-parallelism", "--instance", table1_file, "--delta", "0",
             "--n-radii", "99"],
        )
        assert code == 1
        assert doc["status"] == "infeasible"

    def test_trim_flag(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["max-parallelism", "--instance", table1_file, "--delta", "0",
             "--n-radii", "3", "--trim"],
        )
        assert code == 0
        assert all(len(row["indices"]) == 4 for row in doc["result"]["rows"])

    def test_byte_identical_rerun_modulo_timing(self, capsys, table1_file):
        argv = ["max-parallelism", "--instance", table1_file, "--delta", "1000",
                "--n-radii", "2"]
        _, doc_a, _ = run_json(capsys, argv)
        _, doc_b, _ = run_json(capsys, argv)
        doc_a.pop("wall_time_ms")
        doc_b.pop("wall_time_ms")
        assert json.dumps(doc_a) == json.dumps(doc_b)


class TestSpacing:
    def test_worked_example(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["spacing", "--instance", table1_file, "--n-radii", "1",
             "--parallelism", "3", "--mode", "base"],
        )
        assert code == 0
        assert doc["result"]["dist_pm"] == 50700
        assert doc["result"]["selected_radii"] == [1]

    def test_refined_mode(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["spacing", "--instance", table1_file, "--n-radii", "2",
             "--parallelism", "2", "--mode", "refined"],
        )
        assert code == 0
        assert doc["result"]["mode"] == "refined"
        assert doc["result"]["dist_pm"] == 9800

    def test_infeasible_exit_1(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["spacing", "--instance", table1_file, "--n-radii", "1",
             "--parallelism", "9", "--mode", "base"],
        )
        assert code == 1
        assert doc["status"] == "infeasible"


class TestPipeline:
    def test_feeds_p_into_phase2(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["pipeline", "--instance", table1_file, "--delta", "0",
             "--n-radii", "2", "--mode", "base"],
        )
        assert code == 0
        p = doc["result"]["phase1"]["P"]
        assert p == 5
        assert doc["result"]["phase2"]["n_lambda"] == p
        assert doc["result"]["phase2"]["status"] == "optimal"


class TestConflicts:
    def test_counts_and_pairs(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys, ["conflicts", "--instance", table1_file, "--delta", "0"]
        )
        assert code == 0
        assert doc["cross_count"] == 7
        assert doc["within_count"] == 0
        assert len(doc["pairs"]) == 7

    def test_table_goes_to_stderr(self, capsys, table1_file):
        code, out, err = run_cli(
            capsys,
            ["conflicts", "--instance", table1_file, "--delta", "0", "--table"],
        )
        assert code == 0
        json.loads(out)  # stdout stays machine-readable
        assert "1521.3 nm" in err


class TestValidateAndExport:
    def test_validate_clean(self, capsys, table1_file):
        code, doc, _ = run_json(capsys, ["validate", "--instance", table1_file])
        assert code == 0
        assert doc["violations"] == []

    def test_validate_broken_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("radius 1 0\nresonance 1 10 20 5\n", encoding="utf-8")
        code, doc, err = run_json(capsys, ["validate", "--instance", str(bad)])
        assert code == 2
        assert doc["violations"]
        assert "lmin" in err

    def test_export_round_trip(self, capsys, table1_file, tmp_path):
        out = tmp_path / "t1.lp"
        code, _, _ = run_cli(
            capsys,
            ["export-asp", "--instance", table1_file, "--out", str(out)],
        )
        assert code == 0
        assert out.read_text(encoding="utf-8").count("lambda(") == 24
        code, doc, _ = run_json(capsys, ["validate", "--instance", str(out)])
        assert code == 0 and doc["violations"] == []
        _, original, _ = run_json(capsys, ["validate", "--instance", table1_file])
        assert doc["instance_digest"] == original["instance_digest"]

    def test_export_json_format(self, capsys, table1_file):
        code, doc, _ = run_json(
            capsys,
            ["export-asp", "--instance", table1_file, "--format", "json"],
        )
        assert code == 0
        assert len(doc["radii"]) == 4
        assert doc["radii"][0]["resonances"][0]["nominal_pm"] == 1496400


class TestGenerateCommand:
    def test_writes_parseable_instance(self, capsys, tmp_path):
        out = tmp_path / "gen.txt"
        code, _, err = run_cli(
            capsys,
            ["generate", "--seed", "5", "--out", str(out),
             "--r-max-pm", "8000000"],
        )
        assert code == 0
        assert "wrote 13 radii" in err
        code, doc, _ = run_json(capsys, ["validate", "--instance", str(out)])
        assert code == 0 and doc["violations"] == []

    def test_degenerate_band_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            ["generate", "--band-lo-pm", "0", "--band-hi-pm", "0",
             "--out", str(tmp_path / "x.txt")],
        )
        assert code == 2
        assert "radii" in err


class TestBench:
    def test_grid_rows(self, capsys, table1_file, tmp_path):
        out = tmp_path / "bench.csv"
        code, _, _ = run_cli(
            capsys,
            ["bench", "--instance", table1_file, "--n-radii", "2,3",
             "--delta", "0,1000", "--phases", "1", "--out", str(out)],
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "instance,n_radii,delta_pm,phase,status,objective,wall_time_ms"
        assert len(lines) == 5
        assert all(line.startswith("table1,") for line in lines[1:])

    def test_rerun_objectives_identical(self, capsys, table1_file):
        argv = ["bench", "--instance", table1_file, "--n-radii", "2,3,4",
                "--delta", "0,1000", "--phases", "1,2"]
        _, out_a, _ = run_cli(capsys, argv)
        _, out_b, _ = run_cli(capsys, argv)

        def objectives(text):
            return [line.rsplit(",", 1)[0] for line in text.splitlines()]

        assert objectives(out_a) == objectives(out_b)

    def test_empty_grid_header_only(self, capsys, table1_file):
        code, out, _ = run_cli(
            capsys,
            ["bench", "--instance", table1_file, "--n-radii", "", "--delta", ""],
        )
        assert code == 0
        assert out == "instance,n_radii,delta_pm,phase,status,objective,wall_time_ms\n"

    def test_infeasible_cell_still_gets_phase2_row(self, capsys, tmp_path):
        twin = tmp_path / "twin.txt"
        twin.write_text(
            "radius 1 0\nresonance 1 1500000\nresonance 1 1510000\n"
            "radius 2 0\nresonance 2 1500000\nresonance 2 1510000\n",
            encoding="utf-8",
        )
        code, out, _ = run_cli(
            capsys,
            ["bench", "--instance", str(twin), "--n-radii", "2",
             "--delta", "0", "--phases", "1,2"],
        )
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 3
        assert lines[1].split(",")[3:6] == ["1", "infeasible", ""]
        assert lines[2].split(",")[3:6] == ["2", "infeasible", ""]


class TestErrors:
    def test_unknown_flag_exits_2(self, capsys, table1_file):
        code, _, _ = run_cli(
            capsys, ["max-parallelism", "--instance", table1_file, "--frobnicate"]
        )
        assert code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, ["max-parallelism", "--instance", "/nope.txt", "--n-radii", "2"]
        )
        assert code == 2
        assert "/nope.txt" in err

    def test_malformed_instance_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("what even is this\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, ["max-parallelism", "--instance", str(bad), "--n-radii", "2"]
        )
        assert code == 2
        assert "line 1" in err

    def test_zero_n_radii_exits_2(self, capsys, table1_file):
        code, _, _ = run_cli(
            capsys,
            ["max-parallelism", "--instance", table1_file, "--n-radii", "0"],
        )
        assert code == 2

    def test_timeout_exits_3(self, capsys, tmp_path):
        gen = tmp_path / "gen.txt"
        assert cli.main(["generate", "--seed", "1", "--out", str(gen)]) == 0
        capsys.readouterr()
        code, doc, _ = run_json(
            capsys,
            ["max-parallelism", "--instance", str(gen), "--delta", "1000",
             "--n-radii", "8", "--time-limit", "1e-9"],
        )
        assert code == 3
        assert doc["status"] == "incumbent-timeout"
