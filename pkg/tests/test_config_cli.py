"""Config schema, experiment runner and CLI contract tests."""

import json
import os

import numpy as np
import pytest

from stablelab.cli import main
from stablelab.config import ConfigError, default_config, parse_config
from stablelab.experiments import report_summary, run


def _strip_timestamp(text: str) -> str:
    return "\n".join(
        ln for ln in text.splitlines() if not ln.startswith("# generated_at")
    )


class TestConfigSchema:
    def test_defaults_complete(self):
        cfg = default_config("dynkin-check")
        assert cfg["alpha"] == 2.0 and cfg["n_paths"] == 100_000

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config("bogus = 1", experiment="exit-time")

    def test_alpha_range_names_constraint(self):
        with pytest.raises(ConfigError, match=r"alpha ∈ \(0,2\]"):
            parse_config("alpha = 2.5", experiment="exit-time")

    def test_missing_experiment(self):
        with pytest.raises(ConfigError, match="experiment"):
            parse_config("alpha = 2.0")

    def test_bad_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("alpha = 2.0\nnot a kv pair")

    def test_transience_precondition_names_hypothesis(self):
        with pytest.raises(ConfigError, match="d > alpha"):
            parse_config("alpha = 2.0\ndim = 1", experiment="resolvent-bounds")

    def test_trace_doubling_guard(self):
        with pytest.raises(ConfigError, match="doubling"):
            parse_config("n_list = 8, 12, 16", experiment="trace-study")

    def test_comments_and_blanks_ok(self):
        cfg = parse_config("# a comment\n\nseed = 42\n", experiment="exit-time")
        assert cfg["seed"] == 42

    def test_resolved_lines_sorted_and_typed(self):
        cfg = parse_config("seed = 7", experiment="exit-time")
        lines = cfg.resolved_lines()
        assert lines[0] == "experiment=exit-time"
        assert lines[1:] == sorted(lines[1:])
        assert any(ln == "seed=7" for ln in lines)


class TestRunReports:
    def test_exit_time_report_and_reproducibility(self, tmp_path):
        cfg = parse_config("n_paths = 2000\nt_max = 8.0", experiment="exit-time")
        r1 = run(cfg, str(tmp_path / "a"))
        r2 = run(cfg, str(tmp_path / "b"))
        assert r1.status == 0
        t1 = open(r1.files[0]).read()
        t2 = open(r2.files[0]).read()
        assert _strip_timestamp(t1) == _strip_timestamp(t2)
        assert "# config: experiment=exit-time" in t1
        assert "# claim:" in t1

    def test_seed_changes_report(self, tmp_path):
        base = parse_config("n_paths = 2000\nt_max = 8.0", experiment="exit-time")
        other = parse_config(
            "n_paths = 2000\nt_max = 8.0\nseed = 99", experiment="exit-time"
        )
        ra = run(base, str(tmp_path / "a"))
        rb = run(other, str(tmp_path / "b"))
        assert _strip_timestamp(open(ra.files[0]).read()) != _strip_timestamp(
            open(rb.files[0]).read()
        )

    def test_threads_do_not_change_report(self, tmp_path):
        texts = []
        for threads, sub in ((1, "a"), (3, "b")):
            cfg = parse_config(
                f"n_paths = 3000\nthreads = {threads}\nprobes = 3, 6\ndomain.n_max = 8\nt_max = 10",
                experiment="tightness-scan",
            )
            r = run(cfg, str(tmp_path / sub))
            texts.append(_strip_timestamp(open(r.files[0]).read()))
        a, b = texts
        # identical numbers; only the recorded threads value differs
        assert a.replace("threads=1", "threads=N") == b.replace("threads=3", "threads=N")

    def test_spectra_json_schema(self, tmp_path):
        cfg = parse_config(
            "grid.radius = 6\ngrid.delta = 0.05", experiment="spectra"
        )
        r = run(cfg, str(tmp_path))
        payload = json.load(open(r.files[0]))
        assert payload["schema_version"] == "1"
        assert payload["assertions"] and all(a["pass"] for a in payload["assertions"])
        assert len(payload["eigenvalues"]) > 0
        assert r.status == 0

    def test_trace_study_runs_small(self, tmp_path):
        cfg = parse_config(
            "n_list = 4, 8\ngrid.delta = 0.02", experiment="trace-study"
        )
        r = run(cfg, str(tmp_path))
        # growth assertions are calibrated for the doubling scan up to 64;
        # a tiny scan still writes well-formed rows
        text = open(r.files[0]).read()
        assert "n_intervals,heat_trace,tail_half_length_sq" in text

    def test_dynkin_small_passes(self, tmp_path):
        cfg = parse_config("n_paths = 20000", experiment="dynkin-check")
        r = run(cfg, str(tmp_path))
        assert r.status == 0 and r.assertions[0].passed

    def test_json_format_for_tabular_experiment(self, tmp_path):
        cfg = parse_config("n_paths = 1500\nt_max = 8.0", experiment="exit-time")
        r = run(cfg, str(tmp_path), fmt="json")
        assert r.files[0].endswith("exit-time.json")
        payload = json.load(open(r.files[0]))
        assert payload["schema_version"] == "1"
        assert payload["columns"][0] == "quantity"
        assert "overall:" in report_summary([r.files[0]])


class TestSummary:
    def test_no_assertions_note(self, tmp_path):
        cfg = parse_config("n_paths = 2", experiment="sample-paths")
        r = run(cfg, str(tmp_path))
        text = report_summary([r.files[0]])
        assert "no assertions" in text
        assert "PASS (vacuous)" in text

    def test_mixed_pass_fail_overall_fail(self, tmp_path):
        fp = tmp_path / "synthetic.csv"
        fp.write_text(
            "# schema_version: 1\n"
            "# assert good_one: value=1 bound=2 dir=<= pass=True\n"
            "# assert bad_one: value=3 bound=2 dir=<= pass=False\n"
            "a,b\n1,2\n"
        )
        text = report_summary([str(fp)])
        assert "overall: FAIL" in text
        assert "PASS  good_one" in text and "FAIL  bad_one" in text

    def test_byte_stable(self, tmp_path):
        cfg = parse_config("n_paths = 2000\nt_max = 8.0", experiment="exit-time")
        r = run(cfg, str(tmp_path))
        s1 = report_summary(list(r.files))
        s2 = report_summary(list(r.files))
        assert s1 == s2

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            report_summary(["/nonexistent/report.csv"])

    def test_corrupt_json(self, tmp_path):
        fp = tmp_path / "bad.json"
        fp.write_text("{not json")
        with pytest.raises(ValueError, match="corrupt"):
            report_summary([str(fp)])


class TestCli:
    def test_run_ok_exit_zero(self, tmp_path, capsys):
        code = main([
            "run", "exit-time", "--out", str(tmp_path), "--seed", "5",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out and "wrote" in out

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("experiment = exit-time\nalpha = 2.5\n")
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "alpha" in err

    def test_missing_config_file_exit_two(self, tmp_path, capsys):
        code = main(["run", "exit-time", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2

    def test_config_supplies_experiment(self, tmp_path):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text("experiment = exit-time\nn_paths = 1500\nt_max = 8\n")
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "exit-time.csv").exists()

    def test_summary_subcommand(self, tmp_path, capsys):
        main(["run", "exit-time", "--out", str(tmp_path), "--seed", "5"])
        capsys.readouterr()
        code = main(["summary", str(tmp_path / "exit-time.csv")])
        out = capsys.readouterr().out
        assert code == 0 and "overall:" in out

    def test_summary_missing_file_exit_two(self, capsys):
        assert main(["summary", "/nonexistent.csv"]) == 2

    def test_usage_error_exit_two(self, capsys):
        assert main(["run", "not-an-experiment"]) == 2
