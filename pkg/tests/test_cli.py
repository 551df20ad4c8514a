"""Command-line front end: parsing, verdict exit codes, artifacts, determinism.

Runs the CLI in-process through main(argv) so stdout/stderr are captured
by pytest; one subprocess test exercises the installed console script.
"""

import json
import math
import subprocess
import sys

import pytest

from gaborwalnut.cli import CSV_HEADER, main
from gaborwalnut.model import StepFunction


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def chi(tmp_path):
    return write_json(tmp_path, "chi.json",
                      {"grid_den": 1, "lo": 0, "re": [1.0], "im": [0.0]})


@pytest.fixture
def two_level(tmp_path):
    return write_json(tmp_path, "two.json",
                      {"grid_den": 2, "lo": 0, "re": [1.0, 0.5], "im": [0.0, 0.0]})


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    try:
        report = json.loads(captured.out) if captured.out.strip() else None
    except json.JSONDecodeError:
        report = captured.out
    return code, report, captured.err


class TestParsing:
    def test_fraction_flags_echoed_in_config(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "cc", two_level, "--a", "1/2", "--b", "2")
        assert code == 0
        assert out["config"]["a"] == "1/2"
        assert out["config"]["b"] == "2"
        assert out["config"]["command"] == "cc"

    def test_bad_fraction_exits_two(self, capsys, two_level):
        code, _, err = run_cli(capsys, "cc", two_level, "--a", "zero")
        assert code == 2
        assert "not a rational" in err

    def test_nonpositive_fraction_exits_two(self, capsys, two_level):
        code, _, err = run_cli(capsys, "cc", two_level, "--a", "-1/2")
        assert code == 2

    def test_nonpositive_kmax_exits_two(self, capsys, two_level):
        code, _, err = run_cli(capsys, "cond-a", two_level, "--kmax", "0")
        assert code == 2
        assert "positive" in err

    def test_bad_epsilon_list_exits_two(self, capsys, two_level):
        code, _, _ = run_cli(capsys, "ucc", two_level, "--eps", "0.5,nope")
        assert code == 2

    def test_unknown_command_exits_two(self, capsys):
        assert run_cli(capsys, "nonsense")[0] == 2

    def test_help_exits_zero(self, capsys):
        code, _, _ = run_cli(capsys, "--help")
        assert code == 0


class TestVerdictExitCodes:
    def test_tight_on_unit_box_is_normalized_tight(self, capsys, chi):
        code, out, _ = run_cli(capsys, "tight", chi)
        assert code == 0
        assert out["report"]["verdict"] == "normalized-tight"

    def test_tight_on_two_level_fails(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "tight", two_level)
        assert code == 1
        assert out["report"]["verdict"] == "not-tight"
        assert out["exit_code"] == 1

    def test_equal_same_window(self, capsys, chi):
        code, out, _ = run_cli(capsys, "equal", chi, chi)
        assert code == 0
        assert out["report"]["verdict"] == "equal"

    def test_equal_distinct_windows(self, capsys, chi, two_level):
        code, out, _ = run_cli(capsys, "equal", chi, two_level)
        assert code == 1
        assert out["report"]["verdict"] == "not-equal"

    def test_equal_across_lattices(self, capsys, tmp_path):
        # half-width sqrt(2) window at (1/2, 2) matches the full box at (1, 1)
        g = write_json(tmp_path, "g.json",
                       {"grid_den": 2, "lo": 0, "re": [1.0, 1.0], "im": [0.0, 0.0]})
        h = write_json(tmp_path, "h.json",
                       {"grid_den": 2, "lo": 0, "re": [2.0 ** 0.5, 0.0],
                        "im": [0.0, 0.0]})
        code, out, _ = run_cli(capsys, "equal", g, h, "--a2", "1/2", "--b2", "2")
        assert code == 0
        assert out["report"]["verdict"] == "equal"

    def test_cc_window_holds(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "cc", two_level)
        assert code == 0
        assert out["report"]["verdict"] == "holds"
        assert out["report"]["bound"] == pytest.approx(1.0, abs=1e-12)

    def test_cc_truncated_gallery_family_not_certified(self, capsys):
        code, out, _ = run_cli(capsys, "cc", "--gallery", "ex6.3")
        assert code == 1
        assert out["report"]["verdict"] == "inconclusive-truncated"
        assert out["report"]["truncation"]["gallery"] == "chirp_tail"

    def test_gallery_run_passes(self, capsys):
        code, out, _ = run_cli(capsys, "gallery", "run", "dyadic_comb")
        assert code == 0
        assert out["report"]["verify"]["passed"] is True

    def test_gallery_run_analytic_entry(self, capsys):
        code, out, _ = run_cli(capsys, "gallery", "run", "irrational_comb")
        assert code == 0
        checks = out["report"]["verify"]["checks"]
        assert {c["expectation"] for c in checks} == {
            "divergent-lower-bounds", "sup-sum-cap-1"}

    def test_oracle_verify_within_tolerance(self, capsys):
        code, out, _ = run_cli(capsys, "oracle-verify", "--trials", "3", "--seed", "5")
        assert code == 0
        assert out["report"]["max_deviation"] <= 1e-10
        assert len(out["report"]["trials"]) == 3

    def test_diag_unconditional_on_chirp_grows_but_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "walnut-diag", "--regime", "uncond",
                               "--gallery", "ex6.3", "--kmax", "128")
        assert code == 0
        rep = out["report"]
        assert rep["verdict"] == "growing"
        # labels sit in the parallel "families" list; rows are [size, low, high]
        signed = [row for label, row in zip(rep["families"], rep["norm_profile"])
                  if label.startswith("signed aligned nu0=0")]
        assert signed[-1][1] > signed[0][1]


class TestCommandReports:
    def test_gk_two_level_single_correlation(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "gk", two_level)
        assert code == 0
        rep = out["report"]
        assert rep["k_range"] == [0]
        assert rep["sup_moduli"]["0"] == 1.0
        assert rep["exact_tail"] is True
        assert "family" in rep

    def test_gk_large_gallery_family_omits_entries(self, capsys):
        code, out, _ = run_cli(capsys, "gk", "--gallery", "ex5.7")
        assert code == 0
        rep = out["report"]
        assert rep["family_omitted"] is True
        assert rep["truncation"] == {"gallery": "two_level_zak", "k_max": 512}
        assert rep["sup_moduli"]["1"] == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-10)

    def test_cond_a_running_totals(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "cond-a", two_level, "--kmax", "8")
        assert code == 0
        rep = out["report"]
        assert rep["truncation"]["k_range"] == 8
        assert len(rep["running"]) == 9
        totals = [t for _, t in rep["running"]]
        assert totals == sorted(totals)
        assert rep["total"] == pytest.approx(totals[-1], abs=1e-15)

    def test_zak_small_grid_includes_values(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "zak", two_level, "--nu-samples", "8")
        assert code == 0
        rep = out["report"]
        assert len(rep["re"]) == 8
        assert rep["diagnostics"]["unitarity_gap"] <= 1e-9
        assert rep["modulus_max"] > rep["modulus_min"]

    def test_zak_large_grid_omits_values(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "zak", two_level, "--nu-samples", "128")
        assert code == 0
        assert out["report"]["values_omitted"] is True
        assert "re" not in out["report"]

    def test_bounds_two_level_bracket(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "bounds", two_level, "--nu-samples", "64")
        assert code == 0
        rep = out["report"]
        assert rep["A"] == pytest.approx([0.25, 0.25], abs=1e-9)
        assert rep["B"] == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_dual_window_satisfies_duality(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "dual", two_level,
                               "--kmax", "64", "--nu-samples", "256")
        assert code == 0
        rep = out["report"]
        assert rep["wr_deviation"] <= 1e-8
        dual = StepFunction.from_json_obj(rep["window"])
        assert dual.grid.step == pytest.approx(0.5)
        assert rep["truncation"]["k_trunc"] == 64

    def test_ucc_epsilon_table(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "ucc", two_level, "--eps", "0.5,0.25")
        assert code == 0
        rows = out["report"]["details"]["epsilon_K"]
        assert [e for e, _ in rows] == [0.5, 0.25]

    def test_schur_certificate(self, capsys, two_level):
        code, out, _ = run_cli(capsys, "schur", two_level, two_level,
                               "--kmax", "8", "--nu-samples", "64")
        assert code == 0
        rep = out["report"]
        assert rep["verdict"] == "certified"
        assert rep["bound"] >= rep["sampled_sup"] - 1e-9

    @pytest.mark.parametrize("space", ["lp", "wiener"])
    def test_extend_bounded(self, capsys, two_level, space):
        code, out, _ = run_cli(capsys, "extend", two_level,
                               "--space", space, "--trials", "6")
        assert code == 0
        assert out["report"]["verdict"] == "bounded"
        assert out["report"]["truncation"]["trials"] == 6

    def test_gallery_list(self, capsys):
        code, out, _ = run_cli(capsys, "gallery", "list")
        assert code == 0
        rep = out["report"]
        assert len(rep["entries"]) == 7
        assert rep["aliases"]["ex4.13"] == "two_level_window"
        assert set(rep["out_of_scope"]) == {"ex3.6", "ex5.4"}

    def test_gallery_run_alias_echoes_truncation(self, capsys):
        code, out, _ = run_cli(capsys, "gallery", "run", "ex4.13")
        assert code == 0
        assert out["report"]["entry"]["name"] == "two_level_window"
        assert out["report"]["truncation"] == {"adjoint_range": 16}


class TestArtifacts:
    def test_out_dir_writes_stream_summary_csv(self, capsys, two_level, tmp_path):
        out_dir = tmp_path / "run"
        code, out, _ = run_cli(capsys, "cc", two_level, "--out", str(out_dir))
        assert code == 0
        lines = (out_dir / "report.jsonl").read_text().splitlines()
        events = [json.loads(line) for line in lines]
        assert [e["event"] for e in events] == ["config", "report", "exit"]
        assert events[2]["code"] == 0
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary == out
        csv_lines = (out_dir / "profile.csv").read_text().splitlines()
        assert csv_lines[0] == CSV_HEADER
        assert all(len(row.split(",")) == 3 for row in csv_lines[1:])

    def test_no_csv_when_command_has_no_profile(self, capsys, chi, tmp_path):
        out_dir = tmp_path / "run"
        code, _, _ = run_cli(capsys, "tight", chi, "--out", str(out_dir))
        assert code == 0
        assert (out_dir / "summary.json").exists()
        assert not (out_dir / "profile.csv").exists()

    def test_artifacts_written_even_on_failure_verdict(self, capsys, two_level, tmp_path):
        out_dir = tmp_path / "run"
        code, _, _ = run_cli(capsys, "tight", two_level, "--out", str(out_dir))
        assert code == 1
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["exit_code"] == 1

    def test_byte_identical_reruns(self, capsys, two_level, tmp_path):
        out_dir = tmp_path / "run"
        argv = ("walnut-diag", "--regime", "uncond", two_level,
                "--kmax", "32", "--seed", "11", "--out", str(out_dir))
        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        first = {name: (out_dir / name).read_bytes()
                 for name in ("report.jsonl", "summary.json", "profile.csv")}
        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        for name, blob in first.items():
            assert (out_dir / name).read_bytes() == blob

    def test_seed_changes_oracle_trace(self, capsys, tmp_path):
        runs = {}
        for seed in ("3", "4"):
            out_dir = tmp_path / f"run{seed}"
            code, _, _ = run_cli(capsys, "oracle-verify", "--trials", "3",
                                 "--seed", seed, "--out", str(out_dir))
            assert code == 0
            runs[seed] = (out_dir / "profile.csv").read_bytes()
        assert runs["3"] != runs["4"]


class TestInputErrors:
    def test_malformed_json_reports_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"grid_den": 1, "lo": 0, "re": [1.0,]}')
        code, _, err = run_cli(capsys, "tight", str(bad))
        assert code == 2
        assert "parse error at line 1 column" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "cc", str(tmp_path / "absent.json"))
        assert code == 2

    def test_invalid_window_object(self, capsys, tmp_path):
        path = write_json(tmp_path, "odd.json", {"grid_den": 1, "lo": 0})
        code, _, err = run_cli(capsys, "tight", path)
        assert code == 2
        assert "invalid window object" in err

    def test_family_json_rejected_by_window_command(self, capsys, tmp_path):
        fam = {"a": "1", "b": "1", "grid_den": 2, "entries": {}, "exact_tail": True}
        path = write_json(tmp_path, "fam.json", fam)
        code, _, err = run_cli(capsys, "tight", path)
        assert code == 2
        assert "needs a window" in err

    def test_input_and_gallery_conflict(self, capsys, two_level):
        code, _, err = run_cli(capsys, "cc", two_level, "--gallery", "ex4.13")
        assert code == 2
        assert "not both" in err

    def test_missing_source(self, capsys):
        code, _, err = run_cli(capsys, "cc")
        assert code == 2
        assert "required" in err

    def test_window_command_rejects_family_entry(self, capsys):
        code, _, err = run_cli(capsys, "cond-a", "--gallery", "ex6.3")
        assert code == 2
        assert "no window object" in err

    def test_analytic_entry_has_no_family(self, capsys):
        code, _, err = run_cli(capsys, "cc", "--gallery", "ex6.6")
        assert code == 2
        assert "analytic-only" in err

    def test_gallery_run_needs_name(self, capsys):
        code, _, err = run_cli(capsys, "gallery", "run")
        assert code == 2
        assert "NAME" in err

    def test_gallery_unknown_name(self, capsys):
        code, _, err = run_cli(capsys, "gallery", "run", "ex0.0")
        assert code == 2
        assert "unknown gallery entry" in err

    def test_gallery_out_of_scope_stub(self, capsys):
        code, _, err = run_cli(capsys, "gallery", "run", "ex3.6")
        assert code == 2
        assert "out of scope" in err


class TestConsoleScript:
    def test_module_invocation_matches_console_entry(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "gaborwalnut.cli", "gallery", "list"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        report = json.loads(proc.stdout)["report"]
        assert "dyadic_comb" in report["entries"]
