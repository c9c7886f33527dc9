"""Command-line interface: exit codes, artifacts, and rerun determinism.

Everything runs in-process through main(argv) to keep the suite fast;
each scenario gets its own config file under tmp_path.
"""

import configparser
import json

import pytest

from phantomdf.cli import main


def write_config(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def run(tmp_path, capsys):
    def _run(text, *argv, section_args=()):
        cfg = write_config(tmp_path / "cfg.ini", text)
        rc = main([*argv, "--config", cfg, *section_args])
        out = capsys.readouterr()
        return rc, out.out, out.err
    return _run


def test_print_defaults_parses(capsys):
    assert main(["--print-defaults"]) == 0
    text = capsys.readouterr().out
    parser = configparser.ConfigParser()
    parser.read_string(text)
    assert parser.get("common", "seed") == "20260814"
    assert "phantom-fit" in parser.sections()


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_config_exits_2(capsys):
    assert main(["rates", "--config", "/no/such/file.ini"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_law_string_exits_2(run, tmp_path):
    rc, _out, err = run("[simulate]\nkind = iid\nmarginal = not_a_law(1)\n",
                        "simulate", "--out", str(tmp_path / "o"))
    assert rc == 2
    assert "error" in err


class TestSimulate:
    CFG = "[common]\nseed = 7\n[simulate]\nkind = lindley\nstep = pareto(2,1)-2\nlength = 4000\n"

    def test_writes_path_and_marks(self, run, tmp_path):
        out = tmp_path / "sim"
        rc, stdout, _ = run(self.CFG, "simulate", "--out", str(out))
        assert rc == 0
        assert (out / "path.txt").exists()
        assert (out / "path.marks.txt").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["length"] == 4000
        # marks are indices into the kept window
        lines = (out / "path.marks.txt").read_text().splitlines()
        idx = [int(s) for s in lines if s and not s.startswith("#")]
        assert idx and all(0 <= i < 4000 for i in idx)

    def test_rerun_byte_identical(self, run, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(self.CFG, "simulate", "--out", str(a))
        run(self.CFG, "simulate", "--out", str(b))
        assert (a / "path.txt").read_bytes() == (b / "path.txt").read_bytes()
        assert (a / "path.marks.txt").read_bytes() == (b / "path.marks.txt").read_bytes()

    def test_seed_override_changes_path(self, run, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(self.CFG, "simulate", "--out", str(a))
        run(self.CFG, "simulate", "--out", str(b), section_args=("--seed", "8"))
        assert (a / "path.txt").read_bytes() != (b / "path.txt").read_bytes()


class TestPhantomFit:
    CFG = ("[common]\nseed = 11\nreplicas = 300\n"
           "[phantom-fit]\nkind = iid\nmarginal = exp(1)\nblock_sizes = 50,200\n")

    def test_fit_verify_round_trip(self, run, tmp_path):
        out = tmp_path / "fit"
        rc, stdout, _ = run(self.CFG, "phantom-fit", "--out", str(out))
        assert rc == 0, stdout
        assert "verified" in stdout
        for name in ("driving.csv", "maxlaw.csv", "bt.csv", "theta.csv", "phantom.txt"):
            assert (out / name).exists()
        assert (out / "phantom.txt").read_text().startswith("phantomdf continuous v1")

        ver_cfg = (f"[common]\nseed = 11\nreplicas = 300\n"
                   f"[verify]\nphantom = {out / 'phantom.txt'}\nkind = iid\n"
                   f"marginal = exp(1)\nblock_sizes = 50,200\n")
        cfg2 = write_config(tmp_path / "ver.ini", ver_cfg)
        assert main(["verify", "--config", cfg2, "--out", str(tmp_path / "ver")]) == 0

    def test_worker_count_does_not_change_artifacts(self, run, tmp_path):
        a, b = tmp_path / "w1", tmp_path / "w3"
        run(self.CFG, "phantom-fit", "--out", str(a))
        run(self.CFG, "phantom-fit", "--out", str(b), section_args=("--workers", "3"))
        for name in ("driving.csv", "maxlaw.csv", "bt.csv", "theta.csv", "phantom.txt"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_missing_phantom_file_exits_2(self, run, tmp_path):
        rc, _out, err = run("[verify]\nphantom = nowhere.txt\nkind = iid\n"
                            "marginal = exp(1)\nblock_sizes = 50,200\n",
                            "verify", "--out", str(tmp_path / "v"))
        assert rc == 2


class TestVerdictExitCodes:
    def test_rates_sufficient(self, run, tmp_path):
        rc, stdout, _ = run("[rates]\nkind = theta\nb = 1.0\nbeta = 4.0\n",
                            "rates", "--out", str(tmp_path / "r"))
        assert rc == 0 and "sufficient" in stdout
        summary = json.loads((tmp_path / "r" / "summary.json").read_text())
        assert summary["rate_check"]["sufficient"] is True

    def test_rates_insufficient(self, run, tmp_path):
        rc, stdout, _ = run("[rates]\nkind = kappa\nb = 1.0\nbeta = 4.0\n",
                            "rates", "--out", str(tmp_path / "r"))
        assert rc == 1 and "NOT sufficient" in stdout

    def test_rates_discontinuous_case(self, run, tmp_path):
        rc, _stdout, _ = run("[rates]\nkind = alpha\nb = 1.0\nbeta = 1.0\n"
                             "mixing = polynomial(4)\ndelta_xi = 0.5:true\n",
                             "rates", "--out", str(tmp_path / "r"))
        assert rc == 0
        summary = json.loads((tmp_path / "r" / "summary.json").read_text())
        assert summary["discontinuous_case"]["admits_phantom"] is True

    def test_extremal_index_reports_without_failing(self, run, tmp_path):
        rc, stdout, _ = run("[common]\nseed = 5\nreplicas = 300\n"
                            "[extremal-index]\nkind = moving_max\nwindow = 2\n"
                            "base = uniform(0,1)\nblock_sizes = 100,1000\nmethod = exact\n",
                            "extremal-index", "--out", str(tmp_path / "ei"))
        assert rc == 0
        assert "theta" in stdout
        assert (tmp_path / "ei" / "theta.csv").exists()

    def test_bt_check_ok(self, run, tmp_path):
        rc, stdout, _ = run("[common]\nseed = 3\nreplicas = 400\n"
                            "[bt-check]\nkind = iid\nmarginal = exp(1)\n"
                            "block_sizes = 50,200\nt = 2.0\n",
                            "bt-check", "--out", str(tmp_path / "bt"))
        assert rc == 0 and "ok" in stdout


def test_regen_pipeline(run, tmp_path):
    # the regen command refuses paths shorter than 1e5 values
    rc, stdout, _ = run("[common]\nseed = 19\n"
                        "[regen]\nstep = pareto(2,1)-2\nlength = 100000\n"
                        "verify_blocks = 300,1000\nsmoothing = linear\n",
                        "regen", "--out", str(tmp_path / "rg"))
    assert rc == 0, stdout
    assert "cycles" in stdout and "ratio->0" in stdout
    for name in ("cycle_maxima_cdf.csv", "maxlaw.csv", "path.marks.txt"):
        assert (tmp_path / "rg" / name).exists()
    summary = json.loads((tmp_path / "rg" / "summary.json").read_text())
    assert summary["phantom_verified"] is True
    assert summary["cycle_count"] >= 500
    assert summary["stationary_tail_verdict"] == "ratio->0"
