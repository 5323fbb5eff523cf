import json
import math
import subprocess
import sys

import pytest

from jumpbench import theory
from jumpbench.cli import main
from jumpbench.core import JumpInstance


def test_theory_reports_optimal_rate(capsys):
    assert main(["theory", "--n", "100", "--k", "6", "--delta", "4", "--ea-p", "auto"]) == 0
    out = capsys.readouterr().out
    assert "0.04" in out and "1/F(p)" in out
    assert "warning: outside the standard regime" in out and "> n^(1/3)" in out


def test_theory_onemax_note(capsys):
    assert main(["theory", "--n", "50", "--k", "1", "--delta", "1"]) == 0
    assert "OneMax" in capsys.readouterr().out


def test_theory_prints_log10_columns(capsys):
    main(["theory", "--n", "200", "--k", "4", "--delta", "4"])
    out = capsys.readouterr().out
    row = next(line for line in out.splitlines() if line.strip().startswith("1/F(delta/n)"))
    linear, log10 = row.split()[-2:]
    want = -theory.big_f(JumpInstance(200, 4, 4), 0.02).log_value / math.log(10)
    assert float(log10) == pytest.approx(want, abs=1e-4)
    assert float(linear) > 1e6


@pytest.mark.parametrize(
    "argv",
    [
        ["theory", "--n", "10", "--k", "12"],
        ["theory", "--n", "10", "--k", "3", "--delta", "4"],
        ["theory", "--n", "10", "--k", "3", "--ea-p", "0.9"],
        ["run", "--n", "20", "--k", "3", "--R", "0.5", "--algo", "sdrls"],
        ["sweep", "--regime", "nope"],
        ["sweep"],
        ["run", "--n", "20", "--k", "3", "--reps", "1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys, tmp_path):
    assert main(argv + (["--out", str(tmp_path)] if argv[0] != "theory" else [])) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["run", "--engine", "warp"])
    assert err.value.code == 2


def _write(tmp_path, data):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_config_unknown_key_named(tmp_path, capsys):
    cfg = _write(tmp_path, {"schema_version": 1, "n": 20, "k": 3, "colour": "red"})
    assert main(["theory", "--config", cfg]) == 2
    assert "'colour'" in capsys.readouterr().err


def test_config_schema_version_required(tmp_path, capsys):
    cfg = _write(tmp_path, {"n": 20, "k": 3})
    assert main(["theory", "--config", cfg]) == 2
    assert "schema_version" in capsys.readouterr().err


def test_config_values_and_flag_override(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = _write(tmp_path, {"schema_version": 1, "n": 16, "k": 3, "delta": 2, "algo": "ea",
                            "ea_p": "1/n", "reps": 5, "seed": 1, "out": str(out)})
    assert main(["run", "--config", cfg, "--reps", "7"]) == 0
    row = (out / "results.csv").read_text().splitlines()[1].split(",")
    assert row[:7] == ["custom", "16", "3", "2", "ea", "p=1/n", "7"]


def test_run_defaults_R_to_cubic(tmp_path):
    assert main(["run", "--algo", "sdrls-star", "--n", "100", "--k", "12", "--delta", "6",
                 "--R", "auto", "--reps", "3", "--engine", "partial", "--out", str(tmp_path)]) == 0
    assert ",R=n^3," in (tmp_path / "results.csv").read_text()


def test_censored_run_exits_3(tmp_path, capsys):
    code = main(["run", "--n", "60", "--k", "8", "--algo", "ea", "--ea-p", "1/n", "--reps", "3",
                 "--cap", "1000", "--engine", "partial", "--out", str(tmp_path)])
    assert code == 3
    assert "cap" in capsys.readouterr().err


def test_sweep_is_byte_identical(tmp_path):
    argv = ["sweep", "--regime", "classic4", "--n", "20,30", "--reps", "10", "--seed", "42",
            "--engine", "partial"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b"), "--workers", "3"]) == 0
    for name in ("results.csv", "results_classic4.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    argv = ["run", "--n", "16", "--k", "3", "--reps", "5"]
    monkeypatch.setenv("JUMPBENCH_SEED", "9")
    main(argv + ["--out", str(tmp_path / "env")])
    main(argv + ["--out", str(tmp_path / "flag"), "--seed", "9"])
    main(argv + ["--out", str(tmp_path / "other"), "--seed", "10"])
    env = (tmp_path / "env" / "results.csv").read_bytes()
    assert env == (tmp_path / "flag" / "results.csv").read_bytes()
    assert env != (tmp_path / "other" / "results.csv").read_bytes()


def test_verify_quick_passes(capsys):
    assert main(["verify", "quick"]) == 0
    assert "all 9 checks passed" in capsys.readouterr().out


def test_verify_failure_exits_4(monkeypatch, capsys):
    real = theory.big_f

    def off_by_one(inst, p, with_terms=False):
        # tail starts one level too high
        shifted = JumpInstance(inst.n, inst.k, min(inst.k, inst.delta + 1))
        return real(shifted, p, with_terms)

    monkeypatch.setattr(theory, "big_f", off_by_one)
    assert main(["verify", "quick"]) == 4
    assert "first failing check: big_f" in capsys.readouterr().out


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "jumpbench", "theory", "--n", "30", "--k", "3"],
                          capture_output=True, text=True)
    assert done.returncode == 0 and "F(p)" in done.stdout
