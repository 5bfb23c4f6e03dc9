import pytest

from delaygrowth import cli
from delaygrowth.cli import ConfigError, load_config, main


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="ascii")
    return str(path)


SUBLINEAR = """
command = verify
f       = zero
g       = power(1, 0.5)
tau     = 1
psi     = const(1)
N       = 4
horizon = 150
"""


# ---------------------------------------------------------------------------
# config parsing

def test_command_form_with_overrides():
    config = load_config(["verify", "g=const(2)", "tau=1"])
    assert config.command == "verify"
    assert config.values == {"g": "const(2)", "tau": "1"}


def test_file_form_reads_keys(tmp_path):
    config = load_config([write_config(tmp_path, SUBLINEAR)])
    assert config.command == "verify"
    assert config.values["g"] == "power(1, 0.5)"
    assert config.values["N"] == "4"


def test_overrides_win_over_the_file(tmp_path):
    path = write_config(tmp_path, SUBLINEAR)
    config = load_config([path, "N=8", "command=predict"])
    assert config.command == "predict"
    assert config.values["N"] == "8"


def test_comments_and_blank_lines_are_skipped(tmp_path):
    path = write_config(tmp_path, "# header\ncommand = chareq\n\ntau = 1  # delay\nC = 1\n")
    config = load_config([path])
    assert config.values == {"tau": "1", "C": "1"}


@pytest.mark.parametrize("text,fragment", [
    ("command = simulate\nnot a pair\n", ":2: expected 'key = value'"),
    ("command = simulate\nwidth = 3\n", ":2: unknown key 'width'"),
    ("command = simulate\ntau = 1\ntau = 2\n", ":3: duplicate key 'tau'"),
])
def test_file_diagnostics_carry_line_numbers(tmp_path, text, fragment):
    with pytest.raises(ConfigError) as err:
        load_config([write_config(tmp_path, text)])
    assert fragment in str(err.value)


def test_config_without_a_command_is_rejected(tmp_path):
    with pytest.raises(ConfigError, match="no command"):
        load_config([write_config(tmp_path, "tau = 1\n")])


def test_unknown_names_are_rejected():
    with pytest.raises(ConfigError, match="no such config file or command"):
        load_config(["frobnicate"])
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(["simulate", "speed=9"])
    with pytest.raises(ConfigError, match="KEY=VALUE"):
        load_config(["simulate", "justaword"])


def test_no_arguments_prints_usage():
    with pytest.raises(ConfigError, match="usage:"):
        load_config([])


# ---------------------------------------------------------------------------
# commands

def test_chareq_prints_twelve_digits(capsys):
    assert main(["chareq", "C=1", "tau=1"]) == 0
    assert capsys.readouterr().out == "0.567143290410\n"


def test_chareq_needs_its_keys(capsys):
    assert main(["chareq", "tau=1"]) == 2
    assert "needs the key 'C'" in capsys.readouterr().err


def test_simulate_writes_csv_to_stdout(capsys):
    assert main(["simulate", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=2", "horizon=3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,t,log_x,functional,ratio"
    assert lines[1].startswith("-2,-1.0,0.0,")
    assert len(lines) == 1 + 2 + 1 + 6      # header, history, start, forward


def test_simulate_reruns_are_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, SUBLINEAR + "out = {}\n".format(tmp_path / "a.csv"))
    assert main([cfg, "command=simulate"]) == 0
    assert main([cfg, "command=simulate", f"out={tmp_path / 'b.csv'}"]) == 0
    capsys.readouterr()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_verify_passes_on_a_sublinear_run(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert main([write_config(tmp_path, SUBLINEAR), f"out={out}"]) == 0
    text = capsys.readouterr().out
    assert "verdict: PASS" in text
    assert out.read_text(encoding="ascii").startswith("n,t,log_x,functional,ratio\n")


def test_verify_fails_under_a_tight_tolerance(tmp_path, capsys):
    assert main([write_config(tmp_path, SUBLINEAR), "tol=1e-6"]) == 1
    assert "verdict: FAIL" in capsys.readouterr().out


def test_verify_rejects_a_vanishing_delayed_term(capsys):
    code = main(["verify", "g=zero", "tau=1", "psi=const(1)", "N=4",
                 "horizon=150"])
    assert code == 2
    assert "must be strictly positive" in capsys.readouterr().err


def test_predict_reports_the_regime(capsys):
    assert main(["predict", "g=power(1,2)", "tau=1", "psi=const(1)",
                 "N=4", "horizon=600"]) == 0
    text = capsys.readouterr().out
    assert "regime: poly-superlinear" in text
    assert "grid rate at h=0.25:" in text


def test_predict_refusal_exits_2(capsys):
    code = main(["predict", "g=power(1,2)", "f=power(1,1.2)", "tau=1",
                 "psi=const(1)", "N=4", "horizon=600"])
    assert code == 2
    assert "dominance hypothesis failed" in capsys.readouterr().err


def test_short_runs_exit_3(capsys):
    code = main(["verify", "g=const(2)", "tau=1", "psi=const(1)", "N=4",
                 "horizon=30"])
    assert code == 3
    assert "numeric failure" in capsys.readouterr().err


def test_sweep_emits_the_table_and_limit_row(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=2,4,8", "horizon=200", f"out={out}"])
    assert code == 0
    lines = out.read_text(encoding="ascii").splitlines()
    assert lines[0] == "N,h,predicted,estimated,status"
    assert [row.split(",")[0] for row in lines[1:]] == ["2", "4", "8", "0"]
    assert lines[-1].endswith("extrapolated")
    assert "extrapolated rate at h=0:" in capsys.readouterr().out


def test_sweep_to_stdout_is_pure_csv(capsys):
    assert main(["sweep", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=2,4,8", "horizon=200"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,h,predicted,estimated,status"
    assert all("," in line for line in lines)


def test_sweep_needs_three_distinct_grids(capsys):
    code = main(["sweep", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=4,4,4", "horizon=200"])
    assert code == 2
    assert "3 distinct grids" in capsys.readouterr().err


def test_sweep_rejects_a_malformed_grid_list(capsys):
    code = main(["sweep", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=2;4;8", "horizon=200"])
    assert code == 2
    assert "comma-separated" in capsys.readouterr().err


def test_envelope_reports_and_writes_margins(tmp_path, capsys):
    out = tmp_path / "margins.csv"
    code = main(["envelope", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=4", "horizon=60", "eps=0.5", f"out={out}"])
    assert code == 0
    text = capsys.readouterr().out
    assert "holds: yes" in text
    assert "violations: 0" in text
    lines = out.read_text(encoding="ascii").splitlines()
    assert lines[0] == "n,t,log_x,envelope"
    assert len(lines) == 1 + 4 * 60 + 4 + 1


def test_envelope_violation_exits_1(monkeypatch, capsys):
    class Fake:
        class params:
            eps, rate, offset, floor_log = 0.5, 1.0, 2.0, 1.0
        checked, violations, truncated = 7, (3,), False
        holds = False
    monkeypatch.setattr(cli, "envelope_check", lambda scenario, eps: Fake)
    code = main(["envelope", "g=const(2)", "tau=1", "psi=const(1)",
                 "N=4", "horizon=60"])
    assert code == 1
    assert "holds: no" in capsys.readouterr().out


def test_main_reads_sys_argv(monkeypatch, capsys):
    monkeypatch.setattr("sys.argv", ["delaygrowth", "chareq", "C=1", "tau=1"])
    assert main() == 0
    assert capsys.readouterr().out.strip() == "0.567143290410"
