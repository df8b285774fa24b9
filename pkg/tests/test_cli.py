"""
运行配置解析与命令行端到端测试
"""

from pathlib import Path

import pytest

from cli import COMMANDS, EXIT_ERROR, EXIT_FAIL, EXIT_PASS, config_hash, dispatch, main, parse_config
from config import config
from reporting import read_csv, read_json_report
from utils.errors import ParseError, ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def run_command(command, name, out):
    return dispatch(command, parse_config(CONFIGS / name), out=out)


# ─── parse_config ───────────────────────────────────────────────────

def test_defaults_without_file():
    cfg = parse_config(None, seed_override=3)
    assert cfg.seed == 3
    assert cfg.system["name"] == "euler"
    assert cfg.grid["cfl"] == 0.45
    assert cfg.measures["coarse_N"] == 8


def test_bundled_config_loads():
    cfg = parse_config(CONFIGS / "euler_hypotheses.yaml")
    assert cfg.grid["cfl"] == 0.45
    assert cfg.seed == 7
    assert cfg.system["params"]["gamma"] == 1.4


def test_cfl_out_of_range(tmp_path):
    path = write_config(tmp_path, "seed: 1\ngrid:\n  cfl: 1.5\n")
    with pytest.raises(ValidationError) as info:
        parse_config(path)
    assert any("CFL" in line for line in info.value.errors)


def test_unknown_system_lists_registered_ids(tmp_path):
    path = write_config(tmp_path, "seed: 1\nsystem:\n  name: burgers\n")
    with pytest.raises(ValidationError) as info:
        parse_config(path)
    message = str(info.value)
    assert "burgers" in message
    for name in ("euler", "swmhd", "inc-euler", "nonhom-inc-mhd"):
        assert name in message


def test_all_errors_are_collected(tmp_path):
    text = "seed: 1\ngrid:\n  cfl: 1.5\n  colour: red\nmeasures:\n  coarse_N: 5\nplots: {}\n"
    with pytest.raises(ValidationError) as info:
        parse_config(write_config(tmp_path, text))
    errors = info.value.errors
    assert len(errors) >= 4
    assert any("grid.colour" in line for line in errors)
    assert any("plots" in line for line in errors)
    assert any("coarse_N=5" in line for line in errors)


def test_mistyped_value_keeps_other_errors(tmp_path):
    path = write_config(tmp_path, "seed: 1\ngrid:\n  cfl: 1.5\nmeasures:\n  coarse_N: abc\n")
    with pytest.raises(ValidationError) as info:
        parse_config(path)
    errors = info.value.errors
    assert any("CFL" in line for line in errors)
    assert any("measures.coarse_N must be a positive integer" in line for line in errors)


def test_mistyped_system_parameter_keeps_other_errors(tmp_path):
    text = "seed: 1\nsystem:\n  name: euler\n  params:\n    gamma: fast\ngrid:\n  cfl: 1.5\n"
    with pytest.raises(ValidationError) as info:
        parse_config(write_config(tmp_path, text))
    errors = info.value.errors
    assert any("CFL" in line for line in errors)
    assert any("gamma must be numeric" in line for line in errors)


def test_mistyped_lists_are_reported_per_key(tmp_path):
    text = "seed: 1\nmeasures:\n  k_ladder: [10, ten]\n  epsilon_ladder: wide\norlicz:\n  pairs: many\n"
    with pytest.raises(ValidationError) as info:
        parse_config(write_config(tmp_path, text))
    errors = info.value.errors
    assert any("k_ladder" in line for line in errors)
    assert any("epsilon_ladder" in line for line in errors)
    assert any("orlicz.pairs" in line for line in errors)


def test_yaml_error_reports_line(tmp_path):
    path = write_config(tmp_path, "seed: 1\ngrid:\n  N_ladder: [16, 32\n  T: 0.1\n")
    with pytest.raises(ParseError) as info:
        parse_config(path)
    assert "line" in str(info.value)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        parse_config(tmp_path / "absent.yaml")


def test_numeric_strings_are_coerced(tmp_path):
    path = write_config(tmp_path, "seed: 1\nmeasures:\n  k_ladder: [1e1, 1e2, 1e3]\n  recession_s_max: 1e4\n")
    cfg = parse_config(path)
    assert cfg.measures["k_ladder"] == [10.0, 100.0, 1000.0]
    assert cfg.measures["recession_s_max"] == 1e4


def test_seed_is_required(tmp_path):
    with pytest.raises(ValidationError) as info:
        parse_config(write_config(tmp_path, "grid:\n  N: 32\n"))
    assert "seed is required" in info.value.errors


def test_overrides_take_precedence(tmp_path):
    path = write_config(tmp_path, "seed: 1\nsystem:\n  name: euler\n")
    cfg = parse_config(path, seed_override=99, system_override="swmhd")
    assert cfg.seed == 99
    assert cfg.system["name"] == "swmhd"


def test_unknown_nfunction_rejected(tmp_path):
    with pytest.raises(ValidationError):
        parse_config(write_config(tmp_path, "seed: 1\norlicz:\n  functions: [M3]\n"))


def test_config_hash_tracks_content():
    first = parse_config(CONFIGS / "orlicz.yaml")
    second = parse_config(CONFIGS / "orlicz.yaml")
    assert config_hash(first) == config_hash(second)
    assert config_hash(first) != config_hash(parse_config(CONFIGS / "orlicz.yaml", seed_override=18))
    assert len(config_hash(first)) == 64


# ─── dispatch: exit codes ──────────────────────────────────────────

def test_check_hypotheses_passes_on_euler(tmp_path):
    out = tmp_path / "report.json"
    assert run_command("check-hypotheses", "euler_hypotheses.yaml", out) == EXIT_PASS
    report = read_json_report(out)
    assert [item["id"] for item in report["hypotheses"]][:3] == ["H1", "H2", "H3"]
    assert len(report["hypotheses"]) == 6
    assert all(item["verdict"] == "pass" for item in report["hypotheses"])
    assert all(item["seed"] == 7 for item in report["hypotheses"])
    meta = report["meta"]
    assert meta["version"] == config.VERSION
    assert meta["seed"] == 7
    assert meta["config_hash"] == config_hash(parse_config(CONFIGS / "euler_hypotheses.yaml"))


def test_simulate_writes_snapshots(tmp_path):
    assert run_command("simulate", "euler_simulate.yaml", tmp_path) == EXIT_PASS
    snapshots = sorted((tmp_path / "snapshots").glob("*.bin"))
    assert len(snapshots) == 3
    assert snapshots[0].stat().st_size == 64 * 2 * 8
    meta, production = read_csv(tmp_path / "production.csv")
    assert meta["seed"] == 11
    assert (production["production"] <= 1e-10).all()
    report = read_json_report(tmp_path / "simulate.json")
    assert report["conservation_drift"] <= 1e-10


def test_concentration_of_bounded_family(tmp_path):
    assert run_command("concentration", "euler_concentration.yaml", tmp_path) == EXIT_PASS
    report = read_json_report(tmp_path / "concentration.json")
    assert all(record["mass"] == 0.0 for record in report["masses"]["eta"])
    assert len(report["slices"]["A"]) == 2
    assert report["checks"]["domination"]["verdict"]
    assert report["radon_nikodym"]["masked_cells"] == "all"
    meta, frame = read_csv(tmp_path / "concentration_eta.csv")
    assert list(frame.columns) == ["cell", "k", "mass"]
    assert len(frame) == 4 * 2


def test_recession_identities(tmp_path):
    assert run_command("recession", "euler_recession.yaml", tmp_path) == EXIT_PASS
    _, frame = read_csv(tmp_path / "recession.csv")
    assert set(frame["quantity"]) == {"A", "eta_rel", "F_rel"}
    assert len(frame) == 3 * 16


def test_probe_uniqueness_passes_on_smooth_data(tmp_path):
    assert run_command("probe-uniqueness", "euler_probe.yaml", tmp_path) == EXIT_PASS
    report = read_json_report(tmp_path / "probe.json")
    assert report["verdict"] is True
    assert report["control"]["separation"] >= 10.0
    for N in (16, 32, 64):
        _, series = read_csv(tmp_path / f"probe_N{N}.csv")
        assert list(series.columns)[:4] == ["t", "H", "relative_entropy", "concentration"]


def test_mismatched_data_probe_fails(tmp_path):
    assert run_command("probe-uniqueness", "euler_probe_mismatch.yaml", tmp_path) == EXIT_FAIL
    report = read_json_report(tmp_path / "probe.json")
    assert not report["decay"]["terminal_H"]["passed"]


def test_riemann_data_simulates_but_cannot_be_probed(tmp_path):
    assert run_command("simulate", "euler_riemann.yaml", tmp_path / "traj") == EXIT_PASS
    assert run_command("probe-uniqueness", "euler_riemann.yaml", tmp_path / "probe") == EXIT_ERROR


def test_orlicz_suite(tmp_path):
    assert run_command("orlicz-suite", "orlicz.yaml", tmp_path) == EXIT_PASS
    report = read_json_report(tmp_path / "orlicz.json")
    assert report["checks"]["M1_stronger_than_M2"]["verdict"]
    assert report["checks"]["fenchel_young_M2"]["samples"] == 5000


def test_missing_initial_data_is_an_error(tmp_path):
    assert run_command("simulate", "euler_hypotheses.yaml", tmp_path) == EXIT_ERROR


def test_unwritable_output_is_an_error(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    assert run_command("orlicz-suite", "orlicz.yaml", blocker / "out") == EXIT_ERROR
    assert "Error" in capsys.readouterr().out


def test_unexpected_exception_is_an_error(tmp_path, monkeypatch):
    def crash(ctx):
        raise RuntimeError("handler bug")

    monkeypatch.setitem(COMMANDS, "orlicz-suite", (crash, "orlicz.json"))
    assert run_command("orlicz-suite", "orlicz.yaml", tmp_path) == EXIT_ERROR


def test_unknown_command():
    assert dispatch("plot", parse_config(None, seed_override=1)) == EXIT_ERROR
    assert "plot" not in COMMANDS


# ─── determinism and entry point ───────────────────────────────────

def test_reruns_are_bit_identical(tmp_path):
    for name in ("one", "two"):
        assert run_command("orlicz-suite", "orlicz.yaml", tmp_path / name) == EXIT_PASS
    for artifact in ("orlicz.json", "stronger_table.csv"):
        assert (tmp_path / "one" / artifact).read_bytes() == (tmp_path / "two" / artifact).read_bytes()


def test_main_runs_command(tmp_path, capsys):
    code = main(["orlicz-suite", "--config", str(CONFIGS / "orlicz.yaml"), "--out", str(tmp_path), "--seed", "5"])
    assert code == EXIT_PASS
    assert read_json_report(tmp_path / "orlicz.json")["meta"]["seed"] == 5
    assert "orlicz-suite: PASS" in capsys.readouterr().out


def test_main_reports_invalid_config(tmp_path, capsys):
    path = write_config(tmp_path, "seed: 1\ngrid:\n  cfl: 1.5\n")
    assert main(["simulate", "--config", str(path)]) == EXIT_ERROR
    assert "CFL" in capsys.readouterr().out
