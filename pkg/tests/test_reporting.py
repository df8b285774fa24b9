"""
报告产物与快照存储测试
"""

import numpy as np
import pandas as pd
import pytest

from reporting import (
    load_trajectory,
    metadata_header,
    overall_verdict,
    read_csv,
    read_json_report,
    save_trajectory,
    summarize_reports,
    verdict_table,
    write_csv,
    write_json_report,
)
from solver import InitialSpec, TorusGrid, run
from systems import get_system
from utils.errors import ConfigError


@pytest.fixture
def meta():
    return metadata_header(42, "abc123")


def test_json_report_is_deterministic(tmp_path, meta):
    payload = {"b": np.float64(0.25), "a": np.array([1, 2]), "flag": np.bool_(True), "bad": np.inf}
    first = write_json_report(tmp_path / "one.json", payload, meta).read_bytes()
    second = write_json_report(tmp_path / "two.json", dict(reversed(list(payload.items()))), meta).read_bytes()
    assert first == second
    loaded = read_json_report(tmp_path / "one.json")
    assert loaded["meta"]["seed"] == 42 and loaded["meta"]["config_hash"] == "abc123"
    assert loaded["a"] == [1, 2] and loaded["bad"] == "inf"


def test_csv_carries_metadata(tmp_path, meta):
    frame = pd.DataFrame({"t": [0.0, 0.1], "H": [1e-3, 2.5e-4]})
    path = write_csv(tmp_path / "series.csv", frame, meta)
    assert path.read_text().startswith("# config_hash: ")
    read_meta, read_frame = read_csv(path)
    assert read_meta == meta
    pd.testing.assert_frame_equal(read_frame, frame)


def test_snapshot_round_trip(tmp_path):
    euler = get_system("euler", gamma=2.0)
    spec = InitialSpec("smooth-periodic", {"mean": [1.0, 0.1], "amplitude": [0.1, 0.0]})
    traj = run(euler, TorusGrid(d=1, N=16, T=0.02, snapshot_dt=0.01), spec)
    files = save_trajectory(traj, tmp_path / "snaps")
    assert len(files) == 3
    assert files[0].stat().st_size == 16 * 2 * 8
    loaded = load_trajectory(tmp_path / "snaps", euler)
    np.testing.assert_array_equal(loaded.times, traj.times)
    np.testing.assert_array_equal(loaded.final.v, traj.final.v)
    assert loaded.grid == traj.grid


def test_snapshot_system_mismatch(tmp_path):
    euler = get_system("euler", gamma=2.0)
    traj = run(euler, TorusGrid(d=1, N=8, T=0.01), InitialSpec("constant", {"state": [1.0, 0.0]}))
    save_trajectory(traj, tmp_path)
    with pytest.raises(ConfigError):
        load_trajectory(tmp_path, get_system("swmhd"))
    with pytest.raises(ConfigError):
        load_trajectory(tmp_path / "missing", euler)


def test_summaries():
    reports = {"H1": {"verdict": "pass"}, "domination": {"verdict": False, "worst_ratio": 2.0}}
    lines = summarize_reports(reports)
    assert lines[0].split() == ["H1", "PASS"]
    assert "worst_ratio 2.000e+00" in lines[1]
    assert not overall_verdict(reports)
    assert verdict_table(reports) == {"H1": "pass", "domination": "fail"}
