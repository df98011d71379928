import os

import numpy as np
import pytest

import gprbtd

SPEC = "ny = 160\nn_threats = 2\nseed = 3\n"


def test_version():
    assert gprbtd.__version__.count(".") == 2


def test_simulated_lane_layout():
    lane = gprbtd.simulate_lane(SPEC, 1)
    s = lane["samples"]
    assert lane["lane_id"] == "lane_01"
    assert s.ndim == 3 and s.shape[2] == 160
    assert s.flags.f_contiguous
    assert np.isfinite(s).all()
    assert len(lane["truth"]) == 2
    assert lane["area_m2"] == pytest.approx(s.shape[1] * lane["dx"] * s.shape[2] * lane["dy"])
    again = gprbtd.simulate_lane(SPEC, 1)
    assert np.array_equal(again["samples"], s)


def test_bad_spec_key():
    with pytest.raises(gprbtd.ConfigError, match="n_threat"):
        gprbtd.simulate_lane("n_threat = 2\n")


def test_roc_and_auc():
    stat = np.array([4.0, 3.0, 2.0, 1.0])
    threat = np.array([0, -1, 1, -1], dtype=np.int32)
    curve = gprbtd.roc(stat, threat, 2, 10.0)
    np.testing.assert_allclose(curve, [[0.0, 0.5], [0.1, 1.0], [0.2, 1.0]])
    assert gprbtd.auc(curve, 0.0, 0.2) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        gprbtd.roc(stat, threat[:2], 2, 10.0)


def test_platt_is_a_logistic():
    assert gprbtd.platt(-2.0, 0.0, 0.0) == pytest.approx(0.5)
    assert gprbtd.platt(-2.0, 0.0, 1.0) == pytest.approx(1 / (1 + np.exp(-2.0)))


def test_config_round_trip():
    dump = gprbtd.config_dump("lg_subsample = 1.0\n")
    assert "lg_subsample = 1" in dump
    assert set(gprbtd.config_keys()) <= set(line.split(" = ")[0] for line in dump.splitlines())
    with pytest.raises(gprbtd.ConfigError):
        gprbtd.config_dump("no_such_key = 1\n")


def test_cli_simulate_and_read(tmp_path):
    spec = tmp_path / "sim.txt"
    spec.write_text("lanes = 1\n" + SPEC)
    rc, out, err = gprbtd.run_cli(["simulate", "--spec", str(spec), "--out", str(tmp_path / "lanes")])
    assert rc == 0, err
    lane = gprbtd.read_lane(str(tmp_path / "lanes" / "lane_00.json"))
    direct = gprbtd.simulate_lane(SPEC, 0)
    np.testing.assert_array_equal(lane["samples"], direct["samples"].astype(np.float32).astype(np.float64))
    rc, _, err = gprbtd.run_cli(["simulate", "--spec", str(spec), "--out", str(tmp_path / "lanes")])
    assert rc == 2 and "--force" in err
    with pytest.raises(gprbtd.DataError):
        gprbtd.read_lane(str(tmp_path / "missing.json"))
