import json

import numpy as np
import pytest

from wqed import cli, lattice
from wqed.artifacts import read_csv

FAST = {
    "spectrum2le": {},
    "twophoton2le": {"n": 201},
    "g2coherent": {"n": 21},
    "router": {"n": 401},
    "latticeT": {"Gamma": 0.4, "n_sites": 256, "detunings_over_Gamma": [-1.0, 0.0, 1.0]},
    "latticeG2": {"n_sites": 96},
    "rydbergRun": {"n_points": 513, "n_tau": 21},
    "rydbergBound": {"points_per_rB": 100},
    "blochCheck": {"n": 21},
}


def write_config(path, experiment, params=None, **extra):
    path.write_text(json.dumps({"experiment": experiment, "params": params or {}, **extra}))
    return path


def test_catalog(capsys):
    entries = cli.list_experiments()
    assert len(entries) == 9
    anchors = {name: anchor for name, anchor, _ in entries}
    assert "ATS" in anchors["router"] and "Omega_c" in anchors["router"]
    assert "1e-2" in anchors["latticeT"]
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in anchors)


@pytest.mark.parametrize("experiment", sorted(FAST))
def test_every_experiment_runs(tmp_path, experiment):
    cfg = write_config(tmp_path / "c.json", experiment, FAST[experiment])
    code, manifest = cli.run(experiment, cfg, tmp_path / "out")
    assert code == 0
    assert manifest["files"]
    for name, digest in manifest["files"].items():
        assert (tmp_path / "out" / name).exists()
        assert len(digest) == 64
    saved = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert saved["files"] == manifest["files"]
    assert saved["knobs"]
    assert "numpy" in saved["versions"] and "wall_time_s" in saved


def test_spectrum_reflects_fully_on_resonance(tmp_path):
    cfg = write_config(tmp_path / "c.json", "spectrum2le")
    assert cli.main(["spectrum2le", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    names, data = read_csv(tmp_path / "o" / "spectrum.csv")
    assert names == ["delta_over_Gamma", "T", "R"]
    i0 = int(np.argmin(np.abs(data[:, 0])))
    assert data[i0, 0] == 0.0
    assert data[i0, 2] == 1.0
    assert (tmp_path / "o" / "spectrum.csv").read_text().startswith("# wqed spectrum2le:")


@pytest.mark.parametrize("config", [
    {"experiment": "spectrum2le", "colour": "red"},
    {"experiment": "spectrum2le", "params": {"Gama": 1.0}},
    {"experiment": "spectrum2le", "params": {"n": 10.5}},
    {"experiment": "spectrum2le", "params": {"Gamma": "one"}},
    {"experiment": "spectrum2le", "params": {"Gamma": -1.0}},
    {"experiment": "router"},
    {"experiment": "spectrum2le", "seed": 1.5},
])
def test_invalid_configs_exit_2(tmp_path, config):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config))
    assert cli.main(["spectrum2le", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_missing_or_malformed_config_exit_2(tmp_path):
    assert cli.main(["spectrum2le"]) == 2
    assert cli.main(["spectrum2le", "--config", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["spectrum2le", "--config", str(bad)]) == 2
    assert cli.main(["nosuch", "--config", str(bad)]) == 2


@pytest.mark.parametrize("error", [lattice.NormDriftError, lattice.BoundaryContaminationError])
def test_runtime_abort_exit_3(tmp_path, monkeypatch, error):
    def failing(p, threads):
        raise error("simulated abort", {"edge_probability": 0.5})

    exp = cli.EXPERIMENTS["latticeT"]
    monkeypatch.setitem(cli.EXPERIMENTS, "latticeT", cli.Experiment(exp.name, exp.anchor, exp.defaults, failing))
    cfg = write_config(tmp_path / "c.json", "latticeT")
    assert cli.main(["latticeT", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["exit_code"] == 3 and manifest["status"] == "aborted"
    assert manifest["diagnostics"] == {"edge_probability": 0.5}


def test_real_boundary_abort(tmp_path, monkeypatch):
    monkeypatch.setattr(lattice, "WALL_WIDTHS", 0.3)
    cfg = write_config(tmp_path / "c.json", "latticeT",
                       {"Gamma": 0.4, "n_sites": 128, "sigma_k": 1 / 23, "detunings_over_Gamma": [0.0]})
    code, manifest = cli.run("latticeT", cfg, tmp_path / "o")
    assert code == 3
    assert manifest["diagnostics"]["edge_probability"] > lattice.EDGE_TOLERANCE


@pytest.mark.parametrize("experiment", ["spectrum2le", "router", "latticeT", "rydbergRun"])
def test_repeated_runs_are_byte_identical(tmp_path, experiment):
    cfg = write_config(tmp_path / "c.json", experiment, FAST[experiment])
    _, first = cli.run(experiment, cfg, tmp_path / "a", threads=1)
    _, second = cli.run(experiment, cfg, tmp_path / "b", threads=1)
    assert first["files"] == second["files"]
    for name in first["files"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_threads_do_not_change_output(tmp_path):
    cfg = write_config(tmp_path / "c.json", "router", FAST["router"])
    _, one = cli.run("router", cfg, tmp_path / "a", threads=1)
    _, four = cli.run("router", cfg, tmp_path / "b", threads=4)
    assert one["files"] == four["files"]


def test_output_directory_resolution(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write_config(tmp_path / "c.json", "spectrum2le", {"n": 11})
    monkeypatch.setenv("WQED_OUT", str(tmp_path / "env"))
    cli.run("spectrum2le", cfg)
    assert (tmp_path / "env" / "spectrum.csv").exists()
    cfg = write_config(tmp_path / "c.json", "spectrum2le", {"n": 11}, output_dir=str(tmp_path / "cfg"))
    cli.run("spectrum2le", cfg)
    assert (tmp_path / "cfg" / "spectrum.csv").exists()
    cli.run("spectrum2le", cfg, tmp_path / "flag")
    assert (tmp_path / "flag" / "spectrum.csv").exists()


def test_svg_emitted_on_request(tmp_path):
    cfg = write_config(tmp_path / "c.json", "spectrum2le", {"n": 11})
    assert cli.main(["spectrum2le", "--config", str(cfg), "--out", str(tmp_path / "o"), "--svg"]) == 0
    assert (tmp_path / "o" / "spectrum.svg").read_text().startswith("<svg")


def test_manifest_records_lattice_knobs(tmp_path):
    cfg = write_config(tmp_path / "c.json", "latticeT", FAST["latticeT"])
    _, manifest = cli.run("latticeT", cfg, tmp_path / "o")
    knobs = manifest["knobs"]
    assert {"dt", "steps", "n_sites", "clear_widths", "wall_widths", "edge_tolerance",
            "norm_drift_per_1e4"} <= set(knobs)
    assert knobs["n_sites"] == 256
