import json

import numpy as np
import pytest

from orbitforms.cli import main


def write_config(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


TODA_SIM = {
    "model": "toda-aks",
    "size": 2,
    "chart": "ub",
    "initial": {"u": [0.1, -0.2], "b": [1.0, 1.5]},
    "flows": [1],
    "T": 1.0,
    "h": 1e-3,
    "seed": 0,
}


def read_csv(path):
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, data


def test_simulate_zero_time_single_row(tmp_path):
    doc = dict(TODA_SIM, T=0.0, size=1, initial={"u": [0.0], "b": [1.0]})
    cfg = write_config(tmp_path, "sim.json", doc)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, data = read_csv(tmp_path / "toda-aks-t1.csv")
    assert header == ["t", "u1", "b1", "H1", "H2", "charpoly_c1", "charpoly_c2"]
    assert data.shape[0] == 1
    np.testing.assert_allclose(data[0], [0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0], atol=1e-15)


def test_simulate_conserves_hamiltonian_column(tmp_path):
    cfg = write_config(tmp_path, "sim.json", TODA_SIM)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, data = read_csv(tmp_path / "toda-aks-t1.csv")
    h1 = data[:, header.index("H1")]
    assert np.abs(h1 - h1[0]).max() <= 1e-9
    assert data.shape[0] == 1001


def test_simulate_deterministic_outputs(tmp_path):
    doc = dict(TODA_SIM)
    doc.pop("initial")  # sampled from the seed
    cfg = write_config(tmp_path, "sim.json", doc)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out1), "--seed", "5"]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2), "--seed", "5"]) == 0
    assert (out1 / "toda-aks-t1.csv").read_bytes() == (out2 / "toda-aks-t1.csv").read_bytes()


def test_simulate_gaudin_complex_columns(tmp_path):
    doc = {
        "model": "gaudin",
        "sites": 2,
        "n": 2,
        "poles": [[0.0, 0.0], [1.0, 0.5]],
        "seed": 3,
        "flows": [[1, 0]],
        "T": 0.1,
        "h": 1e-3,
    }
    cfg = write_config(tmp_path, "sim.json", doc)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, data = read_csv(tmp_path / "gaudin-t1-site0.csv")
    assert header[0] == "t"
    assert "A1_11_re" in header and "A1_11_im" in header
    assert "H1_re" in header and "H2_im" in header
    assert "charpoly_c1_re" in header and "charpoly_c2_im" in header
    h1 = data[:, header.index("H1_re")] + 1j * data[:, header.index("H1_im")]
    assert np.abs(h1 - h1[0]).max() <= 1e-9  # conserved along its own flow


def test_simulate_rejects_bad_flow(tmp_path):
    cfg = write_config(tmp_path, "sim.json", dict(TODA_SIM, flows=[3]))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_malformed_config_is_config_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2


def test_verify_passes_and_writes_report(tmp_path):
    cfg = write_config(
        tmp_path, "ver.json", {"model": "toda-aks", "size": 2, "samples": 10, "seed": 0}
    )
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["model"] == "toda-aks"
    assert report["seed"] == 0
    ids = [c["id"] for c in report["checks"]]
    assert len(ids) == 10
    for check in report["checks"]:
        assert set(check) >= {"id", "samples", "max_residual", "tolerance", "pass"}
        assert check["pass"] is True


def test_verify_forced_failure_via_zero_tolerance(tmp_path):
    cfg = write_config(
        tmp_path,
        "ver.json",
        {"model": "toda-aks", "size": 2, "samples": 5, "checks": ["mcybe", "involution"]},
    )
    assert main(
        ["verify", "--config", cfg, "--out", str(tmp_path), "--tolerance-scale", "0"]
    ) == 1
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert all(not c["pass"] for c in report["checks"])
    assert all(c["max_residual"] > 0 for c in report["checks"])


def test_verify_unknown_check_is_config_error(tmp_path):
    cfg = write_config(
        tmp_path, "ver.json", {"model": "toda-aks", "checks": ["spectral-gap"]}
    )
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_action_identical_paths(tmp_path, capsys):
    doc = {
        "model": "toda-aks",
        "size": 2,
        "initial": {"u": [0.1, -0.2], "b": [1.0, 1.5]},
        "h": 1e-3,
        "paths": [[[1, 0.2], [2, 0.2]], [[1, 0.2], [2, 0.2]]],
    }
    cfg = write_config(tmp_path, "act.json", doc)
    assert main(["action", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "|difference| = 0.0" in out


def test_action_staircase_swap(tmp_path):
    doc = {
        "model": "toda-aks",
        "size": 1,
        "initial": {"u": [0.3], "b": [1.2]},
        "h": 1e-3,
        "tolerance": 1e-6,
        "paths": [[[1, 0.2], [2, 0.2]], [[2, 0.2], [1, 0.2]]],
    }
    cfg = write_config(tmp_path, "act.json", doc)
    assert main(["action", "--config", cfg, "--out", str(tmp_path)]) == 0


def test_action_differing_endpoints_skips_judgment(tmp_path, capsys):
    doc = {
        "model": "toda-aks",
        "size": 2,
        "initial": {"u": [0.4, -0.1], "b": [1.0, 2.0]},
        "h": 1e-3,
        "paths": [[[1, 0.4]], [[2, 0.4]]],
    }
    cfg = write_config(tmp_path, "act.json", doc)
    assert main(["action", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert "endpoints differ" in capsys.readouterr().out


def test_action_needs_two_paths(tmp_path):
    doc = dict(TODA_SIM)
    doc["paths"] = [[[1, 0.1]]]
    cfg = write_config(tmp_path, "act.json", doc)
    assert main(["action", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_unknown_model_is_config_error(tmp_path):
    cfg = write_config(tmp_path, "sim.json", {"model": "calogero", "flows": [1]})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_gaudin_nontraceless_seed_rejected(tmp_path):
    doc = {
        "model": "gaudin",
        "sites": 2,
        "n": 2,
        "poles": [0.0, 1.0],
        "lambda_matrices": [
            [[1.0, 0.0], [0.0, 1.0]],  # trace 2: invalid
            [[1.0, 0.0], [0.0, -1.0]],
        ],
        "flows": [[1, 0]],
    }
    cfg = write_config(tmp_path, "sim.json", doc)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2
