import json

import numpy as np
import pytest

from spectral_landscape.cli import RunConfig, cmd_diagnose, cmd_mitigate, cmd_sample, main
from spectral_landscape.experiments import simple_2q
from spectral_landscape.fourier import shot_noise_sigma
from spectral_landscape.sampler import Landscape, make_grid, sample_exact
from spectral_landscape.theory import frequency_support

PAD_NOISE = {"rules": [
    {"kind": "depolarizing", "p": 0.01},
    {"kind": "param_dependent_pauli", "p": 0.02, "pauli": "XI", "param": 0, "alpha": 2.0},
]}


def write_config(path, **kw):
    cfg = {"circuit": {"builtin": "simple_2q"}, "grid": {"d": 5}, "seed": 1}
    cfg.update(kw)
    path.write_text(json.dumps(cfg))
    return str(path)


def run(argv):
    return main([str(a) for a in argv])


def test_sample_exact_and_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    assert run(["sample", "--config", cfg, "--out", tmp_path / "a"]) == 0
    assert run(["sample", "--config", cfg, "--out", tmp_path / "b"]) == 0
    data = json.loads((tmp_path / "a" / "landscape.json").read_text())
    t = 2 * np.pi * np.arange(5) / 5
    assert len(data["values"]) == 25
    assert np.allclose(data["values"], np.outer(np.cos(t), np.cos(t)).ravel(), atol=1e-12)
    assert data["meta"]["config_hash"] == RunConfig.load(cfg).digest()
    assert (tmp_path / "a" / "landscape.json").read_bytes() == (tmp_path / "b" / "landscape.json").read_bytes()


def test_sample_shots_reproducible(tmp_path):
    cfg = write_config(tmp_path / "run.json", noise=PAD_NOISE, shots=64)
    for name in ("a", "b"):
        assert run(["sample", "--config", cfg, "--out", tmp_path / name, "--seed", 5]) == 0
    a = json.loads((tmp_path / "a" / "landscape.json").read_text())
    b = json.loads((tmp_path / "b" / "landscape.json").read_text())
    assert a["values"] == b["values"] and a["seed"] == 5


def test_even_d_is_validation_error(tmp_path, caplog):
    cfg = write_config(tmp_path / "run.json", grid={"d": 6})
    assert run(["sample", "--config", cfg, "--out", tmp_path]) == 2
    assert "2N+1" in caplog.text


def test_missing_file_is_io_error(tmp_path):
    assert run(["sample", "--config", tmp_path / "nope.json"]) == 4


def test_unknown_key_is_validation_error(tmp_path):
    cfg = write_config(tmp_path / "run.json", colour="blue")
    assert run(["sample", "--config", cfg]) == 2


def test_diagnose_noiseless(tmp_path):
    cfg = write_config(tmp_path / "run.json", out=str(tmp_path))
    run(["sample", "--config", cfg])
    assert run(["diagnose", "--config", cfg, "--landscape", tmp_path / "landscape.json",
                "--exact", tmp_path / "exact.json"]) == 0
    merits = json.loads((tmp_path / "merits.json").read_text())
    assert merits["P_N"] < 1e-15 and merits["SNR"] is None
    assert (tmp_path / "spectrum.csv").read_text().count("\n") == 26
    spec = json.loads((tmp_path / "spectrum.json").read_text())
    assert len(spec["coeffs"]) == 4


def test_diagnose_padding_series_is_monotone(tmp_path):
    powers, deviations = [], []
    for pad in (0, 1, 2, 4):
        d = tmp_path / f"pad{pad}"
        cfg = write_config(tmp_path / f"run{pad}.json", circuit={"builtin": "simple_2q", "pad": pad},
                           noise=PAD_NOISE, out=str(d))
        run(["sample", "--config", cfg])
        run(["diagnose", "--config", cfg, "--landscape", d / "landscape.json", "--exact", d / "exact.json"])
        merits = json.loads((d / "merits.json").read_text())
        powers.append(merits["P_N"])
        deviations.append(merits["P_N_on_support"] + merits["P_N_off_support"])
    assert all(a < b for a, b in zip(powers, powers[1:]))
    assert all(a < b for a, b in zip(deviations, deviations[1:]))


def test_diagnose_shot_only_matches_prediction(tmp_path):
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    expected = (25 - 9) * 2 * shot_noise_sigma(sample_exact(c, obs, grid), 200) ** 2
    ratios = []
    for seed in range(5):
        cfg = RunConfig(shots=200, seed=seed, out=str(tmp_path / str(seed)))
        cmd_sample(cfg)
        rep = cmd_diagnose(cfg, str(tmp_path / str(seed) / "landscape.json"))
        ratios.append(rep["P_N"] / expected)
    assert all(1 / 3 < r < 3 for r in ratios)
    assert frequency_support(c, obs).mask(grid).sum() == 9


def test_diagnose_rejects_other_circuit(tmp_path):
    cfg = write_config(tmp_path / "run.json", out=str(tmp_path))
    run(["sample", "--config", cfg])
    other = write_config(tmp_path / "other.json", circuit={"builtin": "ucc_2q"}, out=str(tmp_path / "o"))
    assert run(["diagnose", "--config", other, "--landscape", tmp_path / "landscape.json"]) == 2


def test_mitigate_none_and_preset(tmp_path):
    cfg = write_config(tmp_path / "run.json", noise={"rules": [{"kind": "depolarizing", "p": 0.02}]},
                       shots=500, mitigation={"method": "none"}, out=str(tmp_path))
    run(["sample", "--config", cfg])
    assert run(["mitigate", "--config", cfg, "--landscape", tmp_path / "landscape.json"]) == 0
    raw = Landscape.load(tmp_path / "landscape.json")
    assert np.array_equal(Landscape.load(tmp_path / "mitigated.json").values, raw.values)

    cfg = write_config(tmp_path / "ucc.json", circuit={"builtin": "ucc_h2_singles"}, grid={"d": 7},
                       noise={"rules": [{"kind": "depolarizing", "p": 0.01}]}, shots=256,
                       mitigation={"preset": "ucc", "training_size": 12}, out=str(tmp_path / "u"))
    run(["sample", "--config", cfg])
    u = tmp_path / "u"
    assert run(["mitigate", "--config", cfg, "--landscape", u / "landscape.json", "--exact", u / "exact.json"]) == 0
    report = json.loads((u / "mitigation_report.json").read_text())
    assert report["method"] == "threshold_hard" and report["B"] == 3
    assert report["cdr"]["D"] == 2 and report["cdr"]["training_size"] == 12
    assert set(report["metrics"]["raw"]) == {"cosine", "euclidean"}
    assert report["config_hash"] == RunConfig.load(cfg).digest()


def test_mitigate_qaoa_preset_takes_threshold_path(tmp_path):
    cfg = RunConfig(circuit={"builtin": "qaoa_maxcut", "graph_seed": 0}, grid={"d": 5},
                    noise={"rules": [{"kind": "depolarizing", "p": 0.01, "qubits": "targets"}]},
                    shots=None, mitigation={"preset": "qaoa", "cdr": False}, out=str(tmp_path))
    assert cfg.mitigation_config().B == 10
    cmd_sample(cfg)
    report = cmd_mitigate(cfg, str(tmp_path / "landscape.json"), str(tmp_path / "exact.json"))
    assert report["method"] == "threshold_hard" and report["B"] == 10 and report["T"] is not None


def test_reconstruct(tmp_path):
    cfg = write_config(tmp_path / "run.json", noise={"rules": [{"kind": "depolarizing", "p": 0.05}]},
                       shots=100, out=str(tmp_path))
    run(["sample", "--config", cfg])
    assert run(["reconstruct", "--config", cfg, "--landscape", tmp_path / "landscape.json"]) == 0
    result = json.loads((tmp_path / "trigform.json").read_text())
    assert result["exact_recovery"] is True
    assert result["trig_form"]["monomials"] == [{"k": [1, 1], "coeff": 1.0}]


def test_reconstruct_one_shot_reports_flag(tmp_path):
    cfg = write_config(tmp_path / "run.json", shots=1, out=str(tmp_path))
    run(["sample", "--config", cfg])
    assert run(["reconstruct", "--config", cfg, "--landscape", tmp_path / "landscape.json"]) == 0
    assert json.loads((tmp_path / "trigform.json").read_text())["exact_recovery"] in (True, False)


def test_reconstruct_hypothesis_violation(tmp_path):
    circ = {"n_qubits": 1, "gates": [
        {"kind": "fixed", "name": "t", "targets": [0]},
        {"kind": "gadget", "pauli": "Y", "param": 0},
    ], "observable": "Z"}
    (tmp_path / "c.json").write_text(json.dumps(circ))
    cfg = write_config(tmp_path / "run.json", circuit={"path": str(tmp_path / "c.json")}, out=str(tmp_path))
    assert run(["sample", "--config", cfg]) == 0
    assert run(["reconstruct", "--config", cfg, "--landscape", tmp_path / "landscape.json"]) == 3


def test_export_qasm_and_gen_graph(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", out=str(tmp_path))
    assert run(["export-qasm", "--config", cfg, "--theta", 1.5707963267948966, 0]) == 0
    text = (tmp_path / "circuit.qasm").read_text()
    assert "ry(pi/2) q[0];" in text
    assert run(["gen-graph", "--nodes", 8, "--seed", 2, "--out", tmp_path]) == 0
    graph = json.loads((tmp_path / "graph.json").read_text())
    assert len(graph["edges"]) == 12
    capsys.readouterr()


def test_graph_file_feeds_qaoa(tmp_path):
    run(["gen-graph", "--nodes", 8, "--seed", 2, "--out", tmp_path])
    graph = json.loads((tmp_path / "graph.json").read_text())
    cfg = RunConfig(circuit={"builtin": "qaoa_maxcut", "edges": graph["edges"]})
    c, obs = cfg.build()
    assert c.n_qubits == 8 and len(obs.terms) == 12


@pytest.mark.parametrize("verb", ["diagnose", "mitigate", "reconstruct"])
def test_missing_landscape_is_io_error(tmp_path, verb):
    cfg = write_config(tmp_path / "run.json", out=str(tmp_path))
    assert run([verb, "--config", cfg, "--landscape", tmp_path / "none.json"]) == 4
