import numpy as np
import pytest

from spectral_landscape.errors import ValidationError
from spectral_landscape.experiments import simple_2q, ucc_2q
from spectral_landscape.noise import NoiseRule, NoiseSpec, global_depolarizing
from spectral_landscape.sampler import make_grid, sample_exact, sample_noisy


def test_rule_validation():
    with pytest.raises(ValidationError):
        NoiseRule("bogus")
    with pytest.raises(ValidationError):
        NoiseRule("depolarizing", p=1.5)
    with pytest.raises(ValidationError):
        NoiseRule("pauli", p=0.1)
    with pytest.raises(ValidationError):
        NoiseRule("depolarizing", p=0.1, placement="gate")
    with pytest.raises(ValidationError):
        NoiseRule("param_dependent_pauli", p=0.1, pauli="X")


def test_schedule_placements():
    c, _ = simple_2q(pad=1)
    spec = NoiseSpec([
        NoiseRule("depolarizing", p=0.1),
        NoiseRule("amplitude_damping", gamma=0.2, qubits=[1], placement="gate", gate=2),
        NoiseRule("pauli", p=0.05, pauli="Z", placement="terminal"),
    ])
    sched = spec.schedule(c)
    assert len(sched) == len(c.gates) + 1
    assert [len(s) for s in sched] == [1, 1, 2, 1, 2]
    bad = NoiseSpec([NoiseRule("depolarizing", p=0.1, placement="gate", gate=9)])
    with pytest.raises(ValidationError):
        bad.schedule(c)


def test_aligned_rules_skip_fixed_gates():
    c, _ = simple_2q(pad=1)
    spec = NoiseSpec([NoiseRule("aligned_pauli", p=0.1), NoiseRule("coherent", epsilon=0.1, pauli="gate")])
    assert [len(s) for s in spec.schedule(c)] == [2, 2, 0, 0, 0]


def test_json_roundtrip():
    spec = NoiseSpec([
        NoiseRule("depolarizing", p=0.1, qubits=[0, 1]),
        NoiseRule("param_dependent_pauli", p=0.2, pauli="XI", param=1, alpha=2.0),
    ])
    assert NoiseSpec.from_json(spec.to_json()) == spec


def test_noiseless_spec_matches_exact():
    c, obs = ucc_2q()
    grid = make_grid(2, 5)
    assert np.allclose(sample_noisy(c, NoiseSpec(), obs, grid).values, sample_exact(c, obs, grid).values, atol=1e-10)


def test_depolarizing_every_gate_contracts_by_gate_count():
    for pad in (0, 1, 3):
        c, obs = simple_2q(pad=pad)
        grid = make_grid(2, 5)
        p = 0.05
        noisy = sample_noisy(c, global_depolarizing(p), obs, grid).values
        G = len(c.gates)
        assert np.allclose(noisy, (1 - p) ** G * sample_exact(c, obs, grid).values, atol=1e-12)


def test_terminal_rule_counts_once():
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    spec = NoiseSpec([NoiseRule("depolarizing", p=0.2, placement="terminal")])
    noisy = sample_noisy(c, spec, obs, grid).values
    assert np.allclose(noisy, 0.8 * sample_exact(c, obs, grid).values, atol=1e-12)
