import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_landscape.circuit import Gadget, ParamCircuit, ParamExpr
from spectral_landscape.errors import DimensionError, ValidationError
from spectral_landscape.experiments import simple_2q, ucc_2q
from spectral_landscape.fourier import (
    Spectrum, average_fidelity, average_purity, bootstrap_error, dft, expected_off_support_power,
    figures_of_merit, idft, pauli_coefficient_vectors, shot_noise_sigma, signed_frequencies,
)
from spectral_landscape.noise import NoiseRule, NoiseSpec, global_depolarizing
from spectral_landscape.pauli import PauliString
from spectral_landscape.sampler import Landscape, make_grid, sample_exact, sample_noisy
from spectral_landscape.theory import FrequencySupport, frequency_support

shapes = st.tuples(st.integers(1, 3), st.sampled_from([3, 5, 7]))


def test_signed_frequencies():
    assert signed_frequencies(5).tolist() == [0, 1, 2, -2, -1]


def test_constant_landscape():
    spec = dft(np.full((5, 5), 0.3))
    assert spec[(0, 0)] == pytest.approx(0.3)
    assert len(spec.nonzero()) == 1


def test_product_of_cosines():
    c, obs = simple_2q()
    spec = dft(sample_exact(c, obs, make_grid(2, 5)))
    nz = spec.nonzero(1e-12)
    assert set(nz) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert all(abs(v - 0.25) < 1e-12 for v in nz.values())


def test_ucc_two_coefficients():
    c, obs = ucc_2q()
    nz = dft(sample_exact(c, obs, make_grid(2, 5))).nonzero(1e-12)
    assert set(nz) == {(1, 1), (-1, -1)}
    assert all(abs(v - 0.5) < 1e-12 for v in nz.values())


def test_index_beyond_resolution():
    spec = dft(np.zeros((5,)))
    with pytest.raises(IndexError):
        spec[(3,)]


def test_spectrum_json_roundtrip():
    c, obs = ucc_2q()
    spec = dft(sample_exact(c, obs, make_grid(2, 5)))
    back = Spectrum.from_json(spec.to_json())
    assert np.allclose(back.coeffs, spec.coeffs, atol=1e-12)
    assert len(spec.to_json()["coeffs"]) == 2


@given(shapes, st.integers(0, 2**31))
@settings(max_examples=50, deadline=None)
def test_transform_invariants(shape, seed):
    m, d = shape
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(d,) * m)
    y = rng.normal(size=(d,) * m)
    a, b = rng.normal(size=2)
    cx = dft(x).coeffs
    assert np.allclose(idft(dft(x)).values, x, atol=1e-10)
    assert np.sum(x**2) == pytest.approx(d**m * np.sum(np.abs(cx) ** 2), rel=1e-9)
    assert np.allclose(dft(a * x + b * y).coeffs, a * cx + b * dft(y).coeffs, atol=1e-12)
    mirror = cx[tuple(np.ix_(*[(-np.arange(d)) % d] * m))]
    assert np.allclose(mirror, cx.conj(), atol=1e-10)
    dist = np.linalg.norm(x - y)
    assert dist == pytest.approx(np.sqrt(d**m) * np.linalg.norm(cx - dft(y).coeffs))


def test_merits_noiseless_and_spike():
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    spec = dft(sample_exact(c, obs, grid))
    support = frequency_support(c, obs)
    rep = figures_of_merit(spec, support)
    assert rep.P_N < 1e-30 and rep.SNR is None
    assert rep.P_S == pytest.approx(4 / 16)
    spiked = spec.coeffs.copy()
    spiked[(2, 0)] = 0.1
    rep = figures_of_merit(spec.with_coeffs(spiked), support, spec)
    assert rep.P_N == pytest.approx(0.01)
    assert rep.P_N_off_support == pytest.approx(0.01)
    assert rep.P_N_on_support == pytest.approx(0)
    assert rep.SNR == pytest.approx(25)


def test_merits_depolarizing():
    c, obs = simple_2q(pad=1)
    grid = make_grid(2, 5)
    p = 0.03
    exact = dft(sample_exact(c, obs, grid))
    noisy = dft(sample_noisy(c, global_depolarizing(p), obs, grid))
    rep = figures_of_merit(noisy, frequency_support(c, obs), exact)
    G = len(c.gates)
    assert rep.P_N_off_support < 1e-25
    assert rep.P_S == pytest.approx((1 - p) ** (2 * G) * exact.power())
    with pytest.raises(DimensionError):
        figures_of_merit(noisy, frequency_support(c, obs), dft(np.zeros((7, 7))))


def test_shot_noise_sigma_examples():
    assert shot_noise_sigma(np.zeros((5, 5)), 100) == pytest.approx(1 / np.sqrt(5000))
    assert shot_noise_sigma(np.ones((5, 5)), 100) == 0
    assert shot_noise_sigma(-np.ones((5, 5)), 100) == 0
    with pytest.raises(ValidationError):
        shot_noise_sigma(np.full((3,), 1.5), 10)


def test_expected_off_support_power():
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    land = sample_exact(c, obs, grid)
    sup = frequency_support(c, obs)
    sigma = shot_noise_sigma(land, 100)
    assert expected_off_support_power(land, 100, sup) == pytest.approx(16 * 2 * sigma**2)


def one_qubit_circuit():
    return ParamCircuit(1, 1, (Gadget(PauliString("Y"), ParamExpr(1.0, 0)),), "0")


def test_average_fidelity_examples():
    c = one_qubit_circuit()
    grid = make_grid(1, 5)
    exact = pauli_coefficient_vectors(c, None, grid)
    assert average_fidelity(exact, exact, 1) == pytest.approx(1)
    assert average_purity(exact, 1) == pytest.approx(1)
    p = 0.2
    noisy = pauli_coefficient_vectors(c, global_depolarizing(p), grid)
    assert average_fidelity(exact, noisy, 1) == pytest.approx(1 - p / 2)
    with pytest.raises(DimensionError):
        average_fidelity(exact, pauli_coefficient_vectors(c, None, make_grid(1, 7)), 1)


def test_average_purity_coherent_noise():
    c, _ = ucc_2q()
    grid = make_grid(2, 5)
    noise = NoiseSpec([NoiseRule("coherent", epsilon=0.3, pauli="XX")])
    assert average_purity(pauli_coefficient_vectors(c, noise, grid), 2) == pytest.approx(1, abs=1e-9)


def test_random_pauli_subset_is_flagged():
    c = ParamCircuit(4, 1, (Gadget(PauliString("YIII"), ParamExpr(1.0, 0)),))
    vecs = pauli_coefficient_vectors(c, None, make_grid(1, 3), n_random=40, seed=1)
    assert not vecs.exhaustive and len(vecs.paulis) == 40
    # estimator of the purity of a pure state, unbiased over the subset choice
    assert 0.3 < average_purity(vecs, 4) < 3


def test_bootstrap_deterministic_outcomes():
    c = ParamCircuit(1, 1, (Gadget(PauliString("Z"), ParamExpr(1.0, 0)),), "0")
    land = sample_noisy(c, None, PauliString("Z"), make_grid(1, 5), shots=50, seed=0)
    res = bootstrap_error(land, resamples=50, seed=0, support=FrequencySupport((np.array([0.0]),)))
    assert np.all(res.coeff_re_std == 0) and np.all(res.coeff_im_std == 0)
    assert res.merit_std["P_S"] == 0


def test_bootstrap_needs_records():
    with pytest.raises(ValidationError):
        bootstrap_error(Landscape(make_grid(1, 3), np.zeros(3)))


def test_bootstrap_reproducible_and_scaling():
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    stds = []
    for shots in (100, 400, 1600):
        land = sample_noisy(c, None, obs, grid, shots=shots, seed=1)
        res = bootstrap_error(land, resamples=300, seed=2)
        stds.append(np.mean(res.coeff_re_std))
    assert stds[0] / stds[1] == pytest.approx(2, rel=0.15)
    assert stds[1] / stds[2] == pytest.approx(2, rel=0.15)
    land = sample_noisy(c, None, obs, grid, shots=100, seed=1)
    a = bootstrap_error(land, resamples=20, seed=5)
    b = bootstrap_error(land, resamples=20, seed=5)
    assert np.array_equal(a.coeff_re_std, b.coeff_re_std)


def test_bootstrap_zero_mode_matches_prediction():
    # c_0 is real, and its real part collects the noise of both the cosine and
    # sine halves, so its std is sqrt(2) times the per-part prediction
    c, obs = simple_2q()
    grid = make_grid(2, 5)
    land = sample_noisy(c, None, obs, grid, shots=1000, seed=4)
    res = bootstrap_error(land, resamples=1000, seed=0)
    sigma = shot_noise_sigma(sample_exact(c, obs, grid), 1000)
    assert res.coeff_re_std[0, 0] == pytest.approx(np.sqrt(2) * sigma, rel=0.25)
    # nonzero frequencies follow the per-part prediction directly
    assert np.median(res.coeff_re_std[1:, 1:]) == pytest.approx(sigma, rel=0.25)
