import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_landscape import qsim
from spectral_landscape.errors import DimensionError, ValidationError
from spectral_landscape.pauli import PauliString

X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def random_density(n, rng, rank=None):
    dim = 2**n
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return qsim.DensityMatrix(n, rho / np.trace(rho))


def random_pure(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return qsim.PureState(n, v / np.linalg.norm(v))


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_x_flips_zero():
    out = qsim.apply_gate(qsim.PureState.from_label("0"), X, [0])
    assert np.allclose(out.amplitudes, [0, 1])


def test_hh_is_identity():
    s = qsim.PureState.from_label("0")
    out = qsim.apply_gate(qsim.apply_gate(s, H, [0]), H, [0])
    assert np.allclose(out.amplitudes, [1, 0], atol=1e-12)


def test_z_rotation_on_plus():
    theta = 0.7
    # hand-computed: exp(-i theta Z / 2) = diag(e^{-i theta/2}, e^{i theta/2})
    u = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    out = qsim.apply_gate(qsim.PureState.from_label("+"), u, [0])
    assert np.isclose(qsim.expectation(out, PauliString("X")), np.cos(theta))


def test_apply_gate_matches_dense_kron():
    rng = np.random.default_rng(0)
    psi = random_pure(3, rng)
    u = random_unitary(4, rng)
    out = qsim.apply_gate(psi, u, [2, 0])
    # build the full operator by permuting qubits: targets (2, 0) with 1 as spectator
    full = np.kron(u, np.eye(2)).reshape([2] * 6)  # axes (q2, q0, q1 | q2', q0', q1')
    full = full.transpose(1, 2, 0, 4, 5, 3).reshape(8, 8)
    assert np.allclose(out.amplitudes, full @ psi.amplitudes)


def test_apply_gate_errors():
    s = qsim.PureState.from_label("00")
    with pytest.raises(ValidationError):
        qsim.apply_gate(s, np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(DimensionError):
        qsim.apply_gate(s, np.eye(4), [0])
    with pytest.raises(ValidationError):
        qsim.apply_gate(s, np.eye(4), [0, 0])
    with pytest.raises(ValidationError):
        qsim.apply_gate(s, X, [2])


def test_density_invariants_checked():
    with pytest.raises(ValidationError):
        qsim.DensityMatrix(1, np.diag([0.7, 0.7]))
    with pytest.raises(ValidationError):
        qsim.DensityMatrix(1, np.array([[1.5, 0], [0, -0.5]]))
    with pytest.raises(ValidationError):
        qsim.PureState(1, [1, 1])


def test_full_depolarization():
    rho = qsim.PureState.from_label("0").to_density()
    out = qsim.apply_channel(rho, qsim.depolarizing(1.0))
    assert np.allclose(out.matrix, np.eye(2) / 2)


def test_pauli_channel_formula_and_zero():
    rng = np.random.default_rng(1)
    rho = random_density(1, rng)
    z = np.diag([1, -1])
    out = qsim.apply_channel(rho, qsim.pauli_channel(0.3, "Z"))
    assert np.allclose(out.matrix, 0.7 * rho.matrix + 0.3 * z @ rho.matrix @ z)
    same = qsim.apply_channel(rho, qsim.pauli_channel(0.0, "Z"))
    assert np.allclose(same.matrix, rho.matrix)


def test_full_amplitude_damping():
    rho = qsim.PureState.from_label("1").to_density()
    out = qsim.apply_channel(rho, qsim.amplitude_damping(1.0, 0))
    assert np.allclose(out.matrix, np.diag([1, 0]))


def test_channel_validation():
    with pytest.raises(ValidationError):
        qsim.depolarizing(1.2)
    with pytest.raises(ValidationError):
        qsim.amplitude_damping(-0.1, 0)
    ch = qsim.param_dependent_pauli(0.2, "X", param=0)
    rho = qsim.DensityMatrix.maximally_mixed(1)
    with pytest.raises(ValidationError):
        qsim.apply_channel(rho, ch)


def test_partial_depolarizing_matches_kraus():
    rng = np.random.default_rng(2)
    rho = random_density(3, rng)
    ch = qsim.depolarizing(0.37, qubits=(0, 2))
    fast = qsim.apply_channel(rho, ch).matrix
    ops, qs = ch.kraus(3)
    slow = qsim.kraus_rho(rho.matrix, ops, qs, 3)
    assert np.allclose(fast, slow)


def all_channels(n):
    return [
        qsim.depolarizing(0.3),
        qsim.depolarizing(0.2, qubits=(0,)),
        qsim.pauli_channel(0.25, "X" + "Z" * (n - 1)),
        qsim.amplitude_damping(0.4, n - 1),
        qsim.coherent(0.3, "Y" * n),
        qsim.param_dependent_pauli(0.5, "Z" + "I" * (n - 1), param=0, alpha=2.0),
    ]


def test_kraus_completeness():
    for ch in all_channels(2):
        ops, qs = ch.kraus(2, theta=np.array([0.4]))
        total = sum(k.conj().T @ k for k in ops)
        assert np.allclose(total, np.eye(2 ** len(qs)), atol=1e-10)


def test_trace_preservation_random_inputs():
    rng = np.random.default_rng(3)
    for _ in range(200):
        rho = random_density(2, rng)
        theta = rng.uniform(0, 2 * np.pi, size=1)
        for ch in all_channels(2):
            out = qsim.apply_channel(rho, ch, theta)
            assert abs(np.trace(out.matrix) - 1) < 1e-10


def test_coherent_preserves_purity():
    rng = np.random.default_rng(4)
    for _ in range(20):
        rho = random_density(2, rng, rank=2)
        out = qsim.apply_channel(rho, qsim.coherent(rng.normal(), "XY"))
        assert abs(qsim.purity(out) - qsim.purity(rho)) < 1e-10


def test_heisenberg_consistency():
    rng = np.random.default_rng(5)
    obs = PauliString("ZX").matrix() + 0.3 * PauliString("YY").matrix()
    for _ in range(20):
        rho = random_density(2, rng)
        theta = rng.uniform(0, 2 * np.pi, size=1)
        for ch in all_channels(2):
            lhs = np.trace(obs @ qsim.apply_channel(rho, ch, theta).matrix)
            rhs = np.trace(qsim.apply_channel_adjoint(obs, ch, 2, theta) @ rho.matrix)
            assert abs(lhs - rhs) < 1e-9


def test_expectation_examples():
    assert qsim.expectation(qsim.PureState.from_label("00"), PauliString("ZZ")) == pytest.approx(1)
    t1, t2 = 0.4, 1.9
    ry = lambda t: scipy.linalg.expm(-0.5j * t * np.array([[0, -1j], [1j, 0]]))
    psi = qsim.PureState(2, np.kron(ry(t1), ry(t2)) @ qsim.product_state_vector("00"))
    assert qsim.expectation(psi, PauliString("ZZ")) == pytest.approx(np.cos(t1) * np.cos(t2))
    with pytest.raises(DimensionError):
        qsim.expectation(psi, PauliString("Z"))


def test_fidelity_examples():
    zero = qsim.PureState.from_label("0")
    assert qsim.fidelity(zero.to_density(), zero) == pytest.approx(1)
    rng = np.random.default_rng(6)
    assert qsim.fidelity(qsim.DensityMatrix.maximally_mixed(1), random_pure(1, rng)) == pytest.approx(0.5)


def test_fidelity_pauli_sum_matches_inner_product():
    rng = np.random.default_rng(7)
    for _ in range(100):
        rho, psi = random_density(2, rng), random_pure(2, rng)
        direct = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes).real
        assert abs(qsim.fidelity_pauli_sum(rho, psi) - direct) < 1e-9


def test_purity_examples():
    assert qsim.purity(qsim.PureState.from_label("+-").to_density()) == pytest.approx(1)
    assert qsim.purity(qsim.DensityMatrix.maximally_mixed(3)) == pytest.approx(1 / 8)
    p = 0.3
    out = qsim.apply_channel(qsim.PureState.from_label("0").to_density(), qsim.depolarizing(p))
    # rho = diag(1 - p/2, p/2) by hand
    assert qsim.purity(out) == pytest.approx((1 - p / 2) ** 2 + (p / 2) ** 2)


@given(st.floats(0, 2 * np.pi), st.sampled_from(["X", "Y", "Z", "XZ", "YY"]))
@settings(max_examples=40, deadline=None)
def test_gadget_kernels_match_expm(angle, letters):
    p = PauliString(letters)
    u = scipy.linalg.expm(-0.5j * angle * p.matrix())
    rng = np.random.default_rng(0)
    rho = random_density(len(letters), rng).matrix
    psi = random_pure(len(letters), rng).amplitudes
    assert np.allclose(qsim.gadget_vec(psi, p, angle), u @ psi)
    assert np.allclose(qsim.gadget_rho(rho, p, angle), u @ rho @ u.conj().T)


def test_superoperator_row_major():
    rng = np.random.default_rng(8)
    u = random_unitary(2, rng)
    rho = random_density(1, rng).matrix
    assert np.allclose(qsim.superoperator(u) @ rho.ravel(), (u @ rho @ u.conj().T).ravel())
