"""Dense statevector and density-matrix simulation.

The public types wrap a single state. The ``*_batch`` kernels below operate on
raw arrays with arbitrary leading batch axes and are what the landscape
sampler uses to evolve every grid point at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .pauli import Observable, PauliString, as_terms, all_paulis

STRUCT_TOL = 1e-10
MAX_STATEVECTOR_QUBITS = 14
MAX_DENSITY_QUBITS = 8

_PRODUCT_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
}


@dataclass
class PureState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionError("amplitude vector has wrong length")
        if abs(np.vdot(self.amplitudes, self.amplitudes).real - 1) > STRUCT_TOL:
            raise ValidationError("state is not normalised")

    @classmethod
    def from_label(cls, label: str) -> "PureState":
        """Product state from a string over ``0 1 + -``."""
        return cls(len(label), product_state_vector(label))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise DimensionError("density matrix has wrong shape")
        if self.check:
            validate_density(self.matrix)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        return cls(n, np.eye(1 << n) / (1 << n))


def validate_density(rho: np.ndarray) -> None:
    if np.max(np.abs(rho - rho.conj().T)) > STRUCT_TOL:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > STRUCT_TOL:
        raise ValidationError("density matrix trace differs from 1")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-9:
        raise ValidationError("density matrix has negative eigenvalues")


def product_state_vector(label: str) -> np.ndarray:
    try:
        vec = np.array([1.0 + 0j])
        for ch in label:
            vec = np.kron(vec, _PRODUCT_STATES[ch])
    except KeyError as exc:
        raise ValidationError(f"unsupported initial-state symbol {exc}") from None
    return vec


# ---------------------------------------------------------------------------
# batched kernels

def _check_targets(targets, n):
    if len(set(targets)) != len(targets):
        raise ValidationError(f"repeated target qubits {targets}")
    if any(q < 0 or q >= n for q in targets):
        raise ValidationError(f"targets {targets} out of range for {n} qubits")


def apply_op_vec(psi: np.ndarray, op: np.ndarray, targets, n: int) -> np.ndarray:
    """Apply a 2^k x 2^k operator on ``targets`` to vectors of shape (..., 2^n)."""
    k = len(targets)
    batch = psi.shape[:-1]
    t = psi.reshape(batch + (2,) * n)
    nb = len(batch)
    opt = op.reshape((2,) * (2 * k))
    axes = [nb + q for q in targets]
    out = np.tensordot(t, opt, axes=(axes, list(range(k, 2 * k))))
    # tensordot puts the new axes last; move them back into place
    out = np.moveaxis(out, list(range(out.ndim - k, out.ndim)), axes)
    return out.reshape(psi.shape)


def apply_op_rho(rho: np.ndarray, left: np.ndarray, targets, n: int, right=None) -> np.ndarray:
    """Return ``L rho R^dagger`` with L, R acting on ``targets``; R defaults to L."""
    right = left if right is None else right
    dim = 1 << n
    batch = rho.shape[:-2]
    # rows: treat each column as a vector
    t = np.swapaxes(rho, -1, -2).reshape(batch + (dim, dim))
    t = apply_op_vec(t, left, targets, n)
    t = np.swapaxes(t, -1, -2)
    return apply_op_vec(t, right.conj(), targets, n)


def gadget_vec(psi: np.ndarray, pauli: PauliString, angle) -> np.ndarray:
    """exp(-i angle P / 2) applied to vectors; ``angle`` broadcasts over batch."""
    a = np.asarray(angle, dtype=float)[..., None] / 2
    return np.cos(a) * psi - 1j * np.sin(a) * pauli.apply(psi, axis=-1)


def gadget_rho(rho: np.ndarray, pauli: PauliString, angle) -> np.ndarray:
    a = np.asarray(angle, dtype=float)[..., None, None] / 2
    c, s = np.cos(a), np.sin(a)
    p_rho = pauli.apply(rho, axis=-2)
    rho_p = pauli.apply_right(rho)
    p_rho_p = pauli.apply_right(p_rho)
    return c * c * rho + s * s * p_rho_p - 1j * c * s * (p_rho - rho_p)


def pauli_channel_rho(rho: np.ndarray, pauli: PauliString, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)[..., None, None]
    return (1 - p) * rho + p * pauli.apply_right(pauli.apply(rho, axis=-2))


def depolarize_rho(rho: np.ndarray, p: float, qubits, n: int) -> np.ndarray:
    """(1-p) rho + p * (I/2^k ⊗ tr_qubits rho)."""
    qubits = tuple(qubits)
    if len(qubits) == n:
        dim = 1 << n
        tr = np.trace(rho, axis1=-2, axis2=-1)[..., None, None]
        return (1 - p) * rho + p * tr * np.eye(dim) / dim
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2,) * (2 * n))
    rows = list(range(nb, nb + n))
    cols = list(range(nb + n, nb + 2 * n))
    for q in qubits:
        cols[q] = rows[q]
    bidx = list(range(nb))
    keep = [i for i in rows if rows.index(i) not in qubits] + [
        cols[q] for q in range(n) if q not in qubits
    ]
    reduced = np.einsum(t, bidx + rows + cols, bidx + keep)
    # rebuild with identity on the traced qubits
    out_rows = list(range(nb, nb + n))
    out_cols = list(range(nb + n, nb + 2 * n))
    operands = [reduced, bidx + [out_rows[q] for q in range(n) if q not in qubits]
                + [out_cols[q] for q in range(n) if q not in qubits]]
    for q in qubits:
        operands += [np.eye(2) / 2, [out_rows[q], out_cols[q]]]
    full = np.einsum(*operands, bidx + out_rows + out_cols).reshape(rho.shape)
    return (1 - p) * rho + p * full


def kraus_rho(rho: np.ndarray, kraus, targets, n: int) -> np.ndarray:
    return sum(apply_op_rho(rho, k, targets, n) for k in kraus)


def expectation_vec(psi: np.ndarray, obs: Observable) -> np.ndarray:
    total = 0.0
    for c, p in as_terms(obs):
        total = total + c * np.einsum("...i,...i->...", psi.conj(), p.apply(psi, axis=-1)).real
    return total


def expectation_rho(rho: np.ndarray, obs: Observable) -> np.ndarray:
    total = 0.0
    for c, p in as_terms(obs):
        total = total + c * p.trace_with(rho).real
    return total


# ---------------------------------------------------------------------------
# single-state API

def is_unitary(u: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0
    )


def apply_gate(state: PureState | DensityMatrix, unitary, targets) -> PureState | DensityMatrix:
    """Apply a dense unitary on ``targets``; returns a new state of the same type."""
    unitary = np.asarray(unitary, dtype=complex)
    targets = tuple(targets)
    n = state.n_qubits
    _check_targets(targets, n)
    if unitary.shape != (1 << len(targets),) * 2:
        raise DimensionError(f"unitary of shape {unitary.shape} on {len(targets)} targets")
    if not is_unitary(unitary):
        raise ValidationError("gate matrix is not unitary")
    if isinstance(state, PureState):
        return PureState(n, apply_op_vec(state.amplitudes, unitary, targets, n))
    return DensityMatrix(n, apply_op_rho(state.matrix, unitary, targets, n), check=False)


CHANNEL_KINDS = (
    "depolarizing",
    "pauli",
    "amplitude_damping",
    "coherent",
    "param_dependent_pauli",
)


@dataclass(frozen=True)
class Channel:
    """A completely positive trace-preserving map on some qubits.

    ``qubits`` is used by depolarizing (``None`` means every qubit) and
    amplitude damping (one qubit). Pauli-type kinds carry a full-width
    ``pauli``. The parameter-dependent Pauli channel has error probability
    ``p * (1 + sin(alpha * theta[param])) / 2``.
    """

    kind: str
    p: float = 0.0
    pauli: PauliString | None = None
    gamma: float = 0.0
    epsilon: float = 0.0
    qubits: tuple[int, ...] | None = None
    alpha: float = 1.0
    param: int | None = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"probability p={self.p} outside [0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValidationError(f"damping gamma={self.gamma} outside [0, 1]")
        if self.kind in ("pauli", "coherent", "param_dependent_pauli"):
            if self.pauli is None or not self.pauli.is_hermitian:
                raise ValidationError(f"{self.kind} channel needs a Hermitian Pauli")
        if self.kind == "amplitude_damping" and (self.qubits is None or len(self.qubits) != 1):
            raise ValidationError("amplitude damping acts on exactly one qubit")
        if self.kind == "param_dependent_pauli" and self.param is None:
            raise ValidationError("parameter-dependent channel needs a parameter index")

    def probability(self, theta=None):
        if self.kind != "param_dependent_pauli":
            return self.p
        if theta is None:
            raise ValidationError("parameter-dependent channel needs theta")
        theta = np.asarray(theta, dtype=float)
        return self.p * (1 + np.sin(self.alpha * theta[..., self.param])) / 2

    def kraus(self, n: int, theta=None) -> tuple[list[np.ndarray], tuple[int, ...]]:
        """Kraus operators and the qubits they act on (dense; small supports only)."""
        if self.kind == "depolarizing":
            qs = tuple(range(n)) if self.qubits is None else self.qubits
            k = len(qs)
            ops = []
            for P in all_paulis(k):
                w = self.p / 4**k + (1 - self.p if P.is_identity else 0.0)
                ops.append(np.sqrt(w) * P.matrix())
            return ops, qs
        if self.kind == "amplitude_damping":
            g = self.gamma
            k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
            k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
            return [k0, k1], self.qubits
        qs = self.pauli.support or (0,)
        pm = self.pauli.restricted(qs).matrix() * self.pauli.coefficient.real
        eye = np.eye(1 << len(qs))
        if self.kind == "coherent":
            e = self.epsilon / 2
            return [np.cos(e) * eye - 1j * np.sin(e) * pm], qs
        p = float(self.probability(theta))
        return [np.sqrt(1 - p) * eye, np.sqrt(p) * pm], qs

    def apply_batch(self, rho: np.ndarray, n: int, theta=None) -> np.ndarray:
        if self.kind == "depolarizing":
            qs = tuple(range(n)) if self.qubits is None else self.qubits
            return depolarize_rho(rho, self.p, qs, n)
        if self.kind == "amplitude_damping":
            ops, qs = self.kraus(n)
            return kraus_rho(rho, ops, qs, n)
        if self.kind == "coherent":
            return gadget_rho(rho, self.pauli, self.epsilon)
        return pauli_channel_rho(rho, self.pauli, self.probability(theta))


def depolarizing(p: float, qubits=None) -> Channel:
    return Channel("depolarizing", p=p, qubits=None if qubits is None else tuple(qubits))


def pauli_channel(p: float, pauli: PauliString | str) -> Channel:
    return Channel("pauli", p=p, pauli=_as_pauli(pauli))


def amplitude_damping(gamma: float, qubit: int) -> Channel:
    return Channel("amplitude_damping", gamma=gamma, qubits=(qubit,))


def coherent(epsilon: float, pauli: PauliString | str) -> Channel:
    return Channel("coherent", epsilon=epsilon, pauli=_as_pauli(pauli))


def param_dependent_pauli(p0: float, pauli, param: int, alpha: float = 1.0) -> Channel:
    return Channel("param_dependent_pauli", p=p0, pauli=_as_pauli(pauli), param=param, alpha=alpha)


def _as_pauli(p) -> PauliString:
    return PauliString.parse(p) if isinstance(p, str) else p


def apply_channel(rho: DensityMatrix, ch: Channel, theta=None) -> DensityMatrix:
    n = rho.n_qubits
    if ch.pauli is not None and ch.pauli.n_qubits != n:
        raise DimensionError("channel Pauli width differs from state")
    if ch.qubits is not None:
        _check_targets(ch.qubits, n)
    out = ch.apply_batch(rho.matrix, n, theta)
    return DensityMatrix(n, out, check=False)


def apply_channel_adjoint(op: np.ndarray, ch: Channel, n: int, theta=None) -> np.ndarray:
    """Heisenberg-picture action sum_k K^dagger O K."""
    ops, qs = ch.kraus(n, theta)
    return sum(apply_op_rho(op, k.conj().T, qs, n) for k in ops)


def expectation(state: PureState | DensityMatrix, obs: Observable) -> float:
    if obs.n_qubits != state.n_qubits:
        raise DimensionError("observable and state sizes differ")
    if isinstance(state, PureState):
        return float(expectation_vec(state.amplitudes, obs))
    return float(expectation_rho(state.matrix, obs))


def fidelity(rho: DensityMatrix, target: PureState) -> float:
    """<psi| rho |psi> for a pure target."""
    if rho.n_qubits != target.n_qubits:
        raise DimensionError("state sizes differ")
    psi = target.amplitudes
    return float(np.clip(np.vdot(psi, rho.matrix @ psi).real, 0.0, 1.0))


def fidelity_pauli_sum(rho: DensityMatrix, target: PureState) -> float:
    """Fidelity from Pauli expectations: 2^-n * sum_P <P>_rho <P>_psi."""
    n = rho.n_qubits
    total = 0.0
    for P in all_paulis(n):
        total += P.trace_with(rho.matrix).real * expectation_vec(target.amplitudes, P)
    return float(total / 2**n)


def purity(rho: DensityMatrix) -> float:
    m = rho.matrix
    return float(np.einsum("ij,ji->", m, m).real)


def superoperator(kraus_or_unitary, right=None) -> np.ndarray:
    """Row-major vectorised superoperator of rho -> sum_k L_k rho R_k^dagger.

    Accepts a single matrix (unitary channel) or a list of Kraus operators.
    """
    mats = [kraus_or_unitary] if isinstance(kraus_or_unitary, np.ndarray) else list(kraus_or_unitary)
    rights = mats if right is None else ([right] if isinstance(right, np.ndarray) else list(right))
    return sum(np.kron(a, b.conj()) for a, b in zip(mats, rights))
