"""Uniform parameter grids and landscape evaluation (exact, noisy, shot-sampled)."""
from __future__ import annotations

import csv
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Gadget, ParamCircuit
from .errors import SizeLimitError, ValidationError
from .noise import NoiseSpec
from .pauli import Observable, PauliString, PauliSum, _popcount_parity, as_terms, observable_to_json
from . import qsim

# keep each batched density-matrix block under roughly this many bytes
_RHO_BLOCK_BYTES = 64 * 2**20


@dataclass(frozen=True)
class Grid:
    """Points 2*pi*j/d for j in Z_d^m; d = 2N + 1 resolves frequencies |k| <= N."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("grid needs at least one parameter axis")
        if self.d < 3 or self.d % 2 == 0:
            raise ValidationError(f"d={self.d} must be odd and >= 3 (d = 2N+1 points per axis)")

    @property
    def N(self) -> int:
        return (self.d - 1) // 2

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.d,) * self.m

    @property
    def size(self) -> int:
        return self.d**self.m

    def axis(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.d) / self.d

    def points(self) -> np.ndarray:
        """All grid points in row-major order, shape (d^m, m)."""
        idx = np.array(list(itertools.product(range(self.d), repeat=self.m)), dtype=float)
        return 2 * np.pi * idx / self.d

    def to_json(self) -> dict:
        return {"m": self.m, "d": self.d}


def make_grid(m: int, d: int) -> Grid:
    return Grid(int(m), int(d))


@dataclass
class Landscape:
    grid: Grid
    values: np.ndarray
    shots: int | None = None
    seed: int | None = None
    observable: object = None
    circuit_hash: str | None = None
    # per point (outcome values, counts); only kept for shot-sampled runs
    records: list | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.grid.shape)

    def with_values(self, values, **meta) -> "Landscape":
        return Landscape(self.grid, values, self.shots, self.seed, self.observable,
                         self.circuit_hash, None, {**self.meta, **meta})

    def to_json(self) -> dict:
        out = {
            "grid": self.grid.to_json(),
            "shots": self.shots,
            "seed": self.seed,
            "observable": self.observable,
            "circuit_hash": self.circuit_hash,
            "values": self.values.ravel().tolist(),
        }
        if self.records is not None:
            out["records"] = [[v.tolist(), c.tolist()] for v, c in self.records]
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Landscape":
        grid = Grid(**data["grid"])
        values = np.asarray(data["values"], dtype=float)
        if values.size != grid.size:
            raise ValidationError(f"landscape has {values.size} values, grid needs {grid.size}")
        records = data.get("records")
        if records is not None:
            records = [(np.asarray(v, dtype=float), np.asarray(c, dtype=np.int64)) for v, c in records]
        return cls(grid, values, data.get("shots"), data.get("seed"), data.get("observable"),
                   data.get("circuit_hash"), records, data.get("meta", {}))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "Landscape":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"j{i}" for i in range(self.grid.m)] + [f"theta{i}" for i in range(self.grid.m)] + ["value"])
            for idx in np.ndindex(*self.grid.shape):
                theta = [2 * np.pi * j / self.grid.d for j in idx]
                w.writerow(list(idx) + theta + [repr(float(self.values[idx]))])


# ---------------------------------------------------------------------------
# batched simulation

def _check_size(n: int, density: bool) -> None:
    limit = qsim.MAX_DENSITY_QUBITS if density else qsim.MAX_STATEVECTOR_QUBITS
    if n > limit:
        kind = "density-matrix" if density else "statevector"
        raise SizeLimitError(f"{n} qubits exceeds the {kind} limit of {limit}")


def simulate_statevectors(c: ParamCircuit, thetas: np.ndarray) -> np.ndarray:
    """Final states for a batch of parameter vectors, shape (B, 2^n)."""
    _check_size(c.n_qubits, density=False)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    n = c.n_qubits
    psi = np.broadcast_to(qsim.product_state_vector(c.initial_state), (len(thetas), 1 << n)).copy()
    for g in c.gates:
        if isinstance(g, Gadget):
            psi = qsim.gadget_vec(psi, g.pauli, g.angle.value(thetas))
        else:
            psi = qsim.apply_op_vec(psi, g.matrix, g.targets, n)
    return psi


def simulate_densities(c: ParamCircuit, noise: NoiseSpec | None, thetas: np.ndarray) -> np.ndarray:
    """Final density matrices for a batch of parameter vectors, shape (B, 2^n, 2^n)."""
    _check_size(c.n_qubits, density=True)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    n = c.n_qubits
    sched = (noise or NoiseSpec()).schedule(c)
    psi0 = qsim.product_state_vector(c.initial_state)
    rho = np.broadcast_to(np.outer(psi0, psi0.conj()), (len(thetas), 1 << n, 1 << n)).copy()
    for g, chans in zip(c.gates, sched):
        if isinstance(g, Gadget):
            rho = qsim.gadget_rho(rho, g.pauli, g.angle.value(thetas))
        else:
            rho = qsim.apply_op_rho(rho, g.matrix, g.targets, n)
        for ch in chans:
            rho = ch.apply_batch(rho, n, thetas)
    for ch in sched[-1]:
        rho = ch.apply_batch(rho, n, thetas)
    return rho


def _blocks(total: int, n: int, density: bool):
    per = (1 << n) ** (2 if density else 1) * 16
    step = max(1, _RHO_BLOCK_BYTES // per)
    for start in range(0, total, step):
        yield slice(start, min(total, start + step))


# ---------------------------------------------------------------------------
# measurement

def _diagonal_values(obs: Observable, n: int) -> np.ndarray:
    """Eigenvalue of a diagonal observable on every computational basis state."""
    idx = np.arange(1 << n)
    vals = np.zeros(1 << n)
    for c, p in as_terms(obs):
        if not p.is_diagonal:
            raise ValidationError(f"term {p} is not diagonal in the Z basis")
        _, z, _ = p._masks
        vals += c * (1 - 2 * _popcount_parity(idx & z))
    return vals


def _sample_point(exp_value, probs, obs, diag_vals, shots, rng):
    if isinstance(obs, PauliString):
        sign = obs.coefficient.real
        p_plus = float(np.clip((1 + sign * exp_value) / 2, 0.0, 1.0))
        k = rng.binomial(shots, p_plus)
        values = np.array([sign, -sign])
        counts = np.array([k, shots - k])
    else:
        probs = np.clip(probs, 0.0, None)
        counts_all = rng.multinomial(shots, probs / probs.sum())
        hit = counts_all > 0
        values, inverse = np.unique(diag_vals[hit], return_inverse=True)
        counts = np.bincount(inverse, weights=counts_all[hit]).astype(np.int64)
    mean = float(values @ counts) / shots
    return mean, (values, counts)


def measure_observable(state, obs: Observable, shots: int, seed=None):
    """Sample mean of ``shots`` simulated measurements of ``obs``.

    Pauli observables are measured as a +-1 outcome; Pauli sums must be
    diagonal and are evaluated from sampled bitstrings.
    """
    if shots < 1:
        raise ValidationError("shots must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = state.n_qubits
    if isinstance(state, qsim.PureState):
        probs = np.abs(state.amplitudes) ** 2
    else:
        probs = np.diag(state.matrix).real
    if isinstance(obs, PauliSum):
        if not obs.is_diagonal:
            raise ValidationError("only Pauli strings or diagonal Pauli sums can be sampled")
        return _sample_point(None, probs, obs, _diagonal_values(obs, n), shots, rng)[0]
    return _sample_point(qsim.expectation(state, obs), None, obs, None, shots, rng)[0]


def point_rng(seed, flat_index: int) -> np.random.Generator:
    """Independent stream for one grid point, derived from (seed, index)."""
    return np.random.default_rng([int(seed or 0), int(flat_index)])


def _evaluate_block(c, noise, obs, thetas, offset, shots, seed):
    n = c.n_qubits
    density = noise is not None and not noise.is_noiseless
    if density:
        rho = simulate_densities(c, noise, thetas)
        exact = qsim.expectation_rho(rho, obs)
        probs = np.einsum("...ii->...i", rho).real
    else:
        psi = simulate_statevectors(c, thetas)
        exact = qsim.expectation_vec(psi, obs)
        probs = np.abs(psi) ** 2
    exact = np.broadcast_to(np.asarray(exact, dtype=float), (len(thetas),))
    if shots is None:
        return exact.copy(), None
    if isinstance(obs, PauliSum) and not obs.is_diagonal:
        raise ValidationError("shot sampling needs a Pauli string or a diagonal Pauli sum")
    diag_vals = _diagonal_values(obs, n) if isinstance(obs, PauliSum) else None
    means = np.empty(len(thetas))
    records = []
    for b in range(len(thetas)):
        means[b], rec = _sample_point(exact[b], probs[b], obs, diag_vals, shots, point_rng(seed, offset + b))
        records.append(rec)
    return means, records


def _landscape(c, noise, obs, grid, shots, seed, workers) -> Landscape:
    if obs.n_qubits != c.n_qubits:
        raise ValidationError("observable width differs from circuit width")
    if grid.m != c.m_params:
        raise ValidationError(f"grid has {grid.m} axes but circuit has {c.m_params} parameters")
    if shots is not None and int(shots) < 1:
        raise ValidationError("shots must be a positive integer or None for exact values")
    pts = grid.points()
    density = noise is not None and not noise.is_noiseless
    _check_size(c.n_qubits, density)
    blocks = list(_blocks(len(pts), c.n_qubits, density))
    if workers > 1 and len(blocks) == 1 and len(pts) > 1:
        step = -(-len(pts) // workers)
        blocks = [slice(s, min(len(pts), s + step)) for s in range(0, len(pts), step)]

    def run(sl):
        return _evaluate_block(c, noise, obs, pts[sl], sl.start, shots, seed)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, blocks))
    else:
        results = [run(sl) for sl in blocks]
    values = np.concatenate([r[0] for r in results])
    records = None if shots is None else [rec for r in results for rec in r[1]]
    return Landscape(grid, values, None if shots is None else int(shots), seed,
                     observable_to_json(obs), c.digest(), records)


def sample_exact(c: ParamCircuit, obs: Observable, grid: Grid) -> Landscape:
    """Noiseless expectation values on every grid point (statevector)."""
    return _landscape(c, None, obs, grid, None, None, 1)


def sample_noisy(c: ParamCircuit, noise: NoiseSpec | None, obs: Observable, grid: Grid,
                 shots: int | None = None, seed=0, workers: int = 1) -> Landscape:
    """Noisy landscape; ``shots=None`` gives exact expectation values."""
    return _landscape(c, noise, obs, grid, shots, seed, workers)


def evaluate_points(c: ParamCircuit, noise: NoiseSpec | None, obs: Observable, thetas,
                    shots: int | None = None, seed=0) -> np.ndarray:
    """Expectation values (or shot means) at arbitrary parameter vectors."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    out = []
    density = noise is not None and not noise.is_noiseless
    for sl in _blocks(len(thetas), c.n_qubits, density):
        out.append(_evaluate_block(c, noise, obs, thetas[sl], sl.start, shots, seed)[0])
    return np.concatenate(out) if out else np.empty(0)
