"""Analytic structure of gadget-circuit landscapes.

* quasiprobability and process-mode decompositions of a single gadget,
* theoretical frequency supports (multiplier form and eigenvalue-difference form),
* exact trigonometric forms of Clifford+gadget circuits by Heisenberg propagation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .circuit import FixedGate, Gadget, ParamCircuit, conjugate_pauli, is_clifford_angle, lightcone_gates
from .errors import HypothesisViolation, IncommensurateSupportError, ValidationError
from .pauli import Observable, PauliString, as_terms
from .qsim import superoperator

FREQ_TOL = 1e-9
MAX_DENOMINATOR = 64


# ---------------------------------------------------------------------------
# single-gadget decompositions

def z_rotation_quasiprob(theta: float) -> tuple[float, float, float]:
    """Weights of (identity, Z, S) conjugations that reproduce a Z rotation channel."""
    s, c = math.sin(theta), math.cos(theta)
    return 0.5 * (-s + c + 1), 0.5 * (-s - c + 1), s


def gadget_unitary(pauli: PauliString, angle: float) -> np.ndarray:
    p = pauli.matrix()
    return math.cos(angle / 2) * np.eye(len(p)) - 1j * math.sin(angle / 2) * p


@dataclass(frozen=True)
class ProcessModeTriple:
    """Modes C0, C+1, C-1 of theta -> conjugation by exp(-i theta P / 2).

    Each mode is a tuple of (weight, angle) pairs meaning
    sum weight * (conjugation by exp(-i angle P / 2)).
    """

    pauli: PauliString
    modes: dict = field(compare=False)

    def superops(self) -> dict[int, np.ndarray]:
        out = {}
        for k, terms in self.modes.items():
            out[k] = sum(w * superoperator(gadget_unitary(self.pauli, a)) for w, a in terms)
        return out

    def reconstruct(self, theta: float) -> np.ndarray:
        ops = self.superops()
        return sum(np.exp(1j * k * theta) * op for k, op in ops.items())


def process_modes(pauli: PauliString) -> ProcessModeTriple:
    half_pi = math.pi / 2
    plus = ((0.25 + 0.25j, 0.0), (-(0.25 - 0.25j), math.pi), (-0.5j, half_pi))
    minus = tuple((np.conj(w), a) for w, a in plus)
    zero = ((0.5, 0.0), (0.5, math.pi))
    return ProcessModeTriple(pauli, {0: zero, 1: plus, -1: minus})


# ---------------------------------------------------------------------------
# frequency supports

def dedup(values, tol: float = FREQ_TOL) -> np.ndarray:
    vals = np.sort(np.asarray(list(values), dtype=float))
    out: list[float] = []
    for v in vals:
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return np.array(out)


def minkowski_freqs(multipliers) -> np.ndarray:
    """{a . k : k in {-1, 0, 1}^r}."""
    acc = np.array([0.0])
    for a in multipliers:
        acc = dedup((acc[:, None] + np.array([-a, 0.0, a])[None, :]).ravel())
    return acc


def eigenvalue_difference_spectrum(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError("generator must be a square matrix")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-10:
        raise ValidationError("generator is not Hermitian")
    lam = np.linalg.eigvalsh(h)
    return dedup((lam[:, None] - lam[None, :]).ravel())


def walsh_hadamard_rank(eigs, tol: float = FREQ_TOL) -> int:
    eigs = np.asarray(eigs, dtype=float)
    size = len(eigs)
    if size < 1 or size & (size - 1):
        raise ValidationError("eigenvalue vector length must be a power of two")
    a = scipy.linalg.hadamard(size) @ eigs / size
    return int(np.sum(np.abs(a[1:]) > tol))


def _commensurate_scale(freqs) -> int:
    scale = 1
    for f in freqs:
        frac = Fraction(float(f)).limit_denominator(MAX_DENOMINATOR)
        if abs(float(frac) - f) > FREQ_TOL:
            raise IncommensurateSupportError(f"frequency {f} is not a rational with denominator <= {MAX_DENOMINATOR}")
        scale = math.lcm(scale, frac.denominator)
        if scale > MAX_DENOMINATOR:
            raise IncommensurateSupportError("common denominator exceeds the cap of 64")
    return scale


@dataclass(frozen=True)
class FrequencySupport:
    """Per-parameter frequency sets.

    ``per_param`` is the multiplier form {a . k}. ``generator`` holds the
    eigenvalue-difference set of the combined generator for parameters whose
    gadgets are adjacent and mutually commuting (None otherwise) and
    ``refined`` is the intersection of the two.
    """

    per_param: tuple[np.ndarray, ...]
    generator: tuple[np.ndarray | None, ...] = ()
    wh_rank: tuple[int | None, ...] = ()

    @property
    def m(self) -> int:
        return len(self.per_param)

    @property
    def refined(self) -> tuple[np.ndarray, ...]:
        out = []
        for i, s in enumerate(self.per_param):
            g = self.generator[i] if i < len(self.generator) else None
            if g is None:
                out.append(s)
            else:
                out.append(np.array([f for f in s if np.min(np.abs(g - f)) <= FREQ_TOL]))
        return tuple(out)

    def max_abs(self) -> np.ndarray:
        return np.array([np.max(np.abs(s)) for s in self.per_param])

    def scale(self) -> int:
        return _commensurate_scale(np.concatenate(self.per_param))

    def integer_sets(self, N: int | None = None) -> list[set[int]]:
        """Integer frequency sets; raises if some frequency is not an integer
        or exceeds the grid resolution N."""
        out = []
        for s in self.per_param:
            ks = np.rint(s)
            if np.max(np.abs(ks - s)) > FREQ_TOL:
                raise IncommensurateSupportError("support has non-integer frequencies; rescale the parameters")
            if N is not None and np.max(np.abs(ks)) > N:
                raise IncommensurateSupportError(f"support reaches |k|={int(np.max(np.abs(ks)))} beyond grid resolution {N}")
            out.append({int(k) for k in ks})
        return out

    def mask(self, grid) -> np.ndarray:
        """Boolean tensor (FFT index order) of the product support on ``grid``."""
        if grid.m != self.m:
            raise ValidationError("support and grid have different parameter counts")
        sets = self.integer_sets(grid.N)
        k = np.fft.fftfreq(grid.d, 1.0 / grid.d).round().astype(int)
        axes = [np.isin(k, sorted(s)) for s in sets]
        out = axes[0]
        for ax in axes[1:]:
            out = np.multiply.outer(out, ax)
        return out

    def to_json(self) -> list[dict]:
        return [{"param_index": i, "frequencies": s.tolist()} for i, s in enumerate(self.per_param)]

    @classmethod
    def from_json(cls, data) -> "FrequencySupport":
        items = sorted(data, key=lambda d: d["param_index"])
        return cls(tuple(np.asarray(d["frequencies"], dtype=float) for d in items))


def _adjacent_commuting(c: ParamCircuit, idx: list[int]) -> bool:
    if not idx or idx != list(range(idx[0], idx[0] + len(idx))):
        return False
    ps = [c.gates[i].pauli for i in idx]
    return all(a.commutes(b) for a, b in itertools.combinations(ps, 2))


def frequency_support(c: ParamCircuit, obs: Observable | None = None) -> FrequencySupport:
    """Per-parameter frequency sets from gadget multipliers.

    With an observable, only gadgets in its backward light cone contribute
    (term by term for a Pauli sum, taking the union).
    """
    all_gates = set(range(len(c.gates)))
    cones = [all_gates] if obs is None else [lightcone_gates(c, p) for _, p in as_terms(obs)]
    per_param, generator, ranks = [], [], []
    for i in range(c.m_params):
        sets = []
        for cone in cones:
            mults = [abs(g.angle.multiplier) for j, g in c.gadgets if g.param == i and j in cone]
            sets.append(minkowski_freqs(mults))
        per_param.append(dedup(np.concatenate(sets)))
        idx = [j for j, g in c.gadgets if g.param == i]
        if _adjacent_commuting(c, idx):
            h = sum(-0.5 * c.gates[j].angle.multiplier * c.gates[j].pauli.matrix() for j in idx)
            generator.append(eigenvalue_difference_spectrum(h))
            distinct = {}
            for j in idx:
                g = c.gates[j]
                key = g.pauli.letters
                distinct[key] = distinct.get(key, 0.0) + g.angle.multiplier * g.pauli.coefficient.real
            ranks.append(sum(abs(v) > FREQ_TOL for v in distinct.values()))
        else:
            generator.append(None)
            ranks.append(None)
    return FrequencySupport(tuple(per_param), tuple(generator), tuple(ranks))


def eigen_oracle_support(c: ParamCircuit, obs: Observable | None = None) -> list[np.ndarray]:
    """Independent oracle: Minkowski sum of eigenvalue-difference spectra of the
    in-cone gadget generators H = -a P / 2, via dense diagonalisation."""
    all_gates = set(range(len(c.gates)))
    cones = [all_gates] if obs is None else [lightcone_gates(c, p) for _, p in as_terms(obs)]
    out = []
    for i in range(c.m_params):
        union = []
        for cone in cones:
            acc = np.array([0.0])
            for j, g in c.gadgets:
                if g.param == i and j in cone:
                    diffs = eigenvalue_difference_spectrum(-0.5 * g.angle.multiplier * g.pauli.matrix())
                    acc = dedup((acc[:, None] + diffs[None, :]).ravel())
            union.append(acc)
        out.append(dedup(np.concatenate(union)))
    return out


# ---------------------------------------------------------------------------
# exact trigonometric form

_EXP_OF_MONO = {
    0: {0: 1.0},
    1: {1: 0.5, -1: 0.5},  # cos
    -1: {1: -0.5j, -1: 0.5j},  # sin
}


@dataclass
class TrigForm:
    """sum_k c'_k prod_s f_{k_s}(theta_{slot_s}) with f_0 = 1, f_1 = cos, f_-1 = sin.

    ``slots`` lists the parameter index of every parameterised gadget, so a
    monomial key holds one entry per gadget. When each parameter drives at
    most one gadget the keys can be read per parameter via
    :meth:`per_param`.
    """

    m: int
    slots: tuple[int, ...]
    monomials: dict[tuple[int, ...], float]

    def __post_init__(self):
        self.monomials = {k: float(v) for k, v in self.monomials.items() if abs(v) > 1e-12}

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        total = np.zeros(theta.shape[:-1])
        for key, coef in self.monomials.items():
            term = np.full(theta.shape[:-1], coef)
            for slot, k in zip(self.slots, key):
                if k == 1:
                    term = term * np.cos(theta[..., slot])
                elif k == -1:
                    term = term * np.sin(theta[..., slot])
            total = total + term
        return total

    def exponential(self) -> dict[tuple[int, ...], complex]:
        out: dict[tuple[int, ...], complex] = {}
        for key, coef in self.monomials.items():
            factors = [_EXP_OF_MONO[k] for k in key]
            for combo in itertools.product(*[f.items() for f in factors]):
                freq = [0] * self.m
                val = complex(coef)
                for slot, (kk, w) in zip(self.slots, combo):
                    freq[slot] += kk
                    val *= w
                freq = tuple(freq)
                out[freq] = out.get(freq, 0) + val
        return {k: v for k, v in out.items() if abs(v) > 1e-12}

    def coefficients(self, grid) -> np.ndarray:
        """Exponential coefficients as a tensor in FFT index order."""
        out = np.zeros(grid.shape, dtype=complex)
        for k, v in self.exponential().items():
            if max(abs(x) for x in k) > grid.N:
                raise IncommensurateSupportError(f"frequency {k} beyond grid resolution {grid.N}")
            out[tuple(x % grid.d for x in k)] += v
        return out

    def per_param(self) -> dict[tuple[int, ...], float]:
        if len(set(self.slots)) != len(self.slots):
            raise HypothesisViolation("a parameter drives more than one gadget")
        out = {}
        for key, coef in self.monomials.items():
            full = [0] * self.m
            for slot, k in zip(self.slots, key):
                full[slot] = k
            out[tuple(full)] = coef
        return out

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "slots": list(self.slots),
            "monomials": [{"k": list(k), "coeff": v} for k, v in sorted(self.monomials.items())],
        }

    @classmethod
    def from_json(cls, data) -> "TrigForm":
        return cls(int(data["m"]), tuple(data["slots"]),
                   {tuple(d["k"]): float(d["coeff"]) for d in data["monomials"]})

    def same_as(self, other: "TrigForm", tol: float = 1e-9) -> bool:
        if self.m != other.m:
            return False
        try:
            a, b = self.per_param(), other.per_param()
        except HypothesisViolation:
            a, b = self.exponential(), other.exponential()
        keys = set(a) | set(b)
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in keys)


def stabilizer_expectation(label: str, p: PauliString) -> float:
    """<psi|P|psi> for a product state over 0 1 + -."""
    val = p.coefficient
    for ch, letter in zip(label, p.letters):
        if letter == "I":
            continue
        if ch in "01":
            if letter != "Z":
                return 0.0
            val *= 1 if ch == "0" else -1
        else:
            if letter != "X":
                return 0.0
            val *= 1 if ch == "+" else -1
    if abs(val.imag) > 1e-12:
        raise HypothesisViolation("non-Hermitian Pauli reached the input state")
    return float(val.real)


def _trig_of(mult: float, offset: float):
    """cos and sin of (mult * t + offset) as {monomial key: coeff} in t,
    for mult = +-1 and offset a multiple of pi/2."""
    q = int(round(offset / (math.pi / 2))) % 4
    # cos(t + q pi/2), sin(t + q pi/2)
    cos_t, sin_t = [
        ({1: 1.0}, {-1: 1.0}),
        ({-1: -1.0}, {1: 1.0}),
        ({1: -1.0}, {-1: -1.0}),
        ({-1: 1.0}, {1: -1.0}),
    ][q]
    if mult < 0:
        # t -> -t flips the sign of the sin monomial
        cos_t = {k: (v if k == 1 else -v) for k, v in cos_t.items()}
        sin_t = {k: (v if k == 1 else -v) for k, v in sin_t.items()}
    return cos_t, sin_t


def exact_trig_form(c: ParamCircuit, obs: Observable) -> TrigForm:
    """Heisenberg back-propagation of a Pauli observable through a Clifford +
    gadget circuit; each anticommuting gadget branches into cos and sin."""
    for g in c.gates:
        if isinstance(g, FixedGate) and not g.is_clifford:
            raise HypothesisViolation(f"fixed gate {g.name} on {g.targets} is not Clifford")
        if isinstance(g, Gadget):
            if g.param is None:
                if not is_clifford_angle(g.angle.offset):
                    raise HypothesisViolation(f"fixed rotation angle {g.angle.offset} is not a multiple of pi/2")
            else:
                if abs(abs(g.angle.multiplier) - 1) > 1e-12:
                    raise HypothesisViolation(f"multiplier {g.angle.multiplier} is not +-1")
                if not is_clifford_angle(g.angle.offset):
                    raise HypothesisViolation("parameter offsets must be multiples of pi/2")
    if any(ch not in "01+-" for ch in c.initial_state):
        raise HypothesisViolation("input is not a stabilizer product state")

    slots = tuple(g.param for _, g in c.gadgets if g.param is not None)
    slot_of = {}
    for j, g in c.gadgets:
        if g.param is not None:
            slot_of[j] = len(slot_of)
    n_slots = len(slots)

    # terms: (monomial key, letters) -> complex coefficient
    terms: dict[tuple[tuple[int, ...], str], complex] = {}
    for coef, p in as_terms(obs):
        key = ((0,) * n_slots, p.letters)
        terms[key] = terms.get(key, 0) + coef

    for idx in range(len(c.gates) - 1, -1, -1):
        g = c.gates[idx]
        new: dict = {}

        def add(key, val):
            if abs(val) > 1e-15:
                new[key] = new.get(key, 0) + val

        for (mono, letters), coef in terms.items():
            q = PauliString(letters)
            if isinstance(g, FixedGate):
                r = conjugate_pauli(q, g)
                add((mono, r.letters), coef * r.coefficient)
                continue
            P = g.pauli.unsigned()
            sign = g.pauli.coefficient.real
            if P.commutes(q):
                add((mono, letters), coef)
                continue
            pq = P * q
            # G^dag Q G = cos(phi) Q + i sin(phi) P Q with phi = sign * angle
            if g.param is None:
                phi = sign * g.angle.offset
                cphi, sphi = round(math.cos(phi)), round(math.sin(phi))
                add((mono, letters), coef * cphi)
                add((mono, pq.letters), coef * sphi * 1j * pq.coefficient)
                continue
            s = slot_of[idx]
            cos_t, sin_t = _trig_of(sign * g.angle.multiplier, sign * g.angle.offset)
            for k, v in cos_t.items():
                add((mono[:s] + (k,) + mono[s + 1:], letters), coef * v)
            for k, v in sin_t.items():
                add((mono[:s] + (k,) + mono[s + 1:], pq.letters), coef * v * 1j * pq.coefficient)
        terms = new

    monomials: dict[tuple[int, ...], float] = {}
    for (mono, letters), coef in terms.items():
        if abs(coef.imag) > 1e-9:
            raise HypothesisViolation("propagated observable is not Hermitian")
        val = coef.real * stabilizer_expectation(c.initial_state, PauliString(letters))
        if val:
            monomials[mono] = monomials.get(mono, 0.0) + val
    return TrigForm(c.m_params, slots, monomials)
