"""Parameterised circuit representation.

Parameterised rotations are Pauli gadgets ``exp(-i * angle * P / 2)`` whose
angle is an affine function ``a * theta[i] + b`` of one circuit parameter.
Everything else is a fixed gate given by a dense matrix.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, ValidationError
from .pauli import LETTERS, Observable, PauliString, as_terms
from .qsim import is_unitary

HALF_PI = math.pi / 2
ANGLE_TOL = 1e-9

_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * math.pi / 4)])
GATE_LIBRARY: dict[str, np.ndarray] = {
    "id": np.eye(2, dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": _S.astype(complex),
    "sdg": _S.conj().astype(complex),
    "t": _T.astype(complex),
    "tdg": _T.conj().astype(complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_ALIASES = {"cnot": "cx", "i": "id"}


@dataclass(frozen=True)
class ParamExpr:
    """angle = multiplier * theta[param] + offset; a constant when param is None."""

    multiplier: float = 1.0
    param: int | None = None
    offset: float = 0.0

    def __post_init__(self):
        if self.param is not None and self.multiplier == 0:
            raise ValidationError("parameter multiplier must be nonzero")

    @classmethod
    def const(cls, angle: float) -> "ParamExpr":
        return cls(1.0, None, float(angle))

    def value(self, theta):
        if self.param is None:
            return self.offset if theta is None else np.full(np.shape(theta)[:-1], self.offset)
        theta = np.asarray(theta, dtype=float)
        return self.multiplier * theta[..., self.param] + self.offset


@dataclass(frozen=True)
class FixedGate:
    name: str
    targets: tuple[int, ...]
    matrix: np.ndarray = field(compare=False, repr=False)
    is_clifford: bool = field(default=False, compare=False)

    @classmethod
    def make(cls, name: str, targets, matrix=None) -> "FixedGate":
        key = _ALIASES.get(name.lower(), name.lower())
        if matrix is None:
            if key not in GATE_LIBRARY:
                raise ValidationError(f"unknown gate {name!r}")
            matrix = GATE_LIBRARY[key]
        matrix = np.asarray(matrix, dtype=complex)
        targets = tuple(int(t) for t in targets)
        if matrix.shape != (1 << len(targets),) * 2:
            raise DimensionError(f"gate {name} matrix does not match {len(targets)} targets")
        if not is_unitary(matrix):
            raise ValidationError(f"gate {name} is not unitary")
        return cls(key, targets, matrix, is_clifford_unitary(matrix))


@dataclass(frozen=True)
class Gadget:
    """exp(-i * angle * P / 2) with P a full-width Hermitian Pauli string."""

    pauli: PauliString
    angle: ParamExpr

    def __post_init__(self):
        if not self.pauli.is_hermitian or self.pauli.is_identity:
            raise ValidationError(f"gadget generator {self.pauli} must be a non-identity Hermitian Pauli")

    @property
    def targets(self) -> tuple[int, ...]:
        return self.pauli.support

    @property
    def param(self) -> int | None:
        return self.angle.param

    def is_clifford_at(self, theta=None) -> bool:
        return is_clifford_angle(float(self.angle.value(theta)))


Gate = FixedGate | Gadget


def is_clifford_angle(angle: float) -> bool:
    q = angle / HALF_PI
    return abs(q - round(q)) < ANGLE_TOL


def nearest_clifford_angle(angle: float) -> float:
    """Round to the nearest multiple of pi/2; exact ties go to the smaller angle."""
    q = angle / HALF_PI
    return math.ceil(q - 0.5) * HALF_PI


@dataclass(frozen=True)
class ParamCircuit:
    n_qubits: int
    m_params: int
    gates: tuple[Gate, ...]
    initial_state: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        init = self.initial_state or "0" * self.n_qubits
        object.__setattr__(self, "initial_state", init)
        if len(init) != self.n_qubits or any(ch not in "01+-" for ch in init):
            raise ValidationError(f"bad initial state {init!r}")
        for g in self.gates:
            if isinstance(g, Gadget):
                if g.pauli.n_qubits != self.n_qubits:
                    raise DimensionError("gadget width differs from circuit width")
                if g.param is not None and not 0 <= g.param < self.m_params:
                    raise ValidationError(f"parameter index {g.param} out of range")
            elif any(t < 0 or t >= self.n_qubits for t in g.targets) or len(set(g.targets)) != len(g.targets):
                raise ValidationError(f"bad targets {g.targets} for gate {g.name}")

    @property
    def gadgets(self) -> list[tuple[int, Gadget]]:
        return [(i, g) for i, g in enumerate(self.gates) if isinstance(g, Gadget)]

    @property
    def is_bound(self) -> bool:
        return all(g.param is None for _, g in self.gadgets)

    def digest(self) -> str:
        blob = json.dumps(circuit_to_json(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def bind(c: ParamCircuit, theta) -> ParamCircuit:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.m_params,):
        raise ValidationError(f"expected {c.m_params} parameters, got shape {theta.shape}")
    gates = []
    for g in c.gates:
        if isinstance(g, Gadget):
            g = Gadget(g.pauli, ParamExpr.const(float(g.angle.value(theta))))
        gates.append(g)
    return replace(c, gates=tuple(gates))


def parameter_multipliers(c: ParamCircuit, gate_indices=None) -> list[list[float]]:
    """|multiplier| of every gadget referencing each parameter."""
    out: list[list[float]] = [[] for _ in range(c.m_params)]
    for i, g in c.gadgets:
        if g.param is None or (gate_indices is not None and i not in gate_indices):
            continue
        out[g.param].append(abs(g.angle.multiplier))
    return out


# ---------------------------------------------------------------------------
# Clifford checks

def _pauli_decompose(m: np.ndarray, k: int):
    """Return (coeff, letters) if m is a scalar multiple of a single Pauli, else None."""
    from .pauli import all_paulis

    dim = 1 << k
    for P in all_paulis(k):
        c = np.trace(P.matrix().conj().T @ m) / dim
        if abs(c) > 1e-8:
            if np.allclose(m, c * P.matrix(), atol=1e-8):
                return c, P.letters
            return None
    return None


def is_clifford_unitary(u: np.ndarray) -> bool:
    k = int(round(math.log2(u.shape[0])))
    for q in range(k):
        for ch in "XZ":
            p = PauliString.on(k, {q: ch}).matrix()
            res = _pauli_decompose(u @ p @ u.conj().T, k)
            if res is None or abs(abs(res[0]) - 1) > 1e-8:
                return False
    return True


def conjugate_pauli(p: PauliString, gate: FixedGate) -> PauliString:
    """Heisenberg update G^dagger P G for a Clifford fixed gate."""
    k = len(gate.targets)
    local = p.restricted(gate.targets).matrix()
    u = gate.matrix
    res = _pauli_decompose(u.conj().T @ local @ u, k)
    if res is None:
        raise ValidationError(f"gate {gate.name} does not map {p} to a Pauli")
    c, letters = res
    phase = {1: 0, 1j: 1, -1: 2, -1j: 3}[complex(np.round(c.real), np.round(c.imag))]
    out = list(p.letters)
    for t, ch in zip(gate.targets, letters):
        out[t] = ch
    return PauliString("".join(out), p.phase + phase)


# ---------------------------------------------------------------------------
# light cone

def lightcone_gates(c: ParamCircuit, obs: Observable) -> set[int]:
    """Indices of gates that can influence <obs> (backwards Heisenberg cone).

    For each qubit we track the set of Pauli letters that may appear in the
    back-propagated operator. A gadget that certainly commutes with every such
    term leaves the operator unchanged and is skipped; fixed gates touching a
    live qubit make all of their targets fully live.
    """
    n = c.n_qubits
    live: list[set[str]] = [set() for _ in range(n)]
    for _, p in as_terms(obs):
        for q in p.support:
            live[q].add(p.letters[q])
    cone: set[int] = set()
    for idx in range(len(c.gates) - 1, -1, -1):
        g = c.gates[idx]
        if isinstance(g, Gadget):
            letters = g.pauli.letters
            if all(live[q] <= {letters[q]} for q in g.targets):
                continue
            cone.add(idx)
            for q in g.targets:
                new = set(live[q])
                for s in live[q] | {"I"}:
                    prod = PauliString(s) * PauliString(letters[q])
                    if prod.letters != "I":
                        new.add(prod.letters)
                live[q] = new
        else:
            if not any(live[q] for q in g.targets):
                continue
            cone.add(idx)
            for q in g.targets:
                live[q] = {"X", "Y", "Z"}
    return cone


def lightcone(c: ParamCircuit, obs: Observable) -> set[int]:
    """Parameter indices that can influence <obs>."""
    gates = lightcone_gates(c, obs)
    return {g.param for i, g in c.gadgets if i in gates and g.param is not None}


# ---------------------------------------------------------------------------
# near-Clifford projection

def nearest_clifford_projection(c: ParamCircuit, theta, keep: int, seed=None):
    """Round all but ``keep`` randomly chosen non-Clifford gadget angles.

    Returns the bound circuit and the vector of its gadget angles (in gadget
    order). Gadgets already at Clifford angles are never chosen; when fewer
    than ``keep`` non-Clifford gadgets exist, all of them are kept.
    """
    bound = bind(c, theta) if not c.is_bound else c
    gad = bound.gadgets
    if keep < 0 or keep > len(gad):
        raise ValidationError(f"cannot keep {keep} of {len(gad)} rotation gates")
    angles = [float(g.angle.offset) for _, g in gad]
    non_cliff = [j for j, a in enumerate(angles) if not is_clifford_angle(a)]
    rng = np.random.default_rng(seed)
    kept = set(rng.choice(non_cliff, size=min(keep, len(non_cliff)), replace=False).tolist()) if non_cliff else set()
    gates = list(bound.gates)
    for j, (i, g) in enumerate(gad):
        if j in non_cliff and j not in kept:
            angles[j] = nearest_clifford_angle(angles[j])
            gates[i] = Gadget(g.pauli, ParamExpr.const(angles[j]))
    return replace(bound, gates=tuple(gates)), np.array(angles)


# ---------------------------------------------------------------------------
# OpenQASM 2.0

_QASM_FIXED = {"id", "h", "x", "y", "z", "s", "sdg", "t", "tdg", "cx", "cz", "swap"}


def format_angle(a: float) -> str:
    for den in (1, 2, 3, 4, 6, 8, 12, 16):
        num = a * den / math.pi
        if abs(num - round(num)) < 1e-12:
            num = int(round(num))
            if num == 0:
                return "0"
            head = {1: "pi", -1: "-pi"}.get(num, f"{num}*pi")
            return head if den == 1 else f"{head}/{den}"
    return repr(float(a))


def lower_gate(g: Gate) -> list[tuple[str, tuple[int, ...], float | None]]:
    """Decompose one bound gate into QASM primitives (name, qubits, angle)."""
    if isinstance(g, FixedGate):
        if g.name not in _QASM_FIXED:
            raise ValidationError(f"gate {g.name!r} has no OpenQASM form")
        return [(g.name, g.targets, None)]
    if g.param is not None:
        raise ValidationError("export requires a bound circuit")
    angle = g.angle.offset * g.pauli.coefficient.real
    sup = g.targets
    letters = [g.pauli.letters[q] for q in sup]
    if len(sup) == 1:
        return [("r" + letters[0].lower(), sup, angle)]
    pre = []
    for q, ch in zip(sup, letters):
        if ch == "X":
            pre.append(("h", (q,), None))
        elif ch == "Y":
            pre += [("sdg", (q,), None), ("h", (q,), None)]
    undo = {"h": "h", "sdg": "s"}
    post = [(undo[name], qs, None) for name, qs, _ in reversed(pre)]
    ladder = [("cx", (a, b), None) for a, b in zip(sup[:-1], sup[1:])]
    return pre + ladder + [("rz", (sup[-1],), angle)] + ladder[::-1] + post


def export_qasm(c: ParamCircuit) -> str:
    if not c.is_bound:
        raise ValidationError("export requires a bound circuit")
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for q, ch in enumerate(c.initial_state):
        if ch in "1-":
            lines.append(f"x q[{q}];")
        if ch in "+-":
            lines.append(f"h q[{q}];")
    for g in c.gates:
        for name, qs, angle in lower_gate(g):
            args = ",".join(f"q[{q}]" for q in qs)
            head = name if angle is None else f"{name}({format_angle(angle)})"
            lines.append(f"{head} {args};")
    return "\n".join(lines) + "\n"


_QASM_LINE = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+([^;]+);$")


def _eval_angle(text: str) -> float:
    if not re.fullmatch(r"[0-9eE.+\-*/ pi()]+", text):
        raise ValidationError(f"bad angle expression {text!r}")
    return float(eval(text, {"__builtins__": {}}, {"pi": math.pi}))


def parse_qasm(text: str) -> ParamCircuit:
    """Read back the subset of OpenQASM 2.0 that :func:`export_qasm` writes."""
    n = None
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("OPENQASM", "include", "//")):
            continue
        if line.startswith("qreg"):
            n = int(re.search(r"\[(\d+)\]", line).group(1))
            continue
        m = _QASM_LINE.match(line)
        if m is None or n is None:
            raise ValidationError(f"cannot parse QASM line {line!r}")
        name, arg, qubits = m.groups()
        qs = tuple(int(x) for x in re.findall(r"q\[(\d+)\]", qubits))
        if name in ("rx", "ry", "rz"):
            gates.append(Gadget(PauliString.on(n, {qs[0]: name[1].upper()}), ParamExpr.const(_eval_angle(arg))))
        else:
            gates.append(FixedGate.make(name, qs))
    return ParamCircuit(n, 0, tuple(gates))


def count_qasm_gates(text: str) -> int:
    return len(parse_qasm(text).gates)


# ---------------------------------------------------------------------------
# JSON

def circuit_to_json(c: ParamCircuit) -> dict:
    gates = []
    for g in c.gates:
        if isinstance(g, Gadget):
            gates.append({
                "kind": "gadget",
                "pauli": str(g.pauli),
                "multiplier": g.angle.multiplier,
                "param": g.angle.param,
                "offset": g.angle.offset,
            })
        elif g.name in GATE_LIBRARY:
            gates.append({"kind": "fixed", "name": g.name, "targets": list(g.targets)})
        else:
            gates.append({
                "kind": "fixed", "name": g.name, "targets": list(g.targets),
                "matrix": [[[z.real, z.imag] for z in row] for row in g.matrix],
            })
    return {"n_qubits": c.n_qubits, "m_params": c.m_params, "gates": gates, "initial_state": c.initial_state}


def circuit_from_json(data: dict) -> ParamCircuit:
    n = int(data["n_qubits"])
    gates: list[Gate] = []
    max_param = -1
    for spec in data["gates"]:
        kind = spec.get("kind", "gadget")
        if kind == "gadget":
            p = PauliString.parse(spec["pauli"])
            if "targets" in spec and p.n_qubits != n:
                letters = ["I"] * n
                for t, ch in zip(spec["targets"], p.letters):
                    letters[t] = ch
                p = PauliString("".join(letters), p.phase)
            param = spec.get("param")
            expr = ParamExpr(float(spec.get("multiplier", 1.0)), param, float(spec.get("offset", 0.0)))
            gates.append(Gadget(p, expr))
            if param is not None:
                max_param = max(max_param, int(param))
        elif kind == "fixed":
            mat = spec.get("matrix")
            if mat is not None:
                mat = np.array([[complex(*z) for z in row] for row in mat])
            gates.append(FixedGate.make(spec["name"], spec["targets"], mat))
        else:
            raise ValidationError(f"unknown gate kind {kind!r}")
    m = int(data.get("m_params", max_param + 1))
    return ParamCircuit(n, m, tuple(gates), data.get("initial_state", "0" * n))


__all__ = [
    "ParamExpr", "FixedGate", "Gadget", "ParamCircuit", "bind", "parameter_multipliers",
    "lightcone", "lightcone_gates", "nearest_clifford_projection", "export_qasm", "parse_qasm",
    "circuit_to_json", "circuit_from_json", "is_clifford_unitary", "conjugate_pauli",
    "LETTERS", "nearest_clifford_angle", "is_clifford_angle", "count_qasm_gates", "GATE_LIBRARY",
]
