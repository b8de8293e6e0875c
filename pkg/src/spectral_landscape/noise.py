"""Declarative noise attachment.

A :class:`NoiseSpec` is a list of rules; each rule says which channel to
insert and where (after every gate, after one gate index, or once at the end
of the circuit).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .circuit import Gadget, ParamCircuit
from .errors import ValidationError
from .pauli import PauliString
from . import qsim

RULE_KINDS = ("depolarizing", "pauli", "aligned_pauli", "amplitude_damping", "coherent", "param_dependent_pauli")
PLACEMENTS = ("every_gate", "gate", "terminal")


@dataclass(frozen=True)
class NoiseRule:
    kind: str
    p: float = 0.0
    gamma: float = 0.0
    epsilon: float = 0.0
    # full-width string, a single letter applied on each selected qubit,
    # or "gate" for the generator of the gadget the rule follows
    pauli: str | None = None
    # "all", "targets" or an explicit list of qubits
    qubits: str | tuple[int, ...] = "all"
    alpha: float = 1.0
    param: int | None = None
    placement: str = "every_gate"
    gate: int | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValidationError(f"unknown noise kind {self.kind!r}")
        if self.placement not in PLACEMENTS:
            raise ValidationError(f"unknown placement {self.placement!r}")
        if self.placement == "gate" and self.gate is None:
            raise ValidationError("placement 'gate' needs a gate index")
        if not 0 <= self.p <= 1 or not 0 <= self.gamma <= 1:
            raise ValidationError("noise probabilities must lie in [0, 1]")
        if not isinstance(self.qubits, str):
            object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        elif self.qubits not in ("all", "targets"):
            raise ValidationError(f"bad qubit selector {self.qubits!r}")
        if self.kind in ("pauli", "param_dependent_pauli", "coherent") and self.pauli is None:
            raise ValidationError(f"{self.kind} noise needs a Pauli")
        if self.kind == "param_dependent_pauli" and self.param is None:
            raise ValidationError("parameter-dependent noise needs a parameter index")

    def _qubits(self, n, gate):
        if self.qubits == "all":
            return tuple(range(n))
        if self.qubits == "targets":
            if gate is None:
                return tuple(range(n))
            return tuple(gate.targets)
        if any(q >= n for q in self.qubits):
            raise ValidationError(f"noise qubits {self.qubits} out of range")
        return self.qubits

    def _paulis(self, n, gate) -> list[PauliString]:
        if self.pauli == "gate":
            if not isinstance(gate, Gadget):
                return []
            return [gate.pauli]
        p = PauliString.parse(self.pauli)
        if p.n_qubits == n:
            return [p]
        if p.n_qubits != 1:
            raise ValidationError(f"noise Pauli {self.pauli} has the wrong width")
        return [PauliString.on(n, {q: p.letters}) for q in self._qubits(n, gate)]

    def channels(self, n: int, gate=None) -> list[qsim.Channel]:
        if self.kind == "depolarizing":
            qs = self._qubits(n, gate)
            return [qsim.depolarizing(self.p, None if len(qs) == n else qs)]
        if self.kind == "amplitude_damping":
            return [qsim.amplitude_damping(self.gamma, q) for q in self._qubits(n, gate)]
        if self.kind == "aligned_pauli":
            if not isinstance(gate, Gadget):
                return []
            return [qsim.pauli_channel(self.p, gate.pauli)]
        if self.kind == "pauli":
            return [qsim.pauli_channel(self.p, P) for P in self._paulis(n, gate)]
        if self.kind == "coherent":
            return [qsim.coherent(self.epsilon, P) for P in self._paulis(n, gate)]
        return [qsim.param_dependent_pauli(self.p, P, self.param, self.alpha) for P in self._paulis(n, gate)]


@dataclass
class NoiseSpec:
    rules: list[NoiseRule] = field(default_factory=list)

    @property
    def is_noiseless(self) -> bool:
        return not self.rules

    def after_gate(self, index: int, gate, n: int) -> list[qsim.Channel]:
        out = []
        for r in self.rules:
            if r.placement == "every_gate" or (r.placement == "gate" and r.gate == index):
                out += r.channels(n, gate)
        return out

    def terminal(self, n: int) -> list[qsim.Channel]:
        out = []
        for r in self.rules:
            if r.placement == "terminal":
                out += r.channels(n, None)
        return out

    def schedule(self, c: ParamCircuit) -> list[list[qsim.Channel]]:
        """Channels following each gate; the extra last entry is the terminal layer."""
        for r in self.rules:
            if r.placement == "gate" and not 0 <= r.gate < len(c.gates):
                raise ValidationError(f"noise gate index {r.gate} out of range")
            if r.kind == "param_dependent_pauli" and r.param >= c.m_params:
                raise ValidationError(f"noise parameter index {r.param} out of range")
        sched = [self.after_gate(i, g, c.n_qubits) for i, g in enumerate(c.gates)]
        return sched + [self.terminal(c.n_qubits)]

    def to_json(self) -> dict:
        rules = []
        for r in self.rules:
            d = asdict(r)
            if isinstance(d["qubits"], tuple):
                d["qubits"] = list(d["qubits"])
            rules.append(d)
        return {"rules": rules}

    @classmethod
    def from_json(cls, data) -> "NoiseSpec":
        if data is None:
            return cls()
        rules = data["rules"] if isinstance(data, dict) else data
        return cls([NoiseRule(**r) for r in rules])


def global_depolarizing(p: float) -> NoiseSpec:
    """Depolarize every qubit with probability p after every gate."""
    return NoiseSpec([NoiseRule("depolarizing", p=p)])
