"""Pauli strings, weighted Pauli sums and fast Pauli actions on dense arrays.

Qubit 0 is the most significant bit of a computational-basis index, so the
string ``"XY"`` means X on qubit 0 and Y on qubit 1 and its matrix is
``kron(X, Y)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, ValidationError

LETTERS = "IXYZ"

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit products: (a, b) -> (power of i, letter) with a*b = i^k * letter
_PRODUCT: dict[tuple[str, str], tuple[int, str]] = {}
for _a in LETTERS:
    for _b in LETTERS:
        _m = SINGLE[_a] @ SINGLE[_b]
        for _k in range(4):
            for _c in LETTERS:
                if np.allclose(_m, (1j**_k) * SINGLE[_c]):
                    _PRODUCT[(_a, _b)] = (_k, _c)

_PHASES = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis times a phase ``i**phase``."""

    letters: str
    phase: int = 0

    def __post_init__(self):
        letters = self.letters.upper()
        if any(ch not in LETTERS for ch in letters):
            raise ValidationError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse strings like ``"ZZ"``, ``"-XY"``, ``"+iZI"``."""
        s = text.strip()
        phase = 0
        if s.startswith("+"):
            s = s[1:]
        elif s.startswith("-"):
            phase, s = 2, s[1:]
        if s.startswith("i"):
            phase, s = phase + 1, s[1:]
        return cls(s, phase)

    @classmethod
    def on(cls, n: int, ops: dict[int, str]) -> "PauliString":
        letters = ["I"] * n
        for q, ch in ops.items():
            letters[q] = ch
        return cls("".join(letters))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, ch in enumerate(self.letters) if ch != "I")

    @property
    def is_identity(self) -> bool:
        return not self.support

    @property
    def is_diagonal(self) -> bool:
        return all(ch in "IZ" for ch in self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @cached_property
    def _masks(self) -> tuple[int, int, int]:
        n = self.n_qubits
        x = z = ny = 0
        for q, ch in enumerate(self.letters):
            bit = 1 << (n - 1 - q)
            if ch in "XY":
                x |= bit
            if ch in "ZY":
                z |= bit
            ny += ch == "Y"
        return x, z, ny

    def unsigned(self) -> "PauliString":
        return PauliString(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise DimensionError("Pauli strings act on different qubit counts")
        phase = self.phase + other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            k, c = _PRODUCT[(a, b)]
            phase += k
            out.append(c)
        return PauliString("".join(out), phase)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.phase + 2)

    def commutes(self, other: "PauliString") -> bool:
        anti = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return anti % 2 == 0

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for ch in self.letters:
            out = np.kron(out, SINGLE[ch])
        return self.coefficient * out

    def restricted(self, qubits) -> "PauliString":
        """Letters on ``qubits`` only (phase dropped)."""
        return PauliString("".join(self.letters[q] for q in qubits))

    # -- dense actions -------------------------------------------------
    def _index_data(self):
        n = self.n_qubits
        x, z, ny = self._masks
        idx = np.arange(1 << n)
        src = idx ^ x
        # (P v)[c] = coef * i^ny * (-1)^{popcount((c^x)&z)} v[c^x]
        parity = _popcount_parity(src & z)
        factor = self.coefficient * (1j**ny) * (1 - 2 * parity)
        return src, factor, idx, parity

    def apply(self, arr: np.ndarray, axis: int = -1) -> np.ndarray:
        """Left-multiply by this Pauli along ``axis`` (a length-2^n axis)."""
        src, factor, _, _ = self._index_data()
        out = np.take(arr, src, axis=axis)
        shape = [1] * out.ndim
        shape[axis] = -1
        return out * factor.reshape(shape)

    def apply_right(self, mat: np.ndarray) -> np.ndarray:
        """Compute ``mat @ P`` for arrays whose last two axes are square."""
        n = self.n_qubits
        x, z, ny = self._masks
        idx = np.arange(1 << n)
        # (M P)[:, c] = coef * i^ny * (-1)^{popcount(c&z)} M[:, c^x]
        factor = self.coefficient * (1j**ny) * (1 - 2 * _popcount_parity(idx & z))
        return np.take(mat, idx ^ x, axis=-1) * factor

    def trace_with(self, mat: np.ndarray) -> np.ndarray:
        """``tr(P @ mat)`` over the last two axes, vectorised over leading axes."""
        n = self.n_qubits
        x, z, ny = self._masks
        s = np.arange(1 << n)
        factor = self.coefficient * (1j**ny) * (1 - 2 * _popcount_parity(s & z))
        return np.einsum("...i,i->...", mat[..., s, s ^ x], factor)

    def __str__(self) -> str:
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase]
        return prefix + self.letters


def _popcount_parity(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64).copy()
    parity = np.zeros_like(a)
    while np.any(a):
        parity ^= a & 1
        a >>= 1
    return parity


def all_paulis(n: int):
    """All 4^n unsigned Pauli strings in lexicographic IXYZ order."""
    for letters in itertools.product(LETTERS, repeat=n):
        yield PauliString("".join(letters))


@dataclass(frozen=True)
class PauliSum:
    """Real linear combination of Hermitian Pauli strings."""

    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("empty Pauli sum")
        n = self.terms[0][1].n_qubits
        clean = []
        for c, p in self.terms:
            if p.n_qubits != n:
                raise DimensionError("mixed qubit counts in Pauli sum")
            if not p.is_hermitian:
                raise ValidationError(f"non-Hermitian term {p}")
            # fold the sign into the coefficient
            clean.append((float(c) * p.coefficient.real, p.unsigned()))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def n_qubits(self) -> int:
        return self.terms[0][1].n_qubits

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted({q for _, p in self.terms for q in p.support}))

    @property
    def is_diagonal(self) -> bool:
        return all(p.is_diagonal for _, p in self.terms)

    def matrix(self) -> np.ndarray:
        return sum(c * p.matrix() for c, p in self.terms)

    def __str__(self) -> str:
        return " + ".join(f"{c:g}*{p}" for c, p in self.terms)


Observable = PauliString | PauliSum


def as_terms(obs: Observable) -> tuple[tuple[float, PauliString], ...]:
    if isinstance(obs, PauliString):
        if not obs.is_hermitian:
            raise ValidationError(f"observable {obs} is not Hermitian")
        return ((obs.coefficient.real, obs.unsigned()),)
    return obs.terms


def parse_observable(spec) -> Observable:
    """Accept ``"ZZ"``, ``"-XY"``, or ``{"terms": [[coeff, "ZZI"], ...]}``."""
    if isinstance(spec, (PauliString, PauliSum)):
        return spec
    if isinstance(spec, str):
        if "+" in spec[1:] or "*" in spec:
            terms = []
            for part in spec.split("+"):
                c, _, p = part.strip().rpartition("*")
                terms.append((float(c) if c else 1.0, PauliString.parse(p)))
            return PauliSum(tuple(terms))
        return PauliString.parse(spec)
    if isinstance(spec, dict) and "terms" in spec:
        return PauliSum(tuple((float(c), PauliString.parse(p)) for c, p in spec["terms"]))
    raise ValidationError(f"cannot parse observable {spec!r}")


def observable_to_json(obs: Observable):
    if isinstance(obs, PauliString):
        return str(obs)
    return {"terms": [[c, str(p)] for c, p in obs.terms]}
