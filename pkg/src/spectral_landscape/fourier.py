"""Multidimensional DFT of landscapes and the derived noise diagnostics.

Convention: c_k = d^-m sum_j x_j exp(-i theta_j . k) with theta_j = 2 pi j / d,
which is ``numpy.fft.fftn(x, norm="forward")``. Tensors stay in FFT index
order; index j maps to the signed frequency j (j <= N) or j - d (j > N).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .circuit import ParamCircuit
from .errors import DimensionError, ValidationError
from .noise import NoiseSpec
from .pauli import PauliString, all_paulis
from .sampler import Grid, Landscape, point_rng, simulate_densities
from .theory import FrequencySupport

COEFF_EPS = 1e-12
# P_N at or below this is treated as "no noise detected"
NOISE_FLOOR = 1e-20


def signed_frequencies(d: int) -> np.ndarray:
    return np.fft.fftfreq(d, 1.0 / d).round().astype(int)


@dataclass
class Spectrum:
    grid: Grid
    coeffs: np.ndarray
    provenance: str | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(self.grid.shape)

    def __getitem__(self, k) -> complex:
        """Coefficient at a signed frequency vector."""
        if any(abs(x) > self.grid.N for x in k):
            raise IndexError(f"frequency {k} beyond resolution {self.grid.N}")
        return complex(self.coeffs[tuple(int(x) % self.grid.d for x in k)])

    def freq_grid(self) -> list[np.ndarray]:
        """Signed frequency of every tensor entry, one array per axis."""
        k = signed_frequencies(self.grid.d)
        return list(np.meshgrid(*([k] * self.grid.m), indexing="ij"))

    def nonzero(self, tol: float = COEFF_EPS) -> dict[tuple[int, ...], complex]:
        k = signed_frequencies(self.grid.d)
        out = {}
        for idx in zip(*np.nonzero(np.abs(self.coeffs) > tol)):
            out[tuple(int(k[i]) for i in idx)] = complex(self.coeffs[idx])
        return out

    def power(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def with_coeffs(self, coeffs) -> "Spectrum":
        return Spectrum(self.grid, coeffs, self.provenance)

    def to_json(self) -> dict:
        items = [{"k": list(k), "re": v.real, "im": v.imag} for k, v in sorted(self.nonzero().items())]
        return {"grid": self.grid.to_json(), "provenance": self.provenance, "coeffs": items}

    @classmethod
    def from_json(cls, data) -> "Spectrum":
        grid = Grid(**data["grid"])
        coeffs = np.zeros(grid.shape, dtype=complex)
        for item in data["coeffs"]:
            coeffs[tuple(int(x) % grid.d for x in item["k"])] = complex(item["re"], item["im"])
        return cls(grid, coeffs, data.get("provenance"))


def _values_hash(values: np.ndarray) -> str:
    import hashlib

    return hashlib.sha256(np.ascontiguousarray(values, dtype=float).tobytes()).hexdigest()[:16]


def dft(land: Landscape | np.ndarray, grid: Grid | None = None) -> Spectrum:
    if isinstance(land, Landscape):
        values, grid = land.values, land.grid
    else:
        values = np.asarray(land)
        if grid is None:
            grid = Grid(values.ndim, values.shape[0])
    return Spectrum(grid, np.fft.fftn(values, norm="forward"), _values_hash(np.real(values)))


def idft(spec: Spectrum, template: Landscape | None = None) -> Landscape:
    values = np.fft.ifftn(spec.coeffs, norm="forward").real
    if template is not None:
        return template.with_values(values)
    return Landscape(spec.grid, values)


# ---------------------------------------------------------------------------
# figures of merit

@dataclass
class MeritReport:
    P_S: float
    P_N: float
    P_N_on_support: float | None = None
    P_N_off_support: float | None = None
    SNR: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def figures_of_merit(spec: Spectrum, support: FrequencySupport, reference: Spectrum | None = None) -> MeritReport:
    """Signal power on the product support, noise power off it and their ratio.

    With an exact reference spectrum the deviation power is also split into
    its on-support and off-support parts.
    """
    mask = support.mask(spec.grid)
    power = np.abs(spec.coeffs) ** 2
    p_s = float(power[mask].sum())
    p_n = float(power[~mask].sum())
    snr = None if p_n <= NOISE_FLOOR else p_s / p_n
    on = off = None
    if reference is not None:
        if reference.grid != spec.grid:
            raise DimensionError("reference spectrum lives on a different grid")
        dev = np.abs(spec.coeffs - reference.coeffs) ** 2
        on, off = float(dev[mask].sum()), float(dev[~mask].sum())
    return MeritReport(p_s, p_n, on, off, snr)


def shot_noise_sigma(land: Landscape | np.ndarray, n_s: int) -> float:
    """Predicted std of the real (or imaginary) part of a nonzero-frequency
    coefficient when each point is a mean of n_s two-outcome shots."""
    x = land.values if isinstance(land, Landscape) else np.asarray(land, dtype=float)
    size = x.size
    if np.max(np.abs(x)) > 1 + 1e-9:
        raise ValidationError("shot-noise formula needs values in [-1, 1]")
    inner = max(0.0, 1 - float(np.sum(x**2)) / size)
    return float(np.sqrt(inner) / np.sqrt(2 * n_s * size))


def expected_off_support_power(land: Landscape, n_s: int, support: FrequencySupport) -> float:
    """Expected shot-noise power outside the support: (#off-support modes) * 2 sigma^2."""
    n_off = int(np.sum(~support.mask(land.grid)))
    return n_off * 2 * shot_noise_sigma(land, n_s) ** 2


# ---------------------------------------------------------------------------
# Fourier coefficient vectors over Pauli observables

@dataclass
class PauliCoefficients:
    paulis: list[PauliString]
    coeffs: np.ndarray  # shape (n_paulis,) + grid.shape
    exhaustive: bool
    n_qubits: int


def pauli_coefficient_vectors(c: ParamCircuit, noise: NoiseSpec | None, grid: Grid,
                              max_exhaustive_qubits: int = 3, n_random: int = 64, seed=0) -> PauliCoefficients:
    """DFT of <P> over the grid for every Pauli P (or a random subset when n is large)."""
    n = c.n_qubits
    if n <= max_exhaustive_qubits:
        paulis, exhaustive = list(all_paulis(n)), True
    else:
        rng = np.random.default_rng(seed)
        picks = rng.choice(4**n, size=min(n_random, 4**n), replace=False)
        paulis = [PauliString("".join("IXYZ"[(int(i) >> (2 * (n - 1 - q))) & 3] for q in range(n))) for i in sorted(picks)]
        exhaustive = False
    rho = simulate_densities(c, noise, grid.points())
    values = np.stack([p.trace_with(rho).real.reshape(grid.shape) for p in paulis])
    axes = tuple(range(1, 1 + grid.m))
    return PauliCoefficients(paulis, np.fft.fftn(values, axes=axes, norm="forward"), exhaustive, n)


def _check_pair(a, b):
    a = a.coeffs if isinstance(a, PauliCoefficients) else np.asarray(a)
    b = b.coeffs if isinstance(b, PauliCoefficients) else np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"coefficient vectors have shapes {a.shape} and {b.shape}")
    return a, b


def average_fidelity(exact_cvec, noisy_cvec, n_qubits: int) -> float:
    """Grid-averaged fidelity 2^-n c^dagger c~ from Pauli coefficient vectors."""
    a, b = _check_pair(exact_cvec, noisy_cvec)
    if isinstance(exact_cvec, PauliCoefficients) and not exact_cvec.exhaustive:
        scale = 4**n_qubits / a.shape[0]
    else:
        scale = 1.0
    return float(scale * np.vdot(a, b).real / 2**n_qubits)


def average_purity(noisy_cvec, n_qubits: int) -> float:
    a = noisy_cvec.coeffs if isinstance(noisy_cvec, PauliCoefficients) else np.asarray(noisy_cvec)
    scale = 4**n_qubits / a.shape[0] if isinstance(noisy_cvec, PauliCoefficients) and not noisy_cvec.exhaustive else 1.0
    return float(scale * np.vdot(a, a).real / 2**n_qubits)


# ---------------------------------------------------------------------------
# bootstrap

@dataclass
class BootstrapResult:
    resamples: int
    coeff_re_std: np.ndarray
    coeff_im_std: np.ndarray
    merit_std: dict | None = None

    def to_json(self) -> dict:
        return {
            "resamples": self.resamples,
            "merit_std": self.merit_std,
            "coeff_re_std": self.coeff_re_std.ravel().tolist(),
            "coeff_im_std": self.coeff_im_std.ravel().tolist(),
        }


def bootstrap_landscapes(land: Landscape, resamples: int, seed=0) -> np.ndarray:
    """Resampled landscapes, shape (resamples,) + grid.shape."""
    if land.records is None:
        raise ValidationError("bootstrap needs per-point shot records")
    out = np.empty((resamples, land.grid.size))
    for idx, (vals, counts) in enumerate(land.records):
        total = int(np.sum(counts))
        rng = point_rng(seed, idx)
        draws = rng.multinomial(total, np.asarray(counts) / total, size=resamples)
        out[:, idx] = draws @ np.asarray(vals, dtype=float) / total
    return out.reshape((resamples,) + land.grid.shape)


def bootstrap_error(land: Landscape, resamples: int = 200, seed=0,
                    support: FrequencySupport | None = None,
                    reference: Spectrum | None = None) -> BootstrapResult:
    """Std of Fourier coefficients (and merits, given a support) over shot resamples."""
    samples = bootstrap_landscapes(land, resamples, seed)
    axes = tuple(range(1, 1 + land.grid.m))
    coeffs = np.fft.fftn(samples, axes=axes, norm="forward")
    merit_std = None
    if support is not None:
        reps = [figures_of_merit(Spectrum(land.grid, cf), support, reference) for cf in coeffs]
        merit_std = {}
        for name in ("P_S", "P_N", "P_N_on_support", "P_N_off_support", "SNR"):
            vals = [getattr(r, name) for r in reps]
            if any(v is None for v in vals):
                merit_std[name] = None if all(v is None for v in vals) else float("nan")
            else:
                merit_std[name] = float(np.std(vals, ddof=1))
    return BootstrapResult(resamples, coeffs.real.std(axis=0, ddof=1), coeffs.imag.std(axis=0, ddof=1), merit_std)


def save_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)


__all__ = [
    "Spectrum", "dft", "idft", "MeritReport", "figures_of_merit", "shot_noise_sigma",
    "expected_off_support_power", "pauli_coefficient_vectors", "average_fidelity", "average_purity",
    "bootstrap_error", "bootstrap_landscapes", "BootstrapResult", "signed_frequencies",
]
