"""Spectral error mitigation and Clifford data regression (CDR)."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import FixedGate, Gadget, ParamCircuit, is_clifford_angle, lightcone, nearest_clifford_projection
from .errors import DegenerateTrainingSetError, HypothesisViolation, ValidationError
from .fourier import Spectrum, dft, figures_of_merit, idft
from .noise import NoiseSpec
from .pauli import Observable, PauliString
from .sampler import Grid, Landscape, evaluate_points, sample_exact, sample_noisy
from .theory import FrequencySupport, TrigForm, frequency_support

METHODS = ("none", "filter", "threshold_hard", "threshold_soft", "round_reconstruct")


# ---------------------------------------------------------------------------
# spectral steps

def filter_support(spec: Spectrum, support: FrequencySupport) -> Spectrum:
    """Zero every coefficient outside the product support."""
    return spec.with_coeffs(np.where(support.mask(spec.grid), spec.coeffs, 0))


def threshold_level(coeffs, B: float) -> float:
    """B times the (lower) median of |c| over all coefficients."""
    mags = np.sort(np.abs(np.asarray(coeffs)).ravel())
    return float(B * mags[(len(mags) - 1) // 2])


def threshold_coefficients(coeffs, B: float, mode: str = "hard"):
    if B <= 0:
        raise ValidationError("threshold multiplier B must be positive")
    coeffs = np.asarray(coeffs, dtype=complex)
    T = threshold_level(coeffs, B)
    mags = np.abs(coeffs)
    if mode == "hard":
        out = np.where(mags > T, coeffs, 0)
    elif mode == "soft":
        with np.errstate(divide="ignore", invalid="ignore"):
            shrink = np.where(mags > 0, np.maximum(1 - T / mags, 0), 0)
        out = coeffs * shrink
    else:
        raise ValidationError(f"unknown threshold mode {mode!r}")
    return out, T


def threshold(spec: Spectrum, B: float, mode: str = "hard") -> Spectrum:
    out, _ = threshold_coefficients(spec.coeffs, B, mode)
    return spec.with_coeffs(out)


# exp coefficients (k = -1, 0, 1) -> monomial weights (sin, 1, cos)
_TO_MONO = np.array([[-1j, 0, 1j], [0, 1, 0], [1, 0, 1]])


def monomial_coefficients(spec: Spectrum) -> np.ndarray:
    """Tensor of shape (3,)*m of monomial weights; axis index 0, 1, 2 means
    sin, 1, cos of that parameter."""
    d = spec.grid.d
    sub = spec.coeffs[np.ix_(*([[d - 1, 0, 1]] * spec.grid.m))]
    for axis in range(spec.grid.m):
        sub = np.moveaxis(np.tensordot(_TO_MONO, sub, axes=([1], [axis])), 0, axis)
    return sub.real


def check_reconstruction_hypotheses(c: ParamCircuit, obs) -> None:
    if not isinstance(obs, PauliString):
        raise HypothesisViolation("reconstruction needs a single Pauli observable")
    for g in c.gates:
        if isinstance(g, FixedGate) and not g.is_clifford:
            raise HypothesisViolation(f"fixed gate {g.name} on {g.targets} is not Clifford")
        if isinstance(g, Gadget):
            if g.param is None and not is_clifford_angle(g.angle.offset):
                raise HypothesisViolation("fixed rotation at a non-Clifford angle")
            if g.param is not None and (abs(abs(g.angle.multiplier) - 1) > 1e-12 or not is_clifford_angle(g.angle.offset)):
                raise HypothesisViolation("parameterised rotations need unit multipliers and Clifford offsets")
    params = [g.param for _, g in c.gadgets if g.param is not None]
    if len(params) != len(set(params)):
        raise HypothesisViolation("each parameter must drive a single rotation")
    if any(ch not in "01+-" for ch in c.initial_state):
        raise HypothesisViolation("input must be a stabilizer product state")


def round_reconstruct(spec: Spectrum, c: ParamCircuit, obs: PauliString) -> TrigForm:
    """Round monomial coefficients to {-1, 0, 1} on the allowed index set.

    Parameters outside the light cone of ``obs`` may only carry the constant
    monomial; everything else is rounded to the nearest of -1, 0, 1.
    """
    check_reconstruction_hypotheses(c, obs)
    if spec.grid.m != c.m_params:
        raise ValidationError("spectrum and circuit have different parameter counts")
    cone = lightcone(c, obs)
    mono = np.clip(np.rint(monomial_coefficients(spec)), -1, 1)
    monomials = {}
    for idx in np.ndindex(*mono.shape):
        key = tuple(i - 1 for i in idx)
        if any(k != 0 and p not in cone for p, k in enumerate(key)):
            continue
        if mono[idx] != 0:
            monomials[key] = float(mono[idx])
    return TrigForm(c.m_params, tuple(range(c.m_params)), monomials)


# ---------------------------------------------------------------------------
# Clifford data regression

@dataclass
class CdrModel:
    A: float
    A_prime: float
    training_size: int
    residual: float
    fallback: bool = False
    D: int | None = None

    def apply(self, values):
        return self.A * np.asarray(values) + self.A_prime

    def to_json(self) -> dict:
        return asdict(self)


def _l1(exact, noisy, a, b) -> float:
    return float(np.mean(np.abs(exact - a * noisy - b)))


def cdr_fit(pairs, n_iter: int = 50, eps: float = 1e-8) -> CdrModel:
    """Least-absolute-deviation fit exact ~ A * noisy + A' by IRLS.

    Starts from the least-squares line; if the reweighted iterate ends with a
    worse objective than least squares the least-squares fit is returned and
    flagged.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or len(pairs) < 2:
        raise DegenerateTrainingSetError("need at least two (exact, noisy) pairs")
    exact, noisy = pairs[:, 0], pairs[:, 1]
    if np.ptp(noisy) < 1e-12:
        raise DegenerateTrainingSetError("all noisy training values coincide")
    X = np.column_stack([noisy, np.ones_like(noisy)])
    beta_ls = np.linalg.lstsq(X, exact, rcond=None)[0]
    beta = beta_ls.copy()
    for _ in range(n_iter):
        w = 1.0 / np.maximum(np.abs(exact - X @ beta), eps)
        sw = np.sqrt(w)
        beta = np.linalg.lstsq(X * sw[:, None], exact * sw, rcond=None)[0]
    obj_ls = _l1(exact, noisy, *beta_ls)
    obj = _l1(exact, noisy, *beta)
    fallback = not np.all(np.isfinite(beta)) or obj > obj_ls
    if fallback:
        beta, obj = beta_ls, obj_ls
    return CdrModel(float(beta[0]), float(beta[1]), len(pairs), obj, bool(fallback))


@dataclass
class TrainingSet:
    exact: np.ndarray
    noisy: np.ndarray
    D: int
    seed: object = None

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.exact, self.noisy])

    def fit(self) -> CdrModel:
        model = cdr_fit(self.pairs)
        model.D = self.D
        return model


def cdr_training_set(c: ParamCircuit, noise: NoiseSpec | None, obs: Observable, theta, D: int,
                     size: int, seed=0, shots: int | None = None,
                     post_select: float | None = None) -> TrainingSet:
    """Near-Clifford training pairs (exact, noisy).

    ``theta`` is one target parameter vector or an array of them (one is
    picked at random per draw). ``post_select`` keeps that fraction of pairs
    with the largest |exact| value.
    """
    if size < 2:
        raise ValidationError("training set needs at least two circuits")
    targets = np.atleast_2d(np.asarray(theta, dtype=float))
    rng = np.random.default_rng(seed)
    exact, noisy = np.empty(size), np.empty(size)
    for r in range(size):
        target = targets[rng.integers(len(targets))]
        bound, _ = nearest_clifford_projection(c, target, D, seed=[int(rng.integers(2**31)), r])
        empty = np.zeros((1, 0))
        exact[r] = evaluate_points(bound, None, obs, empty)[0]
        noisy[r] = evaluate_points(bound, noise, obs, empty, shots=shots, seed=int(rng.integers(2**31)))[0]
    if post_select is not None:
        if not 0 < post_select <= 1:
            raise ValidationError("post-selection fraction must lie in (0, 1]")
        keep = max(2, int(round(post_select * size)))
        order = np.argsort(-np.abs(exact), kind="stable")[:keep]
        exact, noisy = exact[order], noisy[order]
    if np.ptp(exact) < 1e-12:
        raise DegenerateTrainingSetError(
            f"all exact training values equal {exact[0]:.3g}; near-Clifford circuits carry no signal"
        )
    return TrainingSet(exact, noisy, D, seed)


def clifford_grid_pairs(c: ParamCircuit, grid: Grid, exact: Landscape, noisy: Landscape):
    """(exact, noisy) pairs at grid points where every rotation is Clifford."""
    pts = grid.points()
    ok = np.ones(len(pts), dtype=bool)
    for _, g in c.gadgets:
        ang = np.broadcast_to(g.angle.value(pts), ok.shape)
        q = ang / (np.pi / 2)
        ok &= np.abs(q - np.rint(q)) < 1e-9
    return np.column_stack([exact.values.ravel()[ok], noisy.values.ravel()[ok]])


# ---------------------------------------------------------------------------
# pipeline

@dataclass
class MitigationConfig:
    method: str = "none"
    B: float = 3.0
    cdr: bool = False
    D: int = 2
    training_size: int = 50
    post_select: float | None = None
    include_grid_points: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown mitigation method {self.method!r}")
        if self.method.startswith("threshold") and self.B <= 0:
            raise ValidationError("threshold multiplier B must be positive")

    def to_json(self) -> dict:
        return asdict(self)


PRESETS = {
    "ucc": MitigationConfig("threshold_hard", B=3.0, cdr=True, D=2),
    "qaoa": MitigationConfig("threshold_hard", B=10.0, cdr=True, D=10, post_select=0.5),
}


def similarity(a: Landscape | np.ndarray, b: Landscape | np.ndarray) -> dict:
    """Cosine similarity (None if either side is zero) and Euclidean distance."""
    x = np.ravel(a.values if isinstance(a, Landscape) else a).astype(float)
    y = np.ravel(b.values if isinstance(b, Landscape) else b).astype(float)
    if x.shape != y.shape:
        raise ValidationError("landscapes live on different grids")
    nx_, ny_ = np.linalg.norm(x), np.linalg.norm(y)
    cosine = None if nx_ == 0 or ny_ == 0 else float(np.clip(x @ y / (nx_ * ny_), -1, 1))
    return {"cosine": cosine, "euclidean": float(np.linalg.norm(x - y))}


def spectral_step(land: Landscape, cfg: MitigationConfig, support=None, circuit=None, obs=None):
    """Apply the configured spectral method; returns (values, T or None, trig form or None)."""
    spec = dft(land)
    if cfg.method == "none":
        return land.values.copy(), None, None
    if cfg.method == "filter":
        if support is None:
            raise ValidationError("filtering needs a frequency support")
        return idft(filter_support(spec, support)).values, None, None
    if cfg.method.startswith("threshold"):
        coeffs, T = threshold_coefficients(spec.coeffs, cfg.B, cfg.method.split("_")[1])
        return idft(spec.with_coeffs(coeffs)).values, T, None
    if circuit is None or obs is None:
        raise ValidationError("rounding reconstruction needs the circuit and observable")
    tf = round_reconstruct(spec, circuit, obs)
    return tf.evaluate(land.grid.points()).reshape(land.grid.shape), None, tf


def mitigate(land: Landscape, cfg: MitigationConfig, support: FrequencySupport | None = None,
             cdr: CdrModel | None = None, exact: Landscape | None = None,
             circuit: ParamCircuit | None = None, obs=None):
    """dft -> spectral step -> idft -> affine CDR rescale. Returns (landscape, report)."""
    if exact is not None and exact.grid != land.grid:
        raise ValidationError("exact reference lives on a different grid")
    values, T, tf = spectral_step(land, cfg, support, circuit, obs)
    if cfg.cdr:
        if cdr is None:
            raise ValidationError("CDR is enabled but no fitted model was supplied")
        values = cdr.apply(values)
    out = land.with_values(values, mitigation=cfg.method, cdr=bool(cfg.cdr))
    report = {
        "method": cfg.method,
        "B": cfg.B if cfg.method.startswith("threshold") else None,
        "T": T,
        "cdr": None if not cfg.cdr else {**cdr.to_json(), "D": cfg.D if cdr.D is None else cdr.D},
        "metrics": None,
        "merits": None,
    }
    if tf is not None:
        report["trig_form"] = tf.to_json()
    if exact is not None:
        report["metrics"] = {"raw": similarity(land, exact), "mitigated": similarity(out, exact)}
    if support is not None:
        try:
            ref = dft(exact) if exact is not None else None
            report["merits"] = {
                "before": figures_of_merit(dft(land), support, ref).to_json(),
                "after": figures_of_merit(dft(out), support, ref).to_json(),
            }
        except ValidationError:
            pass
    return out, report


def run_pipeline(c: ParamCircuit, noise: NoiseSpec, obs, grid: Grid, cfg: MitigationConfig,
                 shots: int | None, seed=0):
    """Sample the noisy landscape, train CDR if asked, mitigate against the exact landscape."""
    exact = sample_exact(c, obs, grid)
    noisy = sample_noisy(c, noise, obs, grid, shots=shots, seed=seed)
    support = frequency_support(c, obs)
    model = None
    if cfg.cdr:
        ts = cdr_training_set(c, noise, obs, grid.points(), cfg.D, cfg.training_size,
                              seed=[cfg.seed, int(seed)], shots=shots, post_select=cfg.post_select)
        pairs = ts.pairs
        if cfg.include_grid_points:
            pairs = np.vstack([pairs, clifford_grid_pairs(c, grid, exact, noisy)])
        model = cdr_fit(pairs)
        model.D = cfg.D
    mitigated, report = mitigate(noisy, cfg, support, model, exact, c, obs)
    return {"exact": exact, "noisy": noisy, "mitigated": mitigated, "report": report, "model": model}
