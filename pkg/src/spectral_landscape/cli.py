"""Command-line front end.

    spectral-landscape sample --config run.json --out results/
    spectral-landscape diagnose --config run.json --landscape results/landscape.json
    spectral-landscape mitigate --config run.json --landscape results/landscape.json
    spectral-landscape reconstruct --config run.json --landscape results/landscape.json
    spectral-landscape export-qasm --config run.json --theta 0.1 0.2
    spectral-landscape gen-graph --nodes 8 --seed 3

Exit codes: 0 success, 2 invalid input, 3 circuit outside the assumptions of
the requested analysis, 4 file-system error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import experiments
from .circuit import bind, circuit_from_json, export_qasm
from .errors import HypothesisViolation, ValidationError
from .fourier import dft, figures_of_merit, signed_frequencies
from .mitigation import PRESETS, MitigationConfig, cdr_fit, cdr_training_set, clifford_grid_pairs, mitigate, round_reconstruct
from .noise import NoiseSpec
from .pauli import parse_observable
from .sampler import Grid, Landscape, sample_exact, sample_noisy
from .theory import exact_trig_form, frequency_support

log = logging.getLogger("spectral_landscape")


@dataclass
class RunConfig:
    circuit: dict = field(default_factory=lambda: {"builtin": "simple_2q"})
    noise: dict | None = None
    grid: dict = field(default_factory=lambda: {"d": 5})
    shots: int | None = None
    seed: int = 0
    observable: object = None
    mitigation: object = None
    reference: bool = True
    workers: int = 1
    out: str = "."

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        body = {k: v for k, v in self.to_json().items() if k not in ("out", "workers")}
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]

    # -- resolved objects --------------------------------------------------
    def build(self):
        spec = dict(self.circuit)
        if "path" in spec:
            with open(spec["path"]) as fh:
                data = json.load(fh)
            c = circuit_from_json(data)
            obs = data.get("observable")
            obs = parse_observable(obs) if obs is not None else None
        elif "builtin" in spec:
            name = spec.pop("builtin")
            c, obs = experiments.build_experiment(name, **spec)
        else:
            raise ValidationError("circuit config needs 'builtin' or 'path'")
        if self.observable is not None:
            obs = parse_observable(self.observable)
        if obs is None:
            raise ValidationError("no observable given")
        return c, obs

    def make_grid(self, m: int) -> Grid:
        g = dict(self.grid)
        return Grid(int(g.get("m", m)), int(g["d"]))

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec.from_json(self.noise)

    def mitigation_config(self) -> MitigationConfig:
        if self.mitigation is None:
            return MitigationConfig()
        if isinstance(self.mitigation, str):
            if self.mitigation not in PRESETS:
                raise ValidationError(f"unknown mitigation preset {self.mitigation!r}")
            return PRESETS[self.mitigation]
        data = dict(self.mitigation)
        preset = data.pop("preset", None)
        base = asdict(PRESETS[preset]) if preset else {}
        return MitigationConfig(**{**base, **data})


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _stamp(cfg: RunConfig) -> dict:
    return {"config_hash": cfg.digest(), "seed": cfg.seed}


def _check_landscape(land: Landscape, c) -> None:
    if land.grid.m != c.m_params:
        raise ValidationError("landscape grid does not match the circuit's parameter count")
    if land.circuit_hash is not None and land.circuit_hash != c.digest():
        raise ValidationError("landscape was sampled from a different circuit")


# ---------------------------------------------------------------------------
# commands

def cmd_sample(cfg: RunConfig) -> dict:
    c, obs = cfg.build()
    grid = cfg.make_grid(c.m_params)
    out = Path(cfg.out)
    noise = cfg.noise_spec()
    land = sample_noisy(c, noise, obs, grid, shots=cfg.shots, seed=cfg.seed, workers=cfg.workers)
    land.meta.update(_stamp(cfg))
    _write_json(out / "landscape.json", land.to_json())
    land.to_csv(out / "landscape.csv")
    files = {"landscape": str(out / "landscape.json")}
    if cfg.reference:
        ref = sample_exact(c, obs, grid)
        ref.meta.update(_stamp(cfg))
        _write_json(out / "exact.json", ref.to_json())
        files["exact"] = str(out / "exact.json")
    return files


def cmd_diagnose(cfg: RunConfig, landscape: str, exact: str | None = None) -> dict:
    c, obs = cfg.build()
    land = Landscape.load(landscape)
    _check_landscape(land, c)
    support = frequency_support(c, obs)
    spec = dft(land)
    ref = dft(Landscape.load(exact)) if exact else None
    report = figures_of_merit(spec, support, ref)
    out = Path(cfg.out)
    _write_json(out / "spectrum.json", {**spec.to_json(), **_stamp(cfg)})
    _write_json(out / "merits.json", {**report.to_json(), "support": support.to_json(), **_stamp(cfg)})
    k = signed_frequencies(land.grid.d)
    with open(out / "spectrum.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"k{i}" for i in range(land.grid.m)] + ["re", "im", "abs"])
        for idx in np.ndindex(*land.grid.shape):
            v = spec.coeffs[idx]
            w.writerow([int(k[i]) for i in idx] + [repr(v.real), repr(v.imag), repr(abs(v))])
    return report.to_json()


def cmd_mitigate(cfg: RunConfig, landscape: str, exact: str | None = None) -> dict:
    c, obs = cfg.build()
    land = Landscape.load(landscape)
    _check_landscape(land, c)
    mcfg = cfg.mitigation_config()
    ref = Landscape.load(exact) if exact else None
    support = frequency_support(c, obs)
    model = None
    if mcfg.cdr:
        ts = cdr_training_set(c, cfg.noise_spec(), obs, land.grid.points(), mcfg.D, mcfg.training_size,
                              seed=[mcfg.seed, cfg.seed], shots=land.shots, post_select=mcfg.post_select)
        pairs = ts.pairs
        if mcfg.include_grid_points and ref is not None:
            pairs = np.vstack([pairs, clifford_grid_pairs(c, land.grid, ref, land)])
        model = cdr_fit(pairs)
        model.D = mcfg.D
    mitigated, report = mitigate(land, mcfg, support, model, ref, c, obs)
    mitigated.meta.update(_stamp(cfg))
    out = Path(cfg.out)
    _write_json(out / "mitigated.json", mitigated.to_json())
    report = {**report, "config": mcfg.to_json(), **_stamp(cfg)}
    _write_json(out / "mitigation_report.json", report)
    return report


def cmd_reconstruct(cfg: RunConfig, landscape: str) -> dict:
    c, obs = cfg.build()
    land = Landscape.load(landscape)
    _check_landscape(land, c)
    tf = round_reconstruct(dft(land), c, obs)
    result = {"trig_form": tf.to_json(), **_stamp(cfg)}
    try:
        exact = exact_trig_form(c, obs)
        result["exact_recovery"] = tf.same_as(exact)
    except HypothesisViolation:
        result["exact_recovery"] = None
    _write_json(Path(cfg.out) / "trigform.json", result)
    return result


def cmd_export_qasm(cfg: RunConfig, theta) -> str:
    c, _ = cfg.build()
    if theta is None:
        theta = np.zeros(c.m_params)
    text = export_qasm(bind(c, np.asarray(theta, dtype=float)))
    out = Path(cfg.out) / "circuit.qasm"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    return text


def cmd_gen_graph(n: int, seed: int, out: str) -> dict:
    g = experiments.random_regular_triangle_free_graph(n, 3, seed)
    data = {"n_nodes": n, "edges": sorted([sorted(e) for e in g.edges]), "seed": seed}
    _write_json(Path(out) / "graph.json", data)
    return data


# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectral-landscape", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, landscape=False):
        sp.add_argument("--config", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--shots", type=int)
        sp.add_argument("--out")
        if landscape:
            sp.add_argument("--landscape", required=True)
            sp.add_argument("--exact")

    common(sub.add_parser("sample", help="sample a landscape on the grid"))
    common(sub.add_parser("diagnose", help="spectrum and noise figures of merit"), landscape=True)
    common(sub.add_parser("mitigate", help="spectral mitigation + CDR"), landscape=True)
    sp = sub.add_parser("reconstruct", help="rounding reconstruction of a Clifford-class landscape")
    common(sp, landscape=True)
    sp = sub.add_parser("export-qasm", help="write the bound circuit as OpenQASM 2.0")
    common(sp)
    sp.add_argument("--theta", type=float, nargs="*")
    sp = sub.add_parser("gen-graph", help="random 3-regular triangle-free graph")
    sp.add_argument("--nodes", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=".")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = _parser().parse_args(argv)
    try:
        if args.verb == "gen-graph":
            print(json.dumps(cmd_gen_graph(args.nodes, args.seed, args.out)))
            return 0
        cfg = RunConfig.load(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.shots is not None:
            cfg.shots = args.shots
        if args.out is not None:
            cfg.out = args.out
        if args.verb == "sample":
            result = cmd_sample(cfg)
        elif args.verb == "diagnose":
            result = cmd_diagnose(cfg, args.landscape, args.exact)
        elif args.verb == "mitigate":
            result = cmd_mitigate(cfg, args.landscape, args.exact)
        elif args.verb == "reconstruct":
            result = cmd_reconstruct(cfg, args.landscape)
        else:
            print(cmd_export_qasm(cfg, args.theta), end="")
            return 0
        print(json.dumps(result, indent=1, default=str))
        return 0
    except HypothesisViolation as exc:
        log.error("hypothesis violation: %s", exc)
        return 3
    except OSError as exc:
        log.error("io error: %s", exc)
        return 4
    except (ValidationError, ValueError, KeyError, TypeError) as exc:
        log.error("invalid input: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
