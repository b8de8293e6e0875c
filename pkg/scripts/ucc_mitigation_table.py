"""Median cosine similarity and Euclidean distance to the exact landscape for
the four-qubit UCC singles landscape, before and after mitigation."""

import argparse

import numpy as np

from spectral_landscape.experiments import ucc_h2_singles
from spectral_landscape.mitigation import MitigationConfig, cdr_training_set, mitigate
from spectral_landscape.noise import NoiseRule, NoiseSpec
from spectral_landscape.sampler import make_grid, sample_exact, sample_noisy
from spectral_landscape.theory import frequency_support

METHODS = {
    "raw": MitigationConfig("none"),
    "CDR": MitigationConfig("none", cdr=True),
    "filter+CDR": MitigationConfig("filter", cdr=True),
    "threshold+CDR": MitigationConfig("threshold_hard", B=3.0, cdr=True),
    "filter": MitigationConfig("filter"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=7)
    ap.add_argument("--shots", type=int, default=1024)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--p", type=float, default=0.02, help="depolarizing probability on gate targets")
    ap.add_argument("--eps", type=float, default=0.05, help="coherent over-rotation about each generator")
    ap.add_argument("--D", type=int, default=2, help="non-Clifford angles kept in CDR training circuits")
    ap.add_argument("--training", type=int, default=50)
    ap.add_argument("--observable", default="ZIZI", choices=["ZIZI", "XXYY"])
    args = ap.parse_args()

    c, observables = ucc_h2_singles(seed=0)
    obs = observables[args.observable]
    grid = make_grid(2, args.d)
    noise = NoiseSpec([
        NoiseRule("depolarizing", p=args.p, qubits="targets"),
        NoiseRule("coherent", epsilon=args.eps, pauli="gate"),
    ])
    support = frequency_support(c, obs)
    exact = sample_exact(c, obs, grid)
    results = {name: [] for name in METHODS}
    for seed in range(args.seeds):
        noisy = sample_noisy(c, noise, obs, grid, shots=args.shots, seed=seed)
        model = cdr_training_set(c, noise, obs, grid.points(), args.D, args.training,
                                 seed=seed, shots=args.shots).fit()
        for name, cfg in METHODS.items():
            _, rep = mitigate(noisy, cfg, support, model if cfg.cdr else None, exact)
            m = rep["metrics"]["mitigated"]
            results[name].append((m["cosine"], m["euclidean"]))

    print(f"{'method':<15} {'cosine':>9} {'euclidean':>10}")
    for name, rows in results.items():
        cos, euc = np.median(np.array(rows), axis=0)
        print(f"{name:<15} {cos:9.5f} {euc:10.4f}")


if __name__ == "__main__":
    main()
