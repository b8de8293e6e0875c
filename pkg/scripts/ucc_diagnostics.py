"""Fourier diagnostics of the UCC singles landscape across noise strengths:
signal and noise power, on/off-support deviation, grid-averaged fidelity and
purity from all 256 Pauli coefficient vectors, and bootstrap error bars on P_N."""

import argparse

from spectral_landscape.experiments import ucc_h2_singles
from spectral_landscape.fourier import (
    average_fidelity, average_purity, bootstrap_error, dft, figures_of_merit, pauli_coefficient_vectors,
)
from spectral_landscape.noise import NoiseRule, NoiseSpec
from spectral_landscape.sampler import make_grid, sample_exact, sample_noisy
from spectral_landscape.theory import frequency_support


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=7)
    ap.add_argument("--shots", type=int, default=1024)
    ap.add_argument("--p", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.05])
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--resamples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    c, observables = ucc_h2_singles(seed=0)
    obs = observables["ZIZI"]
    grid = make_grid(2, args.d)
    support = frequency_support(c, obs)
    exact = sample_exact(c, obs, grid)
    clean_vec = pauli_coefficient_vectors(c, None, grid, max_exhaustive_qubits=4)
    print(f"{'p':>6} {'P_S':>9} {'P_N':>10} {'+-':>9} {'dev_on':>10} {'dev_off':>10} {'fidelity':>9} {'purity':>8}")
    for p in args.p:
        noise = NoiseSpec([
            NoiseRule("depolarizing", p=p, qubits="targets"),
            NoiseRule("coherent", epsilon=args.eps, pauli="gate"),
        ])
        land = sample_noisy(c, noise, obs, grid, shots=args.shots, seed=args.seed)
        rep = figures_of_merit(dft(land), support, dft(exact))
        boot = bootstrap_error(land, resamples=args.resamples, seed=args.seed, support=support)
        vec = pauli_coefficient_vectors(c, noise, grid, max_exhaustive_qubits=4)
        fid, pur = average_fidelity(clean_vec, vec, c.n_qubits), average_purity(vec, c.n_qubits)
        print(f"{p:6.3f} {rep.P_S:9.4f} {rep.P_N:10.3e} {boot.merit_std['P_N']:9.1e} "
              f"{rep.P_N_on_support:10.3e} {rep.P_N_off_support:10.3e} {fid:9.4f} {pur:8.4f}")


if __name__ == "__main__":
    main()
