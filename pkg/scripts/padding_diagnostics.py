"""Noise power of the simple two-qubit landscape as identity padding grows.

Each padding level adds a pair of CNOTs that cancel in the noiseless circuit
but collect noise, so P_N should grow with the padding.
"""

import argparse

from spectral_landscape.experiments import simple_2q
from spectral_landscape.fourier import dft, figures_of_merit
from spectral_landscape.noise import NoiseRule, NoiseSpec
from spectral_landscape.sampler import make_grid, sample_exact, sample_noisy
from spectral_landscape.theory import frequency_support


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-pad", type=int, default=6)
    ap.add_argument("--p", type=float, default=0.01, help="depolarizing probability per gate")
    ap.add_argument("--drift", type=float, default=0.02, help="parameter-dependent X error on theta_0")
    ap.add_argument("--shots", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    noise = NoiseSpec([
        NoiseRule("depolarizing", p=args.p),
        NoiseRule("param_dependent_pauli", p=args.drift, pauli="XI", param=0, alpha=2.0),
    ])
    grid = make_grid(2, 5)
    print(f"{'pad':>4} {'gates':>6} {'P_S':>10} {'P_N':>10} {'dev_on':>10} {'dev_off':>10} {'SNR':>8}")
    for pad in range(args.max_pad + 1):
        c, obs = simple_2q(pad=pad)
        exact = dft(sample_exact(c, obs, grid))
        noisy = dft(sample_noisy(c, noise, obs, grid, shots=args.shots, seed=args.seed))
        rep = figures_of_merit(noisy, frequency_support(c, obs), exact)
        snr = f"{rep.SNR:8.1f}" if rep.SNR is not None else f"{'-':>8}"
        print(f"{pad:>4} {len(c.gates):>6} {rep.P_S:10.3e} {rep.P_N:10.3e} "
              f"{rep.P_N_on_support:10.3e} {rep.P_N_off_support:10.3e} {snr}")


if __name__ == "__main__":
    main()
