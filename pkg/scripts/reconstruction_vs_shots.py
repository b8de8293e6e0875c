"""How often rounding reconstruction recovers the exact trigonometric form of
the simple two-qubit landscape, as a function of shots per point and noise."""

import argparse

from spectral_landscape.experiments import simple_2q
from spectral_landscape.fourier import dft
from spectral_landscape.mitigation import round_reconstruct
from spectral_landscape.noise import global_depolarizing
from spectral_landscape.sampler import make_grid, sample_noisy
from spectral_landscape.theory import exact_trig_form


def recovery_rate(c, obs, grid, p, shots, trials):
    target = exact_trig_form(c, obs)
    hits = 0
    for seed in range(trials):
        spec = dft(sample_noisy(c, global_depolarizing(p), obs, grid, shots=shots, seed=seed))
        hits += round_reconstruct(spec, c, obs).same_as(target)
    return hits / trials


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--shots", type=int, nargs="+", default=[1, 2, 5, 10, 20, 50, 100])
    ap.add_argument("--p", type=float, nargs="+", default=[0.0, 0.05, 0.1, 0.15])
    ap.add_argument("--pad", type=int, default=0)
    args = ap.parse_args()

    c, obs = simple_2q(pad=args.pad)
    grid = make_grid(2, 5)
    print("shots " + " ".join(f"p={p:<6}" for p in args.p))
    for shots in args.shots:
        rates = [recovery_rate(c, obs, grid, p, shots, args.trials) for p in args.p]
        print(f"{shots:>5} " + " ".join(f"{r:<8.2f}" for r in rates))


if __name__ == "__main__":
    main()
