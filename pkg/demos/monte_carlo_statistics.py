"""
Counting statistics of a finite run
===================================

A four-photon network is bright enough to repeat many simulated runs
quickly, which makes it a good place to watch the error bar obey
Poisson scaling. Two sources with imperfect overlaps give a known
target: the witness should settle at F = 1/2 + fusion * synthesizer^2 / 2
and the uncertainty should shrink with the square root of run time.
"""

import math

from photonfusion import (
    assemble_apparatus,
    hv_setting,
    k_setting,
    monte_carlo_counts,
    star_topology,
    witness_from_histograms,
)

SYNTH = 0.9
FUSION = 0.8

apparatus = assemble_apparatus(
    star_topology(2),
    pair_probability=0.05,
    synthesizer_overlap=SYNTH,
    fusion_overlap=FUSION,
    detector_efficiency=0.3,
    truncation_pairs=2,
)

# Four output arms want the witness grid k*pi/4, which is every second
# step of the k*pi/8 analyzer grid.
settings = [hv_setting()] + [k_setting(2 * j, n_arms=4) for j in range(4)]

target = 0.5 + FUSION * SYNTH**2 / 2.0
print(f"exact fidelity for these overlaps: {target:.4f}\n")

mean_sigma = {}
for hours in (0.002, 0.008):
    duration_s = hours * 3600.0
    sigmas = []
    print(f"runs of {hours:g} h:")
    for seed in range(6):
        histograms = [
            monte_carlo_counts(apparatus, setting, duration_s, seed=100 * seed + i)
            for i, setting in enumerate(settings)
        ]
        report = witness_from_histograms(histograms)
        f = report.fidelity
        sigmas.append(f.sigma)
        n_hv = histograms[0].total
        print(f"  seed {seed}: F = {f.value:.4f} +/- {f.sigma:.5f}  ({n_hv} basis events)")
    mean_sigma[hours] = sum(sigmas) / len(sigmas)
    print(f"  mean sigma: {mean_sigma[hours]:.5f}\n")

# Quadrupling the run time should halve the error bar.
ratio = mean_sigma[0.002] / mean_sigma[0.008]
print(f"sigma ratio between the two run lengths: {ratio:.3f}")
print(f"Poisson scaling predicts sqrt(0.008 / 0.002) = {math.sqrt(0.008 / 0.002):g}")
