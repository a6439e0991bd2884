"""
Eight-fold coincidence rate budget
==================================

Why does an eight-photon experiment collect nine events an hour from a
laser firing seventy-six million times a second? Each pulse must yield
a pair from all four sources, every photon must survive collection and
detection, and the fused state must pass post-selection. The rate is
repetition_rate * (p * xi)^4 * success_factor, and each factor is
unforgiving.
"""

from photonfusion import n_fold_rate

REP_RATE = 76.0e6
PAIR_PROBABILITY = 0.058
PAIR_EFFICIENCY = 0.265**2  # both photons of a pair must arrive
SUCCESS = 0.125  # fusion projection plus analyzer acceptance

estimate = n_fold_rate(
    PAIR_PROBABILITY,
    PAIR_EFFICIENCY,
    REP_RATE,
    n_pairs=4,
    success_factor=SUCCESS,
)
print(f"rate:      {estimate.rate_hz:.3e} Hz")
print(f"per hour:  {estimate.events_per_hour:.1f} events")

# The fourth-power scaling makes pump power the only practical lever,
# and a brutal one: halving p costs a factor of sixteen.
print("\npump power scan:")
for scale in (0.5, 1.0, 2.0):
    est = n_fold_rate(
        PAIR_PROBABILITY * scale,
        PAIR_EFFICIENCY,
        REP_RATE,
        n_pairs=4,
        success_factor=SUCCESS,
    )
    print(f"  p = {PAIR_PROBABILITY * scale:.3f}  ->  {est.events_per_hour:8.2f} events/h")

# Efficiency enters at the same power. This is why source brightness
# and collection efficiency, not detector count, set the frontier for
# adding photons.
print("\ncollection efficiency scan:")
for xi in (0.2, 0.265, 0.35):
    est = n_fold_rate(
        PAIR_PROBABILITY,
        xi**2,
        REP_RATE,
        n_pairs=4,
        success_factor=SUCCESS,
    )
    print(f"  xi = {xi:.3f}  ->  {est.events_per_hour:8.2f} events/h")
