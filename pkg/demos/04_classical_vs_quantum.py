"""
Is the effect quantum?
======================

A classical field with no initial energy stays dark under modulation. The
quantum field always has its zero-point seed. In a hot cavity the thermal
seed dwarfs it and both pictures grow at the same rate 2(mu - gamma).
"""

import math

import numpy as np

from dcesim import BathSpec, ClassicalSeed, TwoStepModulation, classical_yield, evolve_linear, thermal_state

drive = TwoStepModulation.resonant(1.05)
T = drive.period
mu = math.log(1.05) / T
gamma = 0.5 * mu

for nbar in (0.0, 10.0):
    trace = evolve_linear(thermal_state(nbar, 1), drive, BathSpec(gamma, nbar), 300 * T)
    seed = ClassicalSeed(float(trace.n_mean[0]))
    marks = trace.period_marks()
    print(f"\nnbar = {nbar}")
    print(f"{'m':>4} {'quantum':>12} {'classical':>12} {'no seed':>8}")
    for m in (0, 100, 200, 300):
        i = marks[m]
        print(f"{m:>4} {trace.n_mean[i]:>12.4f} {classical_yield(seed, mu, gamma, m, T):>12.4f} "
              f"{classical_yield(ClassicalSeed(0.0), mu, gamma, m, T):>8.1f}")
    print(f"quantum exponent {trace.tail_slope():.6f}, classical 2(mu - gamma) = {2 * (mu - gamma):.6f}")

# %%
# A truly classical cold cavity starts with no field at all (the "no seed"
# column) and stays dark. Seeding the classical model with the zero-point
# value 1/2 mimics the quantum curve, which is the sense in which the cold
# effect is quantum. In the hot cavity the two pictures differ by ~1%.
print("\nratio quantum / classical at m = 300 for nbar = 10:",
      np.round(trace.n_mean[marks[300]] / classical_yield(seed, mu, gamma, 300, T), 4))
