"""
When does entanglement switch on?
=================================

A thermal bath and losses delay the moment the two ring modes become
entangled. The long-time formula predicts an occurrence time; here it is
compared with the first snapshot of a full evolution where E_N > 0.
"""

import math

from dcesim import AsymptoticParams, BathSpec, TwoStepModulation, evolve_ring, occurrence_time, thermal_state
from dcesim.experiments import first_crossing

drive = TwoStepModulation.resonant(1.2)
T = drive.period
mu = math.log(1.2) / T

print(f"{'nbar':>5} {'gamma/mu':>9} {'analytic [T]':>13} {'numeric [T]':>12}")
for nbar in (0.0, 0.5, 1.0, 2.0):
    for ratio in (1.0, 2.0, 4.0):
        bath = BathSpec(ratio * mu, nbar)
        t_occ = occurrence_time(AsymptoticParams.from_profile(drive, bath)).t_occ
        trace = evolve_ring(thermal_state(nbar, 2), drive, bath, t_occ + 3 * T, snapshot_interval=T / 40)
        print(f"{nbar:>5} {ratio:>9} {t_occ / T:>13.3f} {first_crossing(trace) / T:>12.3f}")

# %%
# Both columns grow with temperature and with damping. At n = 0 the modes
# entangle straight away.
