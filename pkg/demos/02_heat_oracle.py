"""Grid refinement against the exact heat-kernel contact wave."""
import numpy as np

from rarelab import contact_wave, profile_value, solve
from rarelab.pde_solver import RunMonitor, heat_oracle_config

exact = contact_wave(0.0, 1.0, mu=1.0)
previous = None
for dx in (0.4, 0.2, 0.1, 0.05):
    mon = RunMonitor()
    s = solve(heat_oracle_config(dx), mon)[-1][1]
    err = float(np.max(np.abs(s.values - profile_value(exact, s.t, s.x))))
    ratio = "" if previous is None else f"  ratio {previous / err:.2f}"
    print(f"dx={dx:<5} max error {err:.3e}  mass defect {mon.relative_mass_defect():.1e}{ratio}")
    previous = err
