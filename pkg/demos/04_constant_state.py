"""Decay of a Gaussian bump to the constant state 0 with and without convection."""
import numpy as np

from rarelab import ConvexFlux, InitialData, SolverConfig, ViscosityLaw, solve
from rarelab.decay_analysis import theorem_check

law = ViscosityLaw.regularized(0.5)
times = tuple(np.geomspace(1, 300, 30))
for name, flux, key in [("burgers", ConvexFlux.burgers(), "constant/l1/Lq"),
                        ("no flux", ConvexFlux.zero(), "diffusion/dx/Lq+1")]:
    cfg = SolverConfig(flux, law, InitialData.constant_plus_bump(0.0, 1.0, 0.0, 1.0), -150, 150, 1500, 300.0,
                       snapshot_times=times)
    rep = theorem_check(key, solve(cfg), flux, law, q=2 if key.endswith("Lq") else 1)
    print(f"{name:<8} {rep.norm_label:<22} fitted {rep.fitted_exponent:+.3f}  bound {rep.theoretical_exponent:+.3f}")
