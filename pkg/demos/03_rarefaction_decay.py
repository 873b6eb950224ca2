"""Perturbed Burgers rarefaction with shear-thinning viscosity; fit decay rates.

A reduced grid and horizon keep this under a minute; configs/rarefaction_burgers.toml
holds the full-size experiment.
"""
from rarelab.harness import decay_reports, parse_config, run_experiment, summary_table

CONFIG = """
name = "demo-rarefaction"
[flux]
kind = "burgers"
[viscosity]
kind = "regularized_power"
p = 0.5
[far_field]
u_minus = -1.0
u_plus = 1.0
[initial]
kind = "profile_plus_bump"
profile = "smoothed"
amplitude = 0.5
[grid]
cells = 2048
margin = 20.0
boundary = "profile"
[time]
t_end = 200.0
snapshots = 30
[checks]
lines = ["rarefaction/l1/Lq", { key = "rarefaction/dx/Lq+1", q = 1 }, "rarefaction/dt/L2"]
"""

cfg = parse_config(CONFIG)
result = run_experiment(cfg, "runs")
print(f"run written to {result.directory}")
print(summary_table(decay_reports(cfg, result.snapshots)), end="")
