"""
Comparing movement policies
===========================

A small replicated sweep through the harness, summarised with pandas.
"""

from bnevac.engine import SimConfig
from bnevac.experiments import ExperimentPlan, execute, summarize

plan = ExperimentPlan(
    name="demo",
    base=SimConfig(number_persons=1000, pct_bne=100),
    sweeps=[("moving_pattern", ["SR", "RF", "BNE"])],
    replications=3,
    master_seed=11,
)
rows = execute(plan)
table = summarize(rows, ["pattern"])
print(table[["pattern", "n", "evac_ticks_mean", "evac_ticks_std", "mean_uec_mean"]].to_string(index=False))

# now let the share of BNE agents grow inside an SR crowd
plan = ExperimentPlan(
    name="demo-mix",
    base=SimConfig(number_persons=1000, moving_pattern="BNE+SR"),
    sweeps=[("pct_bne", [0.0, 25.0, 50.0, 75.0, 100.0])],
    replications=3,
    master_seed=12,
)
table = summarize(execute(plan), ["pct_bne"])
print()
print(table[["pct_bne", "evac_ticks_mean", "mean_uec_mean"]].to_string(index=False))
print(f"Spearman(pct_bne, time) = {table['spearman_ticks'].iloc[0]:+.2f}")
print(f"Spearman(pct_bne, comfort) = {table['spearman_uec'].iloc[0]:+.2f}")
