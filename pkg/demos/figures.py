"""
Desk-scale versions of the two experiment figures
=================================================

Runs small grids through the same code as the ``fig1a`` and ``fig1b``
subcommands and prints the aggregated plot data.
"""

from ldp_entropy.experiments import ExperimentConfig, emit_plot_data, run_experiment

# pairs queried by the tree estimator against the all-pairs count
cfg = ExperimentConfig.build("fig1a", {"seed": 1, "trials": 5, "d_grid": [10, 20, 40]})
rows, _ = run_experiment(cfg)
print(emit_plot_data(rows))

# relative error of collision entropy against total bits sent
cfg = ExperimentConfig.build("fig1b", {"seed": 1, "trials": 30, "bit_grid": [1000, 10_000, 100_000]})
rows, _ = run_experiment(cfg)
print(emit_plot_data(rows))
