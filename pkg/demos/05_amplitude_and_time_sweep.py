"""
Amplitude optimization and an annealing-time sweep
==================================================

A reduced version of the preset sweeps: a handful of annealing times, a
coarse amplitude grid and golden-section refinement.  The full curves come
from ``symqa sweep --preset xxz-fig4 --out xxz.csv``.
"""

import numpy as np

from symqa.annealing import optimize_amplitude, sweep_annealing_time
from symqa.io import load_config, sweep_csv, sweep_summary

config = load_config(preset="xxz-fig4")

opt = optimize_amplitude(config.experiment("xy"), np.geomspace(0.05, 5, 7), refine=True)
print(f"xy driver at T=100 ns: best amplitude {opt.best_amplitude:.4f} GHz, "
      f"error {opt.best_result.estimation_error:.4e}")
for amplitude, result in opt.curve:
    print(f"  g={amplitude:8.4f}  error={result.estimation_error:.4e}")

T_list = [2.0, 20.0, 200.0]
sweeps = [sweep_annealing_time(config.experiment(d), T_list,
                               amplitude_grid=np.geomspace(0.05, 20, 5))
          for d in config.drivers]
print(sweep_csv(sweeps))
print(sweep_summary(sweeps, config.name))
