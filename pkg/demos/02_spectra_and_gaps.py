"""
Instantaneous spectra along the anneal
======================================

Trace the levels of H(s) = s H_P + (1 - s) H_D for both drivers on the spin
star and compare the minimum gaps.  With the XY driver the levels can be
labeled by sector and the gap measured inside the sector the anneal uses.
"""

from symqa.hamiltonians import AnnealSchedule, deformed_spin_star, transverse_field, xy_ring
from symqa.io import spectrum_csv
from symqa.spectra import min_gap, trace_labeled_spectrum, trace_spectrum

problem = deformed_spin_star(3, 0.5, 0.5, 5.0)

transverse = trace_spectrum(AnnealSchedule(problem, transverse_field(4, 1.0), 1.0))
s, gap = min_gap(transverse)
print(f"transverse driver: min gap {gap:.4f} GHz at s={s:.3f}")

labeled = trace_labeled_spectrum(AnnealSchedule(problem, xy_ring(4, 1.0), 1.0))
s, gap = min_gap(labeled)
print(f"xy driver, all sectors: min gap {gap:.4f} GHz at s={s:.3f}")
for m in (2, 0, -2):
    s, gap = min_gap(labeled, within_sector=m)
    print(f"xy driver, sector m={m:+d}: min gap {gap:.4f} GHz at s={s:.3f}")

# plot-ready CSV, first lines only
print("\n".join(spectrum_csv(labeled).splitlines()[:3]))
