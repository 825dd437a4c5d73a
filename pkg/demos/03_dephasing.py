"""
Dephasing and sector populations
================================

A single qubit in |+> loses coherence as exp(-2 gamma t).  On a conserving
anneal the same sigma^z noise mixes states but leaves every sector
population untouched.
"""

import numpy as np

from symqa.evolution import DensityMatrix, IntegratorParams, NoiseSpec, evolve_open
from symqa.hamiltonians import AnnealSchedule, random_xxz_chain, table1_couplings, xy_ring
from symqa.spin_ops import zero
from symqa.symmetry import decompose, sector_ground_state, sector_populations

gamma = 1e-4
sched = AnnealSchedule(zero(1), zero(1), 2e4)
_, samples = evolve_open(DensityMatrix(1, np.full((2, 2), 0.5)), sched, NoiseSpec(gamma),
                         IntegratorParams(rel_tol=1e-10, abs_tol=1e-15, sample_count=5))
for t, rho in samples:
    print(f"t={t:8.0f} ns  |rho_01|={abs(rho.matrix[0, 1]):.6e}  "
          f"exact={0.5 * np.exp(-2 * gamma * t):.6e}")

H = random_xxz_chain(table1_couplings()[:3], 0.7)
sched = AnnealSchedule(H, xy_ring(4, 1.0), 50.0)
psi0 = sector_ground_state(sched.driver, 0).state
_, samples = evolve_open(DensityMatrix.from_state(psi0), sched, NoiseSpec(0.01),
                         IntegratorParams(sample_count=6))
dec = decompose(4)
for t, rho in samples:
    pops = sector_populations(rho, dec)
    print(f"t={t:5.1f} ns  purity={rho.purity():.6f}  P(m=0)={pops[0]:.12f}")
