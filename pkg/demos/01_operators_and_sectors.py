"""
Spin operators and magnetization sectors
========================================

Build the four Hamiltonians, check which ones conserve total S_z, and
split a conserving one into its sector blocks.
"""

import numpy as np

from symqa.hamiltonians import (deformed_spin_star, random_xxz_chain, table1_couplings,
                                transverse_field, xy_ring, xy_ground_energy_analytic)
from symqa.spin_ops import commutator, single_site_pauli, total_sz
from symqa.symmetry import decompose, restrict, sector_ground_state

# sigma^+ carries no factor 1/2 here
print(single_site_pauli("plus").matrix.real)

hamiltonians = {
    "transverse (L=4)": transverse_field(4, 1.0),
    "xy ring (L=4)": xy_ring(4, 1.0),
    "xxz chain (L=4)": random_xxz_chain(table1_couplings()[:3], 0.7),
    "spin star (3+1)": deformed_spin_star(3, 0.5, 0.5, 5.0),
}
for name, H in hamiltonians.items():
    c = np.max(np.abs(commutator(H, total_sz(H.sites)).matrix))
    print(f"{name:18s} max|[H, S_z]| = {c:.2e}")

# Sector sizes are binomial coefficients, m = L first
dec = decompose(4)
print("sector sizes:", {s.magnetization: s.size for s in dec})

# The union of the block spectra is the full spectrum
H = hamiltonians["xxz chain (L=4)"]
blocks = np.sort(np.concatenate([np.linalg.eigvalsh(restrict(H, s).matrix) for s in dec]))
print("union error:", np.max(np.abs(blocks - H.eigvalsh())))

# Free-fermion energies of the XY ring agree with the sector blocks
for sector in decompose(6):
    gs = sector_ground_state(xy_ring(6, 1.0), sector)
    jw = xy_ground_energy_analytic(6, 1.0, sector.down)
    print(f"m={sector.magnetization:+d}: dense {gs.energy:+.6f}  JW {jw:+.6f}  "
          f"degeneracy {gs.degeneracy}")
