"""Built-in oracle and invariant checks behind ``symqa verify``.

Each check compares the library against an independent computation (closed
forms, dense reference products, a second integrator) and returns a
:class:`Check`.  ``run_checks`` accepts replacement builders so a deliberately
broken Hamiltonian can be fed through the suite to confirm it is caught.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hamiltonians
from .annealing import sample_couplings
from .evolution import (DensityMatrix, IntegratorParams, NoiseSpec, _dissipator_arrays,
                        evolve_closed, evolve_open, gksl_rhs)
from .hamiltonians import (AnnealSchedule, deformed_spin_star, random_xxz_chain,
                           table1_couplings, transverse_field, xy_ground_energy_analytic)
from .spectra import min_gap, trace_labeled_spectrum, trace_spectrum
from .spin_ops import ManyBodyOperator, single_site_pauli, total_sz, zero
from .symmetry import decompose, restrict, sector_ground_state, sector_populations


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _comm_norm(H):
    Q = total_sz(H.sites).matrix
    return float(np.max(np.abs(H.matrix @ Q - Q @ H.matrix)))


def _instances(xy_ring):
    return {
        "xy_ring(L=4)": xy_ring(4, 1.0),
        "xxz(table1, L=4)": random_xxz_chain(table1_couplings()[:3], 0.7),
        "spin_star(L=3)": deformed_spin_star(3, 0.5, 0.5, 5.0),
    }


def check_pauli_algebra(**_):
    x, y, z = (single_site_pauli(k).matrix for k in "xyz")
    plus, minus = single_site_pauli("plus").matrix, single_site_pauli("minus").matrix
    err = max(np.max(np.abs(x @ y - 1j * z)), np.max(np.abs(y @ z - 1j * x)),
              np.max(np.abs(z @ x - 1j * y)), np.max(np.abs(x @ x - np.eye(2))),
              np.max(np.abs(plus - (x + 1j * y))), np.max(np.abs(minus - plus.conj().T)))
    return Check("pauli algebra", err < 1e-15, f"max residual {err:.1e}")


def check_transverse_ground(**_):
    errs = [abs(transverse_field(L, 1.0).eigvalsh()[0] + L) for L in range(1, 6)]
    return Check("transverse ground energy -L*B", max(errs) < 1e-12,
                 f"max error {max(errs):.1e} for L=1..5")


def check_xy_two_site(xy_ring, **_):
    w = np.sort(xy_ring(2, 1.0).eigvalsh())
    err = float(np.max(np.abs(w - [-8.0, 0.0, 0.0, 8.0])))
    return Check("xy_ring L=2 spectrum {-8,0,0,8}", err < 1e-12, f"max error {err:.1e}")


def check_conserving_commutators(xy_ring, **_):
    norms = {name: _comm_norm(H) for name, H in _instances(xy_ring).items()}
    worst = max(norms.values())
    return Check("[H, S_z] = 0 for XY/XXZ/spin star", worst <= 1e-12,
                 ", ".join(f"{k}: {v:.1e}" for k, v in norms.items()))


def check_transverse_commutator(**_):
    c = _comm_norm(transverse_field(4, 1.0))
    return Check("[H_transverse, S_z] > 0.5", c > 0.5, f"max element {c:.3g}")


def check_jordan_wigner(xy_ring, **_):
    worst = 0.0
    for L in range(2, 9):
        H = xy_ring(L, 1.0)
        for sector in decompose(L):
            dense = np.linalg.eigvalsh(restrict(H, sector).matrix)[0]
            worst = max(worst, abs(dense - xy_ground_energy_analytic(L, 1.0, sector.down)))
    return Check("Jordan-Wigner vs sector diagonalization (L<=8)", worst < 1e-9,
                 f"max error {worst:.1e}")


def check_sector_union(xy_ring, **_):
    worst = 0.0
    for H in _instances(xy_ring).values():
        blocks = np.sort(np.concatenate([np.linalg.eigvalsh(restrict(H, s).matrix)
                                         for s in decompose(H.sites)]))
        worst = max(worst, float(np.max(np.abs(blocks - H.eigvalsh()))))
    return Check("sector spectra union = full spectrum", worst < 1e-9,
                 f"max error {worst:.1e}")


def check_labeled_trace(xy_ring, **_):
    sched = AnnealSchedule(random_xxz_chain(table1_couplings()[:3], 0.7), xy_ring(4, 1.0), 1.0)
    full = trace_spectrum(sched, 21)
    labeled = trace_labeled_spectrum(sched, 21)
    err = float(np.max(np.abs(full.levels - labeled.levels)))
    return Check("labeled trace matches full trace", err < 1e-9, f"max error {err:.1e}")


def check_single_qubit_gap(**_):
    sched = AnnealSchedule(ManyBodyOperator(1, single_site_pauli("z").matrix),
                           ManyBodyOperator(1, -single_site_pauli("x").matrix), 1.0)
    s, gap = min_gap(trace_spectrum(sched, 201))
    ok = abs(s - 0.5) < 1e-12 and abs(gap - math.sqrt(2.0)) < 1e-12
    return Check("single-qubit min gap sqrt(2) at s=1/2", ok, f"s={s:.4g}, gap={gap:.15g}")


def check_lsm_gap(xy_ring, **_):
    gaps = []
    for L in (4, 6, 8):
        w = xy_ring(L, 1.0).eigvalsh()
        gaps.append(float(w[w > w[0] + 1e-9][0] - w[0]))
    ok = all(a > b for a, b in zip(gaps, gaps[1:]))
    return Check("XY ring gap decreases with L", ok,
                 ", ".join(f"L={L}: {g:.3f}" for L, g in zip((4, 6, 8), gaps)))


def check_gksl_kernel(**_):
    from . import _kernels

    rng = np.random.default_rng(7)
    H = random_xxz_chain([0.3, 1.1], 0.7)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    worst = 0.0
    for kind in "xyz":
        noise = NoiseSpec(0.3, kind)
        mask, perms, phases = _dissipator_arrays(noise, 3)
        ham = _kernels.csr_pair(H.matrix, np.zeros_like(H.matrix))
        out = np.empty_like(rho)
        _kernels._rhs(_kernels.OPEN, 0.0, rho, ham, 1.0, mask, perms, phases, out)
        worst = max(worst, float(np.max(np.abs(out - gksl_rhs(rho, H, noise)))))
    return Check("compiled GKSL rhs vs dense reference", worst < 1e-12,
                 f"max error {worst:.1e}")


def check_dephasing_decay(**_):
    worst = 0.0
    T = 1e5
    params = IntegratorParams(rel_tol=1e-10, abs_tol=1e-15)
    for gamma in (2.5e-5, 1e-4):
        sched = AnnealSchedule(zero(1), zero(1), T)
        rho0 = DensityMatrix(1, np.full((2, 2), 0.5))
        rho_T, _ = evolve_open(rho0, sched, NoiseSpec(gamma), params)
        exact = 0.5 * math.exp(-2 * gamma * T)
        worst = max(worst, abs(abs(rho_T.matrix[0, 1]) - exact) / exact)
    return Check("dephasing decay exp(-2 gamma t)", worst < 1e-6,
                 f"max relative error {worst:.1e} at T=1e5 ns")


def check_open_closed(xy_ring, **_):
    H = random_xxz_chain(table1_couplings()[:3], 0.7)
    sched = AnnealSchedule(H, xy_ring(4, 1.0), 20.0)
    psi0 = sector_ground_state(sched.driver, 0).state
    psi_T, _ = evolve_closed(psi0, sched)
    rho_T, _ = evolve_open(DensityMatrix.from_state(psi0), sched, NoiseSpec(0.0))
    d = rho_T.trace_distance(np.outer(psi_T.amplitudes, psi_T.amplitudes.conj()))
    return Check("open (gamma=0) vs closed evolution", d < 1e-6, f"trace distance {d:.1e}")


def check_rk4_vs_adaptive(**_):
    H = deformed_spin_star(2, 0.5, 0.5, 5.0)
    sched = AnnealSchedule(H, transverse_field(3, 1.0), 5.0)
    psi0 = np.full(8, 8 ** -0.5)
    a, _ = evolve_closed(psi0, sched)
    b, _ = evolve_closed(psi0, sched, IntegratorParams("fixed-RK4", max_step=2.5e-4))
    err = float(np.max(np.abs(a.amplitudes - b.amplitudes)))
    return Check("fixed RK4 vs adaptive DOP853", err < 1e-8, f"max difference {err:.1e}")


def check_sector_conservation(xy_ring, **_):
    H = random_xxz_chain(table1_couplings()[:3], 0.7)
    sched = AnnealSchedule(H, xy_ring(4, 1.0), 20.0)
    psi0 = sector_ground_state(sched.driver, 0).state
    _, samples = evolve_open(DensityMatrix.from_state(psi0), sched, NoiseSpec(1e-2),
                             IntegratorParams(sample_count=11))
    dec = decompose(4)
    start = sector_populations(samples[0][1], dec)
    drift = max(abs(sector_populations(rho, dec)[m] - start[m])
                for _, rho in samples for m in start)
    return Check("sector populations conserved under dephasing", drift < 1e-8,
                 f"max drift {drift:.1e}")


def check_sampling(**_):
    a, b = sample_couplings(3, 1000), sample_couplings(3, 1000)
    ok = a == b and min(a) >= 0.0 and max(a) < 2.0
    return Check("coupling sampler deterministic and in range", ok, f"mean {np.mean(a):.4f}")


CHECKS = (
    check_pauli_algebra,
    check_transverse_ground,
    check_xy_two_site,
    check_conserving_commutators,
    check_transverse_commutator,
    check_jordan_wigner,
    check_sector_union,
    check_labeled_trace,
    check_single_qubit_gap,
    check_lsm_gap,
    check_gksl_kernel,
    check_dephasing_decay,
    check_open_closed,
    check_rk4_vs_adaptive,
    check_sector_conservation,
    check_sampling,
)


def run_checks(xy_ring=hamiltonians.xy_ring):
    """Run every check; exceptions inside a check count as failures."""
    results = []
    for check in CHECKS:
        try:
            results.append(check(xy_ring=xy_ring))
        except Exception as exc:  # noqa: BLE001 - a crash is a failed check
            name = check.__name__.removeprefix("check_").replace("_", " ")
            results.append(Check(name, False, f"{type(exc).__name__}: {exc}"))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}" for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
