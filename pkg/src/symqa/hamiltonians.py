"""Problem and driver Hamiltonians and the linear annealing schedule.

Energies are in GHz and times in ns with hbar = 1, so a level at energy E
accumulates phase ``E * t``.  All ladder operators use the unnormalized
``sigma^(+-) = sigma^x +- i sigma^y``; a flip-flop pair ``s+ s- + s- s+`` is
therefore 4x its textbook (spin-1/2 ladder) value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ArgumentError, ContractError
from .spin_ops import ManyBodyOperator, embed, zero

__all__ = [
    "AnnealSchedule",
    "transverse_field",
    "xy_ring",
    "deformed_spin_star",
    "random_xxz_chain",
    "schedule_at",
    "xy_ground_energy_analytic",
    "table1_couplings",
]


@dataclass(frozen=True, eq=False)
class AnnealSchedule:
    """``H(t) = (t/T) H_P + (1 - t/T) H_D`` for ``0 <= t <= T``."""

    problem: ManyBodyOperator
    driver: ManyBodyOperator
    total_time: float

    def __post_init__(self):
        if self.problem.sites != self.driver.sites:
            raise ArgumentError("problem and driver act on different site counts")
        if not (self.problem.hermitian and self.driver.hermitian):
            raise ContractError("schedule Hamiltonians must be Hermitian")
        if not self.total_time > 0:
            raise ArgumentError(f"total_time must be positive, got {self.total_time}")
        object.__setattr__(self, "total_time", float(self.total_time))

    @property
    def sites(self):
        return self.problem.sites

    def at(self, t):
        return schedule_at(self, t)


def schedule_at(schedule, t):
    T = schedule.total_time
    if not 0.0 <= t <= T:
        raise ArgumentError(f"t={t} outside [0, {T}]")
    if t == 0.0:
        return schedule.driver
    if t == T:
        return schedule.problem
    s = t / T
    m = s * schedule.problem.matrix + (1.0 - s) * schedule.driver.matrix
    return ManyBodyOperator(schedule.sites, m, True)


def _hermitian(L, m):
    # Builders assemble conjugate pairs; symmetrize away rounding before flagging.
    return ManyBodyOperator(L, 0.5 * (m + m.conj().T), True)


def transverse_field(L, B):
    """``-B sum_j sigma_j^x``."""
    if L < 1:
        raise ArgumentError(f"L must be >= 1, got {L}")
    m = sum(embed("x", j, L).matrix for j in range(1, L + 1))
    return ManyBodyOperator(L, -B * m, True)


def _flip_flop(i, j, L):
    """``sigma_i^+ sigma_j^- + sigma_i^- sigma_j^+`` on sites ``i != j``."""
    p_i, m_i = embed("plus", i, L).matrix, embed("minus", i, L).matrix
    p_j, m_j = embed("plus", j, L).matrix, embed("minus", j, L).matrix
    return p_i @ m_j + m_i @ p_j


def xy_ring(L, g):
    """Periodic XY ring ``g sum_{j=1}^{L} (s_j^+ s_{j+1}^- + h.c.)`` with site L+1 = 1.

    For ``L = 2`` both bonds join sites 1 and 2 and are kept, doubling the
    flip-flop amplitude.
    """
    if L < 2:
        raise ArgumentError(f"xy_ring needs L >= 2, got {L}")
    m = sum(_flip_flop(j, j % L + 1, L) for j in range(1, L + 1))
    return _hermitian(L, g * m)


def deformed_spin_star(L, omega, omega1, J, phase="complex"):
    """Central qubit coupled to ``L`` outer spins by collective flip-flops.

    ``w s_0^z + w1 J^z + J (s_0^+ J^- + s_0^- J^+)`` on ``L + 1`` sites; the
    central qubit is the first tensor factor.  ``J^+ = sum_j c_j s_j^+`` with
    ``c_j = exp(2 pi i j / L)`` for ``phase="complex"``; ``phase="real"`` uses
    real weights ``exp(2 pi j / L)`` and takes ``J^- = (J^+)^dagger`` so the
    operator stays Hermitian.
    """
    if L < 1:
        raise ArgumentError(f"L must be >= 1, got {L}")
    N = L + 1
    j = np.arange(1, L + 1)
    if phase == "complex":
        weights = np.exp(2j * np.pi * j / L)
    elif phase == "real":
        weights = np.exp(2 * np.pi * j / L).astype(complex)
    else:
        raise ArgumentError(f"unknown spin-star phase {phase!r}")

    j_plus = sum(w * embed("plus", site + 1, N).matrix for w, site in zip(weights, j))
    j_minus = j_plus.conj().T
    j_z = sum(embed("z", site + 1, N).matrix for site in j)
    s0 = embed("z", 1, N).matrix
    coupling = embed("plus", 1, N).matrix @ j_minus + embed("minus", 1, N).matrix @ j_plus
    return _hermitian(N, omega * s0 + omega1 * j_z + J * coupling)


def random_xxz_chain(couplings, delta):
    """Open XXZ chain ``sum_j J_j (x x + y y + delta z z)`` on ``len(couplings) + 1`` sites."""
    couplings = [float(c) for c in couplings]
    if not couplings:
        raise ArgumentError("random_xxz_chain needs at least one coupling")
    L = len(couplings) + 1
    ops = {k: [embed(k, s, L).matrix for s in range(1, L + 1)] for k in "xyz"}
    m = zero(L).matrix
    for j, c in enumerate(couplings):
        bond = (ops["x"][j] @ ops["x"][j + 1] + ops["y"][j] @ ops["y"][j + 1]
                + delta * ops["z"][j] @ ops["z"][j + 1])
        m = m + c * bond
    return _hermitian(L, m)


def xy_ground_energy_analytic(L, g, sector_filling):
    """Lowest energy of ``xy_ring(L, g)`` with ``sector_filling`` down spins.

    Jordan-Wigner maps the ring onto free fermions (down spins) hopping with
    amplitude ``4g``.  The boundary bond picks up the fermion parity, giving
    periodic momenta for odd fillings and antiperiodic momenta for even ones;
    the sector energy is the sum of the lowest ``k`` modes ``8 g cos q``.
    """
    k = sector_filling
    if L < 2:
        raise ArgumentError(f"L must be >= 2, got {L}")
    if not 0 <= k <= L:
        raise ArgumentError(f"filling {k} outside 0..{L}")
    if k in (0, L):
        return 0.0
    shift = 0.0 if k % 2 else 0.5
    q = 2.0 * np.pi * (np.arange(L) + shift) / L
    modes = np.sort(8.0 * g * np.cos(q))
    return float(modes[:k].sum())


def table1_couplings():
    """The four tabulated XXZ couplings (GHz), read from the shipped fixture."""
    text = resources.files("symqa.data").joinpath("table1_couplings.json").read_text()
    return [float(v) for v in json.loads(text)["couplings"]]

