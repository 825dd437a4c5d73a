"""Total-magnetization sectors and block-diagonal restriction.

Sectors are indexed internally by the number of down spins ``k``; the public
label is the magnetization ``m = L - 2k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import ArgumentError, ContractError
from .spin_ops import ManyBodyOperator, StateVector, down_counts, total_sz

LEAKAGE_TOL = 1e-10
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class Sector:
    sites: int
    down: int
    indices: tuple

    @property
    def magnetization(self):
        return self.sites - 2 * self.down

    @property
    def size(self):
        return len(self.indices)

    def projector(self):
        p = np.zeros(2**self.sites)
        p[list(self.indices)] = 1.0
        return np.diag(p)


@dataclass(frozen=True)
class SectorDecomposition:
    sites: int
    sectors: tuple = field(repr=False)

    def __iter__(self):
        return iter(self.sectors)

    def __len__(self):
        return len(self.sectors)

    def sector(self, magnetization):
        """Look up a sector by its magnetization label."""
        for s in self.sectors:
            if s.magnetization == magnetization:
                return s
        raise ArgumentError(f"no sector with m={magnetization} for L={self.sites}")

    def sizes(self):
        return [s.size for s in self.sectors]

    def labels(self):
        """Sector magnetization of every basis state."""
        return self.sites - 2 * down_counts(self.sites)


def decompose(L):
    """Partition the ``2**L`` basis into the ``L + 1`` magnetization sectors, m = L first."""
    if L < 1:
        raise ArgumentError(f"L must be >= 1, got {L}")
    counts = down_counts(L)
    sectors = tuple(
        Sector(L, k, tuple(int(i) for i in np.flatnonzero(counts == k)))
        for k in range(L + 1)
    )
    assert [s.size for s in sectors] == [comb(L, k) for k in range(L + 1)]
    return SectorDecomposition(L, sectors)


def _sector_arg(sector, L):
    if isinstance(sector, Sector):
        if sector.sites != L:
            raise ArgumentError("sector belongs to a different site count")
        return sector
    return decompose(L).sector(int(sector))


def is_conserved(H, Q, tol=1e-12):
    """True iff every element of ``|[H, Q]|`` is at most ``tol``."""
    if H.matrix.shape != Q.matrix.shape:
        raise ArgumentError("dimension mismatch between H and Q")
    c = H.matrix @ Q.matrix - Q.matrix @ H.matrix
    return bool(np.max(np.abs(c)) <= tol)


def block_leakage(op, decomposition=None):
    """Largest |matrix element| of ``op`` connecting two different sectors."""
    decomposition = decomposition or decompose(op.sites)
    labels = decomposition.labels()
    off = labels[:, None] != labels[None, :]
    return float(np.max(np.abs(op.matrix[off]), initial=0.0))


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """Block of a magnetization-conserving operator on one sector."""

    magnetization: int
    matrix: np.ndarray
    parent_sites: int
    indices: tuple

    @property
    def dim(self):
        return self.matrix.shape[0]

    def embed(self):
        """Re-embed as a full-space operator that vanishes outside the sector."""
        m = np.zeros((2**self.parent_sites,) * 2, dtype=complex)
        idx = np.array(self.indices)
        m[np.ix_(idx, idx)] = self.matrix
        return ManyBodyOperator(self.parent_sites, m)


def restrict(op, sector, tol=LEAKAGE_TOL):
    """Sub-matrix of ``op`` on ``sector`` (a :class:`Sector` or magnetization)."""
    leak = block_leakage(op)
    if leak > tol:
        raise ContractError(f"operator does not conserve S_z (leakage {leak:.3e})")
    sector = _sector_arg(sector, op.sites)
    idx = np.array(sector.indices)
    block = np.array(op.matrix[np.ix_(idx, idx)])
    block.setflags(write=False)
    return SectorOperator(sector.magnetization, block, op.sites, sector.indices)


def embed_state(amplitudes, sector):
    """Lift sector amplitudes into the full register (zeros elsewhere)."""
    full = np.zeros(2**sector.sites, dtype=complex)
    full[list(sector.indices)] = amplitudes
    return StateVector(sector.sites, full)


def _fix_phase(v):
    i = np.flatnonzero(np.abs(v) > 1e-12)[0]
    return v * (abs(v[i]) / v[i])


@dataclass(frozen=True, eq=False)
class SectorGroundState:
    energy: float
    state: StateVector
    degeneracy: int
    magnetization: int

    def __iter__(self):
        # allows ``energy, state = sector_ground_state(...)``
        return iter((self.energy, self.state))


def sector_ground_state(H, sector):
    """Lowest eigenpair of ``H`` inside ``sector``, embedded in the full space.

    A degenerate ground level is reported through ``degeneracy`` (> 1).  The
    returned vector is the normalized projection of the lowest-index basis
    state with nonzero weight in the ground eigenspace, phase-fixed so its
    first nonzero amplitude is real and positive.
    """
    block = restrict(H, sector)
    sector = _sector_arg(sector, H.sites)
    w, v = np.linalg.eigh(block.matrix)
    spread = max(1.0, float(w[-1] - w[0]))
    ground = np.flatnonzero(w - w[0] <= DEGENERACY_TOL * spread)
    space = v[:, ground]
    if len(ground) == 1:
        vec = space[:, 0]
    else:
        weights = np.linalg.norm(space, axis=1)
        i = int(np.flatnonzero(weights > 1e-8)[0])
        vec = space @ space[i].conj()
        vec = vec / np.linalg.norm(vec)
    vec = _fix_phase(vec)
    return SectorGroundState(float(w[0]), embed_state(vec, sector), len(ground),
                             sector.magnetization)


def sector_populations(rho, decomposition):
    """Map magnetization -> ``Tr(P_m rho)`` for a density matrix array."""
    diag = np.real(np.diagonal(np.asarray(getattr(rho, "matrix", rho))))
    return {s.magnetization: float(diag[list(s.indices)].sum()) for s in decomposition}


def conserves_sz(H, tol=1e-12):
    return is_conserved(H, total_sz(H.sites), tol)
