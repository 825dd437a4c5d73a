"""Instantaneous spectra of the annealing Hamiltonian and their gaps.

Levels are matched between grid points by sorted order only, so traces are
blind to level crossings; this is adequate for plotting and gap extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ContractError
from .symmetry import LEAKAGE_TOL, block_leakage, decompose, restrict

DEFAULT_GRID = 201


@dataclass(frozen=True, eq=False)
class SpectrumTrace:
    """Lowest levels of ``H(sT)`` on a grid of ``s`` values.

    ``levels[i, k]`` is the k-th lowest energy at ``s_grid[i]``.
    ``sector_labels``, when present, has the same shape and gives the
    magnetization sector of each level.
    """

    s_grid: np.ndarray
    levels: np.ndarray
    sector_labels: np.ndarray | None = None

    @property
    def level_count(self):
        return self.levels.shape[1]


def _grid(grid_points):
    if grid_points < 2:
        raise ArgumentError(f"grid_points must be >= 2, got {grid_points}")
    return np.linspace(0.0, 1.0, grid_points)


def _level_count(level_count, dim):
    if level_count is None:
        return dim
    if not 1 <= level_count <= dim:
        raise ArgumentError(f"level_count {level_count} outside 1..{dim}")
    return level_count


def _interpolate(a, b, s):
    return s * a + (1.0 - s) * b


def trace_spectrum(schedule, grid_points=DEFAULT_GRID, level_count=None):
    """Diagonalize ``H(sT)`` on a uniform grid; keep the lowest ``level_count`` levels."""
    s_grid = _grid(grid_points)
    hp, hd = schedule.problem.matrix, schedule.driver.matrix
    count = _level_count(level_count, hp.shape[0])
    levels = np.empty((grid_points, count))
    for i, s in enumerate(s_grid):
        levels[i] = np.linalg.eigvalsh(_interpolate(hp, hd, s))[:count]
    return SpectrumTrace(s_grid, levels)


def _sector_blocks(schedule, sector):
    for op in (schedule.problem, schedule.driver):
        leak = block_leakage(op)
        if leak > LEAKAGE_TOL:
            raise ContractError(f"schedule does not conserve S_z (leakage {leak:.3e})")
    return restrict(schedule.problem, sector), restrict(schedule.driver, sector).matrix


def trace_sector_spectrum(schedule, sector, grid_points=DEFAULT_GRID, level_count=None):
    """Levels of ``H(sT)`` restricted to one magnetization sector."""
    block, hd = _sector_blocks(schedule, sector)
    hp, m = block.matrix, block.magnetization
    s_grid = _grid(grid_points)
    count = _level_count(level_count, hp.shape[0])
    levels = np.empty((grid_points, count))
    for i, s in enumerate(s_grid):
        levels[i] = np.linalg.eigvalsh(_interpolate(hp, hd, s))[:count]
    return SpectrumTrace(s_grid, levels, np.full(levels.shape, m, dtype=int))


def trace_labeled_spectrum(schedule, grid_points=DEFAULT_GRID, level_count=None):
    """Full spectrum assembled from all sectors, each level tagged with its sector."""
    decomposition = decompose(schedule.sites)
    count = _level_count(level_count, 2**schedule.sites)
    parts = [trace_sector_spectrum(schedule, s, grid_points) for s in decomposition]
    levels = np.concatenate([p.levels for p in parts], axis=1)
    labels = np.concatenate([p.sector_labels for p in parts], axis=1)
    order = np.argsort(levels, axis=1, kind="stable")[:, :count]
    return SpectrumTrace(parts[0].s_grid,
                         np.take_along_axis(levels, order, axis=1),
                         np.take_along_axis(labels, order, axis=1))


def min_gap(trace, within_sector=None):
    """Smallest ``E_1 - E_0`` over the grid and the first ``s`` attaining it.

    With ``within_sector`` (a magnetization) only levels tagged with that
    sector are used; the trace must then carry sector labels.
    """
    if within_sector is None:
        levels = trace.levels
    else:
        if trace.sector_labels is None:
            raise ArgumentError("trace has no sector labels")
        picked = [row[lab == within_sector][:2]
                  for row, lab in zip(trace.levels, trace.sector_labels)]
        if any(len(p) < 2 for p in picked):
            raise ArgumentError(f"sector m={within_sector} has fewer than 2 levels")
        levels = np.array(picked)
    if levels.shape[1] < 2:
        raise ArgumentError("need at least two levels for a gap")
    gaps = levels[:, 1] - levels[:, 0]
    i = int(np.argmin(gaps))
    return float(trace.s_grid[i]), float(gaps[i])
