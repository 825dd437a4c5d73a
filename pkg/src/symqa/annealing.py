"""Annealing experiments: instances, initial states, runs and sweeps.

A run anneals from the driver ground state to the problem Hamiltonian and
scores the final state by its energy error ``|E_true - Tr(rho_T H_P)|`` and
its ground-state fidelity.  With the XY driver the initial state is the
driver ground state inside one magnetization sector; the ``auto`` sector
policy picks the sector holding the exact problem ground state.
"""

from __future__ import annotations

import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import AmbiguityError, ArgumentError
from .evolution import DensityMatrix, IntegratorParams, NoiseSpec, evolve_closed, evolve_open
from .hamiltonians import (AnnealSchedule, deformed_spin_star, random_xxz_chain,
                           transverse_field, xy_ring)
from .spin_ops import StateVector, expectation
from .symmetry import decompose, restrict, sector_ground_state, sector_populations

log = logging.getLogger(__name__)

PRNG_ALGORITHM = "numpy.random.PCG64"
THREADS_ENV = "SYMQA_THREADS"
DRIVERS = ("transverse", "xy")
GROUND_TOL = 1e-9

DEFAULT_AMPLITUDE_GRID = tuple(np.geomspace(0.05, 20.0, int(round(25 * math.log10(400))) + 1))


@dataclass(frozen=True)
class SpinStarProblem:
    outer_sites: int = 3
    omega: float = 0.5
    omega1: float = 0.5
    coupling: float = 5.0
    phase: str = "complex"
    kind: str = field(default="spin-star", init=False)

    def build(self, seed=None):
        return deformed_spin_star(self.outer_sites, self.omega, self.omega1,
                                  self.coupling, self.phase)


@dataclass(frozen=True)
class XXZProblem:
    couplings: tuple
    delta: float = 0.7
    kind: str = field(default="xxz", init=False)

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))

    def build(self, seed=None):
        return random_xxz_chain(self.couplings, self.delta)


@dataclass(frozen=True)
class RandomXXZProblem:
    """XXZ chain on ``sites`` spins with couplings drawn from ``U[low, high)``."""

    sites: int
    delta: float = 0.7
    low: float = 0.0
    high: float = 2.0
    kind: str = field(default="random-xxz", init=False)

    def build(self, seed=0):
        return random_xxz_chain(sample_couplings(seed, self.sites - 1, self.low, self.high),
                                self.delta)


@dataclass(frozen=True)
class ExperimentConfig:
    """One annealing run.

    ``sector_policy`` is ``"auto"``, ``"global"``, ``"sweep-sectors"`` or an
    integer magnetization; it only affects the XY driver.
    """

    problem: SpinStarProblem | XXZProblem | RandomXXZProblem
    driver_kind: str = "xy"
    amplitude: float = 1.0
    annealing_time: float = 100.0
    noise: NoiseSpec = NoiseSpec()
    sector_policy: str | int = "auto"
    integrator: IntegratorParams = IntegratorParams()
    seed: int = 0

    def __post_init__(self):
        if self.driver_kind not in DRIVERS:
            raise ArgumentError(f"driver_kind must be one of {DRIVERS}")
        if not self.amplitude > 0:
            raise ArgumentError(f"amplitude must be positive, got {self.amplitude}")
        if not self.annealing_time > 0:
            raise ArgumentError(f"annealing_time must be positive, got {self.annealing_time}")
        policy = self.sector_policy
        if not (policy in ("auto", "global", "sweep-sectors")
                or (isinstance(policy, int) and not isinstance(policy, bool))):
            raise ArgumentError(f"bad sector_policy {policy!r}")


@dataclass(frozen=True)
class RunResult:
    E_true: float
    E_qa: float
    estimation_error: float
    ground_fidelity: float
    sector_populations_initial: dict
    sector_populations_final: dict
    wall_time: float
    amplitude: float
    annealing_time: float
    driver_kind: str
    sector: int | None = None
    ground_degeneracy: int = 1
    initial_degeneracy: int = 1


@lru_cache(maxsize=64)
def _problem_data(problem, seed):
    """Problem operator, ground energy, ground projector and degeneracy."""
    H = problem.build(seed)
    w, v = np.linalg.eigh(H.matrix)
    spread = max(1.0, float(w[-1] - w[0]))
    ground = np.flatnonzero(w - w[0] <= GROUND_TOL * spread)
    P = v[:, ground] @ v[:, ground].conj().T
    return H, float(w[0]), P, len(ground)


def problem_operator(config):
    return _problem_data(config.problem, config.seed)[0]


def driver_operator(config, sites=None):
    sites = sites or problem_operator(config).sites
    if config.driver_kind == "transverse":
        return transverse_field(sites, config.amplitude)
    return xy_ring(sites, config.amplitude)


def ground_sectors(H):
    """Magnetizations whose lowest level equals the global ground energy of ``H``."""
    energies = {s.magnetization: float(np.linalg.eigvalsh(restrict(H, s).matrix)[0])
                for s in decompose(H.sites)}
    e0 = min(energies.values())
    spread = max(1.0, float(np.ptp(H.eigvalsh())))
    return sorted((m for m, e in energies.items() if e - e0 <= GROUND_TOL * spread),
                  reverse=True)


def _target_sector(config):
    policy = config.sector_policy
    if isinstance(policy, int):
        return policy
    if policy == "auto":
        sectors = ground_sectors(problem_operator(config))
        if len(sectors) > 1:
            raise AmbiguityError(
                f"problem ground state is degenerate across sectors {sectors}; "
                "set sector_policy to one of them explicitly")
        return sectors[0]
    if policy == "global":
        sectors = ground_sectors(driver_operator(config))
        if len(sectors) > 1:
            raise AmbiguityError(
                f"driver ground state is degenerate across sectors {sectors}; "
                "set sector_policy explicitly")
        return sectors[0]
    raise ArgumentError(f"sector_policy {policy!r} has no single target sector")


def _initial_pure_state(config):
    """Initial pure state, its sector (XY only) and ground degeneracy."""
    L = problem_operator(config).sites
    if config.driver_kind == "transverse":
        return StateVector(L, np.full(2**L, 2.0 ** (-L / 2))), None, 1
    m = _target_sector(config)
    gs = sector_ground_state(driver_operator(config, L), m)
    return gs.state, m, gs.degeneracy


def initial_state(config):
    """Density matrix of the driver ground state used to start the anneal."""
    psi, _, _ = _initial_pure_state(config)
    return DensityMatrix.from_state(psi)


def _score(config, rho, psi0, m, init_degeneracy, started):
    H, e_true, P, degeneracy = _problem_data(config.problem, config.seed)
    decomposition = decompose(H.sites)
    e_qa = expectation(H, rho)
    fidelity = float(np.real(np.sum(P * rho.T)))
    return RunResult(
        E_true=e_true,
        E_qa=e_qa,
        estimation_error=abs(e_true - e_qa),
        ground_fidelity=min(1.0, max(0.0, fidelity)),
        sector_populations_initial=sector_populations(
            np.diag(np.abs(psi0.amplitudes) ** 2), decomposition),
        sector_populations_final=sector_populations(rho, decomposition),
        wall_time=time.perf_counter() - started,
        amplitude=float(config.amplitude),
        annealing_time=float(config.annealing_time),
        driver_kind=config.driver_kind,
        sector=m,
        ground_degeneracy=degeneracy,
        initial_degeneracy=init_degeneracy,
    )


def final_state(config, sample_count=None):
    """Evolve ``config`` and return ``(psi0, sector, degeneracy, rho_T, samples)``.

    Noise-free runs use the Schrodinger equation, which is exact for a pure
    initial state and much cheaper than the density-matrix equation.
    """
    H = problem_operator(config)
    psi0, m, degeneracy = _initial_pure_state(config)
    schedule = AnnealSchedule(H, driver_operator(config, H.sites), config.annealing_time)
    params = config.integrator
    if sample_count is not None:
        params = replace(params, sample_count=sample_count)
    if config.noise.rate == 0:
        psi_T, samples = evolve_closed(psi0, schedule, params)
        rho = np.outer(psi_T.amplitudes, psi_T.amplitudes.conj())
        samples = [(t, np.outer(s.amplitudes, s.amplitudes.conj())) for t, s in samples]
    else:
        rho_T, samples = evolve_open(DensityMatrix.from_state(psi0), schedule,
                                     config.noise, params)
        rho = rho_T.matrix
        samples = [(t, s.matrix) for t, s in samples]
    return psi0, m, degeneracy, rho, samples


def run(config):
    """Anneal once and score the final state."""
    if config.sector_policy == "sweep-sectors":
        return run_sector_sweep(config)[0]
    started = time.perf_counter()
    psi0, m, degeneracy, rho, _ = final_state(config)
    return _score(config, rho, psi0, m, degeneracy, started)


def run_sector_sweep(config):
    """Anneal in every sector; return ``(best, per_sector)`` ranked by final energy.

    This is the protocol available without knowing the problem ground sector:
    the sector with the lowest measured energy wins.  Transverse runs have a
    single entry keyed ``None``.
    """
    if config.driver_kind == "transverse":
        result = run(replace(config, sector_policy="auto"))
        return result, {None: result}
    L = problem_operator(config).sites
    per_sector = {s.magnetization: run(replace(config, sector_policy=s.magnetization))
                  for s in decompose(L)}
    best = min(per_sector.values(), key=lambda r: (r.E_qa, -r.sector))
    return best, per_sector


@dataclass(frozen=True)
class AmplitudeOptimum:
    best_amplitude: float
    best_result: RunResult
    curve: tuple  # ((amplitude, RunResult), ...) sorted by amplitude

    def __iter__(self):
        return iter((self.best_amplitude, self.best_result, self.curve))


def _golden_refine(evaluate, lo, hi, iterations):
    """Golden-section search for the minimum of ``evaluate`` on ``[lo, hi]`` (log axis)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = evaluate(math.exp(c)), evaluate(math.exp(d))
    for _ in range(iterations - 2):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = evaluate(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = evaluate(math.exp(d))


def optimize_amplitude(config, amplitude_grid=None, refine=False, refine_iterations=10):
    """Scan drive amplitudes and keep the one with the smallest estimation error.

    Ties go to the smaller amplitude.  With ``refine`` a golden-section search
    (on a log axis) runs inside the bracket around the best grid point.
    """
    grid = DEFAULT_AMPLITUDE_GRID if amplitude_grid is None else amplitude_grid
    grid = sorted(float(a) for a in grid)
    if not grid:
        raise ArgumentError("amplitude grid is empty")
    if grid[0] <= 0:
        raise ArgumentError("amplitudes must be positive")

    results = {}

    def evaluate(a):
        if a not in results:
            results[a] = run(replace(config, amplitude=a))
        return results[a].estimation_error

    errors = [evaluate(a) for a in grid]
    i = int(np.argmin(errors))
    if len(grid) > 2 and i in (0, len(grid) - 1):
        warnings.warn(
            f"best amplitude {grid[i]:.4g} sits on the grid edge at T={config.annealing_time:g}; "
            "consider widening the grid", RuntimeWarning, stacklevel=2)
    if refine and len(grid) > 1:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        _golden_refine(evaluate, lo, hi, refine_iterations)

    curve = tuple(sorted(results.items()))
    best_a, best = min(curve, key=lambda item: (item[1].estimation_error, item[0]))
    return AmplitudeOptimum(best_a, best, curve)


@dataclass(frozen=True)
class SweepPoint:
    annealing_time: float
    amplitude: float
    result: RunResult
    curve: tuple = ()


@dataclass(frozen=True)
class TimeSweep:
    driver_kind: str
    points: tuple

    @property
    def optimal(self):
        """Point with the smallest estimation error (earliest T on ties)."""
        return min(self.points, key=lambda p: (p.result.estimation_error, p.annealing_time))

    def summary(self):
        best = self.optimal
        return {"driver": self.driver_kind,
                "optimal_T": best.annealing_time,
                "min_error": best.result.estimation_error,
                "amplitude_opt": best.amplitude,
                "fidelity_at_optimum": best.result.ground_fidelity}


def _sweep_cell(args):
    config, optimize, grid, refine = args
    if optimize:
        opt = optimize_amplitude(config, grid, refine=refine)
        return SweepPoint(config.annealing_time, opt.best_amplitude, opt.best_result, opt.curve)
    result = run(config)
    return SweepPoint(config.annealing_time, config.amplitude, result)


def worker_count(threads=None):
    """Worker processes to use: explicit value, else the environment cap, else 1."""
    if threads is None:
        threads = os.environ.get(THREADS_ENV, 1)
    threads = int(threads)
    if threads < 1:
        raise ArgumentError(f"thread count must be >= 1, got {threads}")
    return threads


def sweep_annealing_time(config, T_list, optimize=True, amplitude_grid=None,
                         refine=False, threads=None):
    """Run (and optionally amplitude-optimize) ``config`` at every annealing time."""
    T_list = [float(T) for T in T_list]
    if not T_list:
        raise ArgumentError("T_list is empty")
    if any(T <= 0 for T in T_list) or T_list != sorted(T_list):
        raise ArgumentError("T_list must be positive and ascending")
    jobs = [(replace(config, annealing_time=T), optimize, amplitude_grid, refine)
            for T in T_list]
    workers = worker_count(threads)
    if workers == 1:
        points = [_sweep_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_cell, jobs))
    for p in points:
        log.info("%s T=%g amp=%.4g err=%.4g", config.driver_kind, p.annealing_time,
                 p.amplitude, p.result.estimation_error)
    return TimeSweep(config.driver_kind, tuple(points))


def sample_couplings(seed, count, lo=0.0, hi=2.0):
    """``count`` iid draws from ``U[lo, hi)`` using PCG64 seeded with ``seed``."""
    if not lo < hi:
        raise ArgumentError(f"need lo < hi, got [{lo}, {hi})")
    if count < 1:
        raise ArgumentError(f"count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return [float(x) for x in rng.uniform(lo, hi, count)]
