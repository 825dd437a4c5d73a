"""Time evolution along an annealing schedule.

The open system follows the GKSL equation with one Hermitian, involutive
Lindblad operator per site,

    d rho / dt = -i [H(t), rho] + gamma sum_n (s_n rho s_n - rho),

which is the usual dissipator because ``s_n^dagger s_n = 1``.  The closed
system follows ``d psi / dt = -i H(t) psi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ArgumentError, ContractError, IntegrationError, NumericalError
from .spin_ops import StateVector, embed

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-8
NORM_TOL = 1e-8

_INVOLUTIVE = ("x", "y", "z")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state; validated for unit trace, Hermiticity and positivity."""

    sites: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = 2 ** int(self.sites)
        if m.shape != (dim, dim):
            raise ArgumentError(f"density matrix shape {m.shape} does not match 2**{self.sites}")
        problem = _state_violation(m)
        if problem:
            raise NumericalError(problem)
        m.setflags(write=False)
        object.__setattr__(self, "sites", int(self.sites))
        object.__setattr__(self, "matrix", m)

    @classmethod
    def _validated(cls, sites, m):
        # for integrator output that was already checked against a widened bound
        obj = object.__new__(cls)
        m = np.array(m, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(obj, "sites", int(sites))
        object.__setattr__(obj, "matrix", m)
        return obj

    @classmethod
    def from_state(cls, state):
        amps = np.asarray(getattr(state, "amplitudes", state))
        sites = int(np.log2(amps.size))
        return cls(sites, np.outer(amps, amps.conj()))

    @classmethod
    def maximally_mixed(cls, sites):
        return cls(sites, np.eye(2**sites) / 2**sites)

    def purity(self):
        return float(np.real(np.sum(self.matrix * self.matrix.T)))

    def trace_distance(self, other):
        other = np.asarray(getattr(other, "matrix", other))
        return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(self.matrix - other))))


def _state_violation(m, positivity_tol=POSITIVITY_TOL):
    if not np.all(np.isfinite(m)):
        return "non-finite entries"
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        return f"trace {tr.real:.12g}{tr.imag:+.3g}j differs from 1"
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > HERMITIAN_TOL:
        return f"Hermiticity violated by {herm:.3e}"
    lowest = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if not lowest >= -positivity_tol:
        return f"negative eigenvalue {lowest:.3e}"
    return None


@dataclass(frozen=True)
class NoiseSpec:
    """Uniform per-site dephasing: rate ``gamma`` (GHz) with Pauli ``kind``."""

    rate: float = 0.0
    operator_kind: str = "z"

    def __post_init__(self):
        if self.rate < 0:
            raise ArgumentError(f"noise rate must be >= 0, got {self.rate}")
        if self.operator_kind not in _INVOLUTIVE:
            raise ContractError(
                f"Lindblad kind {self.operator_kind!r} is not an involutive Pauli; "
                "the dissipator form assumes s^dagger s = 1")


@dataclass(frozen=True)
class IntegratorParams:
    """Integrator settings.

    ``max_step`` defaults to ``T/1000`` when ``None``.  For ``fixed-RK4`` it is
    the (upper bound on the) fixed step.
    """

    method: str = "adaptive-RK"
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float | None = None
    sample_count: int = 2

    def __post_init__(self):
        if self.method not in ("adaptive-RK", "fixed-RK4"):
            raise ArgumentError(f"unknown integrator method {self.method!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ArgumentError("tolerances must be positive")
        if self.max_step is not None and not self.max_step > 0:
            raise ArgumentError("max_step must be positive")
        if self.sample_count < 2:
            raise ArgumentError("sample_count must be >= 2")

    def halved(self):
        """Same settings with both tolerances halved."""
        return IntegratorParams(self.method, self.rel_tol / 2, self.abs_tol / 2,
                                self.max_step, self.sample_count)


def gksl_rhs(rho, H, noise):
    """Right-hand side of the GKSL equation, by explicit operator products."""
    rho = np.asarray(getattr(rho, "matrix", rho))
    if rho.shape != H.matrix.shape:
        raise ArgumentError("rho and H dimensions differ")
    h = H.matrix
    out = -1j * (h @ rho - rho @ h)
    if noise.rate:
        for site in range(1, H.sites + 1):
            s = embed(noise.operator_kind, site, H.sites).matrix
            out += noise.rate * (s @ rho @ s - rho)
    return out


def _dissipator_arrays(noise, L):
    """Compact form of ``gamma sum_n (s_n rho s_n - rho)`` for the kernel.

    Each Pauli ``s`` has one nonzero per row, ``s[a, p(a)] = v[a]``, so
    ``(s rho s)[a, b] = v[a] conj(v[b]) rho[p(a), p(b)]``.  Diagonal (z) terms
    fold into an elementwise ``mask``; the others keep a permutation each.
    """
    dim = 2**L
    mask = np.full((dim, dim), -noise.rate * L, dtype=complex)
    perms, phases = [], []
    if noise.rate:
        rows = np.arange(dim)
        for site in range(1, L + 1):
            s = embed(noise.operator_kind, site, L).matrix
            p = np.argmax(np.abs(s), axis=1)
            v = s[rows, p]
            ph = noise.rate * np.outer(v, v.conj())
            if np.array_equal(p, rows):
                mask += ph
            else:
                perms.append(p)
                phases.append(ph)
    perms = np.array(perms, dtype=np.int64).reshape(-1, dim)
    phases = np.array(phases, dtype=complex).reshape(-1, dim, dim)
    return mask, perms, phases


def _sample_times(T, count):
    times = np.linspace(0.0, T, count)
    times[-1] = T
    return times


def _run_kernel(mode, y0, schedule, noise, params):
    T = schedule.total_time
    ham = _kernels.csr_pair(schedule.driver.matrix,
                            schedule.problem.matrix - schedule.driver.matrix)
    mask, perms, phases = _dissipator_arrays(noise, schedule.sites)
    max_step = params.max_step if params.max_step is not None else T / 1000.0
    times = _sample_times(T, params.sample_count)
    method = _kernels.ADAPTIVE if params.method == "adaptive-RK" else _kernels.FIXED_RK4
    samples, nfev, status, t_status = _kernels.integrate(
        mode, y0, ham, T,
        mask, perms, phases, params.rel_tol, params.abs_tol, max_step, times,
        method, max_step)
    if status == _kernels.STEP_TOO_SMALL:
        raise IntegrationError(f"step size underflow at t={t_status:.6g} ns", t_status)
    if status == _kernels.NOT_FINITE:
        raise IntegrationError(f"non-finite state at t={t_status:.6g} ns", t_status)
    return times, samples, nfev


def evolve_open(rho0, schedule, noise, params=IntegratorParams()):
    """Integrate the GKSL equation over ``[0, T]``.

    Returns ``(rho_T, samples)`` where ``samples`` is a list of ``(t, rho)``
    at ``params.sample_count`` uniform times including both endpoints.  Every
    sample is checked against the density-matrix invariants.
    """
    if not isinstance(rho0, DensityMatrix):
        rho0 = DensityMatrix(schedule.sites, rho0)
    if rho0.sites != schedule.sites:
        raise ArgumentError("initial state and schedule act on different site counts")
    times, raw, nfev = _run_kernel(_kernels.OPEN, rho0.matrix, schedule, noise, params)
    positivity_tol = POSITIVITY_TOL + error_budget(params, nfev)
    samples = []
    for t, m in zip(times, raw):
        problem = _state_violation(m, positivity_tol)
        if problem:
            raise IntegrationError(f"{problem} at t={t:.6g} ns", float(t))
        samples.append((float(t), DensityMatrix._validated(schedule.sites, m)))
    return samples[-1][1], samples


def error_budget(params, nfev):
    """Accumulated local-error allowance after ``nfev`` right-hand-side evaluations.

    Explicit Runge-Kutta steps are neither unitary nor positivity preserving;
    each accepted step may move the state by about ``rel_tol``, so the drift
    of the norm (closed) or of the smallest eigenvalue (open) is checked
    against ``steps * rel_tol`` on top of the fixed tolerances.  Drift beyond
    that means the error control was not respected.
    """
    steps = nfev / (4 if params.method == "fixed-RK4" else _kernels._N_STAGES)
    return steps * params.rel_tol


def evolve_closed(psi0, schedule, params=IntegratorParams()):
    """Integrate the Schrodinger equation; returns ``(psi_T, samples)``.

    Samples are renormalized after the drift check against
    :func:`error_budget`.
    """
    if not isinstance(psi0, StateVector):
        psi0 = StateVector(schedule.sites, psi0)
    if psi0.sites != schedule.sites:
        raise ArgumentError("initial state and schedule act on different site counts")
    y0 = psi0.amplitudes.reshape(-1, 1)
    times, raw, nfev = _run_kernel(_kernels.CLOSED, y0, schedule, NoiseSpec(0.0), params)
    tol = NORM_TOL + error_budget(params, nfev)
    samples = []
    for t, col in zip(times, raw):
        psi = col[:, 0]
        norm = np.linalg.norm(psi)
        if not abs(norm - 1.0) <= tol:
            raise IntegrationError(f"norm drifted to {norm:.12g} at t={t:.6g} ns", float(t))
        samples.append((float(t), StateVector(schedule.sites, psi / norm)))
    return samples[-1][1], samples

