"""Compiled Runge-Kutta integrators for the annealing equations of motion.

Both integrators work on a 2-D complex state ``y``: a density matrix for the
open system (``mode=OPEN``) or an ``(n, 1)`` column for the Schrodinger
equation (``mode=CLOSED``).  The Hamiltonian is evaluated continuously as
``H(t) = H_D + (t/T) (H_P - H_D)`` inside every stage.

The adaptive method is Dormand-Prince 8(5,3) with the tableau and step-size
controller used by :class:`scipy.integrate.DOP853`; keeping the loop compiled
removes the per-evaluation Python overhead that dominates at these sizes.
"""

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

CLOSED = 0
OPEN = 1

ADAPTIVE = 0
FIXED_RK4 = 1

OK = 0
STEP_TOO_SMALL = 1
NOT_FINITE = 2

_N_STAGES = _dop.N_STAGES
_A = np.ascontiguousarray(_dop.A[:_N_STAGES, :_N_STAGES])
_B = np.ascontiguousarray(_dop.B)
_C = np.ascontiguousarray(_dop.C[:_N_STAGES])
_E3 = np.ascontiguousarray(_dop.E3)
_E5 = np.ascontiguousarray(_dop.E5)

# fastmath without nnan/ninf so the finiteness checks survive compilation
_FASTMATH = {"nsz", "arcp", "contract", "afn", "reassoc"}

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ERROR_EXPONENT = -1.0 / 8.0


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _rhs(mode, t, y, ham, inv_T, mask, perms, phases, out):
    """Evaluate the equation of motion into ``out``.

    ``ham = (indptr, indices, drive, delta)`` is the CSR pattern shared by
    ``H_D`` and ``H_P - H_D``.
    """
    indptr, indices, drive, delta = ham
    s = t * inv_T
    n = y.shape[0]
    m = y.shape[1]
    if mode == CLOSED:
        for a in range(n):
            acc = 0.0j
            for k in range(indptr[a], indptr[a + 1]):
                acc += (drive[k] + s * delta[k]) * y[indices[k], 0]
            out[a, 0] = -1j * acc
        return
    # out <- H rho, then -i (A - A^dagger) since H and rho are Hermitian.
    for a in range(n):
        for b in range(m):
            out[a, b] = 0.0
        for k in range(indptr[a], indptr[a + 1]):
            h = drive[k] + s * delta[k]
            c = indices[k]
            for b in range(m):
                out[a, b] += h * y[c, b]
    for a in range(n):
        for b in range(a, n):
            d = -1j * (out[a, b] - np.conj(out[b, a]))
            out[a, b] = d + mask[a, b] * y[a, b]
            if b != a:
                out[b, a] = np.conj(d) + mask[b, a] * y[b, a]
    for k in range(perms.shape[0]):
        p = perms[k]
        ph = phases[k]
        for a in range(n):
            pa = p[a]
            for b in range(n):
                out[a, b] += ph[a, b] * y[pa, p[b]]


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _rms(x, scale):
    acc = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            v = abs(x[i, j]) / scale[i, j]
            acc += v * v
    return np.sqrt(acc / x.size)


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _axpy_stages(y, h, coeffs, K, count, out):
    """``out = y + h * sum_{j < count} coeffs[j] K[j]``."""
    n, m = y.shape
    for a in range(n):
        for b in range(m):
            out[a, b] = y[a, b]
    for j in range(count):
        c = coeffs[j] * h
        if c != 0.0:
            Kj = K[j]
            for a in range(n):
                for b in range(m):
                    out[a, b] += c * Kj[a, b]


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _initial_step(mode, y, f0, ham, inv_T, mask, perms, phases, rtol, atol,
                  max_step, t_end, y1, work):
    scale = atol + np.abs(y) * rtol
    d0 = _rms(y, scale)
    d1 = _rms(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, t_end)
    for a in range(y.shape[0]):
        for b in range(y.shape[1]):
            y1[a, b] = y[a, b] + h0 * f0[a, b]
    _rhs(mode, h0, y1, ham, inv_T, mask, perms, phases, work)
    d2 = _rms(work - f0, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8.0)
    return min(100.0 * h0, h1, max_step)


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _rk4(mode, y, ham, inv_T, mask, perms, phases, sample_times, fixed_step, samples):
    n_samples = sample_times.shape[0]
    K = np.zeros((4,) + y.shape, dtype=np.complex128)
    tmp = np.empty_like(y)
    half = np.array([0.5])
    full = np.array([1.0])
    weights = np.array([1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0])
    t = 0.0
    nfev = 0
    for si in range(1, n_samples):
        t_next = sample_times[si]
        n_steps = max(1, int(np.ceil((t_next - t) / fixed_step - 1e-9)))
        h = (t_next - t) / n_steps
        t0 = t
        for i in range(n_steps):
            t = t0 + i * h
            _rhs(mode, t, y, ham, inv_T, mask, perms, phases, K[0])
            _axpy_stages(y, h, half, K[0:1], 1, tmp)
            _rhs(mode, t + 0.5 * h, tmp, ham, inv_T, mask, perms, phases, K[1])
            _axpy_stages(y, h, half, K[1:2], 1, tmp)
            _rhs(mode, t + 0.5 * h, tmp, ham, inv_T, mask, perms, phases, K[2])
            _axpy_stages(y, h, full, K[2:3], 1, tmp)
            _rhs(mode, t + h, tmp, ham, inv_T, mask, perms, phases, K[3])
            _axpy_stages(y, h, weights, K, 4, tmp)
            y[:, :] = tmp
            nfev += 4
        t = t_next
        if not np.all(np.isfinite(y)):
            return nfev, NOT_FINITE, t
        samples[si] = y
    return nfev, OK, t


@njit(cache=True, fastmath=_FASTMATH, error_model="numpy")
def _dop853(mode, y, ham, inv_T, mask, perms, phases, rtol, atol, max_step,
            sample_times, samples):
    n, m = y.shape
    n_samples = sample_times.shape[0]
    total_time = sample_times[n_samples - 1]
    K = np.zeros((_N_STAGES + 1, n, m), dtype=np.complex128)
    f = np.empty_like(y)
    tmp = np.empty_like(y)
    y_new = np.empty_like(y)
    f_new = np.empty_like(y)
    t = 0.0
    _rhs(mode, t, y, ham, inv_T, mask, perms, phases, f)
    h_abs = _initial_step(mode, y, f, ham, inv_T, mask, perms, phases, rtol, atol,
                          max_step, total_time, tmp, y_new)
    nfev = 2

    for si in range(1, n_samples):
        t_next = sample_times[si]
        while t < t_next:
            min_step = 10.0 * abs(np.nextafter(t, np.inf) - t)
            h_abs = min(max(h_abs, min_step), max_step)
            rejected = False
            while True:
                if h_abs < min_step:
                    return nfev, STEP_TOO_SMALL, t
                t_new = t + h_abs
                clipped = False
                if t_new >= t_next or t_next - t_new < min_step:
                    t_new = t_next
                    clipped = True
                h = t_new - t
                K[0] = f
                for s in range(1, _N_STAGES):
                    _axpy_stages(y, h, _A[s], K, s, tmp)
                    _rhs(mode, t + _C[s] * h, tmp, ham, inv_T, mask, perms, phases, K[s])
                _axpy_stages(y, h, _B, K, _N_STAGES, y_new)
                _rhs(mode, t_new, y_new, ham, inv_T, mask, perms, phases, f_new)
                K[_N_STAGES] = f_new
                nfev += _N_STAGES

                e5 = 0.0
                e3 = 0.0
                for a in range(n):
                    for b in range(m):
                        sc = atol + max(abs(y[a, b]), abs(y_new[a, b])) * rtol
                        v5 = 0.0j
                        v3 = 0.0j
                        for j in range(_N_STAGES + 1):
                            v5 += _E5[j] * K[j, a, b]
                            v3 += _E3[j] * K[j, a, b]
                        r5 = abs(v5) / sc
                        r3 = abs(v3) / sc
                        e5 += r5 * r5
                        e3 += r3 * r3
                if e5 == 0.0 and e3 == 0.0:
                    err = 0.0
                else:
                    err = h * e5 / np.sqrt((e5 + 0.01 * e3) * n * m)
                if not np.isfinite(err):
                    return nfev, NOT_FINITE, t
                if err < 1.0:
                    if err == 0.0:
                        factor = _MAX_FACTOR
                    else:
                        factor = min(_MAX_FACTOR, _SAFETY * err ** _ERROR_EXPONENT)
                    if rejected:
                        factor = min(1.0, factor)
                    if clipped:
                        # a step shortened to land on a sample says little about the next one
                        h_abs = max(h * factor, h_abs)
                    else:
                        h_abs = h * factor
                    break
                h_abs = h * max(_MIN_FACTOR, _SAFETY * err ** _ERROR_EXPONENT)
                rejected = True
            t = t_new
            y[:, :] = y_new
            f[:, :] = f_new
        samples[si] = y
    return nfev, OK, t


def integrate(mode, y0, ham, total_time, mask, perms, phases, rtol, atol,
              max_step, sample_times, method, fixed_step):
    """Integrate from t=0, recording ``y`` at each of ``sample_times``.

    Returns ``(samples, nfev, status, t_status)``.  ``sample_times`` must be
    ascending, start at 0 and end at ``total_time``.
    """
    y = np.array(y0, dtype=np.complex128, order="C")
    samples = np.empty((sample_times.shape[0],) + y.shape, dtype=np.complex128)
    samples[0] = y
    inv_T = 1.0 / total_time
    if method == FIXED_RK4:
        nfev, status, t = _rk4(mode, y, ham, inv_T, mask, perms, phases,
                               sample_times, fixed_step, samples)
    else:
        nfev, status, t = _dop853(mode, y, ham, inv_T, mask, perms, phases, rtol,
                                  atol, max_step, sample_times, samples)
    return samples, nfev, status, t


def csr_pair(drive, delta):
    """CSR arrays of ``drive`` and ``delta`` on their union sparsity pattern."""
    pattern = (drive != 0) | (delta != 0)
    indptr = np.zeros(drive.shape[0] + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(pattern.sum(axis=1))
    rows, cols = np.nonzero(pattern)
    return (indptr, cols.astype(np.int64),
            np.ascontiguousarray(drive[rows, cols], dtype=np.complex128),
            np.ascontiguousarray(delta[rows, cols], dtype=np.complex128))
