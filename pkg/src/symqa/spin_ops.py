"""Dense many-body spin operators.

Basis convention: computational state index ``b`` has bit ``L - j`` equal to 1
when site ``j`` (1-based) is spin down, so site 1 is the most significant bit
and ``|0...0>`` is the fully polarized up state.  The ladder operators follow
``sigma^(+-) = sigma^x +- i sigma^y`` (entries 0/2, no factor 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ContractError, NumericalError

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
IMAG_TOL = 1e-10

_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI["plus"] = _PAULI["x"] + 1j * _PAULI["y"]
_PAULI["minus"] = _PAULI["x"] - 1j * _PAULI["y"]

PAULI_KINDS = tuple(_PAULI)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _is_hermitian(m, tol=HERMITIAN_TOL):
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    """A dense ``2**sites`` square complex matrix.

    Pass ``hermitian=None`` to detect the flag from the matrix.  A flag of
    ``True`` is checked against ``HERMITIAN_TOL``.
    """

    sites: int
    matrix: np.ndarray
    hermitian: bool | None = None

    def __post_init__(self):
        if int(self.sites) < 1:
            raise ArgumentError(f"sites must be positive, got {self.sites}")
        m = _frozen(self.matrix)
        dim = 2 ** int(self.sites)
        if m.shape != (dim, dim):
            raise ArgumentError(
                f"matrix shape {m.shape} does not match 2**{self.sites}")
        object.__setattr__(self, "sites", int(self.sites))
        object.__setattr__(self, "matrix", m)
        if self.hermitian is None:
            object.__setattr__(self, "hermitian", _is_hermitian(m))
        elif self.hermitian and not _is_hermitian(m):
            raise ContractError("matrix flagged Hermitian is not Hermitian")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def _check(self, other):
        if not isinstance(other, ManyBodyOperator):
            return NotImplemented
        if other.sites != self.sites:
            raise ArgumentError(
                f"site mismatch: {self.sites} vs {other.sites}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ManyBodyOperator(self.sites, self.matrix + other.matrix)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ManyBodyOperator(self.sites, self.matrix - other.matrix)

    def __neg__(self):
        return ManyBodyOperator(self.sites, -self.matrix, self.hermitian)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return ManyBodyOperator(self.sites, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ManyBodyOperator(self.sites, self.matrix @ other.matrix)

    def dagger(self):
        return ManyBodyOperator(self.sites, self.matrix.conj().T, self.hermitian)

    def eigvalsh(self):
        if not self.hermitian:
            raise ContractError("eigvalsh requires a Hermitian operator")
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on ``sites`` qubits."""

    sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen(np.ravel(self.amplitudes))
        if a.shape != (2 ** int(self.sites),):
            raise ArgumentError(
                f"state of length {a.size} does not match 2**{self.sites}")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > NORM_TOL:
            raise NumericalError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "sites", int(self.sites))
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, sites, index):
        a = np.zeros(2**sites, dtype=complex)
        a[index] = 1.0
        return cls(sites, a)

    def projector(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())


def identity(L):
    return ManyBodyOperator(L, np.eye(2**L, dtype=complex), True)


def zero(L):
    return ManyBodyOperator(L, np.zeros((2**L, 2**L), dtype=complex), True)


def single_site_pauli(kind):
    """Return the 2x2 operator of ``kind`` as a one-site ``ManyBodyOperator``.

    ``kind`` is one of ``x, y, z, plus, minus, identity``; ``plus`` is
    ``[[0, 2], [0, 0]]``.
    """
    try:
        m = _PAULI[kind]
    except KeyError:
        raise ArgumentError(f"unknown Pauli kind {kind!r}") from None
    return ManyBodyOperator(1, m)


def embed(op, site, total_sites):
    """Place a one-site operator at ``site`` (1-based) of a ``total_sites`` register."""
    if isinstance(op, str):
        op = single_site_pauli(op)
    if op.sites != 1:
        raise ArgumentError("embed expects a single-site operator")
    if not 1 <= site <= total_sites:
        raise ArgumentError(f"site {site} outside 1..{total_sites}")
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (total_sites - site))
    m = np.kron(np.kron(left, op.matrix), right)
    return ManyBodyOperator(total_sites, m, op.hermitian)


def down_counts(L):
    """Number of down spins (set bits) of every basis index of ``L`` sites."""
    return np.array([i.bit_count() for i in range(2**L)], dtype=int)


def total_sz(L):
    """Total magnetization ``sum_j sigma_j^z``; eigenvalue ``L - 2k`` with k down spins."""
    if L < 1:
        raise ArgumentError(f"L must be >= 1, got {L}")
    return ManyBodyOperator(L, np.diag(L - 2.0 * down_counts(L)).astype(complex), True)


def commutator(A, B):
    """Return ``AB - BA``."""
    if A.sites != B.sites:
        raise ArgumentError(f"dimension mismatch: {A.sites} vs {B.sites} sites")
    return ManyBodyOperator(A.sites, A.matrix @ B.matrix - B.matrix @ A.matrix)


def _as_array(obj, attr):
    return np.asarray(getattr(obj, attr)) if hasattr(obj, attr) else np.asarray(obj)


def expectation(op, state):
    """Real expectation value of a Hermitian operator.

    ``state`` may be a :class:`StateVector`, a density matrix object exposing
    ``.matrix``, or a raw 1-D (pure) or 2-D (mixed) array.
    """
    if not op.hermitian:
        raise ContractError("expectation requires a Hermitian operator")
    if hasattr(state, "amplitudes") or np.ndim(state) == 1:
        psi = _as_array(state, "amplitudes")
        if psi.shape != (op.dim,):
            raise ArgumentError("state dimension does not match operator")
        value = np.vdot(psi, op.matrix @ psi)
    else:
        rho = _as_array(state, "matrix")
        if rho.shape != op.matrix.shape:
            raise ArgumentError("state dimension does not match operator")
        value = np.sum(rho * op.matrix.T)
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)
