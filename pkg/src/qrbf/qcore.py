"""State containers and the density-matrix exponentiation channel.

The key primitive simulates applying e^{-iAt} when A itself is only
available as a quantum state: conjugate A (x) rho by the partial swap
e^{-iS dt} and trace out the first register,

    tr_1[ e^{-iS dt} (A (x) rho) e^{+iS dt} ]
        = cos^2(dt) rho + sin^2(dt) A - i sin(dt) cos(dt) [A, rho]
        = rho - i dt [A, rho] + O(dt^2),

which is one Euler step of the Liouville equation.  The closed form on
the right is exact (S squares to the identity, so its exponential is
cos(dt) I - i sin(dt) S) and is what `dme_step` computes; the tensor
route is kept in the tests as an independent check.  Composing l steps
of length t/l approaches e^{-iAt} rho e^{iAt} with error O(t^2/l).

Errors between density matrices are measured in the trace norm (sum of
singular values of the difference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class PureState:
    """Complex amplitude vector over a tensor product of registers."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        self.dims = tuple(int(d) for d in self.dims)
        if self.amplitudes.shape[0] != math.prod(self.dims):
            raise ValueError(
                f"amplitude length {self.amplitudes.shape[0]} does not match dims {self.dims}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), self.dims)


@dataclass
class DensityMatrix:
    """Hermitian unit-trace operator over a tensor product of registers."""

    entries: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.dims = tuple(int(d) for d in self.dims)
        dim = math.prod(self.dims)
        if self.entries.shape != (dim, dim):
            raise ValueError(f"entries shape {self.entries.shape} does not match dims {self.dims}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self, atol: float = 1e-10) -> None:
        """Raise unless hermitian, unit trace, and positive semidefinite (within atol)."""
        h = np.max(np.abs(self.entries - self.entries.conj().T))
        if h > atol:
            raise ValueError(f"not hermitian: max asymmetry {h:.3e}")
        tr = np.trace(self.entries)
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace is {tr:.12f}, expected 1")
        w = np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))
        if w[0] < -atol:
            raise ValueError(f"negative eigenvalue {w[0]:.3e}")


def _as_operator(obj) -> np.ndarray:
    if isinstance(obj, DensityMatrix):
        return obj.entries
    if isinstance(obj, PureState):
        return obj.density().entries
    return np.asarray(obj, dtype=complex)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every register not listed in keep (int or sequence of ints)."""
    keep = (keep,) if isinstance(keep, (int, np.integer)) else tuple(keep)
    n = len(rho.dims)
    if not keep or any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"keep ids must be distinct members of range({n})")
    keep = sorted(keep)
    drop = [i for i in range(n) if i not in keep]
    arr = rho.entries.reshape(rho.dims + rho.dims)
    offset = n
    for ax in reversed(drop):
        arr = np.trace(arr, axis1=ax, axis2=ax + offset)
        offset -= 1
    kept_dims = tuple(rho.dims[i] for i in keep)
    dim = math.prod(kept_dims)
    return DensityMatrix(arr.reshape(dim, dim), kept_dims)


def swap_operator(m: int) -> np.ndarray:
    """Permutation matrix exchanging the two m-dimensional registers."""
    s = np.zeros((m * m, m * m))
    j, k = np.divmod(np.arange(m * m), m)
    s[k * m + j, np.arange(m * m)] = 1.0
    return s


def swap_exponential(m: int, dt: float) -> np.ndarray:
    """e^{-iS dt} = cos(dt) I - i sin(dt) S, exact because S^2 = I."""
    return math.cos(dt) * np.eye(m * m) - 1j * math.sin(dt) * swap_operator(m)


def dme_step(a_op, rho, dt: float) -> DensityMatrix:
    """One exponentiation step: trace-out of the partial-swap conjugation.

    Both a_op and rho must be hermitian with matching shape; a_op is the
    operator being exponentiated (a density-matrix-normalized
    interpolation matrix in this package), rho the evolving state.
    """
    a = _as_operator(a_op)
    r = _as_operator(rho)
    if a.shape != r.shape or a.shape[0] != a.shape[1]:
        raise ValueError("operator and state shapes disagree")
    c, s = math.cos(dt), math.sin(dt)
    comm = a @ r - r @ a
    out = c * c * r + s * s * a - 1j * s * c * comm
    return DensityMatrix(out, (a.shape[0],))


def dme_evolve(a_op, rho, t: float, l: int) -> DensityMatrix:
    """Compose l exponentiation steps of length t/l."""
    if l < 1:
        raise ValueError("need at least one step")
    dt = t / l
    r = _as_operator(rho)
    state = DensityMatrix(r, (r.shape[0],))
    for _ in range(l):
        state = dme_step(a_op, state, dt)
    return state


def exact_conjugation(a_op, rho, t: float) -> DensityMatrix:
    """Target channel e^{-iAt} rho e^{+iAt} via the eigendecomposition of A."""
    a = _as_operator(a_op)
    r = _as_operator(rho)
    w, u = np.linalg.eigh(a)
    evo = (u * np.exp(-1j * w * t)) @ u.conj().T
    out = evo @ r @ evo.conj().T
    return DensityMatrix(out, (a.shape[0],))


def trace_norm(mat) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(mat, dtype=complex), compute_uv=False).sum())


def dme_error(a_op, rho, t: float, l: int) -> float:
    """Trace-norm gap between the stepped channel and the exact conjugation."""
    approx = dme_evolve(a_op, rho, t, l)
    exact = exact_conjugation(a_op, rho, t)
    return trace_norm(approx.entries - exact.entries)


def dme_scaling(a_op, rho, t_values, l_values) -> list:
    """Step-error table over a (t, l) grid.

    Returns one dict per cell with keys t, l, trace_error and
    frobenius_error, ready for a CSV writer.  Trace norm is the primary
    metric; the Frobenius norm is reported alongside (it never exceeds
    the trace norm, both shrink like 1/l at fixed t).
    """
    rows = []
    for t in t_values:
        exact = exact_conjugation(a_op, rho, float(t))
        for l in l_values:
            approx = dme_evolve(a_op, rho, float(t), int(l))
            diff = approx.entries - exact.entries
            rows.append(
                {
                    "t": float(t),
                    "l": int(l),
                    "trace_error": trace_norm(diff),
                    "frobenius_error": float(np.linalg.norm(diff, "fro")),
                }
            )
    return rows
