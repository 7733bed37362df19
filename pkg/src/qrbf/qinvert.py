"""Simulated quantum linear-system inversion with post-selected readout.

Given a symmetric positive definite A and right-hand side y, the
simulated algorithm expands |y> in the eigenbasis of A, attaches an
ancilla rotated to amplitude C/lambda_j on each eigencomponent, and
post-selects the ancilla on 1.  The surviving state is proportional to
A^{-1} y, the post-selection probability p determines the normalization
factor F = sqrt(p), and the solution norm follows as ||c|| = F ||y|| / C.

Two fidelity levels are provided.  `invert_ideal` applies the rotation
with the exact eigenvalues, isolating the algorithmic map lambda -> C/lambda.
`invert_quantized` runs a full statevector simulation of phase
estimation with a b-bit clock register: controlled powers of
e^{iA t0 / 2^b}, inverse Fourier transform, rotation keyed on the clock
value, uncompute, post-select.  The clock integer for eigenvalue lambda
is lambda * t0 / (2 pi); spectra landing exactly on that integer grid
reproduce the ideal mode to rounding, generic spectra converge to it as
t0 grows.

Readout of the interpolant f(x) = ||c|| * ||Phi(x)|| * <c|Phi(x)> uses a
swap test for the overlap; since the swap test only determines the
magnitude |<c|Phi(x)>|, the simulator-exact signed overlap is the
default and the magnitude-only value is reported alongside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import interpolation
from .interpolation import InterpMatrix
from .qcore import PureState

_CLOCK_BITS_CAP = 10


@dataclass
class InversionConfig:
    """Knobs for the simulated inversion.

    rotation_scale is the constant C <= lambda_min multiplying the
    1/lambda rotation amplitudes; None picks the largest admissible
    value (lambda_min in ideal mode, the smallest
    positive clock-grid eigenvalue above the spectral floor in quantized
    mode).  spectral_floor discards eigenvalues <= that value before
    inverting, trading accuracy for conditioning.  evolution_time and
    clock_bits only apply to quantized mode.  The sampling budgets are
    used by the readout layer, not by the inversion itself.
    """

    rotation_scale: float | None = None
    mode: str = "ideal"
    evolution_time: float | None = None
    clock_bits: int | None = None
    spectral_floor: float | None = None
    norm_samples: int | None = None
    overlap_samples: int | None = None
    clock_bits_cap: int = _CLOCK_BITS_CAP

    def __post_init__(self):
        if self.mode not in ("ideal", "quantized"):
            raise ValueError(f"unknown inversion mode {self.mode!r}")
        if self.rotation_scale is not None and not self.rotation_scale > 0:
            raise ValueError("rotation_scale must be positive")
        if self.spectral_floor is not None and self.spectral_floor < 0:
            raise ValueError("spectral_floor must be nonnegative")


@dataclass
class SolveReport:
    """Everything observable about one simulated inversion."""

    mode: str
    eigenvalues: np.ndarray
    kept: np.ndarray
    overlaps: np.ndarray
    rotation_scale: float
    post_select_prob: float
    norm_factor: float
    coeff_norm_est: float
    state_out: PureState
    fidelity_vs_classical: float
    repetitions_ledger: int
    kappa_eff: float
    spectral_floor: float | None = None
    evolution_time: float | None = None
    clock_bits: int | None = None
    deviation_from_ideal: float | None = None
    clock_leak: float | None = None

    def to_dict(self) -> dict:
        amps = self.state_out.amplitudes
        out = {
            "mode": self.mode,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "kept": [bool(v) for v in self.kept],
            "overlaps": [float(v) for v in self.overlaps],
            "rotation_scale": float(self.rotation_scale),
            "post_select_prob": float(self.post_select_prob),
            "norm_factor": float(self.norm_factor),
            "coeff_norm_est": float(self.coeff_norm_est),
            "state_out_real": [float(v) for v in amps.real],
            "state_out_imag": [float(v) for v in amps.imag],
            "fidelity_vs_classical": float(self.fidelity_vs_classical),
            "repetitions_ledger": int(self.repetitions_ledger),
            "kappa_eff": float(self.kappa_eff),
            "spectral_floor": self.spectral_floor,
            "evolution_time": self.evolution_time,
            "clock_bits": self.clock_bits,
            "deviation_from_ideal": self.deviation_from_ideal,
            "clock_leak": self.clock_leak,
        }
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _as_dense(A) -> np.ndarray:
    if isinstance(A, InterpMatrix):
        return A.toarray()
    A = np.asarray(A, dtype=float)
    return A


def eigensolve(A):
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix."""
    dense = _as_dense(A)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError("need a square matrix")
    if np.max(np.abs(dense - dense.T)) > 1e-10 * max(1.0, np.max(np.abs(dense))):
        raise ValueError("matrix is not symmetric")
    w, u = np.linalg.eigh(dense)
    return w, u


def filter_spectrum(eigenvalues, spectral_floor: float):
    """Indices of eigenvalues above the floor and the resulting kappa.

    Returns (kept_indices, kappa_eff) with kappa_eff = lambda_max over the
    smallest kept eigenvalue.  Raises when nothing survives.
    """
    if spectral_floor < 0:
        raise ValueError("spectral_floor must be nonnegative")
    w = np.asarray(eigenvalues, dtype=float)
    kept = np.flatnonzero(w > spectral_floor)
    if kept.size == 0:
        raise ValueError(f"no eigenvalues above spectral floor {spectral_floor}")
    kappa_eff = float(w.max() / w[kept].min())
    return kept, kappa_eff


def _prepare(A, y, config):
    w, u = eigensolve(A)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != w.shape[0]:
        raise ValueError("matrix and right-hand side sizes disagree")
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        raise ValueError("right-hand side must be nonzero")
    floor = config.spectral_floor
    if floor is None:
        if w[0] <= 0.0:
            raise ValueError(
                f"matrix is not positive definite (lambda_min = {w[0]:.6e}); "
                "set spectral_floor to invert on a subspace"
            )
        kept_idx = np.arange(w.shape[0])
        kappa_eff = float(w[-1] / w[0])
    else:
        kept_idx, kappa_eff = filter_spectrum(w, floor)
    kept = np.zeros(w.shape[0], dtype=bool)
    kept[kept_idx] = True
    beta = u.T @ (y / ynorm)
    return w, u, beta, kept, kappa_eff, ynorm


def _classical_fidelity(A, y, state: np.ndarray) -> float:
    try:
        coeffs = interpolation.solve(A, np.asarray(y, dtype=float).ravel())
    except (ValueError, RuntimeError):
        return math.nan
    c = coeffs.c / np.linalg.norm(coeffs.c)
    return float(abs(np.vdot(c, state)))


def invert_ideal(A, y, config: InversionConfig | None = None) -> SolveReport:
    """Inversion with exact eigenvalues: rotation amplitudes C/lambda_j.

    post_select_prob is computed by amplitude arithmetic, never sampled
    here.  With the default C = lambda_min it is bounded below by
    1/kappa^2.
    """
    config = config or InversionConfig()
    w, u, beta, kept, kappa_eff, ynorm = _prepare(A, y, config)
    lam = w[kept]
    bk = beta[kept]
    lam_min = float(lam.min())
    C = lam_min if config.rotation_scale is None else float(config.rotation_scale)
    if C > lam_min + 1e-12:
        raise ValueError(
            f"rotation_scale {C} exceeds the smallest kept eigenvalue {lam_min}"
        )
    amp = C * bk / lam
    p = float(np.dot(amp, amp))
    F = math.sqrt(p)
    raw = u[:, kept] @ (bk / lam)
    state = raw / np.linalg.norm(raw)
    report = SolveReport(
        mode="ideal",
        eigenvalues=w,
        kept=kept,
        overlaps=beta,
        rotation_scale=C,
        post_select_prob=p,
        norm_factor=F,
        coeff_norm_est=F * ynorm / C,
        state_out=PureState(state, (state.shape[0],)),
        fidelity_vs_classical=_classical_fidelity(A, y, state),
        repetitions_ledger=math.ceil(1.0 / lam_min),
        kappa_eff=kappa_eff,
        spectral_floor=config.spectral_floor,
    )
    return report


def _walsh_hadamard(arr: np.ndarray) -> np.ndarray:
    """Orthonormal Hadamard transform along axis 0 (length a power of two)."""
    out = np.array(arr, dtype=complex)
    n = out.shape[0]
    trailing = out.shape[1:]
    h = 1
    while h < n:
        out = out.reshape(n // (2 * h), 2, h, *trailing)
        top = out[:, 0].copy()
        out[:, 0] = top + out[:, 1]
        out[:, 1] = top - out[:, 1]
        out = out.reshape(n, *trailing)
        h *= 2
    return out / math.sqrt(n)


def invert_quantized(A, y, config: InversionConfig) -> SolveReport:
    """Statevector simulation of phase-estimation-based inversion.

    The clock register holds 2^b cells; eigenvalue lambda lands on clock
    integer phi = lambda * t0 / (2 pi), so the grid estimate behind cell k
    is lambda_hat(k) = 2 pi k / t0.  The rotation fires on every cell with
    lambda_hat >= max(C, spectral floor); after uncomputing, mass that
    fails to return to clock 0 is reported as clock_leak.
    """
    if config.evolution_time is None or config.clock_bits is None:
        raise ValueError("quantized mode needs evolution_time and clock_bits")
    b = int(config.clock_bits)
    if b < 1:
        raise ValueError("clock_bits must be positive")
    if b > config.clock_bits_cap:
        raise ValueError(f"clock_bits {b} exceeds cap {config.clock_bits_cap}")
    t0 = float(config.evolution_time)
    if not t0 > 0:
        raise ValueError("evolution_time must be positive")

    w, u, beta, kept, kappa_eff, ynorm = _prepare(A, y, config)
    T = 2**b
    phi = w * t0 / (2.0 * math.pi)
    if phi.min() < 0.0 or phi.max() >= T:
        raise ValueError(
            f"clock wraparound: eigenphases must lie in [0, {T}), got "
            f"[{phi.min():.4g}, {phi.max():.4g}]; reduce evolution_time or raise clock_bits"
        )

    floor = 0.0 if config.spectral_floor is None else config.spectral_floor
    k_grid = np.arange(T)
    lam_hat = 2.0 * math.pi * k_grid / t0
    above = lam_hat > floor
    above[0] = False  # cell 0 reads lambda_hat = 0, never rotated
    if config.rotation_scale is None:
        if not above.any():
            raise ValueError("no clock cell above the spectral floor; reduce the floor")
        C = float(lam_hat[above].min())
    else:
        C = float(config.rotation_scale)
    rotated = above & (lam_hat >= C)
    rot_amp = np.zeros(T)
    rot_amp[rotated] = C / lam_hat[rotated]

    # forward pass: H on the clock, controlled powers of e^{iA t0/T}, inverse QFT
    phase = np.exp(2j * math.pi * np.outer(k_grid, phi) / T) / math.sqrt(T)
    psi = phase * beta[None, :]
    g = np.fft.fft(psi, axis=0, norm="ortho")
    branch1 = g * rot_amp[:, None]
    p = float(np.sum(np.abs(branch1) ** 2))

    # uncompute the clock on the accepted branch, then project onto clock 0
    back = np.fft.ifft(branch1, axis=0, norm="ortho")
    back = back * np.exp(-2j * math.pi * np.outer(k_grid, phi) / T)
    joint = _walsh_hadamard(back)
    survivor = joint[0, :]
    total = float(np.sum(np.abs(joint) ** 2))
    clock_leak = 1.0 - float(np.sum(np.abs(survivor) ** 2)) / total if total > 0 else math.nan
    if np.linalg.norm(survivor) == 0.0:
        raise ValueError("post-selected state vanished; check rotation parameters")
    state_eig = survivor / np.linalg.norm(survivor)
    state = u @ state_eig

    F = math.sqrt(p)
    ideal = invert_ideal(A, y, InversionConfig(spectral_floor=config.spectral_floor))
    phase_align = np.vdot(ideal.state_out.amplitudes, state)
    theta = np.angle(phase_align) if abs(phase_align) > 0 else 0.0
    deviation = float(
        np.linalg.norm(state * np.exp(-1j * theta) - ideal.state_out.amplitudes)
    )
    lam_min_kept = float(w[kept].min())
    return SolveReport(
        mode="quantized",
        eigenvalues=w,
        kept=kept,
        overlaps=beta,
        rotation_scale=C,
        post_select_prob=p,
        norm_factor=F,
        coeff_norm_est=F * ynorm / C,
        state_out=PureState(state, (state.shape[0],)),
        fidelity_vs_classical=_classical_fidelity(A, y, state),
        repetitions_ledger=math.ceil(1.0 / lam_min_kept),
        kappa_eff=kappa_eff,
        spectral_floor=config.spectral_floor,
        evolution_time=t0,
        clock_bits=b,
        deviation_from_ideal=deviation,
        clock_leak=clock_leak,
    )


def invert(A, y, config: InversionConfig) -> SolveReport:
    """Dispatch on config.mode."""
    if config.mode == "quantized":
        return invert_quantized(A, y, config)
    return invert_ideal(A, y, config)


@dataclass
class SampledProbability:
    estimate: float
    half_width: float
    successes: int
    samples: int


def sample_probability(p_true: float, n: int, seed) -> SampledProbability:
    """Estimate a probability from n seeded Bernoulli trials.

    The reported half-width 3*sqrt(p_hat(1-p_hat)/n) is a three-sigma
    normal-approximation confidence radius.
    """
    if not 0.0 <= p_true <= 1.0:
        raise ValueError("p_true must be in [0, 1]")
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    successes = int(rng.binomial(n, p_true))
    est = successes / n
    return SampledProbability(
        estimate=est,
        half_width=3.0 * math.sqrt(est * (1.0 - est) / n),
        successes=successes,
        samples=n,
    )


def swap_test(u, v) -> float:
    """Acceptance probability 1/2 + |<u|v>|^2 / 2 of the swap test."""
    ua = u.amplitudes if isinstance(u, PureState) else np.asarray(u, dtype=complex).ravel()
    va = v.amplitudes if isinstance(v, PureState) else np.asarray(v, dtype=complex).ravel()
    if ua.shape != va.shape:
        raise ValueError("states must have equal dimension")
    for name, vec in (("u", ua), ("v", va)):
        if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
            raise ValueError(f"{name} is not unit norm")
    return 0.5 + 0.5 * abs(np.vdot(ua, va)) ** 2


def readout_value(c_norm: float, basis_norm: float, overlap: float) -> float:
    """Interpolant value from the three estimated factors.

    f(x) = ||c|| * ||Phi(x)|| * <c_hat | Phi_hat(x)> where both unit
    vectors carry hats; the overlap argument may be signed (simulator
    route) or a magnitude (swap-test route).
    """
    if c_norm < 0 or basis_norm < 0:
        raise ValueError("norms must be nonnegative")
    return c_norm * basis_norm * overlap
