"""Phase-space representation of multimode Gaussian states.

Conventions used throughout the package:

* quadrature ordering is interleaved, ``Q = (x1, p1, x2, p2, ..., xM, pM)``,
  so the symplectic form is block diagonal with 2x2 blocks ``[[0, 1], [-1, 0]]``;
* hbar-free units with vacuum variance 1/2 per quadrature, e.g. a p-squeezed
  vacuum has covariance ``diag(exp(2r), exp(-2r)) / 2``.

All types are immutable values and all operations are pure functions, so
everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NumericError(RuntimeError):
    """A numerical procedure failed (singular system, non-convergence, ...)."""


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances used by validation and purity gates."""

    symmetry_tol: float = 1e-12        # |cov - cov.T| elementwise
    physicality_tol: float = 1e-10     # symplectic eigenvalues >= 1/2 - tol
    symplectic_tol: float = 1e-10      # |S Omega S^T - Omega| elementwise
    pure_tol: float = 1e-8             # purity gate on symplectic eigenvalues
    support_cutoff: float = 1e-10      # relative eigenvalue cutoff for support inverses
    reg_epsilon: float = 1e-9          # covariance blending for singular SLD systems


DEFAULT_POLICY = NumericPolicy()


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal symplectic form Omega for the interleaved ordering."""
    omega = np.zeros((2 * modes, 2 * modes))
    for i in range(modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


def _symplectic_spectrum(cov: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, sorted descending."""
    modes = cov.shape[0] // 2
    vals = np.abs(np.linalg.eigvals(1j * symplectic_form(modes) @ cov))
    return np.sort(vals.real)[::-1][::2]


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state of ``modes`` bosonic modes: covariance matrix plus mean vector."""

    modes: int
    cov: np.ndarray
    mean: np.ndarray
    policy: NumericPolicy = field(default=DEFAULT_POLICY, repr=False, compare=False)

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("a Gaussian state needs at least one mode")
        cov = np.asarray(self.cov, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        dim = 2 * self.modes
        if cov.shape != (dim, dim):
            raise ValueError(f"covariance must be {dim}x{dim}, got {cov.shape}")
        if mean.shape != (dim,):
            raise ValueError(f"mean must have length {dim}, got {mean.shape}")
        if np.max(np.abs(cov - cov.T)) > self.policy.symmetry_tol:
            raise ValueError("covariance matrix is not symmetric")
        nu_min = _symplectic_spectrum(cov).min()
        if nu_min < 0.5 - self.policy.physicality_tol:
            raise ValueError(
                f"unphysical covariance: smallest symplectic eigenvalue {nu_min!r} < 1/2"
            )
        object.__setattr__(self, "cov", _readonly(cov))
        object.__setattr__(self, "mean", _readonly(mean))


@dataclass(frozen=True)
class SymplecticOp:
    """Linear phase-space map S with S Omega S^T = Omega (a Gaussian unitary)."""

    matrix: np.ndarray
    policy: NumericPolicy = field(default=DEFAULT_POLICY, repr=False, compare=False)

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be square of even size, got {S.shape}")
        omega = symplectic_form(S.shape[0] // 2)
        defect = np.max(np.abs(S @ omega @ S.T - omega))
        if defect > self.policy.symplectic_tol:
            raise ValueError(f"matrix is not symplectic (defect {defect:.3e})")
        object.__setattr__(self, "matrix", _readonly(S))

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class LossChannel:
    """Uniform bosonic pure-loss channel with transmissivity eta on every mode."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.eta}")


def vacuum_state(modes: int) -> GaussianState:
    """M-mode vacuum: covariance identity/2, zero mean."""
    if modes < 1:
        raise ValueError("modes must be a positive integer")
    return GaussianState(modes, 0.5 * np.eye(2 * modes), np.zeros(2 * modes))


def coherent_state(x: float, p: float) -> GaussianState:
    """Single-mode coherent state with quadrature amplitudes (x, p)."""
    return GaussianState(1, 0.5 * np.eye(2), np.array([x, p], dtype=float))


def squeezed_vacuum(r: float) -> GaussianState:
    """Single-mode squeezed vacuum; r > 0 squeezes the p quadrature."""
    return GaussianState(1, np.diag([np.exp(2 * r), np.exp(-2 * r)]) / 2, np.zeros(2))


def product_state(*states: GaussianState) -> GaussianState:
    """Tensor product of Gaussian states (block-diagonal covariance)."""
    if not states:
        raise ValueError("need at least one state")
    modes = sum(s.modes for s in states)
    cov = np.zeros((2 * modes, 2 * modes))
    mean = np.zeros(2 * modes)
    at = 0
    for s in states:
        d = 2 * s.modes
        cov[at:at + d, at:at + d] = s.cov
        mean[at:at + d] = s.mean
        at += d
    return GaussianState(modes, cov, mean)


def phase_shift_symplectic(phis) -> SymplecticOp:
    """Block-diagonal per-mode phase rotation.

    Mode i picks up the 2x2 block ``[[cos phi_i, sin phi_i], [-sin phi_i, cos phi_i]]``,
    the phase-space image of ``exp(-i phi_i n_i)``.
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    S = np.zeros((2 * len(phis), 2 * len(phis)))
    for i, phi in enumerate(phis):
        c, s = math.cos(phi), math.sin(phi)
        S[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[c, s], [-s, c]]
    return SymplecticOp(S)


def beam_splitter_symplectic(i: int, j: int, theta: float, modes: int) -> SymplecticOp:
    """Beam splitter mixing modes i and j by angle theta.

    Acts as the rotation ``[[cos t, -sin t], [sin t, cos t]]`` on the pairs
    (x_i, x_j) and (p_i, p_j); theta = pi/2 swaps the modes up to a sign.  The
    sign convention makes the cascades built by ``probes.synthesize_oegs_bsn``
    reproduce the symmetric-state covariances exactly.
    """
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    if not (0 <= i < modes and 0 <= j < modes):
        raise ValueError(f"mode indices ({i}, {j}) out of range for {modes} modes")
    S = np.eye(2 * modes)
    c, s = math.cos(theta), math.sin(theta)
    for q in (0, 1):  # same rotation on x and p quadratures
        a, b = 2 * i + q, 2 * j + q
        S[a, a] = c
        S[a, b] = -s
        S[b, a] = s
        S[b, b] = c
    return SymplecticOp(S)


def single_mode_squeezer(r: float) -> SymplecticOp:
    """Single-mode squeezer diag(e^r, e^-r); r > 0 squeezes p."""
    if not math.isfinite(r):
        raise ValueError("squeezing parameter must be finite")
    return SymplecticOp(np.diag([np.exp(r), np.exp(-r)]))


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    """Congruence action cov -> S cov S^T, mean -> S mean."""
    if op.modes != state.modes:
        raise ValueError(
            f"operation acts on {op.modes} modes but state has {state.modes}"
        )
    S = op.matrix
    cov = S @ state.cov @ S.T
    return GaussianState(state.modes, 0.5 * (cov + cov.T), S @ state.mean)


def apply_loss(state: GaussianState, channel: LossChannel) -> GaussianState:
    """Uniform photon loss: cov -> eta cov + (1-eta)/2 I, mean -> sqrt(eta) mean."""
    eta = channel.eta
    cov = eta * state.cov + 0.5 * (1 - eta) * np.eye(2 * state.modes)
    return GaussianState(state.modes, cov, math.sqrt(eta) * state.mean)


def mean_photon_number(state: GaussianState) -> float:
    """Total mean photon number, summing thermal/squeezing and displacement energy."""
    total = 0.0
    for i in range(state.modes):
        x, p = 2 * i, 2 * i + 1
        total += 0.5 * (state.cov[x, x] + state.cov[p, p] - 1.0)
        total += 0.5 * (state.mean[x] ** 2 + state.mean[p] ** 2)
    return total


def photon_number_variance(state: GaussianState, mode: int) -> float:
    """Photon-number variance of one mode of a Gaussian state.

    Exact for modes uncorrelated with the rest (product states); used as the
    independent cross-check for generator variances.
    """
    if not 0 <= mode < state.modes:
        raise ValueError(f"mode {mode} out of range")
    blk = state.cov[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2]
    d = state.mean[2 * mode:2 * mode + 2]
    return 0.5 * (np.trace(blk @ blk) - 0.5) + d @ blk @ d


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    """Symplectic spectrum of the state, sorted descending; all 1/2 iff pure."""
    return _symplectic_spectrum(state.cov)


def is_pure(state: GaussianState, tol: float = DEFAULT_POLICY.pure_tol) -> bool:
    return bool(np.max(np.abs(symplectic_eigenvalues(state) - 0.5)) <= tol)
