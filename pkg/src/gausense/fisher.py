"""Quantum Fisher information for distributed phase sensing and Cramér-Rao bounds.

The parameter family is always the independent per-mode phase map
``cov -> S(phi) cov S(phi)^T``, ``mean -> S(phi) mean`` evaluated at phi = 0
(the information matrices are independent of the operating point for unitary
phase encoding).  Three engines are provided:

* :func:`qfim_pure` - closed form for pure probes;
* :func:`qfim_isothermal` - closed form for probes whose symplectic spectrum
  is flat (all eigenvalues ``n_bar + 1/2``);
* :func:`qfim_general` - any physical Gaussian probe, via the phase-space
  linear system for the symmetric logarithmic derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_POLICY,
    GaussianState,
    NumericError,
    _readonly,
    symplectic_eigenvalues,
    symplectic_form,
)


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric positive-semidefinite information matrix (1 / rad^2 per trial)."""

    entries: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError(f"information matrix must be square, got {H.shape}")
        if np.max(np.abs(H - H.T)) > 1e-10 * max(1.0, np.max(np.abs(H))):
            raise ValueError("information matrix is not symmetric")
        if np.linalg.eigvalsh(0.5 * (H + H.T)).min() < -1e-9 * max(1.0, np.max(np.abs(H))):
            raise ValueError("information matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "entries", _readonly(0.5 * (H + H.T)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class WeightVector:
    """Coefficients of the linear combination phi* = sum_i w_i phi_i, with sum |w_i| = 1."""

    values: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("weights must form a nonempty vector")
        if abs(np.sum(np.abs(w)) - 1.0) > 1e-12:
            raise ValueError("weights must satisfy sum |w_i| = 1")
        object.__setattr__(self, "values", _readonly(w))

    @classmethod
    def uniform(cls, modes: int) -> "WeightVector":
        return cls(np.full(modes, 1.0 / modes))

    @classmethod
    def normalized(cls, values) -> "WeightVector":
        w = np.asarray(values, dtype=float)
        norm = np.sum(np.abs(w))
        if norm <= 0:
            raise ValueError("cannot normalize an all-zero weight vector")
        return cls(w / norm)

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SensingScenario:
    """Input record for bound and figure computations."""

    modes: int
    energy: float                 # total mean photon number N
    weights: WeightVector
    eta: float = 1.0              # loss-channel transmissivity

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be positive")
        if self.energy < 0:
            raise ValueError("energy must be nonnegative")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.weights.dim != self.modes:
            raise ValueError("weight vector length must equal the mode count")

    @property
    def per_mode_energy(self) -> float:
        return self.energy / self.modes

    @classmethod
    def uniform(cls, modes: int, energy: float | None = None,
                n_bar: float | None = None, eta: float = 1.0) -> "SensingScenario":
        """Uniform-weight scenario from either total energy or energy per mode."""
        if (energy is None) == (n_bar is None):
            raise ValueError("give exactly one of energy / n_bar")
        total = energy if energy is not None else n_bar * modes
        return cls(modes, total, WeightVector.uniform(modes), eta)


@dataclass(frozen=True)
class UltimateBounds:
    sql: float
    opgs: float
    oegs: float


def phase_generators(modes: int) -> list[np.ndarray]:
    """Derivatives D_i of the phase-shift symplectic at phi = 0."""
    gens = []
    for i in range(modes):
        D = np.zeros((2 * modes, 2 * modes))
        D[2 * i, 2 * i + 1] = 1.0
        D[2 * i + 1, 2 * i] = -1.0
        gens.append(D)
    return gens


def covariance_phase_derivatives(cov: np.ndarray) -> list[np.ndarray]:
    """Analytic derivatives of the phase-encoded covariance at the operating point."""
    modes = cov.shape[0] // 2
    return [D @ cov - cov @ D for D in phase_generators(modes)]


def _require_pure(state: GaussianState, what: str) -> None:
    nus = symplectic_eigenvalues(state)
    worst = nus[np.argmax(np.abs(nus - 0.5))]
    if abs(worst - 0.5) > DEFAULT_POLICY.pure_tol:
        raise ValueError(
            f"{what} requires a pure probe; offending symplectic eigenvalue {worst!r}"
        )


def qfim_pure(probe: GaussianState) -> FisherMatrix:
    """QFIM of a pure Gaussian probe under independent per-mode phase shifts.

    H_ij = 2 Tr[G_ij G_ji] - delta_ij + (O2 d_i)^T [G^-1]_ij (O2 d_j), in terms
    of the 2x2 blocks of the probe covariance G and mean d.
    """
    _require_pure(probe, "qfim_pure")
    M = probe.modes
    cov, mean = probe.cov, probe.mean
    cov_inv = np.linalg.inv(cov)
    omega2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    rot = [omega2 @ mean[2 * i:2 * i + 2] for i in range(M)]
    H = np.empty((M, M))
    for i in range(M):
        for j in range(i, M):
            bij = cov[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            bji = cov[2 * j:2 * j + 2, 2 * i:2 * i + 2]
            val = 2.0 * np.trace(bij @ bji) - (1.0 if i == j else 0.0)
            val += rot[i] @ cov_inv[2 * i:2 * i + 2, 2 * j:2 * j + 2] @ rot[j]
            H[i, j] = H[j, i] = val
    return FisherMatrix(H)


def qfim_isothermal(probe: GaussianState, n_bar: float) -> FisherMatrix:
    """QFIM for an isothermal probe (all symplectic eigenvalues n_bar + 1/2)."""
    nus = symplectic_eigenvalues(probe)
    if np.max(np.abs(nus - (n_bar + 0.5))) > DEFAULT_POLICY.pure_tol:
        raise ValueError(
            f"probe is not isothermal at n_bar={n_bar}: symplectic spectrum {nus}"
        )
    M = probe.modes
    omega = symplectic_form(M)
    d_cov = covariance_phase_derivatives(probe.cov)
    d_mean = [D @ probe.mean for D in phase_generators(M)]
    cov_inv = np.linalg.inv(probe.cov)
    scale = 1.0 / (2 * n_bar**2 + 2 * n_bar + 1)
    H = np.empty((M, M))
    for i in range(M):
        oi = omega @ d_cov[i]
        for j in range(i, M):
            val = scale * np.trace(oi @ omega @ d_cov[j])
            val += d_mean[i] @ cov_inv @ d_mean[j]
            H[i, j] = H[j, i] = val
    return FisherMatrix(H)


def qfim_general(probe: GaussianState) -> FisherMatrix:
    """QFIM of an arbitrary physical Gaussian probe.

    Solves the phase-space symmetric-logarithmic-derivative equation
    ``dG_i = 2 G A_i G - (1/2) Omega A_i Omega^T`` in vectorized form and
    returns ``H_ij = Tr[dG_i A_j] + dd_i^T G^-1 dd_j``.  Probes with pure
    directions in their symplectic spectrum make the linear system singular;
    the covariance is then blended with a slightly thermal target, introducing
    a relative error of order the blend epsilon (1e-9 by default).
    """
    M = probe.modes
    cov = np.asarray(probe.cov)
    nus = symplectic_eigenvalues(probe)
    if nus.min() < 0.5 + 100 * DEFAULT_POLICY.reg_epsilon:
        eps = DEFAULT_POLICY.reg_epsilon
        target = (np.mean(nus) + 0.5) * np.eye(2 * M)
        cov = (1 - eps) * cov + eps * target
    omega = symplectic_form(M)
    d_cov = covariance_phase_derivatives(cov)
    d_mean = [D @ probe.mean for D in phase_generators(M)]
    sld_op = 2.0 * np.kron(cov, cov) - 0.5 * np.kron(omega, omega)
    rhs = np.column_stack([dG.reshape(-1) for dG in d_cov])
    try:
        sld = np.linalg.solve(sld_op, rhs)
        cov_inv = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            "singular SLD system beyond regularization "
            f"(condition number {np.linalg.cond(sld_op):.3e})"
        ) from exc
    H = np.empty((M, M))
    for i in range(M):
        vi = d_cov[i].reshape(-1)
        for j in range(M):
            H[i, j] = vi @ sld[:, j] + d_mean[i] @ cov_inv @ d_mean[j]
    return FisherMatrix(0.5 * (H + H.T))


def _support_decomposition(H: FisherMatrix):
    vals, vecs = np.linalg.eigh(H.entries)
    cutoff = DEFAULT_POLICY.support_cutoff * max(float(vals.max()), 0.0)
    on = vals > cutoff
    return vals, vecs, on


def crb_linear(H: FisherMatrix, w: WeightVector) -> float:
    """Cramér-Rao bound w^T H^+ w for phi* = w . phi, with H^+ the support inverse.

    Returns +inf when the weight vector has a component outside the support of
    H (that combination of phases carries no information).
    """
    if w.dim != H.dim:
        raise ValueError("weight vector length must match the information matrix")
    vals, vecs, on = _support_decomposition(H)
    comps = vecs.T @ w.values
    outside = math.sqrt(float(np.sum(comps[~on] ** 2)))
    if outside > 1e-9 * np.linalg.norm(w.values):
        return math.inf
    return float(np.sum(comps[on] ** 2 / vals[on]))


def crb_trace(H: FisherMatrix) -> float:
    """Simultaneous-estimation bound Tr[H^+] over the support of H.

    For a symmetric-structure matrix (H11 on the diagonal, H12 off it) this
    reproduces the spectral split (M-1)/(H11-H12) + 1/(H11+(M-1)H12), dropping
    the first term when H11 = H12.
    """
    vals, _, on = _support_decomposition(H)
    if not np.any(on):
        return math.inf
    return float(np.sum(1.0 / vals[on]))


def generator_variance(probe: GaussianState, w: WeightVector) -> float:
    """Variance of the generator sum_i w_i n_i on a pure probe, via w^T H w / 4."""
    _require_pure(probe, "generator_variance")
    H = qfim_pure(probe)
    if w.dim != H.dim:
        raise ValueError("weight vector length must match the probe mode count")
    return float(w.values @ H.entries @ w.values) / 4.0


def ultimate_bounds(scenario: SensingScenario) -> UltimateBounds:
    """Lossless uniform-weight benchmarks: coherent (SQL), product and entangled probes."""
    N, M = scenario.energy, scenario.modes
    if N <= 0:
        return UltimateBounds(math.inf, math.inf, math.inf)
    return UltimateBounds(
        sql=1.0 / (4 * N),
        opgs=M / (8 * N * (N + M)),
        oegs=1.0 / (8 * N * (N + 1)),
    )
