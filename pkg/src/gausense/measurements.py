"""Classical Fisher information of homodyne and general Gaussian measurements,
closed-form lossy error bounds, homodyne/general-dyne crossing analysis, and
entanglement-enhancement ratios.

Homodyne outcomes on a symmetric (possibly lossy) M-mode state are jointly
Gaussian with zero mean and the M x M covariance built by
:func:`homodyne_covariance`; the angles that matter are the relative angles
``phi_i - theta_HD,i`` between the true phases and the local-oscillator
settings.  General Gaussian measurements are modeled at the Fisher-information
level through their pure seed covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GaussianState,
    NumericError,
    _readonly,
    _symplectic_spectrum,
)
from .fisher import (
    FisherMatrix,
    SensingScenario,
    WeightVector,
    covariance_phase_derivatives,
)
from .opt1d import golden_section_min
from .probes import SymmetricParams, oegs_state


@dataclass(frozen=True)
class HomodyneConfig:
    """Per-mode homodyne angles together with the operating-point phases."""

    angles: np.ndarray            # local-oscillator angles theta_HD,i
    operating_point: np.ndarray   # true phases phi_i

    def __post_init__(self):
        ang = np.atleast_1d(np.asarray(self.angles, dtype=float))
        op = np.atleast_1d(np.asarray(self.operating_point, dtype=float))
        if ang.shape != op.shape or ang.ndim != 1:
            raise ValueError("angles and operating point must be equal-length vectors")
        object.__setattr__(self, "angles", _readonly(ang))
        object.__setattr__(self, "operating_point", _readonly(op))

    @property
    def modes(self) -> int:
        return len(self.angles)

    @property
    def relative_angles(self) -> np.ndarray:
        return self.operating_point - self.angles

    @classmethod
    def from_relative(cls, relative, operating_point=None) -> "HomodyneConfig":
        rel = np.atleast_1d(np.asarray(relative, dtype=float))
        op = np.zeros_like(rel) if operating_point is None else np.asarray(operating_point, float)
        return cls(op - rel, op)


@dataclass(frozen=True)
class GaussianMeasurement:
    """General-dyne measurement defined by the covariance of its pure seed state."""

    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("seed covariance must be square of even size")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ValueError("seed covariance must be symmetric")
        nus = _symplectic_spectrum(cov)
        if np.max(np.abs(nus - 0.5)) > 1e-8:
            raise ValueError("the measurement seed state must be pure")
        object.__setattr__(self, "cov", _readonly(cov))

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    @classmethod
    def heterodyne(cls, modes: int) -> "GaussianMeasurement":
        """Vacuum seed on every mode."""
        return cls(0.5 * np.eye(2 * modes))

    @classmethod
    def entangled_seed(cls, seed_energy: float, modes: int) -> "GaussianMeasurement":
        """Seed with the optimal-entangled-state covariance at the given energy."""
        if seed_energy <= 0:
            return cls.heterodyne(modes)
        return cls(oegs_state(seed_energy, modes).cov)


def _outcome_model(params: SymmetricParams, relative_angles: np.ndarray):
    """Outcome covariance and its per-phase derivatives for given relative angles."""
    v = relative_angles
    c, s = np.cos(v), np.sin(v)
    cov = params.eps1 * np.outer(c, c) + params.eps2 * np.outer(s, s)
    np.fill_diagonal(cov, params.gamma1 * c**2 + params.gamma2 * s**2)
    derivs = []
    for k in range(len(v)):
        row = -params.eps1 * s[k] * c + params.eps2 * c[k] * s
        row[k] = (params.gamma2 - params.gamma1) * math.sin(2 * v[k])
        d = np.zeros_like(cov)
        d[k, :] = row
        d[:, k] = row
        derivs.append(d)
    return cov, derivs


def homodyne_covariance(params: SymmetricParams, config: HomodyneConfig) -> np.ndarray:
    """Outcome covariance of per-mode homodyne on a symmetric state.

    Entry (i, i) is g1 cos^2 v_i + g2 sin^2 v_i and entry (i, j) is
    e1 cos v_i cos v_j + e2 sin v_i sin v_j, with v the relative angles.
    """
    if config.modes != params.modes:
        raise ValueError("homodyne configuration does not match the mode count")
    cov, _ = _outcome_model(params, config.relative_angles)
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError("homodyne outcome covariance is not positive definite") from exc
    return cov


def homodyne_fim(params: SymmetricParams, config: HomodyneConfig) -> FisherMatrix:
    """Classical FIM of per-mode homodyne detection,
    F_ij = Tr[V^-1 dV_i V^-1 dV_j] / 2 for the Gaussian outcome model."""
    if config.modes != params.modes:
        raise ValueError("homodyne configuration does not match the mode count")
    cov, derivs = _outcome_model(params, config.relative_angles)
    try:
        cov_inv = np.linalg.inv(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError("homodyne outcome covariance is singular") from exc
    lifted = [cov_inv @ d for d in derivs]
    m = params.modes
    F = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            F[i, j] = F[j, i] = 0.5 * np.trace(lifted[i] @ lifted[j])
    return FisherMatrix(F)


def optimal_homodyne_angle(energy: float) -> float:
    """Lossless optimal relative angle pi/2 - arccot(2 sqrt(N(N+1)))/2."""
    if energy <= 0:
        raise ValueError("energy must be positive")
    return math.pi / 2 - 0.5 * math.atan(1.0 / (2 * math.sqrt(energy * (energy + 1))))


def optimal_homodyne_config(energy: float, operating_point) -> HomodyneConfig:
    """Homodyne settings theta_i = phi_i - phi_opt for a known operating point."""
    op = np.atleast_1d(np.asarray(operating_point, dtype=float))
    return HomodyneConfig(op - optimal_homodyne_angle(energy), op)


def optimize_homodyne_angle(params: SymmetricParams,
                            w: WeightVector | None = None) -> tuple[float, float]:
    """Best common relative angle for estimating phi* = w . phi by homodyne.

    Returns (angle, bound).  For lossless optimal probes the result coincides
    with :func:`optimal_homodyne_angle`; for lossy states the optimum shifts.
    """
    from .fisher import crb_linear

    if w is None:
        w = WeightVector.uniform(params.modes)

    def bound(phi: float) -> float:
        config = HomodyneConfig.from_relative(np.full(params.modes, phi))
        return crb_linear(homodyne_fim(params, config), w)

    eps = 1e-9
    return golden_section_min(bound, eps, math.pi / 2 - eps, tol=1e-10)


@dataclass(frozen=True)
class LossyBounds:
    """Closed-form error bounds at transmissivity eta.

    ``opgs_q`` and ``oegs_q`` are the quadratic (generator-variance) bounds
    obtained by carrying the lossless optimality chain through the loss map;
    for eta < 1 they are looser (smaller) than the exact mixed-state
    Cramér-Rao bound computed by :func:`gausense.fisher.qfim_general`.
    ``opgs_hd`` / ``oegs_hd`` are attained by per-mode homodyne at the optimal
    angles, ``oegs_gd`` by the optimal entangled-seed general-dyne measurement.
    """

    opgs_q: float
    oegs_q: float
    opgs_hd: float
    oegs_hd: float
    oegs_gd: float


def lossy_bounds(scenario: SensingScenario) -> LossyBounds:
    N, M, eta = scenario.energy, scenario.modes, scenario.eta
    if N <= 0:
        raise ValueError("energy must be positive")
    if eta == 0:
        inf = math.inf
        return LossyBounds(inf, inf, inf, inf, inf)
    u = N * eta * (1 - eta)
    return LossyBounds(
        opgs_q=1.0 / (4 * N * eta * (2 * N * eta / M + eta + 1)),
        oegs_q=1.0 / (4 * N * eta * (2 * N * eta + eta + 1)),
        opgs_hd=(4 * u + M) / (8 * eta**2 * N * (N + M)),
        oegs_hd=(4 * u + 1) / (8 * eta**2 * N * (N + 1)),
        oegs_gd=(2 * u + 1 + math.sqrt(1 + 4 * u)) / (8 * eta**2 * N * (N + 1)),
    )


def hd_gd_boundary(eta: float) -> float:
    """Energy at which homodyne and general-dyne errors cross: (1+sqrt 2)/(2 eta (1-eta)).

    Above the boundary the general-dyne bound is smaller; the curve attains
    its minimum 2 (1 + sqrt 2) at eta = 1/2.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError("the boundary is defined for eta strictly inside (0, 1)")
    return (1 + math.sqrt(2.0)) / (2 * eta * (1 - eta))


def general_dyne_fim(probe_lossy: GaussianState, meas: GaussianMeasurement) -> FisherMatrix:
    """Classical FIM of a general-dyne measurement on a phase-encoded probe,
    F_ij = Tr[(G + G_M)^-1 dG_i (G + G_M)^-1 dG_j] / 2 at the operating point."""
    if meas.modes != probe_lossy.modes:
        raise ValueError("measurement seed does not match the probe mode count")
    total = probe_lossy.cov + meas.cov
    try:
        total_inv = np.linalg.inv(total)
    except np.linalg.LinAlgError as exc:
        raise NumericError("probe + seed covariance is singular") from exc
    lifted = [total_inv @ d for d in covariance_phase_derivatives(probe_lossy.cov)]
    m = probe_lossy.modes
    F = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            F[i, j] = F[j, i] = 0.5 * np.trace(lifted[i] @ lifted[j])
    return FisherMatrix(F)


def optimal_gd_bound(probe_lossy: GaussianState, w: WeightVector | None = None,
                     seed_energy_max: float | None = None) -> tuple[float, float]:
    """Minimize the general-dyne bound over the entangled-seed energy.

    Returns (bound, seed_energy).  The search interval defaults to
    [0, 10 (N_probe + 1)] in the seed energy; pass ``seed_energy_max`` to widen
    it (e.g. 10 N (1 + 1/eta) when the pre-loss energy N is known).
    """
    from .core import mean_photon_number
    from .fisher import crb_linear

    modes = probe_lossy.modes
    if w is None:
        w = WeightVector.uniform(modes)
    if seed_energy_max is None:
        seed_energy_max = 10.0 * (mean_photon_number(probe_lossy) + 1.0)

    def bound(seed_energy: float) -> float:
        meas = GaussianMeasurement.entangled_seed(seed_energy, modes)
        return crb_linear(general_dyne_fim(probe_lossy, meas), w)

    seed, best = golden_section_min(bound, 0.0, seed_energy_max, tol=1e-10)
    return best, seed


@dataclass(frozen=True)
class EnhancementRatios:
    """Entanglement gain: error of the product probe over the entangled probe."""

    r_opt: float   # ratio of the quadratic bounds (optimal measurement assumed)
    r_hd: float    # ratio of the homodyne bounds


def enhancement_ratios(scenario: SensingScenario) -> EnhancementRatios:
    if scenario.eta <= 0:
        raise ValueError("ratios require eta > 0")
    b = lossy_bounds(scenario)
    return EnhancementRatios(r_opt=b.opgs_q / b.oegs_q, r_hd=b.opgs_hd / b.oegs_hd)
