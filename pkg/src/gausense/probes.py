"""Probe-state catalog: coherent products, squeezed products (OPGS), the
symmetric Gaussian family and its optimal member (OEGS), beam-splitter-network
synthesis, reduced entropy, and the constrained family optimization.

Naming: OPGS = optimal product Gaussian state (squeezed vacua with
weight-matched energies); OEGS = optimal entangled Gaussian state (the
symmetric pure state minimizing the average-phase error at fixed energy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GaussianState,
    NumericError,
    SymplecticOp,
    beam_splitter_symplectic,
    coherent_state,
    product_state,
    squeezed_vacuum,
    vacuum_state,
    _readonly,
)
from .fisher import SensingScenario
from .opt1d import golden_section_min


@dataclass(frozen=True)
class SymmetricParams:
    """Block parameters of an M-mode symmetric Gaussian state.

    Diagonal 2x2 blocks are diag(gamma1, gamma2), off-diagonal blocks
    diag(eps1, eps2).  Members of the pure family additionally satisfy
    (g1-e1)(g2-e2) = 1/4 and (g1+(M-1)e1)(g2+(M-1)e2) = 1/4; lossy variants
    produced by :meth:`with_loss` are physical but mixed.
    """

    gamma1: float
    gamma2: float
    eps1: float
    eps2: float
    modes: int

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be positive")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("diagonal block variances must be positive")
        if self.modes == 1 and (self.eps1 or self.eps2):
            raise ValueError("a single-mode state has no off-diagonal blocks")
        nu_minus, nu_plus = self.normal_mode_spectrum()
        if min(nu_minus, nu_plus) < 0.5 - 1e-10:
            raise ValueError(
                f"unphysical symmetric blocks: normal-mode spectrum ({nu_minus}, {nu_plus})"
            )

    def normal_mode_spectrum(self) -> tuple[float, float]:
        """Symplectic eigenvalues (difference modes, collective mode)."""
        m = self.modes
        prod_minus = (self.gamma1 - self.eps1) * (self.gamma2 - self.eps2)
        prod_plus = (self.gamma1 + (m - 1) * self.eps1) * (self.gamma2 + (m - 1) * self.eps2)
        if prod_minus < 0 or prod_plus < 0:
            raise ValueError("unphysical symmetric blocks: negative normal-mode variance product")
        return math.sqrt(prod_minus), math.sqrt(prod_plus)

    def purity_residuals(self) -> tuple[float, float]:
        m = self.modes
        r1 = (self.gamma1 - self.eps1) * (self.gamma2 - self.eps2) - 0.25
        r2 = (self.gamma1 + (m - 1) * self.eps1) * (self.gamma2 + (m - 1) * self.eps2) - 0.25
        return r1, r2

    @property
    def mean_photon_number(self) -> float:
        return self.modes * (self.gamma1 + self.gamma2 - 1.0) / 2.0

    def with_loss(self, eta: float) -> "SymmetricParams":
        """Uniform loss on every mode: gamma -> eta gamma + (1-eta)/2, eps -> eta eps."""
        if not 0.0 <= eta <= 1.0:
            raise ValueError("transmissivity must lie in [0, 1]")
        return SymmetricParams(
            eta * self.gamma1 + 0.5 * (1 - eta),
            eta * self.gamma2 + 0.5 * (1 - eta),
            eta * self.eps1,
            eta * self.eps2,
            self.modes,
        )


@dataclass(frozen=True)
class EnergyAllocation:
    """Per-mode mean photon numbers distributing a total energy budget."""

    per_mode: np.ndarray

    def __post_init__(self):
        alloc = np.asarray(self.per_mode, dtype=float)
        if alloc.ndim != 1 or np.any(alloc < -1e-12):
            raise ValueError("per-mode energies must be a vector of nonnegative reals")
        object.__setattr__(self, "per_mode", _readonly(np.maximum(alloc, 0.0)))

    @property
    def total(self) -> float:
        return float(np.sum(self.per_mode))


def coherent_product_probe(scenario: SensingScenario) -> GaussianState:
    """Product of coherent states with energies N |w_i|, displaced along x."""
    if scenario.energy <= 0:
        raise ValueError("coherent probe needs positive energy")
    w = scenario.weights.values
    modes = [coherent_state(math.sqrt(2 * scenario.energy * abs(wi)), 0.0) for wi in w]
    return product_state(*modes)


def _opgs_objective(n: float) -> float:
    """Energy allocation rule for squeezed products: this quantity is set
    proportional to w_i^2 across modes."""
    return 8 * n * n * (n + 1) / (2 * n + 1)


def _invert_opgs_objective(target: float) -> float:
    if target <= 0:
        return 0.0
    hi = 1.0
    while _opgs_objective(hi) < target:
        hi *= 2.0
        if hi > 1e18:
            raise NumericError("energy allocation inverse failed to bracket")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _opgs_objective(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def opgs_allocation(scenario: SensingScenario) -> EnergyAllocation:
    """Distribute the energy budget over modes for a squeezed-vacuum product.

    Solves 8 n_i^2 (n_i + 1) / (2 n_i + 1) = lambda w_i^2 under sum n_i = N by
    bisection on lambda; zero-weight modes receive vacuum.
    """
    w = scenario.weights.values
    N = scenario.energy
    wsq = w * w
    if np.allclose(wsq, wsq[0]):
        return EnergyAllocation(np.full(scenario.modes, N / scenario.modes))

    def total(lam: float) -> float:
        return sum(_invert_opgs_objective(lam * t) for t in wsq)

    lam_hi = 1.0
    for _ in range(200):
        if total(lam_hi) >= N:
            break
        lam_hi *= 2.0
    else:
        raise NumericError("energy allocation failed to bracket the multiplier")
    lam_lo = 0.0
    for _ in range(200):
        lam = 0.5 * (lam_lo + lam_hi)
        if total(lam) < N:
            lam_lo = lam
        else:
            lam_hi = lam
    lam = 0.5 * (lam_lo + lam_hi)
    alloc = np.array([_invert_opgs_objective(lam * t) for t in wsq])
    if abs(alloc.sum() - N) > 1e-9 * max(1.0, N):
        raise NumericError(
            f"energy allocation did not converge: sum {alloc.sum()!r} != {N!r}"
        )
    return EnergyAllocation(alloc)


def opgs_probe(scenario: SensingScenario) -> GaussianState:
    """Product of squeezed vacua with the weight-matched energy allocation."""
    if scenario.energy <= 0:
        raise ValueError("squeezed product probe needs positive energy")
    alloc = opgs_allocation(scenario)
    modes = [squeezed_vacuum(math.asinh(math.sqrt(n))) for n in alloc.per_mode]
    return product_state(*modes)


def symmetric_family(n_t: float, r: float, modes: int) -> SymmetricParams:
    """Pure symmetric state with gamma_{1,2} = n_t e^{+-2r}.

    The off-diagonal entries are fixed (up to the branch pairing + with e^{+2r})
    by the two purity constraints.  Requires n_t >= 1/2 and a nonnegative
    discriminant (4 n_t^2 - 1)(M (4 n_t^2 M - M + 4) - 4).
    """
    if n_t < 0.5 - 1e-12:
        raise ValueError("n_t must be at least 1/2 on the pure symmetric manifold")
    g1, g2 = n_t * math.exp(2 * r), n_t * math.exp(-2 * r)
    if modes == 1:
        if abs(n_t - 0.5) > 1e-9:
            raise ValueError("a single-mode pure state requires n_t = 1/2")
        return SymmetricParams(g1, g2, 0.0, 0.0, 1)
    disc = (4 * n_t**2 - 1) * (modes * (4 * n_t**2 * modes - modes + 4) - 4)
    if disc < -1e-12:
        raise ValueError("parameters lie outside the pure symmetric manifold")
    root = math.sqrt(max(disc, 0.0))
    base = 2 + 4 * n_t**2 * (modes - 2) - modes
    denom = 8 * n_t * (modes - 1)
    e1 = (base + root) / denom * math.exp(2 * r)
    e2 = (base - root) / denom * math.exp(-2 * r)
    return SymmetricParams(g1, g2, e1, e2, modes)


def oegs_params(energy: float, modes: int) -> SymmetricParams:
    """Closed-form optimal symmetric state at total energy N:
    gamma_{1,2} = 1/2 + eps_{1,2}, eps_{1,2} = (N +- sqrt(N(N+1))) / M."""
    if energy <= 0:
        raise ValueError("energy must be positive")
    root = math.sqrt(energy * (energy + 1.0))
    e1 = (energy + root) / modes
    e2 = (energy - root) / modes
    if modes == 1:
        return SymmetricParams(0.5 + e1, 0.5 + e2, 0.0, 0.0, 1)
    return SymmetricParams(0.5 + e1, 0.5 + e2, e1, e2, modes)


def symmetric_to_state(params: SymmetricParams) -> GaussianState:
    """Assemble the 2M x 2M covariance from the block parameters (zero mean)."""
    m = params.modes
    cov = np.zeros((2 * m, 2 * m))
    diag = np.diag([params.gamma1, params.gamma2])
    off = np.diag([params.eps1, params.eps2])
    for i in range(m):
        for j in range(m):
            cov[2 * i:2 * i + 2, 2 * j:2 * j + 2] = diag if i == j else off
    return GaussianState(m, cov, np.zeros(2 * m))


def oegs_state(energy: float, modes: int) -> GaussianState:
    return symmetric_to_state(oegs_params(energy, modes))


def synthesize_oegs_bsn(energy: float, modes: int) -> tuple[GaussianState, list[SymplecticOp]]:
    """Beam-splitter-network recipe for the optimal entangled state.

    Returns the input state (p-squeezed vacuum with sinh^2 r = N in mode 0,
    vacuum elsewhere) and the beam splitters in application order: the splitter
    between modes (j-1, j) has angle arccos(1/sqrt(M - j + 1)).
    """
    if energy <= 0:
        raise ValueError("energy must be positive")
    if modes < 1:
        raise ValueError("modes must be positive")
    r = math.asinh(math.sqrt(energy))
    if modes == 1:
        return squeezed_vacuum(r), []
    inputs = product_state(squeezed_vacuum(r), vacuum_state(modes - 1))
    ops = [
        beam_splitter_symplectic(j - 1, j, math.acos((modes - j + 1) ** -0.5), modes)
        for j in range(1, modes)
    ]
    return inputs, ops


def reduced_entropy(params: SymmetricParams) -> float:
    """Von Neumann entropy (nats) of the single-mode reduction.

    S = n ln(1 + 1/n) + ln(n + 1) with n = sqrt(gamma1 gamma2) - 1/2 the
    thermal occupation of the reduced mode.
    """
    prod = params.gamma1 * params.gamma2
    if prod < 0.25 - 1e-12:
        raise ValueError("gamma1 * gamma2 < 1/4: unphysical reduced state")
    n = math.sqrt(max(prod, 0.25)) - 0.5
    if n <= 1e-15:
        return 0.0
    return n * math.log1p(1.0 / n) + math.log1p(n)


def _family_at(r: float, energy: float, modes: int) -> SymmetricParams:
    n_t = (2 * energy / modes + 1) / (2 * math.cosh(2 * r))
    return symmetric_family(n_t, r, modes)


def _avg_phase_bound(params: SymmetricParams) -> float:
    h11 = 2 * (params.gamma1**2 + params.gamma2**2) - 1
    h12 = 2 * (params.eps1**2 + params.eps2**2)
    m = params.modes
    return 1.0 / (m * (h11 + (m - 1) * h12))

def _simultaneous_bound(params: SymmetricParams) -> float:
    h11 = 2 * (params.gamma1**2 + params.gamma2**2) - 1
    h12 = 2 * (params.eps1**2 + params.eps2**2)
    m = params.modes
    out = 1.0 / (h11 + (m - 1) * h12)
    if abs(h11 - h12) > 1e-14 * max(1.0, h11):
        out += (m - 1) / (h11 - h12)
    elif m > 1:
        return math.inf
    return out


def optimize_symmetric(energy: float, modes: int,
                       objective: str = "average-phase") -> tuple[SymmetricParams, float]:
    """Optimize the pure symmetric family at fixed energy.

    The family is scanned along r in [0, arccosh(2N/M + 1)/2] with n_t pinned
    by the energy constraint.  ``objective="average-phase"`` minimizes the
    uniform-weight error bound (recovering the closed-form optimum);
    ``objective="simultaneous"`` minimizes the trace bound (whose optimum is
    the product point eps = 0).
    """
    if objective not in ("average-phase", "simultaneous"):
        raise ValueError(f"unknown objective {objective!r}")
    if energy <= 0:
        raise ValueError("energy must be positive")
    score = _avg_phase_bound if objective == "average-phase" else _simultaneous_bound
    if modes == 1:
        params = oegs_params(energy, 1)
        return params, score(params)
    r_max = 0.5 * math.acosh(2 * energy / modes + 1)
    r_opt, best = golden_section_min(
        lambda r: score(_family_at(r, energy, modes)), 0.0, r_max, tol=1e-10
    )
    return _family_at(r_opt, energy, modes), best
