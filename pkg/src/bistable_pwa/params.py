"""Parameter containers for the bi-stable point wave absorber model.

The model is the dimensionless heave equation of a spherical buoy with a
negative linear / cubic restoring force (bi-stable potential), a radiation
convolution kernel realized as a third-order state space, and a one-way
coupled harvesting circuit::

    Y'' + delta1 * conv(hbar, Y') + delta2 * Y' - omega_n**2 Y + gamma Y**3
        = g_wave cos(Omega t),
    v' + theta v = Y'.

All quantities are dimensionless.  Displacement is scaled by the buoy
radius ``R`` and time by ``sqrt(R/g)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "KernelConstants",
    "BuoyGeometry",
    "NondimParams",
    "default_kernel",
    "default_params",
]


@dataclass(frozen=True)
class KernelConstants:
    """Analytic radiation-kernel constants and their state-space realization.

    The impulse response is ``hbar(t) = exp(-mu t) * (lam1 + lam2 cos(mu t)
    + lam3 sin(mu t))`` and equals ``C @ expm(A t) @ B`` of the realized
    triple up to rounding of the published constants.
    """

    mu: float = 0.8
    lam1: float = -0.44
    lam2: float = 0.62
    lam3: float = 0.24
    A: np.ndarray = field(
        default_factory=lambda: 0.8 * np.array(
            [[-1.0, 1.0, 1.0], [-1.0, 0.0, 0.0], [-1.0, 0.0, -2.0]]
        )
    )
    B: np.ndarray = field(
        default_factory=lambda: np.array([-0.48, -0.02, -0.22])
    )
    C: np.ndarray = field(
        default_factory=lambda: np.array([-0.46, 0.0, 0.18])
    )


@dataclass(frozen=True)
class BuoyGeometry:
    """Dimensional description of the hemispherical buoy.

    Only used when dimensional outputs are requested; every solver runs on
    the dimensionless groups.  ``M = (2/3) pi R^3 rho`` is the reference
    (displaced hemisphere) mass.
    """

    R: float = 5.0
    rho: float = 1025.0
    grav: float = 9.81
    mass: float | None = None
    added_mass_inf: float | None = None

    def __post_init__(self):
        if min(self.R, self.rho, self.grav) <= 0.0:
            raise ValueError("geometry entries must be strictly positive")

    @property
    def M(self) -> float:
        """Reference mass of the displaced hemisphere."""
        return (2.0 / 3.0) * np.pi * self.R**3 * self.rho

    @property
    def m(self) -> float:
        """Buoy mass; defaults to neutral buoyancy (m = M)."""
        return self.M if self.mass is None else self.mass

    @property
    def m_inf(self) -> float:
        """Infinite-frequency added mass; defaults to M/2 (heave hemisphere)."""
        return 0.5 * self.M if self.added_mass_inf is None else self.added_mass_inf


@dataclass(frozen=True)
class NondimParams:
    """Dimensionless parameter group driving every solver.

    Attributes
    ----------
    delta1 : float
        Coefficient of the radiation convolution term.
    delta2 : float
        Linear (power-take-off) damping coefficient.
    omega_n : float
        Magnitude of the negative linear stiffness frequency.
    gamma : float
        Cubic stiffness coefficient.
    theta : float
        Harvesting-circuit time-constant group (one-way coupled).
    """

    delta1: float = 1.4
    delta2: float = 0.13
    omega_n: float = 0.78
    gamma: float = 50.0
    theta: float = 1.0
    kernel: KernelConstants = field(default_factory=KernelConstants)

    def __post_init__(self):
        if self.omega_n <= 0.0 or self.gamma <= 0.0:
            raise ValueError("bi-stability requires omega_n > 0 and gamma > 0")
        if self.delta2 < 0.0:
            raise ValueError("delta2 must be non-negative")

    # ---- derived quantities of the bi-stable potential -------------------
    @property
    def Y_s(self) -> float:
        """Stable-equilibrium offset sqrt(omega_n^2 / gamma)."""
        return np.sqrt(self.omega_n**2 / self.gamma)

    @property
    def omega_o(self) -> float:
        """Linear oscillation frequency about either well, sqrt(2) omega_n."""
        return np.sqrt(2.0) * self.omega_n

    @property
    def eta(self) -> float:
        """Quadratic stiffness of the well-local expansion, 3 gamma Y_s."""
        return 3.0 * self.gamma * self.Y_s

    @property
    def kappa(self) -> float:
        """Cubic frequency-response coefficient of the well-local dynamics."""
        wo = self.omega_o
        return 5.0 * self.eta**2 / (12.0 * wo**3) - 3.0 * self.gamma / (8.0 * wo)

    @property
    def barrier(self) -> float:
        """Potential barrier height between a well and the saddle."""
        return self.omega_n**4 / (4.0 * self.gamma)

    def potential(self, Y):
        """Bi-stable potential U(Y) = -omega_n^2 Y^2 / 2 + gamma Y^4 / 4."""
        Y = np.asarray(Y, dtype=float)
        return -0.5 * self.omega_n**2 * Y**2 + 0.25 * self.gamma * Y**4

    def with_(self, **kw) -> "NondimParams":
        """Return a copy with the given fields replaced."""
        return replace(self, **kw)


def default_kernel() -> KernelConstants:
    """Kernel constants of the realized hemispherical-buoy radiation model."""
    return KernelConstants()


def default_params(**overrides) -> NondimParams:
    """Reference dimensionless parameter set (hemispherical buoy WEC)."""
    return NondimParams(**overrides)
