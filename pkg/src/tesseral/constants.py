"""Physical constants and the normalized unit system.

All Hamiltonian-side computation uses normalized units in which the Earth
rotation rate is 1, the geosynchronous semimajor axis is the unit of length
and the Earth gravitational parameter is 1.  Public interfaces convert back
to km / s / degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Constants:
    """Physical constants of the Earth / Sun / Moon system.

    Attributes
    ----------
    mu_E : float
        Earth gravitational parameter [km^3/s^2].
    R_E : float
        Earth equatorial radius [km].
    theta_dot : float
        Earth rotation rate [rad/s].
    a_geo : float
        Geosynchronous semimajor axis (mu_E / theta_dot^2)^(1/3) [km].
    mu_S, mu_M : float
        Sun and Moon gravitational parameters [km^3/s^2].
    P_r : float
        Solar radiation pressure at 1 AU [N/m^2].
    a_S : float
        One astronomical unit [km].
    """

    mu_E: float = 398600.4415
    R_E: float = 6378.1363
    theta_dot: float = 2.0 * math.pi / 86164.0905
    mu_S: float = 1.32712440018e11
    mu_M: float = 4902.800066
    P_r: float = 4.56e-6
    a_S: float = 1.495978707e8
    a_geo: float = field(init=False)

    def __post_init__(self):
        for name in ("mu_E", "R_E", "theta_dot", "mu_S", "mu_M", "P_r", "a_S"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name} must be strictly positive")
        object.__setattr__(
            self, "a_geo", (self.mu_E / self.theta_dot**2) ** (1.0 / 3.0)
        )

    # -- normalized unit system: length = a_geo, time = 1/theta_dot ---------

    @property
    def time_unit_s(self) -> float:
        """Seconds per normalized time unit."""
        return 1.0 / self.theta_dot

    @property
    def r_earth_norm(self) -> float:
        """Earth radius in units of a_geo."""
        return self.R_E / self.a_geo

    def km_from_norm(self, a: float) -> float:
        return a * self.a_geo

    def norm_from_km(self, a_km: float) -> float:
        return a_km / self.a_geo


#: Seconds in one sidereal day; ``SIDEREAL_DAY_TU`` is the same interval in
#: normalized time units (theta advances by 2*pi).
SIDEREAL_DAY_S = 86164.0905
SIDEREAL_DAY_TU = 2.0 * math.pi

DEFAULT_CONSTANTS = Constants()
