"""Orbital-element and Delaunay coordinate charts, and resonance bookkeeping.

The two charts are related by

    L = sqrt(mu_E a),   G = L sqrt(1 - e^2),   H = G cos i,

with the three angles (M, omega, Omega) common to both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import Constants, DEFAULT_CONSTANTS
from .errors import DomainError

TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    x = math.fmod(x, TWO_PI)
    return x + TWO_PI if x < 0.0 else x


@dataclass(frozen=True)
class OrbitalElements:
    """Keplerian elements (a [km], e, i [rad], M, omega, Omega [rad])."""

    a: float
    e: float
    i: float
    M: float
    omega: float
    Omega: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise DomainError(f"semimajor axis must be positive, got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise DomainError(f"eccentricity must be in [0, 1), got {self.e}")
        if not 0.0 <= self.i <= math.pi:
            raise DomainError(f"inclination must be in [0, pi], got {self.i}")
        for name in ("M", "omega", "Omega"):
            object.__setattr__(self, name, wrap_angle(getattr(self, name)))


@dataclass(frozen=True)
class DelaunayState:
    """Delaunay action-angle variables (L, G, H [km^2/s], M, omega, Omega [rad])."""

    L: float
    G: float
    H: float
    M: float
    omega: float
    Omega: float

    def __post_init__(self):
        if not (self.L >= self.G >= abs(self.H)) or self.G <= 0.0:
            raise DomainError(
                f"Delaunay actions must satisfy L >= G >= |H| > 0, "
                f"got L={self.L}, G={self.G}, H={self.H}"
            )
        for name in ("M", "omega", "Omega"):
            object.__setattr__(self, name, wrap_angle(getattr(self, name)))


#: Resonances with a cataloged location (orbital period : Earth rotation).
KNOWN_RESONANCES = (
    (1, 1), (2, 1), (3, 1), (3, 2), (4, 1),
    (4, 3), (5, 1), (5, 2), (5, 3), (5, 4),
)

#: The eight resonances covered by the term catalogs and analysis operations.
MINOR_RESONANCES = ((3, 1), (3, 2), (4, 1), (4, 3), (5, 1), (5, 2), (5, 3), (5, 4))


@dataclass(frozen=True)
class ResonanceId:
    """A j:l commensurability between debris revolution and Earth rotation."""

    j: int
    ell: int

    def __post_init__(self):
        if self.j < 1 or self.ell < 1:
            raise DomainError(f"resonance indices must be >= 1, got {self.j}:{self.ell}")
        if math.gcd(self.j, self.ell) != 1:
            raise DomainError(f"resonance {self.j}:{self.ell} is not gcd-reduced")

    @classmethod
    def parse(cls, text: str) -> "ResonanceId":
        """Parse 'j:l' notation, e.g. '4:1'."""
        try:
            j, ell = (int(part) for part in text.split(":"))
        except (ValueError, TypeError):
            raise DomainError(f"cannot parse resonance id {text!r}, expected 'j:l'")
        return cls(j, ell)

    def __str__(self) -> str:
        return f"{self.j}:{self.ell}"

    @property
    def is_minor(self) -> bool:
        return (self.j, self.ell) in MINOR_RESONANCES


def elements_to_delaunay(el: OrbitalElements, c: Constants = DEFAULT_CONSTANTS) -> DelaunayState:
    """Convert orbital elements to Delaunay variables (angles unchanged)."""
    L = math.sqrt(c.mu_E * el.a)
    G = L * math.sqrt(1.0 - el.e**2)
    return DelaunayState(L, G, G * math.cos(el.i), el.M, el.omega, el.Omega)


def delaunay_to_elements(st: DelaunayState, c: Constants = DEFAULT_CONSTANTS) -> OrbitalElements:
    """Convert Delaunay variables to orbital elements (angles unchanged)."""
    a = st.L**2 / c.mu_E
    ratio = st.G / st.L
    e = math.sqrt(max(0.0, 1.0 - ratio * ratio))
    cos_i = min(1.0, max(-1.0, st.H / st.G))
    return OrbitalElements(a, e, math.acos(cos_i), st.M, st.omega, st.Omega)


def resonance_semimajor_axis(r: ResonanceId, c: Constants = DEFAULT_CONSTANTS) -> float:
    """Location of the j:l resonance: a = (j/l)^(-2/3) * a_geo [km]."""
    return (r.j / r.ell) ** (-2.0 / 3.0) * c.a_geo


def resonant_action(r: ResonanceId, mu: float = 1.0) -> float:
    """Resonant value of the action L in units where theta_dot = 1.

    With the default normalized gravitational parameter (mu = 1) this is
    (l/j)^(1/3); the corresponding semimajor axis L^2/mu reproduces
    ``resonance_semimajor_axis`` after rescaling by a_geo.
    """
    return (r.ell * mu * mu / r.j) ** (1.0 / 3.0)


def resonant_angle(r: ResonanceId, M: float, theta: float, omega: float, Omega: float) -> float:
    """Stroboscopic resonant angle sigma_jl = l*M - j*theta + l*omega + j*Omega, mod 2*pi."""
    return wrap_angle(r.ell * (M + omega) + r.j * (Omega - theta))


def mean_anomaly_from_sigma(
    r: ResonanceId, sigma: float, theta: float, omega: float, Omega: float
) -> float:
    """Invert ``resonant_angle`` for M at given theta, omega, Omega."""
    return wrap_angle((sigma - r.ell * omega - r.j * (Omega - theta)) / r.ell)
