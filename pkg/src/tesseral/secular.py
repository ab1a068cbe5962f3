"""Secular (orbit-averaged) part of the geopotential and its derivatives.

Normalized units throughout (mu_E = 1, theta_dot = 1, lengths in a_geo):
the secular potential is the sum of the zonal J2, J3 and J4 averaged terms,

    R_sec = T_2010 + 2*T3 + 2*T4a + T_4020,

where the J3 and J4 pairs each contribute two identical terms.  In Delaunay
actions, with s^2 = 1 - H^2/G^2, u = e = sqrt(1 - G^2/L^2), v = e^2 and
w = 5/2 - (3/2) G^2/L^2:

    T_2010 = J2 R^2 (G^-3/4 - 3 H^2 G^-5/4) L^-3
    2*T3   = 2 J3 R^3 (15/16 s^3 - 3/4 s) u sin(omega) L^-3 G^-5
    2*T4a  = 3/2 J4 R^4 (-35/32 s^4 + 15/16 s^2) v cos(2 omega) L^-3 G^-7
    T_4020 = J4 R^4 (105/64 s^4 - 15/8 s^2 + 3/8) w L^-3 G^-7

All partial derivatives below are hand-differentiated from these forms and
are cross-checked against central finite differences in the test suite.
Functions accept floats, numpy arrays or complex arrays (the flow engine
uses complex-step differentiation through them).
"""

from __future__ import annotations

import numpy as np

from .coefficients import DEFAULT_COEFFICIENTS, HarmonicCoefficients
from .constants import Constants, DEFAULT_CONSTANTS
from .elements import DelaunayState, OrbitalElements, elements_to_delaunay
from .errors import DomainError


def _k_factors(hc: HarmonicCoefficients, R: float):
    k2 = hc.J(2, 0) * R**2
    k3 = 2.0 * hc.J(3, 0) * R**3
    k4a = 1.5 * hc.J(4, 0) * R**4
    k40 = hc.J(4, 0) * R**4
    return k2, k3, k4a, k40


def secular_value(L, G, H, omega, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                  R: float = DEFAULT_CONSTANTS.r_earth_norm):
    """R_sec(L, G, H, omega) in normalized energy units."""
    k2, k3, k4a, k40 = _k_factors(hc, R)
    iL3 = 1.0 / (L * L * L)
    iG = 1.0 / G
    iG3 = iG * iG * iG
    iG5 = iG3 * iG * iG
    iG7 = iG5 * iG * iG
    s2 = 1.0 - (H * iG) ** 2
    s = np.sqrt(s2)
    u = np.sqrt(1.0 - (G / L) ** 2)
    v = 1.0 - (G / L) ** 2
    w = 2.5 - 1.5 * (G / L) ** 2

    f3 = (15.0 / 16.0) * s2 * s - 0.75 * s
    f4 = -(35.0 / 32.0) * s2 * s2 + (15.0 / 16.0) * s2
    f40 = (105.0 / 64.0) * s2 * s2 - (15.0 / 8.0) * s2 + 0.375

    t2010 = k2 * (0.25 * iG3 - 0.75 * H * H * iG5) * iL3
    t3 = k3 * f3 * u * np.sin(omega) * iL3 * iG5
    t4a = k4a * f4 * v * np.cos(2.0 * omega) * iL3 * iG7
    t4020 = k40 * f40 * w * iL3 * iG7
    return t2010 + t3 + t4a + t4020


def secular_gradients(L, G, H, omega, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                      R: float = DEFAULT_CONSTANTS.r_earth_norm):
    """All first partials of R_sec plus d2R/dL2.

    Returns a dict with keys "L", "G", "H", "omega", "LL".  The J3 pair is
    singular at e = 0 (the chart, not the physics); callers keep e > 0.
    """
    k2, k3, k4a, k40 = _k_factors(hc, R)
    iL = 1.0 / L
    iL3 = iL * iL * iL
    iL4 = iL3 * iL
    iL5 = iL4 * iL
    iL6 = iL5 * iL
    iL7 = iL6 * iL
    iG = 1.0 / G
    iG3 = iG * iG * iG
    iG4 = iG3 * iG
    iG5 = iG4 * iG
    iG6 = iG5 * iG
    iG7 = iG6 * iG
    iG8 = iG7 * iG
    G2 = G * G
    H2 = H * H
    s2 = 1.0 - H2 * iG * iG
    s = np.sqrt(s2)
    u = np.sqrt(1.0 - (G * iL) ** 2)
    v = 1.0 - (G * iL) ** 2
    w = 2.5 - 1.5 * (G * iL) ** 2
    sin_om, cos_om = np.sin(omega), np.cos(omega)
    sin_2om, cos_2om = np.sin(2.0 * omega), np.cos(2.0 * omega)

    f3 = (15.0 / 16.0) * s2 * s - 0.75 * s
    f4 = -(35.0 / 32.0) * s2 * s2 + (15.0 / 16.0) * s2
    f40 = (105.0 / 64.0) * s2 * s2 - (15.0 / 8.0) * s2 + 0.375
    df3 = (45.0 / 16.0) * s2 - 0.75
    df4 = -(35.0 / 8.0) * s2 * s + (15.0 / 8.0) * s
    df40 = (105.0 / 16.0) * s2 * s - (15.0 / 4.0) * s
    ds_dG = H2 / (s * G2 * G)
    ds_dH = -H / (s * G2)

    bra2010 = 0.25 * iG3 - 0.75 * H2 * iG5
    t2010 = k2 * bra2010 * iL3

    out = {}
    out["L"] = (
        -3.0 * t2010 * iL
        + k3 * f3 * sin_om * iG5 * (G2 / u * iL6 - 3.0 * u * iL4)
        + k4a * f4 * cos_2om * iG7 * (2.0 * G2 * iL6 - 3.0 * v * iL4)
        + k40 * f40 * iG7 * (3.0 * G2 * iL6 - 3.0 * w * iL4)
    )
    out["LL"] = (
        12.0 * t2010 * iL * iL
        + k3 * f3 * sin_om * iG5 * (
            -G2 * G2 / (u * u * u) * iL6 * iL3 - 9.0 * G2 / u * iL7 + 12.0 * u * iL5
        )
        + k4a * f4 * cos_2om * iG7 * (-18.0 * G2 * iL7 + 12.0 * v * iL5)
        + k40 * f40 * iG7 * (-27.0 * G2 * iL7 + 12.0 * w * iL5)
    )
    out["G"] = (
        k2 * iL3 * (-0.75 * iG4 + 3.75 * H2 * iG6)
        + k3 * sin_om * iL3 * (
            df3 * ds_dG * u * iG5 - f3 * G / (u * L * L) * iG5 - 5.0 * f3 * u * iG6
        )
        + k4a * cos_2om * iL3 * (
            df4 * ds_dG * v * iG7 - 2.0 * f4 * G * iL * iL * iG7 - 7.0 * f4 * v * iG8
        )
        + k40 * iL3 * (
            df40 * ds_dG * w * iG7 - 3.0 * f40 * G * iL * iL * iG7 - 7.0 * f40 * w * iG8
        )
    )
    out["H"] = (
        -1.5 * k2 * H * iG5 * iL3
        + k3 * sin_om * iL3 * iG5 * u * df3 * ds_dH
        + k4a * cos_2om * iL3 * iG7 * v * df4 * ds_dH
        + k40 * iL3 * iG7 * w * df40 * ds_dH
    )
    out["omega"] = (
        k3 * f3 * u * cos_om * iL3 * iG5
        - 2.0 * k4a * f4 * v * sin_2om * iL3 * iG7
    )
    return out


# -- public operations in physical units ------------------------------------

def secular_potential(el: OrbitalElements, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                      c: Constants = DEFAULT_CONSTANTS) -> float:
    """Averaged zonal potential at the given elements [normalized energy]."""
    if el.e >= 1.0:
        raise DomainError("secular potential diverges as e -> 1")
    st = elements_to_delaunay(el, c)
    unit = (c.mu_E * c.a_geo) ** 0.5
    return float(secular_value(st.L / unit, st.G / unit, st.H / unit, st.omega, hc, c.r_earth_norm))


def secular_derivatives(st: DelaunayState, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                        c: Constants = DEFAULT_CONSTANTS) -> tuple:
    """(dR/dL, dR/dG, dR/dH, d2R/dL2) of the secular potential.

    The input state is in physical units [km^2/s]; the derivatives are with
    respect to the normalized actions, in normalized energy units.
    """
    if st.G <= 0.0:
        raise DomainError("G must be positive")
    unit = (c.mu_E * c.a_geo) ** 0.5
    g = secular_gradients(st.L / unit, st.G / unit, st.H / unit, st.omega, hc, c.r_earth_norm)
    return float(g["L"]), float(g["G"]), float(g["H"]), float(g["LL"])
