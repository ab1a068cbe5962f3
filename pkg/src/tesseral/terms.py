"""Resonant harmonic terms of the geopotential for the eight minor resonances.

Each catalog entry is one T_nmpq harmonic, stored in a structured closed
form: a rational prefactor, an exact polynomial in c = cos(i) (times a
single sin(i) factor when the parity of n - m requires one), an eccentricity
polynomial truncated at second order, and the trigonometric argument

    sigma_jl - q*omega - m*lambda_nm,    sigma_jl = l*M - j*theta + l*omega + j*Omega,

with cosine for even n - m and sine for odd.  Terms add to the resonant
Hamiltonian with a plus sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coefficients import DEFAULT_COEFFICIENTS, HarmonicCoefficients
from .constants import Constants, DEFAULT_CONSTANTS
from .elements import MINOR_RESONANCES, ResonanceId
from .errors import DomainError, UnsupportedResonanceError

F = Fraction

# -- small exact-polynomial helpers (coefficients ascending in the variable) --


def _padd(a, b):
    out = list(a) + [F(0)] * max(0, len(b) - len(a))
    for k, v in enumerate(b):
        out[k] += v
    return tuple(out)


def _pmul(a, b):
    out = [F(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def _pscale(a, s):
    return tuple(v * F(s) for v in a)


def _ppow(a, k):
    out = (F(1),)
    for _ in range(k):
        out = _pmul(out, a)
    return out


ONE_PLUS_C = (F(1), F(1))          # 1 + c
ONE_MINUS_C = (F(1), F(-1))        # 1 - c
SIN_SQ = (F(1), F(0), F(-1))       # sin^2 i = 1 - c^2


@dataclass(frozen=True)
class ResonantTerm:
    """One T_nmpq harmonic of a j:l resonance multiplet."""

    n: int
    m: int
    p: int
    q: int
    kind: str                      # "cos" or "sin"
    kappa: int                     # 0 or 1 leading sin(i) factors
    pref: Fraction                 # rational prefactor, sign included
    cpoly: tuple                   # polynomial in c = cos(i)
    epoly: tuple                   # polynomial in e

    def __post_init__(self):
        if self.kind not in ("cos", "sin"):
            raise DomainError(f"trig kind must be cos or sin, got {self.kind}")
        expected = "cos" if (self.n - self.m) % 2 == 0 else "sin"
        if self.kind != expected:
            raise DomainError(f"term {self.name}: trig kind inconsistent with n - m parity")
        if self.m != self.resonance.j or self.n - 2 * self.p + self.q != self.resonance.ell:
            raise DomainError(f"term {self.name}: indices inconsistent with resonance")

    @property
    def resonance(self) -> ResonanceId:
        return ResonanceId(self.m, self.n - 2 * self.p + self.q)

    @property
    def name(self) -> str:
        return f"T_{self.n}{self.m}{self.p}{self.q}"

    @property
    def k_omega(self) -> int:
        """Coefficient of omega in the argument beyond sigma_jl (equals -q)."""
        return -self.q

    @property
    def coeff_key(self) -> tuple:
        return (self.n, self.m)

    def argument_integers(self) -> tuple:
        """(k_M, k_omega, k_Omega, k_theta, m_lambda) of the trig argument."""
        ell = self.n - 2 * self.p + self.q
        return (ell, ell - self.q, self.m, -self.m, self.m)

    def argument(self, M, omega, Omega, theta, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS):
        k_M, k_om, k_Om, k_th, m_lam = self.argument_integers()
        return (
            k_M * M + k_om * omega + k_Om * Omega + k_th * theta
            - m_lam * hc.lam(self.n, self.m)
        )

    def inclination_factor(self, i):
        """s^kappa * cpoly(cos i); smooth on [0, pi]."""
        c = np.cos(i)
        acc = 0.0
        for coef in reversed(self.cpoly):
            acc = acc * c + float(coef)
        if self.kappa:
            acc = acc * np.sin(i)
        return acc

    def eccentricity_factor(self, e):
        acc = 0.0
        for coef in reversed(self.epoly):
            acc = acc * e + float(coef)
        return acc

    def coefficient(
        self,
        a_km,
        e,
        i,
        hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
        c: Constants = DEFAULT_CONSTANTS,
    ):
        """Signed coefficient g(a, e, i) in normalized energy units.

        `a_km` is in kilometers; the result is the magnitude of the harmonic
        in units where mu_E = a_geo = 1.
        """
        a = np.asarray(a_km, dtype=float) / c.a_geo
        if np.any(a <= 0):
            raise DomainError("semimajor axis must be positive")
        if np.any(np.asarray(e) < 0) or np.any(np.asarray(e) >= 1):
            raise DomainError("eccentricity must be in [0, 1)")
        pre = float(self.pref) * hc.J(self.n, self.m) * c.r_earth_norm**self.n
        val = pre / a ** (self.n + 1) * self.inclination_factor(i) * self.eccentricity_factor(e)
        return val if isinstance(val, np.ndarray) and val.ndim else float(val)

    def value(
        self,
        a_km,
        e,
        i,
        M,
        omega,
        Omega,
        theta,
        hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
        c: Constants = DEFAULT_CONSTANTS,
    ):
        """g(a, e, i) * trig(argument), normalized energy."""
        arg = self.argument(M, omega, Omega, theta, hc)
        trig = np.cos(arg) if self.kind == "cos" else np.sin(arg)
        return self.coefficient(a_km, e, i, hc, c) * trig


def _term(n, m, p, q, pref, cpoly, epoly, kappa=0):
    kind = "cos" if (n - m) % 2 == 0 else "sin"
    return ResonantTerm(
        n, m, p, q, kind, kappa, F(pref),
        tuple(F(v) for v in cpoly) if not isinstance(cpoly[0], Fraction) else cpoly,
        tuple(F(v) for v in epoly),
    )


def _build_catalogs() -> dict:
    half = F(1, 2)
    catalogs = {}

    catalogs[(3, 1)] = (
        _term(3, 3, 0, -2, F(15, 8), _ppow(ONE_PLUS_C, 3), (0, 0, F(1, 8))),
        _term(3, 3, 1, 0, F(45, 8), _pmul(SIN_SQ, ONE_PLUS_C), (1, 0, 2)),
        _term(3, 3, 2, 2, F(45, 8), _pmul(SIN_SQ, ONE_MINUS_C), (0, 0, F(11, 8))),
        _term(4, 3, 1, -1, F(105, 8), (1, 0, -3, -2), (0, half), kappa=1),
        _term(4, 3, 2, 1, -F(315, 8), (0, 1, 0, -1), (0, F(5, 2)), kappa=1),
    )

    catalogs[(3, 2)] = (
        _term(3, 3, 0, -1, -F(15, 8), _ppow(ONE_PLUS_C, 3), (0, 1)),
        _term(3, 3, 1, 1, F(45, 8), _pmul(SIN_SQ, ONE_PLUS_C), (0, 3)),
        _term(4, 3, 0, -2, F(105, 16), _ppow(ONE_PLUS_C, 3), (0, 0, half), kappa=1),
        _term(4, 3, 1, 0, F(105, 8), (1, 0, -3, -2), (1, 0, 1), kappa=1),
        _term(4, 3, 2, 2, -F(315, 8), (0, 1, 0, -1), (0, 0, 5), kappa=1),
    )

    # the two degree-6 brackets of the 4:1 multiplet, expanded exactly in c
    b6421 = _padd(
        _pscale((-1, -2, 0, 2, 1), F(945, 8)),
        _pmul(_pscale((1, 12, 6, -20, -15), F(10395, 128)), SIN_SQ),
    )
    b6431 = _padd(
        _pscale((-3, 0, 6, 0, -3), F(945, 16)),
        _pmul(_pscale((1, 0, -6, 0, 5), F(10395, 32)), SIN_SQ),
    )
    catalogs[(4, 1)] = (
        _term(4, 4, 1, -1, F(105, 4), _pmul(SIN_SQ, _ppow(ONE_PLUS_C, 2)), (0, half)),
        _term(4, 4, 2, 1, F(315, 8), _ppow(SIN_SQ, 2), (0, F(5, 2))),
        _term(5, 4, 1, -2, F(2835, 256), (3, 4, -6, -12, -5), (0, 0, 1), kappa=1),
        _term(5, 4, 2, 0, F(945, 16), (1, -4, -6, 4, 5), (1, 0, F(13, 2)), kappa=1),
        _term(5, 4, 3, 2, F(27405, 128), (-1, -4, 6, 4, -5), (0, 0, 1), kappa=1),
        _term(6, 4, 2, -1, F(1), b6421, (0, F(3, 2))),
        _term(6, 4, 3, 1, F(1), b6431, (0, F(7, 2))),
    )

    catalogs[(4, 3)] = (
        _term(4, 4, 0, -1, -F(105, 16), _ppow(ONE_PLUS_C, 4), (0, F(3, 2))),
        _term(4, 4, 1, 1, F(105, 4), _pmul(SIN_SQ, _ppow(ONE_PLUS_C, 2)), (0, F(9, 2))),
        _term(5, 4, 0, -2, F(8505, 256), _ppow(ONE_PLUS_C, 4), (0, 0, 1), kappa=1),
        _term(5, 4, 1, 0, F(945, 32), (3, 4, -6, -12, -5), (1, 0, -F(3, 2)), kappa=1),
        _term(5, 4, 2, 2, F(82215, 128), (1, -4, -6, 4, 5), (0, 0, 1), kappa=1),
    )

    catalogs[(5, 1)] = (
        _term(5, 5, 1, -2, F(14175, 256), (1, 3, 2, -2, -3, -1), (0, 0, 1)),
        _term(5, 5, 2, 0, F(9450, 32), (1, 1, -2, -2, 1, 1), (1, 0, F(13, 2))),
        _term(5, 5, 3, 2, F(274050, 256), (1, -1, -2, 2, 1, -1), (0, 0, 1)),
        _term(6, 5, 2, -1, F(155925, 128), (1, -1, -6, -2, 5, 3), (0, 1), kappa=1),
        _term(6, 5, 3, 1, F(1455300, 128), (0, -1, 0, 2, 0, -1), (0, 1), kappa=1),
    )

    catalogs[(5, 2)] = (
        _term(5, 5, 1, -1, F(0), (0,), (0,)),  # vanishes at this expansion order
        _term(5, 5, 2, 1, F(9450, 8), (1, 1, -2, -2, 1, 1), (0, 1)),
        _term(6, 5, 1, -2, -F(10395, 128), (-2, -5, 0, 10, 10, 3), (0, 0, 1), kappa=1),
        _term(6, 5, 2, 0, F(51975, 64), (1, -1, -6, -2, 5, 3), (1, 0, F(13, 2)), kappa=1),
        _term(6, 5, 3, 2, F(3638250, 128), (0, -1, 0, 2, 0, -1), (0, 0, 1), kappa=1),
    )

    catalogs[(5, 3)] = (
        _term(5, 5, 0, -2, F(8505, 256), _ppow(ONE_PLUS_C, 5), (0, 0, 1)),
        _term(5, 5, 1, 0, F(4725, 32), (1, 3, 2, -2, -3, -1), (1, 0, -F(3, 2))),
        _term(5, 5, 2, 2, F(822150, 256), (1, 1, -2, -2, 1, 1), (0, 0, 1)),
        _term(6, 5, 1, -1, -F(10395, 64), (2, 5, 0, -10, -10, -3), (0, 1), kappa=1),
        _term(6, 5, 2, 1, F(571725, 128), (1, -1, -6, -2, 5, 3), (0, 1), kappa=1),
    )

    catalogs[(5, 4)] = (
        _term(5, 5, 0, -1, -F(945, 16), _ppow(ONE_PLUS_C, 5), (0, 1)),
        _term(5, 5, 1, 1, F(14175, 16), (1, 3, 2, -2, -3, -1), (0, 1)),
        _term(6, 5, 0, -2, F(10395, 32), _ppow(ONE_PLUS_C, 5), (0, 0, 1), kappa=1),
        _term(6, 5, 1, 0, F(10395, 32), (2, 5, 0, -10, -10, -3), (1, 0, -F(11, 2)), kappa=1),
        _term(6, 5, 2, 2, F(987525, 64), (1, -1, -6, -2, 5, 3), (0, 0, 1), kappa=1),
    )

    return catalogs


_CATALOGS = _build_catalogs()

#: Optimal expansion degree per resonance (j + 1, except j + 2 for 4:1).
OPTIMAL_DEGREE = {r: max(t.n for t in _CATALOGS[r]) for r in _CATALOGS}


def term_catalog(r: ResonanceId) -> tuple:
    """The resonant terms defining the j:l expansion (5 terms; 7 for 4:1)."""
    key = (r.j, r.ell)
    if key not in _CATALOGS:
        raise UnsupportedResonanceError(
            f"no term catalog for resonance {r}; supported: "
            + ", ".join(f"{j}:{l}" for j, l in MINOR_RESONANCES)
        )
    return _CATALOGS[key]


def find_term(r: ResonanceId, name: str) -> ResonantTerm:
    """Look up a catalog term by its T_nmpq name."""
    for term in term_catalog(r):
        if term.name == name:
            return term
    raise UnsupportedResonanceError(f"resonance {r} has no term named {name}")


def term_coefficient(
    t: ResonantTerm, a_km, e, i,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
):
    """Signed g(a, e, i) of one term [normalized energy]."""
    return t.coefficient(a_km, e, i, hc, c)


def term_value(
    t: ResonantTerm, a_km, e, i, M, omega, Omega, theta,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
):
    """Full harmonic g(a, e, i) * trig(argument) [normalized energy]."""
    return t.value(a_km, e, i, M, omega, Omega, theta, hc, c)
