"""Averaged resonant Hamiltonian flow in Delaunay variables.

The Hamiltonian is

    H(L, G, H, M, omega, Omega, theta) = -1/(2 L^2) + R_sec + sum_k T_k

in normalized units (mu_E = theta_dot = a_geo = 1), with theta = t its only
time dependence.  The canonical equations are assembled from hand-coded
partial derivatives of the closed-form terms; everything broadcasts over a
trailing batch axis and accepts complex input, so that a single complex
integration transports flow and tangent vector together (complex-step).

State layout: y = (L, G, H, M, omega, Omega), shape (6,) or (6, B).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coefficients import DEFAULT_COEFFICIENTS, HarmonicCoefficients
from .constants import Constants, DEFAULT_CONSTANTS
from .elements import ResonanceId
from .errors import DomainError, StepSizeError
from .rk import propagate_fixed
from .secular import secular_gradients, secular_value
from .terms import ResonantTerm, term_catalog


def _poly_pair(coeffs):
    """(poly, d/dx poly) as float tuples, ascending powers."""
    p = tuple(float(v) for v in coeffs)
    dp = tuple(k * p[k] for k in range(1, len(p))) or (0.0,)
    return p, dp


def _horner(p, x):
    acc = 0.0
    for coef in reversed(p):
        acc = acc * x + coef
    return acc


@dataclass(frozen=True)
class _CompiledTerm:
    n: int
    j: int
    ell: int
    k_om: int
    kappa: int
    K: float                     # pref * J_nm * R^n
    cpoly: tuple
    dcpoly: tuple
    epoly: tuple
    depoly: tuple
    is_cos: bool
    phase0: float                # -m * lambda_nm


@dataclass(frozen=True)
class AveragedSystem:
    """Resonant Hamiltonian: Kepler + secular zonals + selected catalog terms."""

    resonance: ResonanceId
    terms: tuple = ()
    include_secular: bool = True
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS
    constants: Constants = DEFAULT_CONSTANTS
    _compiled: tuple = field(init=False, repr=False)

    def __post_init__(self):
        compiled = []
        for t in self.terms:
            if t.resonance != self.resonance:
                raise DomainError(f"term {t.name} does not belong to resonance {self.resonance}")
            cpoly, dcpoly = _poly_pair(t.cpoly)
            epoly, depoly = _poly_pair(t.epoly)
            compiled.append(_CompiledTerm(
                n=t.n, j=t.resonance.j, ell=t.resonance.ell, k_om=t.resonance.ell - t.q,
                kappa=t.kappa,
                K=float(t.pref) * self.hc.J(t.n, t.m) * self.constants.r_earth_norm**t.n,
                cpoly=cpoly, dcpoly=dcpoly, epoly=epoly, depoly=depoly,
                is_cos=(t.kind == "cos"),
                phase0=-t.m * self.hc.lam(t.n, t.m),
            ))
        object.__setattr__(self, "_compiled", tuple(compiled))

    @classmethod
    def for_resonance(
        cls, r: ResonanceId,
        enabled: tuple | None = None,
        include_secular: bool = True,
        hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
        constants: Constants = DEFAULT_CONSTANTS,
    ) -> "AveragedSystem":
        terms = term_catalog(r) if enabled is None else tuple(enabled)
        terms = tuple(t for t in terms if float(t.pref) != 0.0)
        return cls(resonance=r, terms=terms, include_secular=include_secular,
                   hc=hc, constants=constants)

    # -- core evaluations ---------------------------------------------------

    def _shared(self, y):
        L, G, H = y[0], y[1], y[2]
        iL = 1.0 / L
        a = L * L
        e = np.sqrt(1.0 - (G * iL) ** 2)
        ci = H / G
        si = np.sqrt(1.0 - ci * ci)
        inv_a = 1.0 / a
        pow_a = {1: inv_a}
        for n in range(2, 8):
            pow_a[n] = pow_a[n - 1] * inv_a
        return L, G, H, iL, e, ci, si, pow_a

    def hamiltonian(self, t, y):
        """H(y, theta = t), normalized energy."""
        L, G, H, iL, e, ci, si, pow_a = self._shared(y)
        total = -0.5 * iL * iL
        if self.include_secular:
            total = total + secular_value(L, G, H, y[4], self.hc, self.constants.r_earth_norm)
        for ct in self._compiled:
            amp = ct.K * pow_a[ct.n + 1] * _horner(ct.cpoly, ci) * _horner(ct.epoly, e)
            if ct.kappa:
                amp = amp * si
            arg = ct.ell * y[3] + ct.k_om * y[4] + ct.j * y[5] - ct.j * t + ct.phase0
            total = total + amp * (np.cos(arg) if ct.is_cos else np.sin(arg))
        return total

    def partial_theta(self, t, y):
        """dH/dtheta at theta = t (for the autonomized energy check)."""
        L, G, H, iL, e, ci, si, pow_a = self._shared(y)
        total = np.zeros(np.shape(y[0])) if np.ndim(y[0]) else 0.0
        for ct in self._compiled:
            amp = ct.K * pow_a[ct.n + 1] * _horner(ct.cpoly, ci) * _horner(ct.epoly, e)
            if ct.kappa:
                amp = amp * si
            arg = ct.ell * y[3] + ct.k_om * y[4] + ct.j * y[5] - ct.j * t + ct.phase0
            dtrig = -np.sin(arg) if ct.is_cos else np.cos(arg)
            total = total + amp * dtrig * (-ct.j)
        return total

    def rhs(self, t, y):
        """Canonical equations (Ldot, Gdot, Hdot, Mdot, omegadot, Omegadot)."""
        L, G, H, iL, e, ci, si, pow_a = self._shared(y)
        iG = 1.0 / G
        dH_dL = iL * iL * iL
        dH_dG = 0.0
        dH_dH = 0.0
        dH_dM = 0.0
        dH_dom = 0.0
        dH_dOm = 0.0
        if self.include_secular:
            grad = secular_gradients(L, G, H, y[4], self.hc, self.constants.r_earth_norm)
            dH_dL = dH_dL + grad["L"]
            dH_dG = dH_dG + grad["G"]
            dH_dH = dH_dH + grad["H"]
            dH_dom = dH_dom + grad["omega"]

        de_dL = (G * G) * (iL * iL * iL) / e
        de_dG = -G * (iL * iL) / e
        dc_dG = -H * iG * iG

        for ct in self._compiled:
            C = _horner(ct.cpoly, ci)
            Cp = _horner(ct.dcpoly, ci)
            E = _horner(ct.epoly, e)
            Ep = _horner(ct.depoly, e)
            base = ct.K * pow_a[ct.n + 1]
            if ct.kappa:
                sC = si * C
                dsC = si * Cp - (ci / si) * C
            else:
                sC = C
                dsC = Cp
            A = base * sC * E
            dA_dL = -2.0 * (ct.n + 1) * A * iL + base * sC * Ep * de_dL
            dA_dG = base * (dsC * dc_dG * E + sC * Ep * de_dG)
            dA_dH = base * dsC * iG * E
            arg = ct.ell * y[3] + ct.k_om * y[4] + ct.j * y[5] - ct.j * t + ct.phase0
            if ct.is_cos:
                trig, dtrig = np.cos(arg), -np.sin(arg)
            else:
                trig, dtrig = np.sin(arg), np.cos(arg)
            dH_dL = dH_dL + dA_dL * trig
            dH_dG = dH_dG + dA_dG * trig
            dH_dH = dH_dH + dA_dH * trig
            Adt = A * dtrig
            dH_dM = dH_dM + Adt * ct.ell
            dH_dom = dH_dom + Adt * ct.k_om
            dH_dOm = dH_dOm + Adt * ct.j
        zero = np.zeros_like(L)
        return np.stack([
            zero - dH_dM,
            zero - dH_dom,
            zero - dH_dOm,
            zero + dH_dL,
            zero + dH_dG,
            zero + dH_dH,
        ])


def equations_of_motion(sys: AveragedSystem, state, t: float):
    """State derivative of the averaged system at theta = t.

    Raises on the exact coordinate singularities e = 0 and i = 0, where the
    Delaunay chart's e- and i-derivatives blow up.
    """
    y = np.asarray(state, dtype=float)
    L, G, H = y[0], y[1], y[2]
    if np.any(G >= L) or np.any(np.abs(H) >= G):
        if np.any(G == L):
            raise DomainError("e = 0 is a chart singularity of the averaged flow")
        if np.any(np.abs(H) == G):
            raise DomainError("i = 0 is a chart singularity of the averaged flow")
        raise DomainError("state violates L > G > |H|")
    return sys.rhs(t, y)


def propagate_averaged(sys: AveragedSystem, state0, T: float, dt: float,
                       sample_dt: float | None = None):
    """Fixed-step propagation with dense output.

    Returns (times, states) where states has shape (n_samples, 6, ...).
    ``sample_dt`` defaults to dt and must be an integer multiple of it.
    """
    if dt <= 0.0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    if sample_dt is None:
        sample_dt = dt
    m = int(round(sample_dt / dt))
    if m < 1 or abs(m * dt - sample_dt) > 1e-9 * dt:
        raise StepSizeError("dt must divide the sampling interval")
    n_steps = int(round(T / dt))
    y = np.asarray(state0, dtype=float)
    times = [0.0]
    states = [y.copy()]

    def keep(step, t, yy):
        if step % m == 0:
            times.append(t)
            states.append(np.array(yy, copy=True))

    propagate_fixed(sys.rhs, 0.0, y, dt, n_steps, callback=keep)
    return np.array(times), np.array(states)
