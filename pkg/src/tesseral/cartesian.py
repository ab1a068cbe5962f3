"""Full-model Cartesian propagation: geopotential, Sun/Moon, radiation pressure.

Equation of motion in a quasi-inertial equatorial frame (km, s):

    rdd = R3(-theta) grad V(R3(theta) r)
          - mu_S [ (r - r_S)/|r - r_S|^3 + r_S/|r_S|^3 ]
          - mu_M [ (r - r_M)/|r - r_M|^3 + r_M/|r_M|^3 ]
          + C_r P_r a_S^2 (A/m) (r - r_S)/|r - r_S|^3

with V the body-fixed force function (central term plus the coefficient
table up to degree 6 / order 5) and theta = theta_dot * t the sidereal angle.

The propagator is a 12th-order Adams predictor-corrector in PECE mode
(12-step Bashforth predictor, 11-step Moulton corrector), started by the
fixed-step order-8 Runge-Kutta.  Both sets of Adams weights are generated
from exact rational integrals of the Lagrange basis, not transcribed tables.

Sun and Moon ride simplified analytic ephemerides: Keplerian orbits with
the lunar node and perigee precessing linearly (18.6 yr / 8.85 yr), enough
to give smooth, correctly sized perturbations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coefficients import DEFAULT_COEFFICIENTS, HarmonicCoefficients
from .constants import Constants, DEFAULT_CONSTANTS
from .errors import DivergenceError, DomainError, ReentryError, SpanError, StepSizeError
from .rk import rk8_step


@dataclass(frozen=True)
class CartesianState:
    """Inertial position [km], velocity [km/s] and epoch [s]."""

    r: tuple
    v: tuple
    t: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if r.shape != (3,) or v.shape != (3,):
            raise DomainError("r and v must be 3-vectors")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise DomainError("state components must be finite")
        if np.linalg.norm(r) <= DEFAULT_CONSTANTS.R_E:
            raise ReentryError(f"|r| = {np.linalg.norm(r):.1f} km is below the Earth radius")
        object.__setattr__(self, "r", tuple(r))
        object.__setattr__(self, "v", tuple(v))


@dataclass(frozen=True)
class ForceConfig:
    """Force-model switches and debris parameters."""

    n_max: int = 6
    m_max: int = 5
    sun: bool = True
    moon: bool = True
    srp: bool = True
    C_r: float = 1.0
    area_to_mass: float = 0.0      # A/m [m^2/kg]

    def __post_init__(self):
        if self.area_to_mass < 0.0:
            raise DomainError("area-to-mass ratio must be >= 0")
        if self.n_max > 6 or self.m_max > 5:
            raise DomainError("coefficient table covers degree <= 6, order <= 5")


@dataclass(frozen=True)
class MeanElementsSeries:
    """Window-averaged orbital elements: times [s] and an (n, 6) array."""

    times: np.ndarray
    elements: np.ndarray           # columns a, e, i, M, omega, Omega
    window: float


# ---------------------------------------------------------------------------
# associated Legendre functions (geodesy normalization, no Condon-Shortley)
# ---------------------------------------------------------------------------

def _legendre(n_max, x, cos_phi):
    """P_nm(x) and dP_nm/dphi for all n <= n_max, m <= n; x = sin(phi).

    Returns nested dicts P[n][m], dP[n][m]; broadcasts over array x.
    dP/dphi = [(n + m) P_{n-1,m} - n x P_nm] / cos(phi).
    """
    P = {n: {} for n in range(n_max + 1)}
    P[0][0] = np.ones_like(x)
    if n_max >= 1:
        P[1][0] = x
        P[1][1] = cos_phi
    for n in range(2, n_max + 1):
        for m in range(0, n - 1):
            P[n][m] = ((2 * n - 1) * x * P[n - 1][m] - (n + m - 1) * P[n - 2][m]) / (n - m)
        P[n][n - 1] = (2 * n - 1) * x * P[n - 1][n - 1]
        P[n][n] = (2 * n - 1) * cos_phi * P[n - 1][n - 1]
    dP = {n: {} for n in range(n_max + 1)}
    safe = np.where(cos_phi == 0.0, 1.0, cos_phi)
    for n in range(n_max + 1):
        for m in range(0, n + 1):
            below = P[n - 1][m] if (n >= 1 and m <= n - 1) else 0.0
            dP[n][m] = ((n + m) * below - n * x * P[n][m]) / safe
    return P, dP


def geopotential(r_bf, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                 n_max: int = 6, m_max: int = 5,
                 c: Constants = DEFAULT_CONSTANTS):
    """Force function V at body-fixed positions r_bf (3,) or (3, B) [km^2/s^2]."""
    r_bf = np.asarray(r_bf, dtype=float)
    single = r_bf.ndim == 1
    r_bf = r_bf.reshape(3, -1)
    x, y, z = r_bf[0], r_bf[1], r_bf[2]
    r = np.sqrt(x * x + y * y + z * z)
    sin_phi = z / r
    cos_phi = np.sqrt(np.maximum(0.0, 1.0 - sin_phi**2))
    lam = np.arctan2(y, x)
    P, _ = _legendre(n_max, sin_phi, cos_phi)
    total = np.ones_like(r)
    ratio = c.R_E / r
    for (n, m), ent in ((k, hc[k]) for k in hc.keys()):
        if n > n_max or m > m_max or ent.J_raw == 0.0 and ent.C_raw == 0.0:
            continue
        C_nm = -ent.J * math.cos(m * ent.lam)
        S_nm = -ent.J * math.sin(m * ent.lam)
        total = total + ratio**n * P[n][m] * (C_nm * np.cos(m * lam) + S_nm * np.sin(m * lam))
    out = c.mu_E / r * total
    return out[0] if single else out


def geopotential_gradient(r_bf, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                          n_max: int = 6, m_max: int = 5,
                          c: Constants = DEFAULT_CONSTANTS):
    """grad V in the body-fixed frame, same shape as r_bf [km/s^2]."""
    r_bf = np.asarray(r_bf, dtype=float)
    single = r_bf.ndim == 1
    r_bf = r_bf.reshape(3, -1)
    x, y, z = r_bf[0], r_bf[1], r_bf[2]
    r = np.sqrt(x * x + y * y + z * z)
    sin_phi = z / r
    cos_phi = np.sqrt(np.maximum(1e-300, 1.0 - sin_phi**2))
    lam = np.arctan2(y, x)
    P, dP = _legendre(n_max, sin_phi, cos_phi)

    V_r = -c.mu_E / r**2          # central part
    V_phi = np.zeros_like(r)
    V_lam = np.zeros_like(r)
    ratio = c.R_E / r
    for (n, m), ent in ((k, hc[k]) for k in hc.keys()):
        if n > n_max or m > m_max:
            continue
        C_nm = -ent.J * math.cos(m * ent.lam)
        S_nm = -ent.J * math.sin(m * ent.lam)
        harm = C_nm * np.cos(m * lam) + S_nm * np.sin(m * lam)
        dharm = m * (-C_nm * np.sin(m * lam) + S_nm * np.cos(m * lam))
        V_r = V_r - c.mu_E / r**2 * (n + 1) * ratio**n * P[n][m] * harm
        V_phi = V_phi + c.mu_E / r * ratio**n * dP[n][m] * harm
        V_lam = V_lam + c.mu_E / r * ratio**n * P[n][m] * dharm

    cos_lam, sin_lam = np.cos(lam), np.sin(lam)
    e_r = np.stack([cos_phi * cos_lam, cos_phi * sin_lam, sin_phi])
    e_phi = np.stack([-sin_phi * cos_lam, -sin_phi * sin_lam, cos_phi])
    e_lam = np.stack([-sin_lam, cos_lam, np.zeros_like(lam)])
    out = e_r * V_r + e_phi * (V_phi / r) + e_lam * (V_lam / (r * cos_phi))
    return out[:, 0] if single else out


# ---------------------------------------------------------------------------
# analytic Sun and Moon ephemerides
# ---------------------------------------------------------------------------

OBLIQUITY = math.radians(23.4393)
_DAY = 86400.0

SUN_ELEMENTS = {
    "a": 1.495978707e8, "e": 0.0167, "i": OBLIQUITY,
    "Omega": 0.0, "omega": math.radians(282.9400),
    "M0": math.radians(357.5291), "n": 2.0 * math.pi / (365.25636 * _DAY),
}
MOON_ELEMENTS = {
    "a": 384400.0, "e": 0.0549, "i": math.radians(5.145),
    "Omega0": math.radians(125.045), "Omega_dot": -2.0 * math.pi / (6798.38 * _DAY),
    "omega0": math.radians(318.15),
    "omega_dot": 2.0 * math.pi / (3232.6 * _DAY) + 2.0 * math.pi / (6798.38 * _DAY),
    "M0": math.radians(134.963), "n": 2.0 * math.pi / (27.321661 * _DAY),
}


def _kepler_E(M, e, iterations: int = 12):
    """Eccentric anomaly via a fixed-count Newton iteration (deterministic)."""
    E = M + e * np.sin(M)
    for _ in range(iterations):
        E = E - (E - e * np.sin(E) - M) / (1.0 - e * np.cos(E))
    return E


def _orbit_position(a, e, inc, Omega, omega, M):
    E = _kepler_E(np.asarray(M, dtype=float), e)
    x_p = a * (np.cos(E) - e)
    y_p = a * math.sqrt(1.0 - e * e) * np.sin(E)
    cos_om, sin_om = np.cos(omega), np.sin(omega)
    cos_Om, sin_Om = np.cos(Omega), np.sin(Omega)
    cos_i, sin_i = math.cos(inc), math.sin(inc)
    xq = cos_om * x_p - sin_om * y_p
    yq = sin_om * x_p + cos_om * y_p
    return np.stack([
        cos_Om * xq - sin_Om * cos_i * yq,
        sin_Om * xq + cos_Om * cos_i * yq,
        sin_i * yq,
    ])


def _rot_x(vec, angle):
    ca, sa = math.cos(angle), math.sin(angle)
    return np.stack([vec[0], ca * vec[1] - sa * vec[2], sa * vec[1] + ca * vec[2]])


def sun_position(t):
    """Geocentric Sun position [km] in the equatorial frame; t in seconds."""
    el = SUN_ELEMENTS
    return _orbit_position(el["a"], el["e"], el["i"], el["Omega"], el["omega"],
                           el["M0"] + el["n"] * np.asarray(t, dtype=float))


def moon_position(t):
    """Geocentric Moon position [km]; Keplerian with precessing node/perigee."""
    t = np.asarray(t, dtype=float)
    el = MOON_ELEMENTS
    ecl = _orbit_position(el["a"], el["e"], el["i"],
                          el["Omega0"] + el["Omega_dot"] * t,
                          el["omega0"] + el["omega_dot"] * t,
                          el["M0"] + el["n"] * t)
    return _rot_x(ecl, OBLIQUITY)


# ---------------------------------------------------------------------------
# total acceleration
# ---------------------------------------------------------------------------

def _rotate_z(vec, angle):
    ca, sa = np.cos(angle), np.sin(angle)
    return np.stack([ca * vec[0] - sa * vec[1], sa * vec[0] + ca * vec[1], vec[2]])


def _third_body(r, r_body, mu):
    d = r - r_body.reshape(3, *([1] * (r.ndim - 1)))
    d3 = np.sum(d * d, axis=0) ** 1.5
    rb3 = float(np.sum(r_body * r_body) ** 1.5)
    return -mu * (d / d3 + r_body.reshape(3, *([1] * (r.ndim - 1))) / rb3)


def _field_batch(r, t, cfg, hc, c, r_sun=None, r_moon=None):
    """Total acceleration at columns r (3, K), ephemerides precomputed."""
    theta = c.theta_dot * t
    r_bf = _rotate_z(r, -theta)
    acc = _rotate_z(geopotential_gradient(r_bf, hc, cfg.n_max, cfg.m_max, c), theta)
    if cfg.sun:
        acc = acc + _third_body(r, r_sun, c.mu_S)
    if cfg.moon:
        acc = acc + _third_body(r, r_moon, c.mu_M)
    if cfg.srp and cfg.area_to_mass > 0.0:
        d = r - r_sun.reshape(3, 1)
        d3 = np.sum(d * d, axis=0) ** 1.5
        # P_r [N/m^2] * A/m [m^2/kg] = m/s^2; convert to km/s^2
        k_srp = cfg.C_r * c.P_r * cfg.area_to_mass * 1e-3 * c.a_S**2
        acc = acc + k_srp * d / d3
    return acc


def acceleration(r_in, t, cfg: ForceConfig = ForceConfig(),
                 hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                 c: Constants = DEFAULT_CONSTANTS, check_radius: bool = True):
    """Total inertial acceleration [km/s^2] at positions (3,) or (3, B)."""
    r_in = np.asarray(r_in, dtype=float)
    single = r_in.ndim == 1
    r = r_in.reshape(3, -1)
    rnorm = np.sqrt(np.sum(r * r, axis=0))
    if check_radius and np.any(rnorm <= c.R_E):
        raise ReentryError("position below the Earth radius")
    r_sun = sun_position(t) if (cfg.sun or cfg.srp) else None
    r_moon = moon_position(t) if cfg.moon else None
    acc = _field_batch(r, t, cfg, hc, c, r_sun, r_moon)
    return acc[:, 0] if single else acc


def central_j2_jacobian(r_in, hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                        c: Constants = DEFAULT_CONSTANTS):
    """Analytic d(acc)/dr of the central + J2 field, shape (3, 3, B).

    The J2 term is zonal, hence identical in the rotating and inertial
    frames.  Higher harmonics and third bodies are differenced numerically
    by the variational propagator.
    """
    r = np.asarray(r_in, dtype=float).reshape(3, -1)
    x, y, z = r
    r2 = x * x + y * y + z * z
    rn = np.sqrt(r2)
    mu = c.mu_E
    B = r.shape[1]
    jac = np.empty((3, 3, B))
    # central: mu (3 rhat rhat^T - I)/r^3
    inv_r3 = 1.0 / (r2 * rn)
    inv_r5 = inv_r3 / r2
    for a in range(3):
        for b in range(3):
            jac[a, b] = mu * (3.0 * r[a] * r[b] * inv_r5 - (1.0 if a == b else 0.0) * inv_r3)
    # J2: acc = k r^-5 c(r), c = (x(1-5u), y(1-5u), z(3-5u)), u = z^2/r^2
    k = -1.5 * mu * hc.J(2, 0) * c.R_E**2
    u = z * z / r2
    inv_r4 = 1.0 / (r2 * r2)
    du = np.stack([-2.0 * z * z * x * inv_r4,
                   -2.0 * z * z * y * inv_r4,
                   2.0 * z / r2 - 2.0 * z**3 * inv_r4])
    cvec = np.stack([x * (1.0 - 5.0 * u), y * (1.0 - 5.0 * u), z * (3.0 - 5.0 * u)])
    inv_r5 = 1.0 / (r2 * r2 * rn)
    inv_r7 = inv_r5 / r2
    lead = np.stack([1.0 - 5.0 * u, 1.0 - 5.0 * u, 3.0 - 5.0 * u])
    for a in range(3):
        for b in range(3):
            dc = (lead[a] if a == b else 0.0) - 5.0 * r[a] * du[b]
            jac[a, b] += k * (-5.0 * r[b] * inv_r7 * cvec[a] + inv_r5 * dc)
    return jac


# ---------------------------------------------------------------------------
# Adams predictor-corrector weights (exact rational generation)
# ---------------------------------------------------------------------------

def _lagrange_weights(nodes, lo=Fraction(0), hi=Fraction(1)):
    """Integral over [lo, hi] of each Lagrange basis over the given nodes."""
    weights = []
    for j, xj in enumerate(nodes):
        num = [Fraction(1)]
        den = Fraction(1)
        for i, xi in enumerate(nodes):
            if i == j:
                continue
            num = [Fraction(0)] + num  # multiply by s
            for k in range(len(num) - 1):
                num[k] -= xi * num[k + 1]
            den *= (xj - xi)
        total = Fraction(0)
        for k, coef in enumerate(num):
            total += coef * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
        weights.append(total / den)
    return weights


AB_STEPS = 12
AM_STEPS = 11

#: beta[j] multiplies f(t_n - j dt) in the 12-step Bashforth predictor.
AB_WEIGHTS = np.array([float(w) for w in _lagrange_weights(
    [Fraction(-j) for j in range(AB_STEPS)])])
#: beta[j] multiplies f(t_{n+1} - j dt) in the 11-step Moulton corrector.
AM_WEIGHTS = np.array([float(w) for w in _lagrange_weights(
    [Fraction(1 - j) for j in range(AM_STEPS + 1)])])


def multistep_propagate(f, y0, dt, n_steps, callback=None, t0=0.0):
    """PECE Adams propagation with an order-8 Runge-Kutta starter.

    f(t, y) -> ydot; y is any-shape ndarray.  ``callback(step, t, y)`` runs
    after every accepted step, starter steps included.
    """
    if dt <= 0.0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    y = np.array(y0, dtype=float, copy=True)
    hist = [f(t0, y)]
    t = t0
    n_start = min(AB_STEPS - 1, n_steps)
    for step in range(1, n_start + 1):
        y = rk8_step(f, t, y, dt)
        t = t0 + step * dt
        hist.insert(0, f(t, y))
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite state at t = {t}")
        if callback is not None:
            callback(step, t, y)
    for step in range(n_start + 1, n_steps + 1):
        acc = AB_WEIGHTS[0] * hist[0]
        for j in range(1, AB_STEPS):
            acc += AB_WEIGHTS[j] * hist[j]
        y_pred = y + dt * acc
        t_new = t0 + step * dt
        f_pred = f(t_new, y_pred)
        acc = AM_WEIGHTS[0] * f_pred
        for j in range(1, AM_STEPS + 1):
            acc += AM_WEIGHTS[j] * hist[j - 1]
        y = y + dt * acc
        f_new = f(t_new, y)
        hist.insert(0, f_new)
        hist.pop()
        t = t_new
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite state at t = {t}")
        if callback is not None:
            callback(step, t, y)
    return y


def propagate_cartesian(state0: CartesianState, cfg: ForceConfig, T: float, dt: float,
                        sample_dt: float | None = None,
                        hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                        c: Constants = DEFAULT_CONSTANTS):
    """Propagate one state for T seconds; returns (times, states (n, 6))."""
    if sample_dt is None:
        sample_dt = dt
    m = int(round(sample_dt / dt))
    if m < 1 or abs(m * dt - sample_dt) > 1e-9 * dt:
        raise StepSizeError("dt must divide the sampling interval")

    def f(t, y):
        return np.concatenate([y[3:6], acceleration(y[0:3], t, cfg, hc, c,
                                                    check_radius=False)])

    y0 = np.concatenate([np.asarray(state0.r), np.asarray(state0.v)])
    times = [state0.t]
    states = [y0.copy()]
    r_e = c.R_E

    def keep(step, t, y):
        r = math.hypot(y[0], math.hypot(y[1], y[2]))
        if r <= r_e:
            raise ReentryError(f"re-entry at t = {t:.1f} s")
        if step % m == 0:
            times.append(t)
            states.append(np.array(y, copy=True))

    n_steps = int(round(T / dt))
    multistep_propagate(f, y0, dt, n_steps, callback=keep, t0=state0.t)
    return np.array(times), np.array(states)


# ---------------------------------------------------------------------------
# element conversions and averaging
# ---------------------------------------------------------------------------

def rv_to_elements(r, v, mu: float = DEFAULT_CONSTANTS.mu_E):
    """Osculating (a, e, i, M, omega, Omega) from vectors; broadcasts (3, B)."""
    r = np.asarray(r, dtype=float).reshape(3, -1)
    v = np.asarray(v, dtype=float).reshape(3, -1)
    rn = np.sqrt(np.sum(r * r, axis=0))
    v2 = np.sum(v * v, axis=0)
    a = 1.0 / (2.0 / rn - v2 / mu)
    h = np.stack([r[1] * v[2] - r[2] * v[1],
                  r[2] * v[0] - r[0] * v[2],
                  r[0] * v[1] - r[1] * v[0]])
    hn = np.sqrt(np.sum(h * h, axis=0))
    rv_dot = np.sum(r * v, axis=0)
    evec = ((v2 - mu / rn) * r - rv_dot * v) / mu
    e = np.sqrt(np.sum(evec * evec, axis=0))
    inc = np.arccos(np.clip(h[2] / hn, -1.0, 1.0))
    node = np.stack([-h[1], h[0], np.zeros_like(hn)])
    nn = np.sqrt(np.sum(node * node, axis=0))
    nn_safe = np.where(nn == 0.0, 1.0, nn)
    Omega = np.arctan2(node[1], node[0]) % (2.0 * math.pi)
    e_safe = np.where(e == 0.0, 1.0, e)
    cos_om = np.sum(node * evec, axis=0) / (nn_safe * e_safe)
    omega = np.arccos(np.clip(cos_om, -1.0, 1.0))
    omega = np.where(evec[2] < 0.0, 2.0 * math.pi - omega, omega)
    cos_nu = np.sum(evec * r, axis=0) / (e_safe * rn)
    nu = np.arccos(np.clip(cos_nu, -1.0, 1.0))
    nu = np.where(rv_dot < 0.0, 2.0 * math.pi - nu, nu)
    E = np.arctan2(np.sqrt(1.0 - e * e) * np.sin(nu), e + np.cos(nu))
    M = (E - e * np.sin(E)) % (2.0 * math.pi)
    return np.stack([a, e, inc, M, omega, Omega])


def elements_to_rv(a, e, inc, M, omega, Omega, mu: float = DEFAULT_CONSTANTS.mu_E):
    """Inertial r, v [km, km/s] from elements; broadcasts over arrays."""
    a = np.asarray(a, dtype=float)
    E = _kepler_E(np.asarray(M, dtype=float) + np.zeros_like(a), np.asarray(e) + np.zeros_like(a), 25)
    e = np.asarray(e, dtype=float)
    cos_E, sin_E = np.cos(E), np.sin(E)
    rn = a * (1.0 - e * cos_E)
    x_p = a * (cos_E - e)
    y_p = a * np.sqrt(1.0 - e * e) * sin_E
    fac = np.sqrt(mu * a) / rn
    vx_p = -fac * sin_E
    vy_p = fac * np.sqrt(1.0 - e * e) * cos_E
    cos_om, sin_om = np.cos(omega), np.sin(omega)
    cos_Om, sin_Om = np.cos(Omega), np.sin(Omega)
    cos_i, sin_i = np.cos(inc), np.sin(inc)

    def rot(xq, yq):
        xr = cos_om * xq - sin_om * yq
        yr = sin_om * xq + cos_om * yq
        return np.stack([cos_Om * xr - sin_Om * cos_i * yr,
                         sin_Om * xr + cos_Om * cos_i * yr,
                         sin_i * yr])

    return rot(x_p, y_p), rot(vx_p, vy_p)


# ---------------------------------------------------------------------------
# variational propagation and Cartesian FLI
# ---------------------------------------------------------------------------

_FD_STEP_KM = 1e-3     # 1 m directional step for the non-(central+J2) Jacobian
_RENORM_AT = 1e150


def _central_j2_accel(r, hc, c):
    x, y, z = r
    r2 = x * x + y * y + z * z
    rn = np.sqrt(r2)
    inv_r3 = 1.0 / (r2 * rn)
    acc = -c.mu_E * r * inv_r3
    k = -1.5 * c.mu_E * hc.J(2, 0) * c.R_E**2
    u = z * z / r2
    inv_r5 = inv_r3 / r2
    return acc + k * inv_r5 * np.stack([x * (1.0 - 5.0 * u),
                                        y * (1.0 - 5.0 * u),
                                        z * (3.0 - 5.0 * u)])


def _variational_rhs(t, y, cfg, hc, c):
    """RHS of state + tangent, y shape (12, B): (r, v, dr, dv).

    The tangent acceleration is the analytic central+J2 Jacobian applied to
    dr, plus a directional central difference (1 m step) of the remaining
    field.  All three field evaluations run as one stacked batch with the
    ephemerides computed once.
    """
    B = y.shape[1]
    r, v = y[0:3], y[3:6]
    dr, dv = y[6:9], y[9:12]
    jac = central_j2_jacobian(r, hc, c)
    ddv = np.einsum("abk,bk->ak", jac, dr)
    drnorm = np.sqrt(np.sum(dr * dr, axis=0))
    safe = np.where(drnorm == 0.0, 1.0, drnorm)
    u = dr / safe
    h = _FD_STEP_KM
    stacked = np.hstack([r, r + h * u, r - h * u])
    r_sun = sun_position(t) if (cfg.sun or cfg.srp) else None
    r_moon = moon_position(t) if cfg.moon else None
    field = _field_batch(stacked, t, cfg, hc, c, r_sun, r_moon)
    a_full = field[:, 0:B]
    rest_p = field[:, B:2 * B] - _central_j2_accel(stacked[:, B:2 * B], hc, c)
    rest_m = field[:, 2 * B:] - _central_j2_accel(stacked[:, 2 * B:], hc, c)
    ddv = ddv + drnorm * (rest_p - rest_m) / (2.0 * h)
    return np.concatenate([v, a_full, dv, ddv])


def _fli_cartesian_batch(y0, cfg, T, dt, hc, c, resonance=None, mean_window=0.0):
    """Sup-log10 tangent growth for a (12, B) batch of (r, v, dr, dv).

    With ``mean_window`` > 0 and a (j, l) resonance, also returns the running
    average of the osculating semimajor axis and of the unwrapped resonant
    angle over the first window (the mean-element labels of a map cell);
    otherwise those outputs are zeros.
    """
    tangent = np.asarray(y0[6:12], dtype=float)
    norm0 = np.sqrt(np.sum(tangent * tangent, axis=0))
    if np.any(norm0 == 0.0):
        raise DomainError("initial tangent vector must be nonzero")
    y = np.vstack([np.asarray(y0[0:6], dtype=float), tangent / norm0])
    B = y.shape[1]
    log_acc = np.zeros(B)
    sup = np.zeros(B)
    n_mean = max(1, int(round(mean_window / dt))) if mean_window > 0.0 else 0
    sums = {"a": np.zeros(B), "sigma": np.zeros(B), "prev": np.zeros(B), "count": 0}

    def cb(step, t, yy):
        v = yy[6:12]
        norm = np.sqrt(np.sum(v * v, axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            np.maximum(sup, log_acc + np.log10(norm), out=sup)
        big = norm > _RENORM_AT
        if np.any(big):
            yy[6:12] *= np.where(big, 1.0 / np.where(big, norm, 1.0), 1.0)
            log_acc[big] += np.log10(norm[big])
        if sums["count"] < n_mean:
            el = rv_to_elements(yy[0:3], yy[3:6], c.mu_E)
            j, ell = resonance
            sig = ell * (el[3] + el[4]) + j * (el[5] - c.theta_dot * t)
            if sums["count"] == 0:
                sums["prev"] = sig
            else:
                sig = sums["prev"] + ((sig - sums["prev"] + math.pi) % (2.0 * math.pi) - math.pi)
                sums["prev"] = sig
            sums["a"] += el[0]
            sums["sigma"] += sig
            sums["count"] += 1

    def f(t, yy):
        return _variational_rhs(t, yy, cfg, hc, c)

    multistep_propagate(f, y, dt, int(round(T / dt)), callback=cb)
    if n_mean:
        return sup, sums["a"] / sums["count"], sums["sigma"] / sums["count"]
    return sup, np.zeros(B), np.zeros(B)


def fli_cartesian(state0: CartesianState, cfg: ForceConfig, T: float, dt: float,
                  v0=None,
                  hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                  c: Constants = DEFAULT_CONSTANTS) -> float:
    """FLI of one Cartesian trajectory (T, dt in seconds).

    The default tangent direction is the radial unit vector; the indicator
    follows the same running-supremum convention as the averaged engine.
    """
    y0 = np.concatenate([np.asarray(state0.r), np.asarray(state0.v)]).reshape(6, 1)
    if v0 is None:
        tangent = np.zeros((6, 1))
        tangent[0:3, 0] = np.asarray(state0.r) / np.linalg.norm(state0.r)
    else:
        tangent = np.asarray(v0, dtype=float).reshape(6, 1)
    out, _, _ = _fli_cartesian_batch(np.vstack([y0, tangent]), cfg, T, dt, hc, c,
                                     resonance=None, mean_window=0.0)
    return float(out[0])


@dataclass(frozen=True)
class CartesianFliGrid:
    """Cartesian FLI scan over (sigma, a) with per-cell mean-element labels."""

    sigma_nominal: np.ndarray      # (nx,) grid values [rad]
    a_nominal: np.ndarray          # (ny,) grid values [km]
    values: np.ndarray             # (ny, nx) FLI
    mean_a: np.ndarray             # (ny, nx) first-window mean semimajor axis
    mean_sigma: np.ndarray         # (ny, nx) first-window mean resonant angle
    fixed: dict
    T: float
    dt: float


def fli_map_cartesian(resonance, sigma_values, a_values, e, inc, cfg: ForceConfig,
                      T: float, dt: float, omega: float = 0.0, Omega: float = 0.0,
                      threads: int = 1,
                      hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
                      c: Constants = DEFAULT_CONSTANTS) -> CartesianFliGrid:
    """Cartesian FLI over a (sigma, a) grid of osculating initial conditions.

    ``resonance`` is (j, l); initial M comes from sigma with theta(0) = 0.
    Cell axes are also reported as mean elements, averaged over the first
    orbital period of each trajectory.  T and dt in seconds.
    """
    j, ell = resonance
    sigma_values = np.asarray(sigma_values, dtype=float)
    a_values = np.asarray(a_values, dtype=float)
    ss, aa = np.meshgrid(sigma_values, a_values)
    n = ss.size
    M = (ss.ravel() - ell * omega - j * Omega) / ell
    r, v = elements_to_rv(aa.ravel(), np.full(n, e), np.full(n, inc),
                          M, np.full(n, omega), np.full(n, Omega), c.mu_E)
    tangent = np.zeros((6, n))
    rn = np.sqrt(np.sum(r * r, axis=0))
    tangent[0:3] = r / rn
    y0 = np.vstack([r, v, tangent])
    period = 2.0 * math.pi * math.sqrt(float(np.mean(a_values)) ** 3 / c.mu_E)

    out = np.empty(n)
    out_a = np.empty(n)
    out_sig = np.empty(n)
    chunk = 512
    spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]

    def run(span):
        lo, hi = span
        fli_v, ma, ms = _fli_cartesian_batch(
            y0[:, lo:hi], cfg, T, dt, hc, c, resonance=(j, ell), mean_window=period)
        out[lo:hi] = fli_v
        out_a[lo:hi] = ma
        out_sig[lo:hi] = ms

    if threads <= 1:
        for span in spans:
            run(span)
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, spans))

    shape = ss.shape
    return CartesianFliGrid(
        sigma_nominal=sigma_values, a_nominal=a_values,
        values=out.reshape(shape), mean_a=out_a.reshape(shape),
        mean_sigma=(out_sig.reshape(shape) % (2.0 * math.pi)),
        fixed={"e": e, "i": inc, "omega": omega, "Omega": Omega,
               "sun": cfg.sun, "moon": cfg.moon, "srp": cfg.srp,
               "area_to_mass": cfg.area_to_mass},
        T=T, dt=dt)


def osculating_to_mean(times, states, window: float) -> MeanElementsSeries:
    """Centered moving average of osculating elements over ``window`` seconds.

    ``states`` is (n, 6) rows of (r, v).  Angles are unwrapped before
    averaging and re-reduced afterwards; output timestamps are interior to
    the input span by half a window on each side.
    """
    times = np.asarray(times, dtype=float)
    if times[-1] - times[0] <= window:
        raise SpanError("trajectory span must exceed the averaging window")
    if window <= 0.0:
        raise SpanError("window must be positive")
    el = rv_to_elements(np.asarray(states)[:, 0:3].T, np.asarray(states)[:, 3:6].T).T
    for col in (3, 4, 5):
        el[:, col] = np.unwrap(el[:, col])
    dt = times[1] - times[0]
    half = max(1, int(round(0.5 * window / dt)))
    kernel = np.ones(2 * half + 1) / (2 * half + 1)
    keep = slice(half, len(times) - half)
    out = np.empty((len(times) - 2 * half, 6))
    for col in range(6):
        out[:, col] = np.convolve(el[:, col], kernel, mode="valid")
    for col in (3, 4, 5):
        out[:, col] %= 2.0 * math.pi
    return MeanElementsSeries(times=times[keep], elements=out, window=window)
