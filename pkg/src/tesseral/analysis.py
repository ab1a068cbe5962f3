"""Dominant-term maps, island geometry, splitting verdicts and bifurcations.

The pendulum reduction around a j:l resonance keeps the Kepler term, the
secular zonal field and one resonant harmonic.  Expanding the Kepler part to
second order in Lambda = L - L_res gives

    H = alpha Lambda - beta Lambda^2 + eta * cs(argument),
    alpha = 1/L_res^3 + dR_sec/dL,
    beta = 3/(2 L_res^4) - (1/2) d2R_sec/dL2,
    eta  = |g(a_res, e, i)|,

and the full island width in semimajor axis

    width = 2 * (2 eta / beta + 2 L_res sqrt(2 eta / beta))      (mu = 1).

Island centers solve the stationarity of the full trigonometric argument:

    0 = l Mdot + (l - q) omegadot + j (Omegadot - 1)

with the rates evaluated from the secular field plus the signed contribution
of the dominant term itself on the chosen branch.  (The secular omegadot is
weighted by the argument's own omega coefficient l - q = n - 2p; this is what
makes the multiplet centers spread proportionally to q, and it reproduces the
published center distances.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import DEFAULT_COEFFICIENTS, HarmonicCoefficients
from .constants import Constants, DEFAULT_CONSTANTS
from .elements import ResonanceId, resonance_semimajor_axis, resonant_action, wrap_angle
from .errors import ConvergenceError, DomainError
from .secular import secular_gradients
from .terms import ResonantTerm, term_catalog

_CS_STEP = 1e-200  # complex-step size for solver slopes


@dataclass(frozen=True)
class IslandGeometry:
    """Pendulum geometry of one resonant-term island."""

    term: ResonantTerm
    alpha: float
    beta: float
    eta: float
    g_signed: float
    center_sigma: tuple          # (stable, unstable) [rad]
    width_a: float               # full width in km
    center_a: float | None = None   # km, filled by equilibrium_center
    degenerate: bool = False


@dataclass(frozen=True)
class SplitVerdict:
    term_1: ResonantTerm
    term_2: ResonantTerm
    D: float                     # |a_1 - a_2| [km]
    half_width_sum: float        # (width_1 + width_2)/2 [km]
    verdict: str                 # "split" | "overlap"
    margin: float                # D - half_width_sum [km]


@dataclass(frozen=True)
class BranchLabel:
    sigma: float                 # branch center sigma [rad]
    interval: tuple              # inclination interval [rad]
    stability: str               # "stable" | "unstable"


@dataclass(frozen=True)
class StabilityReport:
    term: ResonantTerm
    i0: tuple                    # bifurcation inclinations [rad]
    branches: tuple = field(default_factory=tuple)  # BranchLabel entries


# ---------------------------------------------------------------------------
# dominance
# ---------------------------------------------------------------------------

def dominant_term(
    r: ResonanceId, e: float, i: float,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
    return_tie: bool = False,
):
    """Catalog term with the largest |g(a_res, e, i)|.

    Ties (equal magnitudes to 1e-12 relative) resolve to the first term in
    lexicographic (n, m, p, q) order; with ``return_tie`` the flag is
    reported alongside.
    """
    a_km = resonance_semimajor_axis(r, c)
    best, best_mag, tie = None, -1.0, False
    for t in term_catalog(r):
        mag = abs(t.coefficient(a_km, e, i, hc, c))
        if mag > best_mag * (1.0 + 1e-12):
            best, best_mag, tie = t, mag, False
        elif mag > best_mag * (1.0 - 1e-12):
            tie = True
    return (best, tie) if return_tie else best


def dominant_map(
    r: ResonanceId, e_grid, i_grid,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
):
    """Per-cell dominant term over monotone (e, i) grids.

    Returns (names, ties): an (n_i, n_e) array of term names and a boolean
    tie mask, rows indexed by inclination.
    """
    e_grid = np.asarray(e_grid, dtype=float)
    i_grid = np.asarray(i_grid, dtype=float)
    for grid, label in ((e_grid, "e"), (i_grid, "i")):
        if grid.size > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
            raise DomainError(f"{label} grid must be strictly monotone")
    a_km = resonance_semimajor_axis(r, c)
    terms = term_catalog(r)
    ee, ii = np.meshgrid(e_grid, i_grid)
    mags = np.stack([np.abs(t.coefficient(a_km, ee, ii, hc, c)) for t in terms])
    order = np.argmax(mags, axis=0)
    best = np.max(mags, axis=0)
    tie = (np.sum(mags > best * (1.0 - 1e-12), axis=0) > 1)
    names = np.array([t.name for t in terms], dtype=object)[order]
    return names, tie


# ---------------------------------------------------------------------------
# pendulum geometry
# ---------------------------------------------------------------------------

def _delaunay_at(L, e, i):
    G = L * np.sqrt(1.0 - e * e)
    return G, G * np.cos(i)


def _center_sigmas(t: ResonantTerm, g_signed: float, omega: float,
                   hc: HarmonicCoefficients) -> tuple:
    """(stable, unstable) sigma positions of the island centers [rad]."""
    lam_part = t.q * omega + t.m * hc.lam(t.n, t.m)
    if t.kind == "cos":
        gamma_plus = 0.0          # argument where the term attains +g
    else:
        gamma_plus = 0.5 * math.pi
    stable_gamma = gamma_plus if g_signed >= 0.0 else gamma_plus + math.pi
    return (wrap_angle(stable_gamma + lam_part), wrap_angle(stable_gamma + math.pi + lam_part))


def island_amplitude(
    r: ResonanceId, t: ResonantTerm, e: float, i: float,
    omega: float = 0.0, Omega: float = 0.0,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
) -> IslandGeometry:
    """Pendulum width of the island generated by one term [km]."""
    if t not in term_catalog(r):
        raise DomainError(f"term {t.name} does not belong to the {r} catalog")
    L_res = resonant_action(r)
    G, H = _delaunay_at(L_res, e, i)
    grad = secular_gradients(L_res, G, H, omega, hc, c.r_earth_norm)
    alpha = 1.0 / L_res**3 + grad["L"]
    beta = 1.5 / L_res**4 - 0.5 * grad["LL"]
    if beta <= 0.0:
        raise DomainError(f"pendulum reduction requires beta > 0, got {beta}")
    g_signed = t.coefficient(L_res**2 * c.a_geo, e, i, hc, c)
    eta = abs(g_signed)
    ratio = 2.0 * eta / beta
    width_norm = 2.0 * (ratio + 2.0 * L_res * math.sqrt(ratio))
    return IslandGeometry(
        term=t,
        alpha=float(alpha),
        beta=float(beta),
        eta=float(eta),
        g_signed=float(g_signed),
        center_sigma=_center_sigmas(t, g_signed, omega, hc),
        width_a=float(width_norm * c.a_geo),
        degenerate=(eta == 0.0),
    )


def _coefficient_from_actions(t: ResonantTerm, L, G, H,
                              hc: HarmonicCoefficients, c: Constants):
    """g as a function of Delaunay actions (complex-safe, normalized a)."""
    a = L * L
    e = np.sqrt(1.0 - (G / L) ** 2)
    cos_i = H / G
    sin_i = np.sqrt(1.0 - cos_i * cos_i)
    acc = 0.0
    for coef in reversed(t.cpoly):
        acc = acc * cos_i + float(coef)
    if t.kappa:
        acc = acc * sin_i
    pre = float(t.pref) * hc.J(t.n, t.m) * c.r_earth_norm**t.n
    return pre / a ** (t.n + 1) * acc * t.eccentricity_factor(e)


def _argument_rate(t: ResonantTerm, L, e, i, omega, branch_sign, hc, c):
    """d/dt of the full argument on the given branch (normalized rate)."""
    G, H = _delaunay_at(L, e, i)
    grad = secular_gradients(L, G, H, omega, hc, c.r_earth_norm)
    h = _CS_STEP
    dA_L = np.imag(_coefficient_from_actions(t, L + 1j * h, G, H, hc, c)) / h
    dA_G = np.imag(_coefficient_from_actions(t, L, G + 1j * h, H, hc, c)) / h
    dA_H = np.imag(_coefficient_from_actions(t, L, G, H + 1j * h, hc, c)) / h
    ell = t.resonance.ell
    j = t.resonance.j
    k_om = ell - t.q
    m_dot = 1.0 / L**3 + grad["L"] + branch_sign * dA_L
    om_dot = grad["G"] + branch_sign * dA_G
    Om_dot = grad["H"] + branch_sign * dA_H
    return ell * m_dot + k_om * om_dot + j * (Om_dot - 1.0)


def equilibrium_center(
    r: ResonanceId, t: ResonantTerm, e: float, i: float,
    omega: float = 0.0, Omega: float = 0.0,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
    branch: str = "stable",
    tol: float = 1e-12,
    max_iter: int = 50,
) -> IslandGeometry:
    """Island center: sigma from the phase condition, a from a Newton solve.

    The Newton iteration runs on the argument's rate as a function of L,
    seeded at L_res, with the secular rates re-evaluated at fixed (e, i)
    and the dominant-term derivative taken with the branch's trig sign.
    """
    geom = island_amplitude(r, t, e, i, omega, Omega, hc, c)
    sign_stable = 1.0 if geom.g_signed >= 0.0 else -1.0
    branch_sign = sign_stable if branch == "stable" else -sign_stable
    L = resonant_action(r)
    h = _CS_STEP
    residual = None
    for _ in range(max_iter):
        residual = _argument_rate(t, L, e, i, omega, branch_sign, hc, c)
        if abs(residual) < tol:
            center_km = float(L * L * c.a_geo)
            return IslandGeometry(
                term=geom.term, alpha=geom.alpha, beta=geom.beta, eta=geom.eta,
                g_signed=geom.g_signed, center_sigma=geom.center_sigma,
                width_a=geom.width_a, center_a=center_km, degenerate=geom.degenerate,
            )
        slope = np.imag(_argument_rate(t, L + 1j * h, e, i, omega, branch_sign, hc, c)) / h
        L = L - residual / slope
    raise ConvergenceError(
        f"center solve for {t.name} did not converge in {max_iter} iterations",
        residual=residual,
    )


def overlap_verdict(
    r: ResonanceId, t1: ResonantTerm, t2: ResonantTerm, e: float, i: float,
    omega: float = 0.0, Omega: float = 0.0,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
) -> SplitVerdict:
    """Compare island half-width sum against the center distance D."""
    g1 = equilibrium_center(r, t1, e, i, omega, Omega, hc, c)
    g2 = equilibrium_center(r, t2, e, i, omega, Omega, hc, c)
    D = abs(g1.center_a - g2.center_a)
    half_sum = 0.5 * (g1.width_a + g2.width_a)
    margin = D - half_sum
    return SplitVerdict(
        term_1=t1, term_2=t2, D=D, half_width_sum=half_sum,
        verdict="split" if margin > 0.0 else "overlap", margin=margin,
    )


# ---------------------------------------------------------------------------
# transcritical bifurcations
# ---------------------------------------------------------------------------

def _coefficient_of_i(t: ResonantTerm, r: ResonanceId, e, hc, c):
    a_km = resonance_semimajor_axis(r, c)

    def g(i):
        return t.coefficient(a_km, e, i, hc, c)

    return g


def bifurcation_scan(
    t: ResonantTerm, i_range=(0.0, 0.5 * math.pi), e: float = 0.1,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
    scan_points: int = 721,
    tol_deg: float = 1e-4,
) -> StabilityReport:
    """Sign-change inclinations of the term coefficient, with branch labels.

    Roots are bracketed on a uniform scan and bisected to ``tol_deg``.  A
    vanishing coefficient at the upper range end (for factors odd in cos i)
    counts as a root when the sign flips across it in the analytic
    continuation.
    """
    g = _coefficient_of_i(t, t.resonance, e, hc, c)
    lo, hi = i_range
    grid = np.linspace(lo, hi, scan_points)
    vals = np.array([g(x) for x in grid])
    scale = np.max(np.abs(vals))
    roots = []
    if scale == 0.0:
        return StabilityReport(term=t, i0=(), branches=())
    tol = math.radians(tol_deg)
    for k in range(scan_points - 1):
        a, b = grid[k], grid[k + 1]
        fa, fb = vals[k], vals[k + 1]
        if fa == 0.0 and a != lo:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = g(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    # endpoint zero (e.g. cos i factors vanishing at 90 deg)
    if abs(vals[-1]) < 1e-10 * scale:
        eps = math.radians(0.05)
        if g(hi - eps) * g(hi + eps) < 0.0:
            roots.append(hi)
    roots = sorted(roots)

    # branch stability on each interval between roots
    edges = [lo] + roots + [hi]
    branches = []
    for k in range(len(edges) - 1):
        mid = 0.5 * (edges[k] + edges[k + 1])
        if edges[k + 1] - edges[k] < 10.0 * tol:
            continue
        g_mid = g(mid)
        if g_mid == 0.0:
            continue
        sig_plus, sig_minus = _branch_sigmas(t, hc)
        stable_first = g_mid > 0.0
        branches.append(BranchLabel(sig_plus, (edges[k], edges[k + 1]),
                                    "stable" if stable_first else "unstable"))
        branches.append(BranchLabel(sig_minus, (edges[k], edges[k + 1]),
                                    "unstable" if stable_first else "stable"))
    return StabilityReport(term=t, i0=tuple(roots), branches=tuple(branches))


def _branch_sigmas(t: ResonantTerm, hc: HarmonicCoefficients, omega: float = 0.0):
    """Sigma of the branch where the trig factor is +1, and its opposite."""
    lam_part = t.q * omega + t.m * hc.lam(t.n, t.m)
    gamma_plus = 0.0 if t.kind == "cos" else 0.5 * math.pi
    return wrap_angle(gamma_plus + lam_part), wrap_angle(gamma_plus + math.pi + lam_part)


def branch_stability(
    t: ResonantTerm, e: float, i: float,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
    omega: float = 0.0,
) -> tuple:
    """Per-branch (sigma, delta^2, label) at fixed (e, i).

    The linearization around either equilibrium gives eigenvalues delta with
    delta^2 = -2 beta l^2 g cs(gamma): negative (a center) on the branch
    where the term attains +|g|, positive (a saddle) on the other.  Raises
    within 1e-3 deg of a sign change of g.
    """
    r = t.resonance
    g_fun = _coefficient_of_i(t, r, e, hc, c)
    eps = math.radians(1e-3)
    if g_fun(i - eps) * g_fun(i + eps) <= 0.0:
        raise DomainError(
            f"{t.name}: inclination {math.degrees(i):.4f} deg is within 1e-3 deg "
            "of a stability exchange"
        )
    geom = island_amplitude(r, t, e, i, omega, 0.0, hc, c)
    w_prime = -2.0 * geom.beta * r.ell**2
    sig_plus, sig_minus = _branch_sigmas(t, hc, omega)
    out = []
    for sigma, cs_val in ((sig_plus, 1.0), (sig_minus, -1.0)):
        delta_sq = geom.g_signed * cs_val * w_prime
        out.append((sigma, float(delta_sq), "stable" if delta_sq < 0.0 else "unstable"))
    return tuple(out)


# ---------------------------------------------------------------------------
# multiplet helpers
# ---------------------------------------------------------------------------

def multiplet_report(
    r: ResonanceId, e: float, i: float, omega: float = 0.0, Omega: float = 0.0,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
) -> list:
    """Per-term geometry plus center distance from the widest term.

    Returns a list of dicts (term, sigma centers, width, center_a, D) in
    catalog order; D is measured against the term of largest width.
    """
    geoms = []
    for t in term_catalog(r):
        if float(t.pref) == 0.0:
            continue
        geoms.append(equilibrium_center(r, t, e, i, omega, Omega, hc, c))
    widest = max(geoms, key=lambda gg: gg.width_a)
    report = []
    for gg in geoms:
        report.append({
            "term": gg.term,
            "sigma_stable": gg.center_sigma[0],
            "sigma_unstable": gg.center_sigma[1],
            "width_km": gg.width_a,
            "center_a_km": gg.center_a,
            "D_km": abs(gg.center_a - widest.center_a),
            "is_widest": gg.term.name == widest.term.name,
        })
    return report


def effective_islands(
    r: ResonanceId, e: float, i: float, omega: float = 0.0, Omega: float = 0.0,
    hc: HarmonicCoefficients = DEFAULT_COEFFICIENTS,
    c: Constants = DEFAULT_CONSTANTS,
) -> list:
    """Distinct islands after merging terms that share the same argument.

    Terms with equal q differ only by a constant phase, so their harmonics
    add into a single sinusoid; the combined amplitude and phase follow from
    the complex sum.  Returns one dict per q-group with the merged stable
    sigma, width and center.
    """
    a_km = resonance_semimajor_axis(r, c)
    groups: dict = {}
    for t in term_catalog(r):
        if float(t.pref) == 0.0:
            continue
        groups.setdefault(t.q, []).append(t)
    out = []
    for q, members in sorted(groups.items()):
        phasor = 0.0 + 0.0j
        for t in members:
            g = t.coefficient(a_km, e, i, hc, c)
            phase = t.m * hc.lam(t.n, t.m) + (0.0 if t.kind == "cos" else 0.5 * math.pi)
            phasor += g * np.exp(1j * phase)
        eta_eff = abs(phasor)
        sigma_stable = wrap_angle(float(np.angle(phasor)) + q * omega)
        lead = max(members, key=lambda t: abs(t.coefficient(a_km, e, i, hc, c)))
        geom = equilibrium_center(r, lead, e, i, omega, Omega, hc, c)
        L_res = resonant_action(r)
        ratio = 2.0 * eta_eff / geom.beta
        width = 2.0 * (ratio + 2.0 * L_res * math.sqrt(ratio)) * c.a_geo
        out.append({
            "q": q,
            "members": [t.name for t in members],
            "sigma_stable": sigma_stable,
            "width_km": float(width),
            "center_a_km": geom.center_a,
        })
    return out
