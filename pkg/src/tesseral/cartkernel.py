"""Compiled inner loop for Cartesian FLI grids.

Per-cell scalar re-implementation of the full force model, the Adams PECE
propagation with its Runge-Kutta starter, the variational transport and the
first-window element averaging.  A 40 x 40 chaos map integrates hundreds of
thousands of multistep steps per cell; the vectorized numpy path (kept as
the reference implementation in `cartesian.py`, against which this kernel
is tested) is an order of magnitude too slow for that.

Everything here is deterministic scalar arithmetic: results are identical
across runs, chunkings and thread counts.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .cartesian import MOON_ELEMENTS, OBLIQUITY, SUN_ELEMENTS
from .constants import DEFAULT_CONSTANTS
from .rk import A as RK_A, B as RK_B, C as RK_C

_SUN = (SUN_ELEMENTS["a"], SUN_ELEMENTS["e"], SUN_ELEMENTS["i"],
        SUN_ELEMENTS["Omega"], SUN_ELEMENTS["omega"], SUN_ELEMENTS["M0"],
        SUN_ELEMENTS["n"])
_MOON = (MOON_ELEMENTS["a"], MOON_ELEMENTS["e"], MOON_ELEMENTS["i"],
         MOON_ELEMENTS["Omega0"], MOON_ELEMENTS["Omega_dot"],
         MOON_ELEMENTS["omega0"], MOON_ELEMENTS["omega_dot"],
         MOON_ELEMENTS["M0"], MOON_ELEMENTS["n"])

_FD_STEP = 1e-3
_RENORM = 1e150


@njit(cache=True)
def _kepler_e(M, ecc):
    E = M + ecc * math.sin(M)
    for _ in range(12):
        E = E - (E - ecc * math.sin(E) - M) / (1.0 - ecc * math.cos(E))
    return E


@njit(cache=True)
def _body_position(t, a, ecc, inc, Om0, Om_dot, om0, om_dot, M0, n, tilt, out):
    E = _kepler_e(M0 + n * t, ecc)
    xp = a * (math.cos(E) - ecc)
    yp = a * math.sqrt(1.0 - ecc * ecc) * math.sin(E)
    Om = Om0 + Om_dot * t
    om = om0 + om_dot * t
    co, so = math.cos(om), math.sin(om)
    cO, sO = math.cos(Om), math.sin(Om)
    ci, si = math.cos(inc), math.sin(inc)
    xq = co * xp - so * yp
    yq = so * xp + co * yp
    x = cO * xq - sO * ci * yq
    y = sO * xq + cO * ci * yq
    z = si * yq
    # rotate from the orbit's base plane to the equator by tilt about x
    ct, st = math.cos(tilt), math.sin(tilt)
    out[0] = x
    out[1] = ct * y - st * z
    out[2] = st * y + ct * z


@njit(cache=True)
def _geo_gradient_bf(x, y, z, mu, RE, ncap, mcap, deg, order, Cc, Ss, P, dP, cm, sm, ratn, out):
    """Body-fixed geopotential gradient (force function, central included).

    Longitude multiples come from angle-addition recurrences on cos/sin of
    lambda; P and dP are caller-provided 7 x 7 work arrays.
    """
    r2 = x * x + y * y + z * z
    r = math.sqrt(r2)
    sp = z / r
    rxy = math.sqrt(x * x + y * y)
    if rxy < 1e-150:
        rxy = 1e-150
    cl = x / rxy
    sl = y / rxy
    cp = rxy / r
    P[0, 0] = 1.0
    P[1, 0] = sp
    P[1, 1] = cp
    for n in range(2, ncap + 1):
        for m in range(0, n - 1):
            P[n, m] = ((2 * n - 1) * sp * P[n - 1, m] - (n + m - 1) * P[n - 2, m]) / (n - m)
        P[n, n - 1] = (2 * n - 1) * sp * P[n - 1, n - 1]
        P[n, n] = (2 * n - 1) * cp * P[n - 1, n - 1]
    for n in range(1, ncap + 1):
        for m in range(0, n + 1):
            below = P[n - 1, m] if m <= n - 1 else 0.0
            dP[n, m] = ((n + m) * below - n * sp * P[n, m]) / cp
    # cos/sin of m*lambda by recurrence, ratio powers by multiplication
    cm[0] = 1.0
    sm[0] = 0.0
    for m in range(1, 6):
        cm[m] = cm[m - 1] * cl - sm[m - 1] * sl
        sm[m] = sm[m - 1] * cl + cm[m - 1] * sl
    ratio = RE / r
    ratn[0] = 1.0
    for n in range(1, 7):
        ratn[n] = ratn[n - 1] * ratio
    V_r = -mu / r2
    V_phi = 0.0
    V_lam = 0.0
    mu_r = mu / r
    for k in range(deg.shape[0]):
        n = deg[k]
        m = order[k]
        if n > ncap or m > mcap:
            continue
        harm = Cc[k] * cm[m] + Ss[k] * sm[m]
        dharm = m * (-Cc[k] * sm[m] + Ss[k] * cm[m])
        V_r -= mu / r2 * (n + 1) * ratn[n] * P[n, m] * harm
        V_phi += mu_r * ratn[n] * dP[n, m] * harm
        V_lam += mu_r * ratn[n] * P[n, m] * dharm
    gr = V_r
    gphi = V_phi / r
    glam = V_lam / (r * cp)
    out[0] = cp * cl * gr - sp * cl * gphi - sl * glam
    out[1] = cp * sl * gr - sp * sl * gphi + cl * glam
    out[2] = sp * gr + cp * gphi


@njit(cache=True)
def _total_accel(x, y, z, t, theta, rs, rm, mu, RE, ncap, mcap, deg, order, Cc, Ss,
                 use_sun, use_moon, mu_s, mu_m, k_srp, P, dP, cm, sm, ratn, buf, out):
    ct, st = math.cos(theta), math.sin(theta)
    xb = ct * x + st * y
    yb = -st * x + ct * y
    _geo_gradient_bf(xb, yb, z, mu, RE, ncap, mcap, deg, order, Cc, Ss, P, dP, cm, sm, ratn, buf)
    out[0] = ct * buf[0] - st * buf[1]
    out[1] = st * buf[0] + ct * buf[1]
    out[2] = buf[2]
    if use_sun:
        dx, dy, dz = x - rs[0], y - rs[1], z - rs[2]
        d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
        rb3 = (rs[0] * rs[0] + rs[1] * rs[1] + rs[2] * rs[2]) ** 1.5
        out[0] -= mu_s * (dx / d3 + rs[0] / rb3)
        out[1] -= mu_s * (dy / d3 + rs[1] / rb3)
        out[2] -= mu_s * (dz / d3 + rs[2] / rb3)
    if use_moon:
        dx, dy, dz = x - rm[0], y - rm[1], z - rm[2]
        d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
        rb3 = (rm[0] * rm[0] + rm[1] * rm[1] + rm[2] * rm[2]) ** 1.5
        out[0] -= mu_m * (dx / d3 + rm[0] / rb3)
        out[1] -= mu_m * (dy / d3 + rm[1] / rb3)
        out[2] -= mu_m * (dz / d3 + rm[2] / rb3)
    if k_srp != 0.0:
        dx, dy, dz = x - rs[0], y - rs[1], z - rs[2]
        d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
        out[0] += k_srp * dx / d3
        out[1] += k_srp * dy / d3
        out[2] += k_srp * dz / d3


@njit(cache=True)
def _central_j2(x, y, z, mu, kj2, out):
    r2 = x * x + y * y + z * z
    r = math.sqrt(r2)
    inv_r3 = 1.0 / (r2 * r)
    inv_r5 = inv_r3 / r2
    u = z * z / r2
    out[0] = -mu * x * inv_r3 + kj2 * inv_r5 * x * (1.0 - 5.0 * u)
    out[1] = -mu * y * inv_r3 + kj2 * inv_r5 * y * (1.0 - 5.0 * u)
    out[2] = -mu * z * inv_r3 + kj2 * inv_r5 * z * (3.0 - 5.0 * u)


@njit(cache=True)
def _rhs_cell(y, t, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap, deg, order, Cc, Ss,
              use_sun, use_moon, mu_s, mu_m, k_srp, with_tangent, P, dP, cm, sm, ratn, buf, acc, f):
    """f = d/dt (r, v, dr, dv) for one cell; y and f are length 12."""
    theta = theta_dot * t
    x, yy, z = y[0], y[1], y[2]
    _total_accel(x, yy, z, t, theta, rs, rm, mu, RE, ncap, mcap, deg, order, Cc, Ss,
                 use_sun, use_moon, mu_s, mu_m, k_srp, P, dP, cm, sm, ratn, buf, acc)
    f[0], f[1], f[2] = y[3], y[4], y[5]
    f[3], f[4], f[5] = acc[0], acc[1], acc[2]
    if not with_tangent:
        for k in range(6, 12):
            f[k] = 0.0
        return
    dx, dy, dz = y[6], y[7], y[8]
    f[6], f[7], f[8] = y[9], y[10], y[11]
    # analytic central + J2 jacobian applied to dr
    r2 = x * x + yy * yy + z * z
    r = math.sqrt(r2)
    inv_r3 = 1.0 / (r2 * r)
    inv_r5 = inv_r3 / r2
    inv_r7 = inv_r5 / r2
    rdot = x * dx + yy * dy + z * dz
    # central: mu (3 r r^T / r^5 - I/r^3) dr
    f[9] = mu * (3.0 * x * rdot * inv_r5 - dx * inv_r3)
    f[10] = mu * (3.0 * yy * rdot * inv_r5 - dy * inv_r3)
    f[11] = mu * (3.0 * z * rdot * inv_r5 - dz * inv_r3)
    u = z * z / r2
    dux = -2.0 * z * z * x / (r2 * r2)
    duy = -2.0 * z * z * yy / (r2 * r2)
    duz = 2.0 * z / r2 - 2.0 * z * z * z / (r2 * r2)
    du_dot = dux * dx + duy * dy + duz * dz
    cx = x * (1.0 - 5.0 * u)
    cy = yy * (1.0 - 5.0 * u)
    cz = z * (3.0 - 5.0 * u)
    f[9] += kj2 * (-5.0 * inv_r7 * cx * rdot + inv_r5 * ((1.0 - 5.0 * u) * dx - 5.0 * x * du_dot))
    f[10] += kj2 * (-5.0 * inv_r7 * cy * rdot + inv_r5 * ((1.0 - 5.0 * u) * dy - 5.0 * yy * du_dot))
    f[11] += kj2 * (-5.0 * inv_r7 * cz * rdot + inv_r5 * ((3.0 - 5.0 * u) * dz - 5.0 * z * du_dot))
    # directional FD of the remaining field (harmonics beyond J2, bodies, SRP)
    dn = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dn > 0.0:
        ux, uy, uz = dx / dn, dy / dn, dz / dn
        h = _FD_STEP
        _total_accel(x + h * ux, yy + h * uy, z + h * uz, t, theta, rs, rm, mu, RE,
                     ncap, mcap, deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m,
                     k_srp, P, dP, cm, sm, ratn, buf, acc)
        px, py, pz = acc[0], acc[1], acc[2]
        _central_j2(x + h * ux, yy + h * uy, z + h * uz, mu, kj2, acc)
        px, py, pz = px - acc[0], py - acc[1], pz - acc[2]
        _total_accel(x - h * ux, yy - h * uy, z - h * uz, t, theta, rs, rm, mu, RE,
                     ncap, mcap, deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m,
                     k_srp, P, dP, cm, sm, ratn, buf, acc)
        mx, my, mz = acc[0], acc[1], acc[2]
        _central_j2(x - h * ux, yy - h * uy, z - h * uz, mu, kj2, acc)
        mx, my, mz = mx - acc[0], my - acc[1], mz - acc[2]
        scale = dn / (2.0 * h)
        f[9] += (px - mx) * scale
        f[10] += (py - my) * scale
        f[11] += (pz - mz) * scale


@njit(cache=True)
def _elements_cell(y, mu, out):
    """(a, e, i, M, omega, Omega) of one cell's (r, v)."""
    x, yy, z = y[0], y[1], y[2]
    vx, vy, vz = y[3], y[4], y[5]
    r = math.sqrt(x * x + yy * yy + z * z)
    v2 = vx * vx + vy * vy + vz * vz
    a = 1.0 / (2.0 / r - v2 / mu)
    hx = yy * vz - z * vy
    hy = z * vx - x * vz
    hz = x * vy - yy * vx
    hn = math.sqrt(hx * hx + hy * hy + hz * hz)
    rv = x * vx + yy * vy + z * vz
    ex = ((v2 - mu / r) * x - rv * vx) / mu
    ey = ((v2 - mu / r) * yy - rv * vy) / mu
    ez = ((v2 - mu / r) * z - rv * vz) / mu
    ecc = math.sqrt(ex * ex + ey * ey + ez * ez)
    ci = hz / hn
    if ci > 1.0:
        ci = 1.0
    if ci < -1.0:
        ci = -1.0
    inc = math.acos(ci)
    nx, ny = -hy, hx
    nn = math.sqrt(nx * nx + ny * ny)
    Om = math.atan2(ny, nx) % (2.0 * math.pi)
    e_safe = ecc if ecc > 0.0 else 1.0
    n_safe = nn if nn > 0.0 else 1.0
    co = (nx * ex + ny * ey) / (n_safe * e_safe)
    if co > 1.0:
        co = 1.0
    if co < -1.0:
        co = -1.0
    om = math.acos(co)
    if ez < 0.0:
        om = 2.0 * math.pi - om
    cn = (ex * x + ey * yy + ez * z) / (e_safe * r)
    if cn > 1.0:
        cn = 1.0
    if cn < -1.0:
        cn = -1.0
    nu = math.acos(cn)
    if rv < 0.0:
        nu = 2.0 * math.pi - nu
    E = math.atan2(math.sqrt(1.0 - ecc * ecc) * math.sin(nu), ecc + math.cos(nu))
    M = (E - ecc * math.sin(E)) % (2.0 * math.pi)
    out[0] = a
    out[1] = ecc
    out[2] = inc
    out[3] = M
    out[4] = om
    out[5] = Om


@njit(cache=True)
def fli_kernel(y0, dt, n_steps, theta_dot, mu, RE, kj2, ncap, mcap, deg, order,
               Cc, Ss, use_sun, use_moon, mu_s, mu_m, k_srp,
               sun_par, moon_par, tilt,
               rk_a, rk_b, rk_c, ab_w, am_w,
               j_res, l_res, mean_steps, record_every,
               fli_out, mean_a_out, mean_sig_out, rec_a, rec_sig):
    """PECE + variational transport for a batch of cells, shape y0 (B, 12).

    Outputs: running-sup FLI, first-window mean a and unwrapped resonant
    angle per cell; optionally (a, sigma) series every ``record_every``
    steps into rec_a/rec_sig (pass shape (B, 0) arrays to skip).
    """
    B = y0.shape[0]
    n_start = min(11, n_steps)
    hist = np.zeros((12, B, 12))
    rs = np.zeros(3)
    rm = np.zeros(3)
    buf = np.zeros(3)
    acc = np.zeros(3)
    P = np.zeros((7, 7))
    dP = np.zeros((7, 7))
    cm = np.zeros(6)
    sm = np.zeros(6)
    ratn = np.zeros(7)
    el = np.zeros(6)
    k_st = np.zeros((12, 12))
    ytmp = np.zeros(12)
    f_pred = np.zeros(12)
    hidx = np.zeros(12, dtype=np.int64)
    y = y0.copy()
    log_acc = np.zeros(B)
    prev_sig = np.zeros(B)
    sum_a = np.zeros(B)
    sum_sig = np.zeros(B)

    for b in range(B):
        fli_out[b] = 0.0

    def_eph = use_sun or use_moon or (k_srp != 0.0)

    # f at t = 0 into hist slot (head starts at 0 meaning newest)
    if def_eph:
        _body_position(0.0, sun_par[0], sun_par[1], sun_par[2], sun_par[3], 0.0,
                       sun_par[4], 0.0, sun_par[5], sun_par[6], 0.0, rs)
        _body_position(0.0, moon_par[0], moon_par[1], moon_par[2], moon_par[3],
                       moon_par[4], moon_par[5], moon_par[6], moon_par[7],
                       moon_par[8], tilt, rm)
    head = 11
    for b in range(B):
        _rhs_cell(y[b], 0.0, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap, deg, order,
                  Cc, Ss, use_sun, use_moon, mu_s, mu_m, k_srp, True, P, dP, cm,
                  sm, ratn, buf, acc, hist[head, b])

    mean_count = 0
    for step in range(1, n_steps + 1):
        t_prev = (step - 1) * dt
        t_new = step * dt
        if step <= n_start:
            # order-8 Runge-Kutta starter
            for b in range(B):
                for s in range(12):
                    ts = t_prev + rk_c[s] * dt
                    for k in range(12):
                        ytmp[k] = y[b, k]
                    for jj in range(s):
                        aij = rk_a[s, jj]
                        if aij != 0.0:
                            for k in range(12):
                                ytmp[k] += dt * aij * k_st[jj, k]
                    if def_eph:
                        _body_position(ts, sun_par[0], sun_par[1], sun_par[2],
                                       sun_par[3], 0.0, sun_par[4], 0.0,
                                       sun_par[5], sun_par[6], 0.0, rs)
                        _body_position(ts, moon_par[0], moon_par[1], moon_par[2],
                                       moon_par[3], moon_par[4], moon_par[5],
                                       moon_par[6], moon_par[7], moon_par[8],
                                       tilt, rm)
                    _rhs_cell(ytmp, ts, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap,
                              deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m,
                              k_srp, True, P, dP, cm, sm, ratn, buf, acc, k_st[s])
                for k in range(12):
                    inc_k = 0.0
                    for s in range(12):
                        inc_k += rk_b[s] * k_st[s, k]
                    y[b, k] += dt * inc_k
            if def_eph:
                _body_position(t_new, sun_par[0], sun_par[1], sun_par[2], sun_par[3],
                               0.0, sun_par[4], 0.0, sun_par[5], sun_par[6], 0.0, rs)
                _body_position(t_new, moon_par[0], moon_par[1], moon_par[2],
                               moon_par[3], moon_par[4], moon_par[5], moon_par[6],
                               moon_par[7], moon_par[8], tilt, rm)
            head = (head - 1) % 12
            for b in range(B):
                _rhs_cell(y[b], t_new, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap,
                          deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m, k_srp,
                          True, P, dP, cm, sm, ratn, buf, acc, hist[head, b])
        else:
            if def_eph:
                _body_position(t_new, sun_par[0], sun_par[1], sun_par[2], sun_par[3],
                               0.0, sun_par[4], 0.0, sun_par[5], sun_par[6], 0.0, rs)
                _body_position(t_new, moon_par[0], moon_par[1], moon_par[2],
                               moon_par[3], moon_par[4], moon_par[5], moon_par[6],
                               moon_par[7], moon_par[8], tilt, rm)
            for jj in range(12):
                hidx[jj] = (head + jj) % 12
            for b in range(B):
                # predict
                for k in range(12):
                    ytmp[k] = y[b, k]
                for jj in range(12):
                    w = dt * ab_w[jj]
                    hb = hist[hidx[jj], b]
                    for k in range(12):
                        ytmp[k] += w * hb[k]
                _rhs_cell(ytmp, t_new, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap,
                          deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m, k_srp,
                          True, P, dP, cm, sm, ratn, buf, acc, f_pred)
                # correct
                w = dt * am_w[0]
                for k in range(12):
                    y[b, k] += w * f_pred[k]
                for jj in range(1, 12):
                    w = dt * am_w[jj]
                    hb = hist[hidx[jj - 1], b]
                    for k in range(12):
                        y[b, k] += w * hb[k]
            head = (head - 1) % 12
            for b in range(B):
                _rhs_cell(y[b], t_new, theta_dot, rs, rm, mu, RE, kj2, ncap, mcap,
                          deg, order, Cc, Ss, use_sun, use_moon, mu_s, mu_m, k_srp,
                          True, P, dP, cm, sm, ratn, buf, acc, hist[head, b])

        # FLI bookkeeping and first-window averages
        do_mean = mean_count < mean_steps
        for b in range(B):
            nrm2 = 0.0
            for k in range(6, 12):
                nrm2 += y[b, k] * y[b, k]
            nrm = math.sqrt(nrm2)
            val = log_acc[b] + math.log10(nrm)
            if val > fli_out[b]:
                fli_out[b] = val
            if nrm > _RENORM:
                inv = 1.0 / nrm
                for k in range(6, 12):
                    y[b, k] *= inv
                log_acc[b] += math.log10(nrm)
            if do_mean or (record_every > 0 and step % record_every == 0):
                _elements_cell(y[b], mu, el)
                sig = l_res * (el[3] + el[4]) + j_res * (el[5] - theta_dot * t_new)
                if step == 1:
                    prev_sig[b] = sig
                else:
                    d = (sig - prev_sig[b] + math.pi) % (2.0 * math.pi) - math.pi
                    sig = prev_sig[b] + d
                    prev_sig[b] = sig
                if do_mean:
                    sum_a[b] += el[0]
                    sum_sig[b] += sig
                if record_every > 0 and step % record_every == 0:
                    idx = step // record_every - 1
                    if idx < rec_a.shape[1]:
                        rec_a[b, idx] = el[0]
                        rec_sig[b, idx] = sig
        if do_mean:
            mean_count += 1

    for b in range(B):
        if mean_steps > 0:
            mean_a_out[b] = sum_a[b] / mean_steps
            mean_sig_out[b] = sum_sig[b] / mean_steps
        else:
            mean_a_out[b] = 0.0
            mean_sig_out[b] = 0.0


def run_fli_batch(y0, dt, n_steps, cfg, hc, c=DEFAULT_CONSTANTS,
                  resonance=(3, 1), mean_steps=0, record_every=0, n_record=0):
    """Python wrapper assembling kernel arguments from the force config.

    ``y0`` is (B, 12) rows of (r, v, dr, dv) with unit tangent rows.
    Returns (fli, mean_a, mean_sigma, rec_a, rec_sig).
    """
    keys = hc.keys()
    deg = np.array([k[0] for k in keys], dtype=np.int64)
    order = np.array([k[1] for k in keys], dtype=np.int64)
    Cc = np.array([-hc[k].J * math.cos(k[1] * hc[k].lam) for k in keys])
    Ss = np.array([-hc[k].J * math.sin(k[1] * hc[k].lam) for k in keys])
    kj2 = -1.5 * c.mu_E * hc.J(2, 0) * c.R_E**2
    k_srp = cfg.C_r * c.P_r * cfg.area_to_mass * 1e-3 * c.a_S**2 if cfg.srp else 0.0
    from .cartesian import AB_WEIGHTS, AM_WEIGHTS
    B = y0.shape[0]
    y0 = np.ascontiguousarray(y0, dtype=np.float64).copy()
    tnorm = np.sqrt(np.sum(y0[:, 6:12] ** 2, axis=1))
    y0[:, 6:12] /= tnorm[:, None]
    fli_out = np.zeros(B)
    mean_a = np.zeros(B)
    mean_sig = np.zeros(B)
    rec_a = np.zeros((B, n_record))
    rec_sig = np.zeros((B, n_record))
    fli_kernel(y0, float(dt), int(n_steps),
               c.theta_dot, c.mu_E, c.R_E, kj2, cfg.n_max, cfg.m_max,
               deg, order, Cc, Ss, bool(cfg.sun),
               bool(cfg.moon), c.mu_S, c.mu_M, k_srp,
               np.array(_SUN), np.array(_MOON), OBLIQUITY,
               RK_A, RK_B, RK_C, AB_WEIGHTS, AM_WEIGHTS,
               int(resonance[0]), int(resonance[1]), int(mean_steps),
               int(record_every), fli_out, mean_a, mean_sig, rec_a, rec_sig)
    return fli_out, mean_a, mean_sig, rec_a, rec_sig
