"""Kaula inclination and eccentricity functions.

These provide an independent reconstruction route for every cataloged
resonant harmonic: F_nmp(i) through the classical closed summation and
G_npq(e) as a truncated power series in the eccentricity.  The series is
generated from first principles (Kepler's equation inverted order by order
with exact rational arithmetic), so it shares no transcription path with
the closed-form term catalog it is used to audit.

Conventions:
  - G_npq(e) is the Hansen coefficient X^{-(n+1), n-2p}_{n-2p+q}(e), i.e. the
    Fourier coefficient of exp(i (n-2p+q) M) in (a/r)^{n+1} exp(i (n-2p) f).
  - A geopotential term reassembles as
        (mu R^n / a^(n+1)) * F_nmp(i) * G_npq(e) * S_nmpq
    with S_nmpq = [C cos v + S sin v] for n-m even and
    [-S cos v + C sin v] for n-m odd, where
    v = (n-2p) omega + (n-2p+q) M + m (Omega - theta).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

# ---------------------------------------------------------------------------
# Exact trigonometric series in (e, M): dict {(e_power, harmonic, kind): Fraction}
# kind is "c" for cos(k M), "s" for sin(k M); sin(0 M) terms are dropped.
# ---------------------------------------------------------------------------

Series = dict


def _s_add(a: Series, b: Series) -> Series:
    out = dict(a)
    for key, val in b.items():
        new = out.get(key, Fraction(0)) + val
        if new:
            out[key] = new
        else:
            out.pop(key, None)
    return out


def _s_scale(a: Series, factor: Fraction) -> Series:
    if not factor:
        return {}
    return {key: val * factor for key, val in a.items()}


def _s_shift_e(a: Series, powers: int, order: int) -> Series:
    """Multiply by e**powers, truncating above `order`."""
    return {
        (j + powers, k, kind): val
        for (j, k, kind), val in a.items()
        if j + powers <= order
    }


def _term_product(k1: int, kind1: str, k2: int, kind2: str):
    """Product-to-sum for cos/sin(k1 M) * cos/sin(k2 M).

    Yields (harmonic, kind, factor) triples with harmonic >= 0.
    """
    lo, hi = k1 - k2, k1 + k2
    if kind1 == "c" and kind2 == "c":
        raw = [(lo, "c", Fraction(1, 2)), (hi, "c", Fraction(1, 2))]
    elif kind1 == "s" and kind2 == "s":
        raw = [(lo, "c", Fraction(1, 2)), (hi, "c", Fraction(-1, 2))]
    elif kind1 == "s" and kind2 == "c":
        raw = [(lo, "s", Fraction(1, 2)), (hi, "s", Fraction(1, 2))]
    else:  # cos * sin
        raw = [(lo, "s", Fraction(-1, 2)), (hi, "s", Fraction(1, 2))]
    for k, kind, fac in raw:
        if k < 0:
            if kind == "s":
                fac = -fac
            k = -k
        if k == 0 and kind == "s":
            continue
        yield k, kind, fac


def _s_mul(a: Series, b: Series, order: int) -> Series:
    out: Series = {}
    for (j1, k1, kind1), v1 in a.items():
        for (j2, k2, kind2), v2 in b.items():
            j = j1 + j2
            if j > order:
                continue
            v = v1 * v2
            for k, kind, fac in _term_product(k1, kind1, k2, kind2):
                key = (j, k, kind)
                new = out.get(key, Fraction(0)) + v * fac
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
    return out


def _s_pow(a: Series, exponent: int, order: int) -> Series:
    result: Series = {(0, 0, "c"): Fraction(1)}
    for _ in range(exponent):
        result = _s_mul(result, a, order)
    return result


_COS_M: Series = {(0, 1, "c"): Fraction(1)}
_SIN_M: Series = {(0, 1, "s"): Fraction(1)}
_ONE: Series = {(0, 0, "c"): Fraction(1)}


def _sin_cos_of_shift(delta: Series, order: int) -> tuple[Series, Series]:
    """cos(delta), sin(delta) for a series delta with no O(e^0) part."""
    cos_d, sin_d = dict(_ONE), {}
    power = dict(_ONE)
    fact = 1
    for t in range(1, order + 1):
        power = _s_mul(power, delta, order)
        if not power:
            break
        fact *= t
        coeff = Fraction((-1) ** (t // 2), fact)
        if t % 2 == 1:
            sin_d = _s_add(sin_d, _s_scale(power, coeff))
        else:
            cos_d = _s_add(cos_d, _s_scale(power, coeff))
    return cos_d, sin_d


@lru_cache(maxsize=None)
def _kepler_series(order: int) -> tuple[Series, Series, Series, Series]:
    """Truncated series for cos E, sin E, a/r and sqrt(1-e^2).

    Built by fixed-point iteration of Kepler's equation E = M + e sin E;
    each pass gains one order in e.
    """
    delta: Series = {}  # E - M
    for _ in range(order + 1):
        cos_d, sin_d = _sin_cos_of_shift(delta, order)
        sin_e = _s_add(_s_mul(_SIN_M, cos_d, order), _s_mul(_COS_M, sin_d, order))
        delta = _s_shift_e(sin_e, 1, order)
    cos_d, sin_d = _sin_cos_of_shift(delta, order)
    sin_e = _s_add(_s_mul(_SIN_M, cos_d, order), _s_mul(_COS_M, sin_d, order))
    cos_e = _s_add(_s_mul(_COS_M, cos_d, order), _s_scale(_s_mul(_SIN_M, sin_d, order), Fraction(-1)))

    # a/r = 1 / (1 - e cos E) as a geometric series in x = e cos E
    x = _s_shift_e(cos_e, 1, order)
    a_over_r: Series = dict(_ONE)
    x_pow = dict(_ONE)
    for _ in range(order):
        x_pow = _s_mul(x_pow, x, order)
        if not x_pow:
            break
        a_over_r = _s_add(a_over_r, x_pow)

    # sqrt(1 - e^2) by the binomial series
    beta: Series = dict(_ONE)
    coeff = Fraction(1)
    for t in range(1, order // 2 + 1):
        coeff *= Fraction(2 * t - 3, 2 * t)  # binom(1/2, t) * (-1)^t recurrence
        beta = _s_add(beta, {(2 * t, 0, "c"): coeff})
    return cos_e, sin_e, a_over_r, beta


@lru_cache(maxsize=None)
def eccentricity_series(n: int, p: int, q: int, order: int) -> tuple[Fraction, ...]:
    """Exact power-series coefficients of G_npq(e) up to e**order."""
    cos_e, sin_e, a_over_r, beta = _kepler_series(order)
    cos_f = _s_mul(_s_add(cos_e, {(1, 0, "c"): Fraction(-1)}), a_over_r, order)
    sin_f = _s_mul(_s_mul(beta, sin_e, order), a_over_r, order)

    m_star = n - 2 * p
    cos_mf, sin_mf = dict(_ONE), {}
    for _ in range(abs(m_star)):
        cos_mf, sin_mf = (
            _s_add(_s_mul(cos_mf, cos_f, order), _s_scale(_s_mul(sin_mf, sin_f, order), Fraction(-1))),
            _s_add(_s_mul(sin_mf, cos_f, order), _s_mul(cos_mf, sin_f, order)),
        )
    if m_star < 0:
        sin_mf = _s_scale(sin_mf, Fraction(-1))

    k = n - 2 * p + q
    kc: Series = {(0, abs(k), "c"): Fraction(1)}
    integrand = _s_mul(cos_mf, kc, order)
    if k != 0:
        ks: Series = {(0, abs(k), "s"): Fraction(1 if k > 0 else -1)}
        integrand = _s_add(integrand, _s_mul(sin_mf, ks, order))

    total = _s_mul(_s_pow(a_over_r, n + 1, order), integrand, order)
    coeffs = [Fraction(0)] * (order + 1)
    for (j, harm, kind), val in total.items():
        if harm == 0 and kind == "c":
            coeffs[j] = val
    return tuple(coeffs)


def kaula_eccentricity_function(n: int, p: int, q: int, e: float, trunc_order: int = 2) -> float:
    """G_npq(e) as a power series in e truncated at e**trunc_order."""
    if trunc_order < 2:
        raise DomainError(f"trunc_order must be >= 2, got {trunc_order}")
    if not 0 <= p <= n:
        raise DomainError(f"index p out of range: n={n}, p={p}")
    coeffs = eccentricity_series(n, p, q, trunc_order)
    acc = 0.0
    for power in range(trunc_order, -1, -1):
        acc = acc * e + float(coeffs[power])
    return acc


# ---------------------------------------------------------------------------
# Inclination function (Kaula closed summation)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _f_terms(n: int, m: int, p: int) -> tuple[tuple[int, int, Fraction], ...]:
    """Pre-reduced (sin power, cos power, rational factor) triples of F_nmp."""
    k_half = (n - m) // 2
    terms = []
    for t in range(0, min(p, k_half) + 1):
        lead = Fraction(
            math.factorial(2 * n - 2 * t),
            math.factorial(t)
            * math.factorial(n - t)
            * math.factorial(n - m - 2 * t)
            * 2 ** (2 * n - 2 * t),
        )
        sin_pow = n - m - 2 * t
        for s in range(0, m + 1):
            binom_ms = Fraction(math.comb(m, s))
            c_lo = max(0, p - t - (m - s))
            c_hi = min(n - m - 2 * t + s, p - t)
            for c in range(c_lo, c_hi + 1):
                factor = (
                    lead
                    * binom_ms
                    * math.comb(n - m - 2 * t + s, c)
                    * math.comb(m - s, p - t - c)
                    * (-1) ** (c - k_half)
                )
                if factor:
                    terms.append((sin_pow, s, factor))
    # merge duplicate (sin, cos) powers
    merged: dict[tuple[int, int], Fraction] = {}
    for sin_pow, cos_pow, factor in terms:
        merged[(sin_pow, cos_pow)] = merged.get((sin_pow, cos_pow), Fraction(0)) + factor
    return tuple(
        (sp, cp, fac) for (sp, cp), fac in sorted(merged.items()) if fac
    )


def kaula_inclination_function(n: int, m: int, p: int, i: float) -> float:
    """F_nmp(i) by the classical closed summation."""
    if not 0 <= m <= n:
        raise DomainError(f"index m out of range: n={n}, m={m}")
    if not 0 <= p <= n:
        raise DomainError(f"index p out of range: n={n}, p={p}")
    s, c = math.sin(i), math.cos(i)
    total = 0.0
    for sin_pow, cos_pow, factor in _f_terms(n, m, p):
        total += float(factor) * s**sin_pow * c**cos_pow
    return total


def assemble_term(
    n: int, m: int, p: int, q: int, a: float, e: float, i: float,
    J: float, lam: float, sigma_arg: float, mu: float, R: float,
    trunc_order: int = 2,
) -> float:
    """Full geopotential harmonic reconstructed from F, G and (J, lambda).

    `sigma_arg` is the angle v = (n-2p) omega + (n-2p+q) M + m (Omega - theta).
    The returned value carries the sign convention under which terms add to
    the Hamiltonian as +T.
    """
    amp = (
        (mu * R**n / a ** (n + 1))
        * kaula_inclination_function(n, m, p, i)
        * kaula_eccentricity_function(n, p, q, e, trunc_order)
        * J
    )
    phase = sigma_arg - m * lam
    return amp * (math.cos(phase) if (n - m) % 2 == 0 else math.sin(phase))
