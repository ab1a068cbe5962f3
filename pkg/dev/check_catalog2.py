import sys; sys.path.insert(0, "/root/pkg/src")
import numpy as np
from tesseral.constants import DEFAULT_CONSTANTS as C
from tesseral.coefficients import DEFAULT_COEFFICIENTS as HC
from tesseral.elements import ResonanceId, MINOR_RESONANCES
from tesseral.terms import term_catalog
from tesseral.kaula import assemble_term

rng = np.random.default_rng(777)
worst = 0.0; worst_name = None
for (j, l) in MINOR_RESONANCES:
    r = ResonanceId(j, l)
    for t in term_catalog(r):
        if float(t.pref) == 0.0:
            continue
        # worst-case bound of the inclination/eccentricity factors
        cbound = sum(abs(float(v)) for v in t.cpoly)
        for _ in range(100):
            a_km = rng.uniform(14000, 37000)
            e = rng.uniform(0.0, 0.9)
            inc = rng.uniform(0.0, np.pi/2)
            M, om, Om, th = rng.uniform(0, 2*np.pi, 4)
            v_cat = t.value(a_km, e, inc, M, om, Om, th)
            a_n = a_km / C.a_geo
            sigma_arg = (t.n-2*t.p)*om + (t.n-2*t.p+t.q)*M + t.m*(Om-th)
            v_or = assemble_term(t.n, t.m, t.p, t.q, a_n, e, inc,
                                 HC.J(t.n, t.m), HC.lam(t.n, t.m), sigma_arg,
                                 1.0, C.r_earth_norm, trunc_order=2)
            pre = abs(float(t.pref) * HC.J(t.n, t.m)) * C.r_earth_norm**t.n / a_n**(t.n+1)
            scale = pre * cbound * max(abs(t.eccentricity_factor(e)), 1e-6)
            rel = abs(v_cat - v_or) / scale
            if rel > worst:
                worst, worst_name = rel, (str(r), t.name, e, np.degrees(inc))
print("worst bound-relative error:", worst, worst_name)
