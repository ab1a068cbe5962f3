import sys; sys.path.insert(0, "/root/pkg/src")
import numpy as np
from tesseral.constants import DEFAULT_CONSTANTS as C
from tesseral.coefficients import DEFAULT_COEFFICIENTS as HC
from tesseral.elements import ResonanceId, MINOR_RESONANCES
from tesseral.terms import term_catalog
from tesseral.kaula import assemble_term

rng = np.random.default_rng(12345)
worst = 0.0
for (j, l) in MINOR_RESONANCES:
    r = ResonanceId(j, l)
    for t in term_catalog(r):
        if float(t.pref) == 0.0:
            continue
        errs = []
        for _ in range(40):
            a_km = rng.uniform(14000, 37000)
            e = rng.uniform(0.0, 0.9)
            inc = rng.uniform(0.001, np.pi/2)
            M, om, Om, th = rng.uniform(0, 2*np.pi, 4)
            v_cat = t.value(a_km, e, inc, M, om, Om, th)
            a_n = a_km / C.a_geo
            sigma_arg = (t.n-2*t.p)*om + (t.n-2*t.p+t.q)*M + t.m*(Om-th)
            v_or = assemble_term(t.n, t.m, t.p, t.q, a_n, e, inc,
                                 HC.J(t.n, t.m), HC.lam(t.n, t.m), sigma_arg,
                                 1.0, C.r_earth_norm, trunc_order=2)
            g = abs(t.coefficient(a_km, e, inc))
            scale = max(g, 1e-300)
            errs.append(abs(v_cat - v_or)/scale)
        e_max = max(errs)
        worst = max(worst, e_max)
        flag = "" if e_max < 1e-9 else "  <-- MISMATCH"
        print(f"{r} {t.name:9s} max rel err vs oracle: {e_max:.3e}{flag}")
print("worst:", worst)
