import sys; sys.path.insert(0, "/root/pkg/src")
import numpy as np
from tesseral.kaula import eccentricity_series

def hansen_brute(n_exp, m_star, k, e, N=8192):
    M = 2*np.pi*np.arange(N)/N
    E = M.copy()
    for _ in range(60):
        E = E - (E - e*np.sin(E) - M)/(1 - e*np.cos(E))
    r_a = 1 - e*np.cos(E)
    f = np.arctan2(np.sqrt(1-e*e)*np.sin(E), np.cos(E) - e)
    val = r_a**n_exp * np.exp(1j*m_star*f)
    return (val * np.exp(-1j*k*M)).mean().real

# all catalog (n,p,q) triples + secular ones
cases = [
    (3,0,-2),(3,1,0),(3,2,2),(4,1,-1),(4,2,1),            # 3:1
    (3,0,-1),(3,1,1),(4,0,-2),(4,1,0),(4,2,2),            # 3:2
    (4,1,-1),(4,2,1),(5,1,-2),(5,2,0),(5,3,2),(6,2,-1),(6,3,1),   # 4:1
    (4,0,-1),(4,1,1),(5,0,-2),(5,1,0),(5,2,2),            # 4:3
    (5,1,-2),(5,2,0),(5,3,2),(6,2,-1),(6,3,1),            # 5:1
    (5,1,-1),(5,2,1),(6,1,-2),(6,2,0),(6,3,2),            # 5:2
    (5,0,-2),(5,1,0),(5,2,2),(6,1,-1),(6,2,1),            # 5:3
    (5,0,-1),(5,1,1),(6,0,-2),(6,1,0),(6,2,2),            # 5:4
    (2,1,0),(3,1,-1),(3,2,1),(4,1,-2),(4,3,2),(4,2,0),    # secular
]
seen = set()
for (n,p,q) in cases:
    if (n,p,q) in seen: continue
    seen.add((n,p,q))
    m_star = n-2*p; k = m_star+q
    ser = eccentricity_series(n,p,q,4)
    for e in (0.03, 0.12):
        brute = hansen_brute(-(n+1), m_star, k, e)
        val = sum(float(c)*e**j for j,c in enumerate(ser))
        full = hansen_brute(-(n+1), m_star, k, 1e-12) # sanity
        err = abs(val-brute)
        # truncated series differs from brute at O(e^(trunc+2)) and O(e^(|k-m|+2)) tails
        print(f"G(n={n},p={p},q={q}) e={e}: series4={val:.9f} brute={brute:.9f} diff={err:.2e}  coeffs={[str(c) for c in ser]}" if e==0.03 else
              f"           e={e}: series4={val:.9f} brute={brute:.9f} diff={err:.2e}")
