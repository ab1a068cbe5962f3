import numpy as np

def hansen_brute(n_exp, m_star, k, e, N=4096):
    # X_k^{n_exp, m_star}(e): Fourier coeff of exp(i k M) in (r/a)^{n_exp} exp(i m_star f)
    M = 2*np.pi*np.arange(N)/N
    E = M.copy()
    for _ in range(60):
        E = E - (E - e*np.sin(E) - M)/(1 - e*np.cos(E))
    r_a = 1 - e*np.cos(E)
    cosf = (np.cos(E) - e)/r_a
    sinf = np.sqrt(1-e*e)*np.sin(E)/r_a
    f = np.arctan2(sinf, cosf)
    val = r_a**n_exp * np.exp(1j*m_star*f)
    return (val * np.exp(-1j*k*M)).mean()

for e in (0.02, 0.05, 0.1):
    x = hansen_brute(-4, 1, 1, e).real
    print(f"e={e}: X_1^(-4,1) = {x:.10f}; (x-1)/e^2 = {(x-1)/e**2:.6f}  [engine: 2.5, paper: 2]")
for e in (0.02, 0.05):
    x = hansen_brute(-4, 3, 1, e).real
    print(f"e={e}: X_1^(-4,3) = {x:.3e}; /e^2 = {x/e**2:.6f} [engine: -11/8=-1.375, paper: +1/8]")
    x = hansen_brute(-6, 1, 1, e).real
    print(f"e={e}: X_1^(-6,1): (x-1)/e^2 = {(x-1)/e**2:.6f} [engine: 7, paper: 6.5]")
    x = hansen_brute(-6, 3, 1, e).real
    print(f"e={e}: X_1^(-6,3) (5:3 T_5510): (x-1)/e^2 = {(x-1)/e**2:.6f} [paper: -3/2]")
    x = hansen_brute(-3, 2, 2, e).real
    print(f"e={e}: X_2^(-3,2) (GEO G_200): (x-1)/e^2 = {(x-1)/e**2:.6f} [classic: -5/2]")
