"""Independent oracles for frozen expected values in the C++ tests.

Run with python3; uses mpmath for high-precision reference values.
"""
import math
from fractions import Fraction
import itertools
import mpmath as mp

mp.mp.dps = 40


def ld_pmf_series(c, m_max):
    # power-series coefficients of (1-z)^{c(1/z-1)} = exp(c (1/z - 1) log(1-z))
    # c(1/z-1)log(1-z) = c * sum_j z^j/(j(j+1)) - c  -> compound Poisson, expand exp of series
    q = [mp.mpf(0)] + [mp.mpf(1) / (j * (j + 1)) for j in range(1, m_max + 1)]
    # exp of power series g(z) = c*sum q_j z^j: coefficients via f' = g' f
    f = [mp.e ** (-c)]
    for m in range(1, m_max + 1):
        s = mp.mpf(0)
        for j in range(1, m + 1):
            s += j * c * q[j] * f[m - j]
        f.append(s / m)
    return f


print("ld c=1 p0,p1,p2:", [mp.nstr(v, 17) for v in ld_pmf_series(1, 2)])
f = ld_pmf_series(2, 200)
tail = 1 - mp.fsum(f[:200])
print("c=2 m=200  P[B>=200]:", mp.nstr(tail, 17), " m*tail:", mp.nstr(200 * tail, 17))
for c in (1, 2):
    m = 100 * c
    f = ld_pmf_series(c, m)
    t = 1 - mp.fsum(f[:m])
    print(f"c={c} m={m} m*tail/c:", mp.nstr(m * t / c, 17))

# pgf check (0.5)^(2*(2-1))
print("pgf c=2 z=0.5:", (1 - 0.5) ** (2 * (1 / 0.5 - 1)))

# hyp2f1(1,p;1+p;x)
print("2F1(1,1;2;0.5):", mp.nstr(mp.hyp2f1(1, 1, 2, 0.5), 17))
print("2F1(1,2;3;0.25):", mp.nstr(mp.hyp2f1(1, 2, 3, 0.25), 17))
print("2F1(1,0.7;1.7;-3):", mp.nstr(mp.hyp2f1(1, 0.7, 1.7, -3), 17))
print("2F1(1,2.5;3.5;-0.99):", mp.nstr(mp.hyp2f1(1, 2.5, 3.5, -0.99), 17))
print("2F1(1,0.3;1.3;0.999):", mp.nstr(mp.hyp2f1(1, 0.3, 1.3, 0.999), 17))

# gen-LD pgf nondegenerate value: (lambda,a,b,c)=(0.5,1,0.5,4), z=0.3
lam, a, b, c, z = mp.mpf('0.5'), mp.mpf(1), mp.mpf('0.5'), mp.mpf(4), mp.mpf('0.3')
p = lam / (a - b)
val = mp.e ** (c * (b / a - 1) * mp.hyp2f1(1, p, 1 + p, (b / a - z) / (1 - z)))
print("genld pgf (0.5,1,0.5,4) z=0.3:", mp.nstr(val, 17))
# independent quadrature oracle for the same pgf: K~Poi(c), xi~Exp(lam), Y(xi) BD law
def bd_pgf(t, z):
    lt = (a - b) * t
    e = mp.e ** lt
    al = b * (e - 1) / (a * e - b)
    be = a * (e - 1) / (a * e - b)
    return al + (1 - al) * (1 - be) * z / (1 - be * z)
inner = mp.quad(lambda t: lam * mp.e ** (-lam * t) * bd_pgf(t, z), [0, mp.inf])
print("genld pgf via quadrature:", mp.nstr(mp.e ** (c * (inner - 1)), 17))

# ISA probability
def isa(n, mu):
    n = mp.mpf(n); mu = mp.mpf(mu)
    return 1 - (1 - mu) ** (2 * n - 2) - (2 * n - 2) * mu * (1 - mu) ** (2 * n - 3)
print("isa(2,0.5):", isa(2, 0.5))
print("isa(1e9,1e-9):", mp.nstr(isa(10**9, mp.mpf('1e-9')), 17), " poisson limit:", mp.nstr(1 - 3 * mp.e ** -2, 17))
print("expected isa 3e9:", mp.nstr(3e9 * isa(10**9, mp.mpf('1e-9')), 17))
print("isa(1000,1e-3):", mp.nstr(isa(1000, mp.mpf('1e-3')), 17))

# n=2 single division enumeration: 4 daughter outcomes per daughter (nucleotides), ref A
mu = Fraction(1, 10)
law = {0: Fraction(0), 1: Fraction(0), 2: Fraction(0)}
for d1, d2 in itertools.product(range(4), repeat=2):
    p1 = (1 - mu) if d1 == 0 else mu / 3
    p2 = (1 - mu) if d2 == 0 else mu / 3
    law[(d1 != 0) + (d2 != 0)] += p1 * p2
print("n=2 mu=1/10 law:", {k: float(v) for k, v in law.items()})

# embedded chain example
r, j, m = 2, 1, 0.3
print("chain r=2 j=1 mu=.3 P[j+1]:", (j / r) * (1 - m / 3) ** 2 + ((r - j) / r) * 2 * m * (1 - m))

# mixture mass at zero
print("mix zero:", (math.exp(-1) + math.exp(-2)) / 2)


# Exact finite-n law of B^{n,mu} by forward DP over the single-site chain.
def chain_law(n, mu):
    import numpy as np
    law = np.zeros(n + 2)
    law[0] = 1.0
    for r in range(1, n):
        j = np.arange(r + 1)
        p = law[: r + 1]
        new = np.zeros(n + 2)
        fm = j / r
        fr = (r - j) / r
        down = fm * (mu / 3) ** 2
        stay = fm * 2 * (mu / 3) * (1 - mu / 3) + fr * (1 - mu) ** 2
        up1 = fm * (1 - mu / 3) ** 2 + fr * 2 * mu * (1 - mu)
        up2 = fr * mu ** 2
        new[0:r] += (p * down)[1:]
        new[: r + 1] += p * stay
        new[1 : r + 2] += p * up1
        new[2 : r + 3] += (p * up2)[: n + 2 - 2 - 0][: len(new[2 : r + 3])]
        law = new
    return law[: n + 1]


if __name__ == "__main__":
    import numpy as np
    n, mu = 1000, 1e-3
    law = chain_law(n, mu)
    print("chain law total:", law.sum())
    ld = [float(v) for v in ld_pmf_series(2, n)]
    cdf_chain = np.cumsum(law)
    cdf_ld = np.cumsum(ld)
    print("sup |F_chain - F_LD(2)| :", np.max(np.abs(cdf_chain - cdf_ld)))
    for a in (0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8):
        k = int(np.floor(a * n))
        tail = law[k + 1 :].sum()
        print(f"a={a}: mu^-1 P[B/n>a]={tail / mu:.4f}  asym={2 * (1 / a - 1):.4f} ratio={tail / mu / (2 * (1 / a - 1)):.4f}")
    print("P[B=0..5]:", law[:6])
    print("LD  0..5:", ld[:6])
