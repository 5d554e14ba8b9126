#!/usr/bin/env python3
"""High-precision reference values for the unit tests.

Written from the closed-form model only; shares no code with the C++ library. The printed
numbers are frozen into tests/*.cpp. Re-run after changing a formula and compare.
"""
from mpmath import mp, mpf, exp, sqrt, log, sin, factorial, findroot, nsum, inf

mp.dps = 50

ZETA, ETA_D, P_D, DELTA, F, U = mpf("0.2"), mpf("0.15"), mpf("8e-8"), mpf("0.015"), mpf("1.2"), mpf("0.046")
P_MULTI, E_D, E_0 = mpf("0.01"), mpf("0.013"), mpf("0.5")


def h(x):
    x = mpf(x)
    if x == 0 or x == 1:
        return mpf(0)
    return -x * log(x, 2) - (1 - x) * log(1 - x, 2)


def eta_c(d):
    return mpf(10) ** (-ZETA * mpf(d) / 10)


def eta_arm(d, eta_d=ETA_D):
    return eta_d * sqrt(eta_c(d))


def yld(n, eta, pd):
    return 1 - (1 - 2 * pd) * (1 - eta) ** n


def gain(u, eta, pd):
    return 1 - exp(-2 * eta * u) + 2 * pd * exp(-2 * eta * u)


def poisson(n, m):
    return exp(-m) * m ** n / factorial(n)


def ex(u, eta, pd, s2):
    return exp(-2 * eta * u) / gain(u, eta, pd) * (pd + 2 * eta * u * s2)


def ez(u, eta, pd, vacuum, terms=200):
    start = 0 if vacuum else 1
    s = sum(sqrt(poisson(2 * n, 2 * u) * yld(2 * n, eta, pd)) for n in range(start, terms))
    return s * s / gain(u, eta, pd)


def rate(d, u=U, pd=P_D, eta_d=ETA_D, delta=DELTA, vacuum=False):
    eta = eta_arm(d, eta_d)
    Q = gain(u, eta, pd)
    e_x = ex(u, eta, pd, sin(delta / 2) ** 2)
    e_z = min(ez(u, eta, pd, vacuum), mpf(1))
    q = 1 - 2 * P_MULTI * (1 - P_MULTI)
    # an error-rate bound E stands for every rate in [0, E]: entropy h(min(E, 1/2))
    branch = q * Q / 2 * (1 - F * h(min(e_x, mpf(0.5))) - h(min(e_z, mpf(0.5))))
    return 2 * max(branch, mpf(0))


def plob(ec):
    return -log(1 - ec, 2)


def dl04(d, pd=P_D):
    ec = eta_c(d)
    qa = ETA_D * ec + pd
    qb = ETA_D * ec * ec + pd
    e = (E_D * ETA_D * ec * ec + E_0 * pd) / qb
    eps = (E_D * ETA_D * ec + E_0 * pd) / qa
    return max(qb * (1 - h(e) - h(min(2 * eps, 1))), mpf(0))


def mdi(d, effective=True, pd=P_D):
    t = ETA_D * eta_c(d) if effective else eta_c(d)
    s = (1 - pd) ** 2
    A = (1 - t) ** 2 * pd ** 2 * s + (1 - t) * t * pd * s
    p_hv = A + t * t * s / 4
    p_hh = A + t * t * pd * s / 2
    p12_pm = A + t * t * pd * s / 4      # P12^{-+}, P12^{+-}, P34^{+-}, P34^{-+}
    p14_pm = A + t * t * (pd + 1) * s / 4  # P14^{-+}, P14^{+-}, P23^{+-}, P23^{-+}
    p12_pp = A + t * t * (pd + 1) * s / 4  # P12^{++}, P34^{++}, P12^{--}, P34^{--}
    p14_pp = A + t * t * pd * s / 4      # P14^{++}, P23^{++}, P14^{--}, P23^{--}
    g_y = p12_pm + p14_pm + p12_pp + p14_pp
    g_z = 2 * (p_hv + p_hh)
    qc1 = t / 3 * (g_y + g_z)
    qc2 = t + (1 - t) * pd
    Q = qc1 * qc2
    e = (E_0 * pd + E_D * t) / qc2
    # sum over pairs (1,4),(2,3) of P++ + P--, and (1,2),(3,4) of P+- + P-+
    num = 2 * (p14_pp + p14_pp) + 2 * (p12_pm + p12_pm)
    eps_hat = num / (4 * g_y)
    eps_y = E_D * (1 - 2 * eps_hat) + eps_hat
    return max(Q * (1 - h(e) - h(eps_y)), mpf(0))


def rep3_block_failure(p, k):
    b = 3 * p * p * (1 - p) + p ** 3
    return 1 - (1 - b) ** k


def root(fn, lo, hi):
    return findroot(fn, (mpf(lo), mpf(hi)), solver="anderson", tol=mpf("1e-30"))


def show(name, value):
    print(f"{name:40s} {mp.nstr(value, 17)}")


if __name__ == "__main__":
    show("h(0.25)", h(mpf("0.25")))
    show("eta_c(0.2,228)", eta_c(228))
    show("mode_match(0.1)", 1 - 2 * mpf("0.1") * mpf("0.9"))
    show("yield(2,0.15,8e-8)", yld(2, mpf("0.15"), P_D))
    show("gain(0.046,0.15,8e-8)", gain(U, mpf("0.15"), P_D))
    show("poisson(0,0.092)", poisson(0, mpf("0.092")))
    show("sum P(n)Y_n, n<=60", sum(poisson(n, 2 * U) * yld(n, mpf("0.15"), P_D) for n in range(61)))
    show("ex(.046,.15,8e-8,s2=.015)", ex(U, mpf("0.15"), P_D, mpf("0.015")))
    show("ex(.046,.15,8e-8,phase .015)", ex(U, mpf("0.15"), P_D, sin(DELTA / 2) ** 2))
    show("ez vacuum", ez(U, mpf("0.15"), P_D, True))
    show("ez no vacuum", ez(U, mpf("0.15"), P_D, False))
    show("ez pd=0", ez(U, mpf("0.15"), 0, False))
    show("plob(0.99)", plob(mpf("0.99")))
    for d in (0, 50, 100, 200, 300, 400):
        show(f"R({d})", rate(d))
    show("R(0) vacuum", rate(0, vacuum=True))
    for d in (0, 50, 100):
        show(f"dl04({d})", dl04(d))
    for d in (0, 20, 50):
        show(f"mdi_eff({d})", mdi(d))
        show(f"mdi_raw({d})", mdi(d, effective=False))
    show("rep3 block fail p=.05 k=100", rep3_block_failure(mpf("0.05"), 100))
    show("rep3 bit fail p=.05", rep3_block_failure(mpf("0.05"), 1))
    show("rep3 threshold k=100", findroot(lambda p: rep3_block_failure(p, 100) - mpf("1e-3"), mpf("0.002")))

    # Distances from the same closed forms; root of R - PLOB and of the branch rate.
    def branch(d):
        eta = eta_arm(d)
        return 1 - F * h(ex(U, eta, P_D, sin(DELTA / 2) ** 2)) - h(min(ez(U, eta, P_D, False), mpf(1)))

    show("PLOB crossing km", root(lambda d: rate(d) - plob(eta_c(d)), 220, 235))
    show("max distance km", root(branch, 440, 446))
    show("dl04 reach km", root(lambda d: (lambda ec: 1 - h((E_D * ETA_D * ec * ec + E_0 * P_D) / (ETA_D * ec * ec + P_D))
                                          - h(min(2 * (E_D * ETA_D * ec + E_0 * P_D) / (ETA_D * ec + P_D), 1)))(eta_c(d)),
                               150, 160))
