#!/usr/bin/env python3
"""Reference values for the Poisson-averaged dressed-state rates.

Computes the exact per-n jump rates from the rotation angles, Poisson-averages
them with the cumulative-weight truncation rule, and prints the frozen values
used by the C++ tests:

  * gamma_R / gamma_P at delta/g = 20, n_bar = n_crit = 100,
  * the excitation-rate maximum location and gamma_E/gamma_P bound at
    delta/g = 5,
  * the collapse spread of gamma_R/gamma_P curves across delta/g = 10/15/20,
  * gamma_E/gamma_R against (n_bar/4 n_crit)^2,
  * series (highest order) vs averaged closed form,
  * the strong-suppression approximation ratio at n_bar = 1e4 n_crit.

Run: python3 tools/oracle/averaged_reference.py
"""

import math


def theta(m, g, delta):
    return math.atan2(2 * g * math.sqrt(m), delta) / 2 if m > 0 else 0.0


def rate_relax(n, g, delta, kappa):
    tn = theta(n, g, delta)
    tn1 = theta(n + 1, g, delta)
    el = math.sqrt(n + 1) * math.sin(tn1) * math.cos(tn) - math.sqrt(n) * math.sin(tn) * math.cos(tn1)
    return kappa * el * el


def rate_excite(n, g, delta, kappa):
    if n < 2:
        return 0.0
    tn = theta(n, g, delta)
    tn1 = theta(n - 1, g, delta)
    el = math.sqrt(n - 1) * math.sin(tn) * math.cos(tn1) - math.sqrt(n) * math.sin(tn1) * math.cos(tn)
    return kappa * el * el


def poisson_average(f, n_bar, tail=1e-12):
    if n_bar == 0:
        return f(0)
    cap = int(n_bar + 12 * math.sqrt(n_bar + 1) + 20)
    logw = -n_bar
    total = 0.0
    acc = 0.0
    for n in range(cap + 1):
        w = math.exp(logw)
        acc += w * f(n)
        total += w
        logw += math.log(n_bar) - math.log(n + 1)
    assert total > 1 - tail, (total, n_bar)
    return acc


def gamma_p(g, delta, kappa):
    return rate_relax(0, g, delta, kappa)


def series_relax(n_bar, lam, kappa):
    l2 = lam * lam
    br = 1 - (6 * n_bar + 3) * l2 + (31 * n_bar**2 + 62 * n_bar + 10) * l2**2 \
        - (150 * n_bar**3 + 675 * n_bar**2 + 520 * n_bar + 35) * l2**3
    return kappa * l2 * br


def series_excite(n_bar, lam, kappa):
    l2 = lam * lam
    br = n_bar**2 - (10 * n_bar**3 + 15 * n_bar**2) * l2 + (69 * n_bar**4 + 276 * n_bar**3 + 159 * n_bar**2) * l2**2
    return kappa * l2**3 * br


def main():
    g, kappa = 1.0, 1.0

    print("== relaxation suppression at delta/g = 20 ==")
    delta = 20.0
    ncrit = delta**2 / (4 * g**2)
    gp = gamma_p(g, delta, kappa)
    gr = poisson_average(lambda n: rate_relax(n, g, delta, kappa), ncrit)
    print(f"  n_crit = {ncrit}, gamma_P/kappa = {gp:.12e}")
    print(f"  gamma_R/gamma_P at n_bar = n_crit: {gr / gp:.10f}")
    x = 1.0
    approx35 = (kappa * g**2 / (4 * delta**2)) * (1 / (1 + x) + 1 / math.sqrt(1 + x))**2
    print(f"  large-n_bar approximation at x=1: {approx35 / gp:.10f}  (exact collapse value (3+2*sqrt(2))/16 = {(3 + 2 * math.sqrt(2)) / 16:.10f})")

    print("\n== excitation maximum at delta/g = 5 ==")
    delta = 5.0
    ncrit = delta**2 / (4 * g**2)
    gp = gamma_p(g, delta, kappa)
    best_x, best = 0.0, -1.0
    xs = [0.5 + 0.01 * k for k in range(601)]
    for x in xs:
        ge = poisson_average(lambda n: rate_excite(n, g, delta, kappa), x * ncrit)
        if ge > best:
            best, best_x = ge, x
    print(f"  argmax_x gamma_E = {best_x:.2f} (expected near 3), gamma_E/gamma_P there = {best / gp:.6f}")
    worst_ratio = max(poisson_average(lambda n: rate_excite(n, g, delta, kappa), x * ncrit) / gp for x in xs)
    print(f"  max gamma_E/gamma_P over x in [0.5, 6.5]: {worst_ratio:.6f}  (< 0.02?)")

    print("\n== collapse across delta/g = 10, 15, 20 ==")
    xs = [0.1 * k for k in range(1, 101)]
    worst = 0.0
    for x in xs:
        vals = []
        for delta in (10.0, 15.0, 20.0):
            nc = delta**2 / 4
            vals.append(poisson_average(lambda n: rate_relax(n, g, delta, kappa), x * nc) / gamma_p(g, delta, kappa))
        spread = (max(vals) - min(vals)) / min(vals)
        worst = max(worst, spread)
    print(f"  worst pairwise spread of gamma_R/gamma_P over x in (0,10]: {worst:.6f}  (< 0.02?)")

    print("\n== gamma_E/gamma_R vs (n_bar/4 n_crit)^2 for n_bar <= n_crit ==")
    worst = 0.0
    for delta in (5.0, 10.0, 15.0, 20.0):
        nc = delta**2 / 4
        for x in [0.1 * k for k in range(1, 11)]:
            nb = x * nc
            ge = poisson_average(lambda n: rate_excite(n, g, delta, kappa), nb)
            gr = poisson_average(lambda n: rate_relax(n, g, delta, kappa), nb)
            bound = (nb / (4 * nc))**2
            worst = max(worst, ge / gr / bound)
    print(f"  max (gamma_E/gamma_R) / (n_bar/4n_crit)^2: {worst:.6f}  (<= 1.1?)")

    print("\n== series (lambda^8 / lambda^10) vs averaged closed form ==")
    delta = 20.0
    lam = g / delta
    nc = delta**2 / 4
    worst_r = 0.0
    for x in [0.05 * k for k in range(1, 11)]:
        nb = x * nc
        s = series_relax(nb, lam, kappa)
        av = poisson_average(lambda n: rate_relax(n, g, delta, kappa), nb)
        worst_r = max(worst_r, abs(s - av) / av)
    print(f"  relax series vs averaged, worst rel over n_bar/n_crit <= 0.5 at delta/g=20: {worst_r:.6f}  (< 0.05?)")
    worst_e = 0.0
    for x in [0.05 * k for k in range(2, 11)]:
        nb = x * nc
        s = series_excite(nb, lam, kappa)
        av = poisson_average(lambda n: rate_excite(n, g, delta, kappa), nb)
        worst_e = max(worst_e, abs(s - av) / av)
    print(f"  excite series vs averaged, same range: {worst_e:.6f}")
    lam, nb = 0.05, 2.0
    s = series_relax(nb, lam, kappa)
    av = poisson_average(lambda n: rate_relax(n, 1.0, 1.0 / lam, kappa), nb)
    print(f"  relax series vs averaged at lambda=0.05, n_bar=2: rel dev {abs(s - av) / av:.3e}  (< 1e-3?)")

    print("\n== strong-suppression approximations at n_bar = 1e4 n_crit ==")
    x = 1e4
    r35 = (1 / (1 + x) + 1 / math.sqrt(1 + x))**2
    r44 = (1 / (1 + x) - 1 / math.sqrt(1 + x))**2
    print(f"  Eq.(44)/Eq.(35)-style ratio: {r44 / r35:.6f}  (> 0.96?)")

    print("\n== spot values for approximation formulas ==")
    delta = 20.0
    nc = 100.0
    gd = kappa * g**2 / delta**2
    print(f"  relax_leading at n_bar=nc/10: {gd * (1 - 1.5 * (nc / 10) / nc):.10e}")
    print(f"  relax_strong at x=3: {gd * (nc / (4 * 3 * nc)) * (1 + 2 * math.sqrt(1 / 3)):.10e}")
    print(f"  excite_leading at n_bar=nc/10: {(gd / 16) * (0.1)**2:.10e}")
    print(f"  excite_strong max value Gamma_d/64 = {gd / 64:.10e} at x=3: {(kappa * g**2 / (4 * delta**2)) * (1 / 4 - 1 / 2)**2:.10e}")


if __name__ == "__main__":
    main()
