#!/usr/bin/env python3
"""Symbolic oracle for the dressed-ladder jump rates and their expansions.

Derives, with sympy and a symbolic photon number n:
  * the lambda-expansion of the per-n relaxation rate  Gamma_R(n)/kappa,
  * the lambda-expansion of the per-n excitation rate  gamma_E(n)/kappa,
  * their Poisson averages via the coherent-state moments,
  * the three matrix-element identities connecting dressed-basis elements
    of the annihilation operator to the transformed-operator series blocks.

Everything is derived from the mixing angle theta_m = atan(2*lambda*sqrt(m))/2
alone, so this is an independent source for the coefficient tables frozen in
the C++ tests.

Run: python3 tools/oracle/rate_series.py
"""

import sympy as sp

lam, n = sp.symbols("lambda n", positive=True)


def theta(m):
    return sp.atan(2 * lam * sp.sqrt(m)) / 2


def s(m):
    return sp.sin(theta(m))


def c(m):
    return sp.cos(theta(m))


def expand(expr, order):
    return sp.series(expr, lam, 0, order).removeO().expand()


def poly_by_order(expr, order):
    out = {}
    p = sp.Poly(sp.expand(expr), lam)
    for (k,), coef in p.terms():
        if k < order:
            out[k] = sp.simplify(coef)
    return out


def poisson_moments(expr):
    """Replace n^k with the k-th raw moment of a Poisson(nbar) variable."""
    nb = sp.Symbol("nbar", positive=True)
    moments = {
        1: nb,
        2: nb**2 + nb,
        3: nb**3 + 3 * nb**2 + nb,
        4: nb**4 + 6 * nb**3 + 7 * nb**2 + nb,
        5: nb**5 + 10 * nb**4 + 25 * nb**3 + 15 * nb**2 + nb,
    }
    p = sp.Poly(sp.expand(expr), n)
    out = 0
    for (k,), coef in p.terms():
        out += coef * (moments[k] if k else 1)
    return sp.expand(out)


def main():
    sp.init_printing(use_unicode=False)

    print("== per-n relaxation rate:  bracket of kappa*lambda^2 ==")
    relax_elem = sp.sqrt(n + 1) * s(n + 1) * c(n) - sp.sqrt(n) * s(n) * c(n + 1)
    relax = expand(relax_elem**2, 9)
    relax_br = sp.expand(relax / lam**2)
    for k, coef in sorted(poly_by_order(relax_br, 7).items()):
        print(f"  lambda^{k}: {sp.collect(coef, n)}")

    print("\n== Poisson-averaged relaxation bracket ==")
    for k, coef in sorted(poly_by_order(relax_br, 7).items()):
        print(f"  lambda^{k}: {sp.collect(poisson_moments(coef), sp.Symbol('nbar', positive=True))}")

    print("\n== per-n excitation rate:  bracket of kappa*lambda^6 ==")
    excite_elem = sp.sqrt(n - 1) * s(n) * c(n - 1) - sp.sqrt(n) * s(n - 1) * c(n)
    excite = expand(excite_elem**2, 11)
    excite_br = sp.expand(excite / lam**6)
    for k, coef in sorted(poly_by_order(excite_br, 5).items()):
        print(f"  lambda^{k}: {sp.factor(coef)}")

    print("\n== Poisson-averaged excitation bracket ==")
    for k, coef in sorted(poly_by_order(excite_br, 5).items()):
        print(f"  lambda^{k}: {sp.collect(poisson_moments(coef), sp.Symbol('nbar', positive=True))}")

    print("\n== matrix-element identities (dressed elements vs series blocks) ==")
    # photon sector of a^D: <ebar,n-1| a |ebar,n> and <gbar,n-1| a |gbar,n>
    exact_e = expand(c(n) * c(n + 1) * sp.sqrt(n) + s(n) * s(n + 1) * sp.sqrt(n + 1), 8)
    f1_e = 1 + lam**2 / sp.Integer(2) - lam**4 / 8 * (12 * n + 1) \
        + lam**6 * ((5 * (n - 1)**2 + 10 * (n - 1) + sp.Rational(73, 16)) + n / sp.Integer(4))
    print("  photon block, qubit e:", sp.simplify(expand(exact_e - sp.sqrt(n) * f1_e, 8)))
    exact_g = expand(c(n - 1) * c(n) * sp.sqrt(n) + s(n - 1) * s(n) * sp.sqrt(n - 1), 8)
    f1_g = 1 - lam**2 / sp.Integer(2) + lam**4 / 8 * (12 * (n - 1) + 12 - 1) \
        - lam**6 * ((5 * (n - 1)**2 + 10 * (n - 1) + sp.Rational(73, 16)) - n / sp.Integer(4))
    print("  photon block, qubit g:", sp.simplify(expand(exact_g - sp.sqrt(n) * f1_g, 8)))
    # qubit-decay sector: <gbar,n| a |ebar,n>
    exact_r = expand(relax_elem, 8)
    f2 = lam * (1 - sp.Rational(3, 2) * lam**2 * (2 * n + 1) + lam**4 * (11 * n**2 + 11 * n + sp.Rational(31, 8))
                - lam**6 * (42 * n**3 + 63 * n**2 + sp.Rational(355, 8) * n + sp.Rational(187, 16)))
    print("  decay block:          ", sp.simplify(expand(exact_r - f2, 8)))
    # two-photon excitation sector: <ebar,n-2| a |gbar,n>
    exact_x = expand(-excite_elem, 8)
    f3 = lam**3 * (1 - sp.Rational(5, 2) * lam**2 * (2 * (n - 2) + 3)
                   + lam**4 * (22 * (n - 2)**2 + 66 * (n - 2) + sp.Rational(411, 8)))
    print("  excitation block:     ", sp.simplify(expand(exact_x - sp.sqrt(n * (n - 1)) * f3, 8)))


if __name__ == "__main__":
    main()
