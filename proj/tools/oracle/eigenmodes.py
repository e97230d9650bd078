#!/usr/bin/env python3
"""High-precision oracle for the single-excitation sector.

Builds the 4x4 generator for (rho_ee, rho_11, rho_e1-, rho_e1+) of a lossy
resonator coupled to a two-level system (no drive, at most one excitation),
diagonalizes it with mpmath at 50 digits, and compares against the closed-form
decay rate Gamma and oscillation frequency Omega implemented with
cancellation-free algebra.  Prints the reference numbers that the C++ tests
freeze.

Run: python3 tools/oracle/eigenmodes.py
"""

import mpmath as mp

mp.mp.dps = 50


def generator(g, kappa, delta):
    i = mp.mpc(0, 1)
    return mp.matrix([
        [0, 0, i * g, 0],
        [0, -kappa, -i * g, 0],
        [2 * i * g, -2 * i * g, -kappa / 2, -i * delta],
        [0, 0, -i * delta, -kappa / 2],
    ])


def closed_form(g, kappa, delta):
    """Stable (Gamma, Omega): no subtractive cancellation in either branch."""
    A = delta**2 + 4 * g**2 - kappa**2 / 4
    R = mp.sqrt(A**2 + (kappa * delta)**2)
    S = delta**2 + 4 * g**2 + kappa**2 / 4
    if A >= 0:
        B = (kappa * abs(delta) / mp.sqrt(2)) / mp.sqrt(R + A) if (R + A) > 0 else mp.mpf(0)
        Omega = mp.sqrt((R + A) / 2)
    else:
        B = mp.sqrt((R - A) / 2)
        Omega = (kappa * abs(delta) / mp.sqrt(2)) / mp.sqrt(R - A)
    Gamma = 4 * g**2 * kappa**2 / ((S + R) * (kappa + 2 * B))
    sgn = 1 if delta >= 0 else -1
    return Gamma, sgn * Omega


def purcell_exact(g, kappa, delta):
    return closed_form(g, kappa, delta)[0]


def purcell_overlap(g, kappa, delta):
    return (kappa / 2) * (1 - abs(delta) / mp.sqrt(delta**2 + 4 * g**2))


def purcell_golden(g, kappa, delta):
    return kappa * g**2 / (delta**2 + kappa**2 / 4)


def eig_match(g, kappa, delta):
    M = generator(g, kappa, delta)
    ev = mp.eig(M, left=False, right=False)
    Gamma, Omega = closed_form(g, kappa, delta)
    pred = [-Gamma, -(kappa - Gamma),
            -kappa / 2 + mp.mpc(0, 1) * Omega, -kappa / 2 - mp.mpc(0, 1) * Omega]
    scale = max(abs(p) for p in pred) + kappa
    worst = mp.mpf(0)
    rest = list(ev)
    for p in pred:
        k = min(range(len(rest)), key=lambda j: abs(rest[j] - p))
        worst = max(worst, abs(rest.pop(k) - p) / scale)
    return worst


def main():
    print("== eigenvalue closed forms vs 4x4 generator (50-digit) ==")
    worst = mp.mpf(0)
    for ko in (0.1, 0.5, 1, 2, 3.9, 4):
        for do in (0, 1, 5, 20):
            g = mp.mpf(1)
            kappa = mp.mpf(ko) * g
            delta = mp.mpf(do) * g
            w = eig_match(g, kappa, delta)
            worst = max(worst, w)
            print(f"  kappa/g={ko:<4} delta/g={do:<3} scaled mismatch = {mp.nstr(w, 3)}")
    print(f"  worst over grid: {mp.nstr(worst, 3)}")

    print("\n== special values ==")
    g = mp.mpf(1)
    Gamma0, Omega0 = closed_form(g, mp.mpf(1), mp.mpf(0))
    print(f"  delta=0, kappa=g:   Gamma/kappa = {mp.nstr(Gamma0, 20)}  (exactly 1/2)")
    Gamma0, _ = closed_form(g, mp.mpf('3.999'), mp.mpf(0))
    print(f"  delta=0, kappa=3.999g: Gamma/kappa = {mp.nstr(Gamma0 / mp.mpf('3.999'), 20)}")
    gp = purcell_overlap(g, mp.mpf(1), 10 * g)
    print(f"  overlap rate, delta/g=10: Gamma_P/kappa = {mp.nstr(gp, 15)}")

    print("\n== overlap-rate error bound:  |G_P - G|/G < 0.25 k^2/(D^2+4g^2) ==")
    ok = True
    for ko in (0.5, 1, 2, 3.9):
        for do in (0, 1, 5, 20):
            kappa = mp.mpf(ko)
            delta = mp.mpf(do)
            ex = purcell_exact(g, kappa, delta)
            ap = purcell_overlap(g, kappa, delta)
            rel = abs(ap - ex) / ex
            bound = mp.mpf('0.25') * kappa**2 / (delta**2 + 4 * g**2)
            ok = ok and rel < bound
            print(f"  k/g={ko:<4} D/g={do:<3} rel={mp.nstr(rel, 4):<12} bound={mp.nstr(bound, 4)}  {'ok' if rel < bound else 'VIOLATED'}")
    print(f"  bound satisfied everywhere: {ok}")

    print("\n== golden-rule rate within 5% when g <= 0.1 max(kappa,|delta|) ==")
    for ko, do in ((1, 0), (1, 0.5), (10, 0), (1, 10), (0.5, 5)):
        kappa = mp.mpf(ko)
        delta = mp.mpf(do)
        g_small = mp.mpf('0.1') * max(kappa, abs(delta))
        ex = purcell_exact(g_small, kappa, delta)
        gr = purcell_golden(g_small, kappa, delta)
        print(f"  k={ko} D={do}: |golden/exact - 1| = {mp.nstr(abs(gr / ex - 1), 4)}")

    print("\n== no-drive trace approximations: worst pointwise error of rho_ee(t) ==")
    # exact trace from expm of the generator; bare start |e,0>
    for do, ko in ((10, 1), (15, 1), (20, 1), (10, 0.5), (20, 0.25)):
        g = mp.mpf(1)
        delta = mp.mpf(do)
        kappa = mp.mpf(ko)
        Gamma, Omega = closed_form(g, kappa, delta)
        gp = purcell_overlap(g, kappa, delta)
        lam2 = (g / delta)**2
        worst_bk = mp.mpf(0)  # large-kappa form, decay rate Gamma
        worst_bd = mp.mpf(0)  # dispersive form, decay rate Gamma_P
        worst_e = mp.mpf(0)
        M = generator(g, kappa, delta)
        for tt in [mp.mpf(j) / 4 for j in range(1, 81)]:
            t = tt / kappa  # t in units of 1/kappa up to 20/kappa
            P = mp.expm(M * t)
            exact_bare = mp.re(P[0, 0])
            approx_bk = mp.e**(-Gamma * t) * (1 + 8 * g**2 * (kappa**2 - 4 * delta**2) / (kappa**2 + 4 * delta**2)**2) \
                - (8 * g**2 * mp.e**(-kappa * t / 2) / (kappa**2 + 4 * delta**2)**2) \
                * (4 * kappa * abs(delta) * mp.sin(abs(Omega) * t) + (kappa**2 - 4 * delta**2) * mp.cos(Omega * t))
            worst_bk = max(worst_bk, abs(approx_bk - exact_bare))
            approx_bd = mp.e**(-gp * t) * (1 - 2 * lam2) + 2 * lam2 * mp.cos(Omega * t) * mp.e**(-kappa * t / 2)
            worst_bd = max(worst_bd, abs(approx_bd - exact_bare))
            # eigenstate start: rho = |ebar,0><ebar,0|, track its own occupation
            th = mp.atan(2 * g / delta) / 2
            c, s = mp.cos(th), mp.sin(th)
            v0 = mp.matrix([c**2, s**2, mp.mpf(0), 2 * s * c])
            vt = P * v0
            exact_eig = mp.re(c**2 * vt[0] + s**2 * vt[1] + s * c * vt[3])
            amp = lam2**2 * kappa**2 / (2 * g**2)  # g^2 k^2 / (2 D^4)
            approx_eig = mp.e**(-gp * t) * (1 + amp) - amp * mp.cos(Omega * t) * mp.e**(-kappa * t / 2)
            worst_e = max(worst_e, abs(approx_eig - exact_eig))
        print(f"  D/g={do:<3} k/g={ko:<5} large-k err={mp.nstr(worst_bk, 3)}  dispersive err={mp.nstr(worst_bd, 3)}  eigen-start err={mp.nstr(worst_e, 3)}")


if __name__ == "__main__":
    main()
