#!/usr/bin/env python3
"""Numeric oracle for the exact diagonalizing transform and its series form.

Builds the two-level-plus-resonator space (qubit slow index, g sector first),
the exact transform D = expm(-Lambda(N_e) I_-) with
Lambda(m) = atan(2*lambda*sqrt(m))/(2*sqrt(m)), Lambda(0) = lambda, and checks:

  * unitarity of D,
  * diagonality of D^dag H_JC D and its pair eigenvalues,
  * D|bare> against the rotation-built dressed vectors,
  * the three matrix-element identities at lambda = 0.1 (cutoff 45),
  * the norm of (exact - series) transformed annihilation operator restricted
    to photon numbers n <= 10 at lambda = 0.05 (cutoff 40), giving the frozen
    bound used by the C++ test,
  * unitarity of the displacement operator built from the truncated generator.

Run: python3 tools/oracle/transform_residual.py
"""

import math

import numpy as np
import scipy.linalg as sla


def build_ops(nmax):
    dim_f = nmax + 1
    af = np.diag(np.sqrt(np.arange(1, dim_f)), 1)
    iq = np.eye(2)
    if_ = np.eye(dim_f)
    # qubit slow index: g sector rows [0, dim_f), e sector rows [dim_f, 2 dim_f)
    a = np.kron(iq, af)
    sz = np.kron(np.diag([-1.0, 1.0]), if_)
    sm = np.kron(np.array([[0, 1], [0, 0]]), if_)  # |g><e|
    sp = sm.T.conj()
    return a, sz, sm, sp


def transform(nmax, lam):
    a, sz, sm, sp = build_ops(nmax)
    ne = a.T.conj() @ a + np.kron(np.diag([0.0, 1.0]), np.eye(nmax + 1))
    m = np.real(np.diag(ne))
    lam_diag = np.where(m > 0, np.arctan(2 * lam * np.sqrt(np.maximum(m, 1e-300))) / (2 * np.sqrt(np.maximum(m, 1e-300))), lam)
    im = sp @ a - sm @ a.T.conj()
    gen = -np.diag(lam_diag) @ im
    return sla.expm(gen), a, sz, sm, sp


def dressed_vec(label, n, lam, nmax):
    dim_f = nmax + 1
    v = np.zeros(2 * dim_f)

    def th(m):
        return np.arctan(2 * lam * np.sqrt(m)) / 2 if m > 0 else 0.0

    if label == "e":
        t = th(n + 1)
        v[dim_f + n] = np.cos(t)
        v[n + 1] = np.sin(t)
    else:
        t = th(n)
        v[n] = np.cos(t)
        if n >= 1:
            v[dim_f + n - 1] = -np.sin(t)
    return v


def series_ad(nmax, lam, order):
    a, sz, sm, sp = build_ops(nmax)
    nhat = a.T.conj() @ a
    one = np.eye(2 * (nmax + 1))

    def nppow(k):
        return np.linalg.matrix_power(nhat, k)

    f1 = one.copy()
    if order >= 2:
        f1 = f1 + lam**2 / 2 * sz
    if order >= 4:
        f1 = f1 - lam**4 / 8 * (12 * (nhat + one) @ sz + one)
    if order >= 6:
        f1 = f1 + lam**6 * ((5 * nppow(2) + 10 * nhat + 73 / 16 * one) @ sz + (nhat + one) / 4)
    out = f1 @ a
    if order >= 1:
        f2 = one.copy()
        if order >= 3:
            f2 = f2 - 1.5 * lam**2 * (2 * nhat + one)
        if order >= 5:
            f2 = f2 + lam**4 * (11 * nppow(2) + 11 * nhat + 31 / 8 * one)
        if order >= 7:
            f2 = f2 - lam**6 * (42 * nppow(3) + 63 * nppow(2) + 355 / 8 * nhat + 187 / 16 * one)
        out = out + lam * f2 @ sm
    if order >= 3:
        f3 = one.copy()
        if order >= 5:
            f3 = f3 - 2.5 * lam**2 * (2 * nhat + 3 * one)
        if order >= 7:
            f3 = f3 + lam**4 * (22 * nppow(2) + 66 * nhat + 411 / 8 * one)
        out = out + lam**3 * f3 @ (a @ a @ sp)
    return out


def main():
    np.set_printoptions(precision=3)

    print("== lambda = 0.1, cutoff 45 (identity suite scale) ==")
    nmax, lam = 45, 0.1
    delta, g = 10.0, 1.0
    D, a, sz, sm, sp = transform(nmax, lam)
    dim_f = nmax + 1
    print(f"  ||D^dag D - 1|| = {np.linalg.norm(D.T.conj() @ D - np.eye(2 * dim_f), 2):.3e}")
    hjc = delta / 2 * sz + g * (a.T.conj() @ sm + a @ sp)
    hd = D.T.conj() @ hjc @ D
    off = hd - np.diag(np.diag(hd))
    keep = [q * dim_f + n for q in (0, 1) for n in range(dim_f - 2)]
    off_r = off[np.ix_(keep, keep)]
    print(f"  off-diag norm of D^dag H D (excl. top two Fock): {np.linalg.norm(off_r, 2):.3e}  (H norm {np.linalg.norm(hjc, 2):.3e})")
    # pair eigenvalues vs splitting/2
    worst = 0.0
    for m in range(1, dim_f):
        spl = np.sqrt(delta**2 + 4 * m * g**2)
        worst = max(worst, abs(abs(hd[dim_f + m - 1, dim_f + m - 1].real) - spl / 2) / (spl / 2))
    print(f"  pair eigenvalue vs splitting/2, worst rel: {worst:.3e}")
    # D|bare> vs rotation-built dressed vectors
    worst = 0.0
    for n in range(dim_f - 1):
        worst = max(worst, np.linalg.norm(D[:, dim_f + n] - dressed_vec("e", n, lam, nmax)))
    for n in range(dim_f):
        worst = max(worst, np.linalg.norm(D[:, n] - dressed_vec("g", n, lam, nmax)))
    print(f"  D columns vs dressed rotations, worst: {worst:.3e}")
    # identities: dressed-basis elements of a vs bare elements of D^dag a D
    ad = D.T.conj() @ a @ D
    w1 = w2 = w3 = 0.0
    for n in range(1, 36):
        lhs = dressed_vec("e", n - 1, lam, nmax) @ a @ dressed_vec("e", n, lam, nmax)
        w1 = max(w1, abs(lhs - ad[dim_f + n - 1, dim_f + n]))
        lhs = dressed_vec("g", n, lam, nmax) @ a @ dressed_vec("e", n, lam, nmax)
        w2 = max(w2, abs(lhs - ad[n, dim_f + n]))
        if n >= 2:
            lhs = dressed_vec("e", n - 2, lam, nmax) @ a @ dressed_vec("g", n, lam, nmax)
            w3 = max(w3, abs(lhs - ad[dim_f + n - 2, n]))
    print(f"  identities (n<=35): photon {w1:.3e}, decay {w2:.3e}, excite {w3:.3e}")
    # series vs exact at the same lambda, order 7, away from the edge
    ser = series_ad(nmax, lam, 7)
    keep10 = [q * dim_f + n for q in (0, 1) for n in range(36)]
    diff = (ad - ser)[np.ix_(keep10, keep10)]
    print(f"  ||exact - series(7)|| restricted n<=35 at lambda=0.1: {np.linalg.norm(diff, 2):.3e}")

    print("\n== lambda = 0.05, cutoff 40 (frozen series-residual scale) ==")
    nmax, lam = 40, 0.05
    D, a, sz, sm, sp = transform(nmax, lam)
    dim_f = nmax + 1
    ad = D.T.conj() @ a @ D
    ser = series_ad(nmax, lam, 7)
    keep10 = [q * dim_f + n for q in (0, 1) for n in range(11)]
    diff = (ad - ser)[np.ix_(keep10, keep10)]
    print(f"  ||exact - series(7)|| restricted n<=10: 2-norm {np.linalg.norm(diff, 2):.6e}, fro {np.linalg.norm(diff):.6e}")
    for order in (1, 3, 5):
        d = (ad - series_ad(nmax, lam, order))[np.ix_(keep10, keep10)]
        print(f"  order {order}: 2-norm {np.linalg.norm(d, 2):.6e}")

    print("\n== displacement unitarity (truncated-generator exponential) ==")
    nmax = 40
    af = np.diag(np.sqrt(np.arange(1, nmax + 1)), 1)
    alpha = 2.0  # |alpha|^2 = 4
    gen = alpha * af.T.conj() - np.conj(alpha) * af
    Dd = sla.expm(gen)
    print(f"  ||D^dag D - 1|| at |alpha|^2=4, cutoff 40: {np.linalg.norm(Dd.T.conj() @ Dd - np.eye(nmax + 1), 2):.3e}")
    print(f"  ||D(a)D(-a) - 1||: {np.linalg.norm(Dd @ sla.expm(-gen) - np.eye(nmax + 1), 2):.3e}")
    # coherent-state quality: displaced vacuum vs analytic coefficients
    v = Dd[:, 0]
    ref = np.exp(-abs(alpha)**2 / 2) * np.array([alpha**n / math.sqrt(math.factorial(n)) for n in range(nmax + 1)])
    print(f"  displaced vacuum vs coherent coefficients: {np.linalg.norm(v - ref):.3e}")


if __name__ == "__main__":
    main()
