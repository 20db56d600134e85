#!/usr/bin/env python3
"""Offline fixture pipeline.

Generates the committed numeric fixtures in tests/fixtures/ using an
implementation that is fully independent of the C++ library: composite
Simpson quadrature in extended precision and a Newton solver for the
population MLE in an orthonormalized polynomial basis.

Run from the repository root:  python3 scripts/make_fixtures.py
"""
import json
import os

import numpy as np

LD = np.longdouble


def simpson_grid(a, b, panels):
    n = 2 * panels
    x = np.linspace(LD(a), LD(b), n + 1, dtype=LD)
    w = np.ones(n + 1, dtype=LD)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    w *= (LD(b) - LD(a)) / (LD(3) * n)
    return x, w


def simpson(fn, a, b, panels=1 << 20):
    x, w = simpson_grid(a, b, panels)
    return np.sum(w * fn(x))


def f_sin10(x):
    return np.sin(LD(10) * x)


def orthonormal_basis(x, w, k):
    """Columns 1, x, ..., x^k orthonormalized under sum(w * u * v).

    Returns (phi, A): phi[:, j] are the basis values on the grid and A the
    coefficient transform, phi[:, j] = sum_m A[m, j] x^m.  Classical
    Gram-Schmidt applied twice in extended precision.
    """
    n = len(x)
    V = np.empty((n, k + 1), dtype=LD)
    V[:, 0] = 1
    for j in range(1, k + 1):
        V[:, j] = V[:, j - 1] * x
    A = np.eye(k + 1, dtype=LD)
    phi = V.copy()
    for j in range(k + 1):
        for _ in range(2):
            for i in range(j):
                c = np.sum(w * phi[:, j] * phi[:, i])
                phi[:, j] -= c * phi[:, i]
                A[:, j] -= c * A[:, i]
        nrm = np.sqrt(np.sum(w * phi[:, j] ** 2))
        phi[:, j] /= nrm
        A[:, j] /= nrm
    return phi, A


def population_mle(fvals, x, w, k, tol=LD(1e-16), max_iter=200):
    """Newton minimization of KL(P(f,S) || P(q,S)) over degree-k polynomials.

    Works in the basis orthonormal w.r.t. the uniform measure on S; the
    constant basis element is excluded (normalization absorbs it).
    Returns monomial coefficients including the constant term.
    """
    phi, A = orthonormal_basis(x, w, k)
    phi = phi[:, 1:]
    e_f = np.exp(fvals)
    zf = np.sum(w * e_f)
    p_f = e_f / zf
    target = phi.T @ (w * p_f)

    c = np.zeros(k, dtype=LD)
    for _ in range(max_iter):
        g = phi @ c
        g -= g.max()
        e_g = np.exp(g)
        z = np.sum(w * e_g)
        p_g = e_g / z
        mean = phi.T @ (w * p_g)
        grad = mean - target
        gn = np.sqrt(np.sum(grad**2))
        if gn < tol:
            break
        centered = phi - mean[None, :]
        H = centered.T @ (centered * (w * p_g)[:, None])
        step = np.linalg.solve(H.astype(np.float64), grad.astype(np.float64))
        step = step.astype(LD)
        # Armijo backtracking on the MLE objective.
        def obj(cc):
            gg = phi @ cc
            m = gg.max()
            return np.log(np.sum(w * np.exp(gg - m))) + m - np.sum(cc * target)
        f0 = obj(c)
        t = LD(1)
        slope = np.sum(grad * step)
        while obj(c - t * step) > f0 - LD(1e-4) * t * slope:
            t /= 2
            if t < LD(1e-12):
                break
        c = c - t * step
    v = A[:, 1:] @ c  # monomial coefficients, constant term included
    return v, gn


def polyval_ld(v, x):
    out = np.zeros_like(x)
    for coef in v[::-1]:
        out = out * x + coef
    return out


def tv_distance(logp, logq, a, b, panels=1 << 17):
    x, w = simpson_grid(a, b, panels)
    lp = logp(x)
    lq = logq(x)
    zp = np.sum(w * np.exp(lp - lp.max())) * np.exp(lp.max() - lp.max())
    p = np.exp(lp - lp.max()) / np.sum(w * np.exp(lp - lp.max()))
    q = np.exp(lq - lq.max()) / np.sum(w * np.exp(lq - lq.max()))
    return float(LD(0.5) * np.sum(w * np.abs(p - q)))


def main():
    out = {}

    # --- plain quadrature fixtures -------------------------------------
    I_box = simpson(lambda x: np.exp(f_sin10(x)), 0, 1)
    I_half = simpson(lambda x: np.exp(f_sin10(x)), 0, 0.5)
    out["exp_sin10_integral_box"] = float(I_box)
    out["exp_sin10_integral_half"] = float(I_half)
    out["psi_sin10_half"] = float(np.log(I_half))
    out["psi_sin10_box"] = float(np.log(I_box))

    # KL(P(f,S) || uniform on S) for f = sin(10x), S = [0,1/2]
    x, w = simpson_grid(0, 0.5, 1 << 18)
    p = np.exp(f_sin10(x)) / I_half
    out["kl_sin10_vs_uniform_half"] = float(np.sum(w * p * np.log(p * LD(0.5))))

    # KL(uniform[0,1] || P(v,[0,1])) for d=1, k=1, v=[1]
    x, w = simpson_grid(0, 1, 1 << 18)
    z1 = np.sum(w * np.exp(x))
    q = np.exp(x) / z1
    out["kl_uniform_vs_exp_x"] = float(np.sum(w * 1.0 * np.log(1.0 / q)))

    # mean of P([1], [0,1]):  int x e^x / int e^x
    out["mean_exp_x"] = float(np.sum(w * x * np.exp(x)) / z1)

    # CDF of P(sin10, [0,1/2]) at 0.25
    x, w = simpson_grid(0, 0.25, 1 << 18)
    out["cdf_sin10_half_at_quarter"] = float(
        np.sum(w * np.exp(f_sin10(x))) / I_half
    )

    # sup |f - taylor_10| on [0,1/2] and the matching KL (kl_supnorm fixture)
    tay = np.zeros(11, dtype=LD)
    fact = LD(1)
    for j in range(1, 11):
        fact *= j
        tay[j] = LD(10) ** j * np.sin(LD(j) * np.pi / 2) / fact
    x, _ = simpson_grid(0, 0.5, 1 << 16)
    sup = float(np.max(np.abs(f_sin10(x) - polyval_ld(tay, x))))
    out["supnorm_sin10_minus_taylor10_half"] = sup

    x, w = simpson_grid(0, 0.5, 1 << 18)
    fv = f_sin10(x)
    gv = polyval_ld(tay, x)
    pf = np.exp(fv) / np.sum(w * np.exp(fv))
    pg = np.exp(gv) / np.sum(w * np.exp(gv))
    out["kl_sin10_vs_taylor10_half"] = float(np.sum(w * pf * np.log(pf / pg)))

    # --- population MLE sweep (the running 1-D example) ----------------
    degrees = [4, 6, 8, 10, 12, 14, 16, 18, 20]
    xS, wS = simpson_grid(0, 0.5, 1 << 16)
    fS = f_sin10(xS)
    sweep = {}
    for k in degrees:
        v, gn = population_mle(fS, xS, wS, k)
        tv_S = tv_distance(
            lambda x: f_sin10(x), lambda x: polyval_ld(v, x), 0, 0.5
        )
        tv_K = tv_distance(
            lambda x: f_sin10(x), lambda x: polyval_ld(v, x), 0, 1
        )
        sweep[str(k)] = {
            "tv_on_S": tv_S,
            "tv_on_K": tv_K,
            "grad_norm": float(gn),
        }
        if k == 10:
            out["mle10_coeffs"] = [float(c) for c in v[1:]]
            out["tv_on_K_degree10"] = tv_K
        print(f"k={k:2d}  tv_S={tv_S:.3e}  tv_K={tv_K:.3e}  |grad|={gn:.1e}")
    out["mle_sweep"] = sweep

    # thresholds used by the example-1d reproduction
    out["thresholds"] = {
        "tv_on_S_max": {
            k: d["tv_on_S"] * 1.25 + 5e-4 for k, d in sweep.items()
        },
        "tv_on_K_high_degree": 0.05,
        "high_degrees": [16, 18, 20],
    }

    os.makedirs("tests/fixtures", exist_ok=True)
    with open("tests/fixtures/example1d.json", "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
    print("wrote tests/fixtures/example1d.json")


if __name__ == "__main__":
    main()
