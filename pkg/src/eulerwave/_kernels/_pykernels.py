"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two are checked against each other in the test-suite.
"""

import math

import numpy as np

SQRT2 = math.sqrt(2.0)
# rho_- |u_-|^2 for the fixed shock datum u_- = (-1/4, 2 sqrt 2)
KINETIC_MINUS = 1.0 / 16.0 + 8.0
# rho_+ |u_+|^2 / 2 for u_+ = (-1/4, 0)
HALF_KINETIC_PLUS = 1.0 / 8.0

N_CONDITIONS = 10


def fan_conditions(params, printed=False):
    """Residuals, margins and scales of the ten fan relations.

    ``params`` has shape (M, 8) with columns
    (nu_minus, nu_plus, rho1, alpha, beta, gamma, delta, C1).
    Returns an (M, 20) array: columns 0-5 hold LHS - RHS of the six
    equalities, 6-9 the inequality margins (positive = satisfied), and
    columns 10-19 the matching scales |LHS| + |RHS| used for tolerances.
    """
    p = np.ascontiguousarray(params, dtype=np.float64).reshape(-1, 8)
    nm, npl, r, a, b, g, d, c = p.T
    out = np.empty((p.shape[0], 2 * N_CONDITIONS))

    kin = KINETIC_MINUS ** 2 if printed else KINETIC_MINUS
    r2 = r * r
    pairs = [
        (nm * (1.0 - r), 2.0 * SQRT2 - r * b),
        (nm * (-0.25 - r * a), -1.0 / SQRT2 - r * d),
        (nm * (2.0 * SQRT2 - r * b), 8.0 + r * g + 1.0 - r2 - r * c / 2.0),
        (npl * (r - 4.0), r * b),
        (npl * (r * a + 1.0), r * d),
        (npl * (r * b), -r * g + r2 - 16.0 + r * c / 2.0),
    ]
    for k, (lhs, rhs) in enumerate(pairs):
        out[:, k] = lhs - rhs
        out[:, N_CONDITIONS + k] = np.abs(lhs) + np.abs(rhs)

    out[:, 6] = c - (a * a + b * b)
    out[:, 16] = np.abs(c) + a * a + b * b

    f1 = c / 2.0 - a * a + g
    f2 = c / 2.0 - b * b - g
    off = (d - a * b) ** 2
    out[:, 7] = f1 * f2 - off
    out[:, 17] = np.abs(f1 * f2) + off

    lhs = nm * (1.0 - r2) + nm * (kin / 2.0 - r * c / 2.0)
    rhs = 2.0 * 2.0 * SQRT2 - 2.0 * r2 * b + SQRT2 * kin - r * b * c / 2.0
    out[:, 8] = rhs - lhs
    out[:, 18] = np.abs(lhs) + np.abs(rhs)

    lhs = npl * (r2 - 16.0) + npl * (r * c / 2.0 - HALF_KINETIC_PLUS)
    rhs = 2.0 * r2 * b + r * b * c / 2.0
    out[:, 9] = rhs - lhs
    out[:, 19] = np.abs(lhs) + np.abs(rhs)
    return out


def det_factored(a, b):
    """Closed-form det(Z - Z~) for p(rho) = rho^2.

    ``a`` and ``b`` have shape (M, 3) holding (rho, u1, u2).
    """
    a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 3)
    b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 3)
    r, rt = a[:, 0], b[:, 0]
    du2 = (a[:, 1] - b[:, 1]) ** 2 + (a[:, 2] - b[:, 2]) ** 2
    dsq = r * r - rt * rt
    return dsq * (-r * rt * du2 + dsq * (r - rt))


def bump(s):
    """exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside; peak value 1."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def dbump(s):
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    den = 1.0 - si * si
    out[inside] = np.exp(1.0 - 1.0 / den) * (-2.0 * si / (den * den))
    return out


def sector_weak_integrals(speeds, values, bumps, n_t, gl_nodes, gl_weights):
    """Weak-form integrals of a self-similar piecewise-constant field.

    The field lives on (t, x2); sector j is {speeds[j-1] t < x2 < speeds[j] t}
    and carries the (R, 2) block ``values[j]`` whose columns are the t- and
    x2-fluxes of R scalar balance laws. For each bump
    psi = phi((t - ct)/rt) phi((x2 - cx)/rx) the result is
    sum_j int int (d_t psi) V[j, :, 0] + (d_x2 psi) V[j, :, 1].

    t uses an ``n_t``-point midpoint rule; in x2 the support is cut at the
    interfaces and each piece gets the supplied Gauss-Legendre rule.
    """
    speeds = np.ascontiguousarray(speeds, dtype=np.float64).reshape(-1)
    values = np.ascontiguousarray(values, dtype=np.float64)
    bumps = np.ascontiguousarray(bumps, dtype=np.float64).reshape(-1, 4)
    gx = np.asarray(gl_nodes, dtype=np.float64)
    gw = np.asarray(gl_weights, dtype=np.float64)
    nsec, nrow = values.shape[0], values.shape[1]
    out = np.zeros((bumps.shape[0], nrow))
    st = (2.0 * (np.arange(n_t) + 0.5) / n_t) - 1.0
    ft, dft = bump(st), dbump(st)

    for ib, (ct, rt, cx, rx) in enumerate(bumps):
        t = ct + rt * st
        lo, hi = cx - rx, cx + rx
        edges = np.empty((n_t, nsec + 1))
        edges[:, 0] = lo
        edges[:, -1] = hi
        edges[:, 1:-1] = np.clip(np.outer(t, speeds), lo, hi)
        half = 0.5 * (edges[:, 1:] - edges[:, :-1])
        mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
        x = mid[:, :, None] + half[:, :, None] * gx
        sx = (x - cx) / rx
        w = half[:, :, None] * gw
        a = np.sum(w * bump(sx), axis=2)
        dd = np.sum(w * dbump(sx), axis=2) / rx
        wt = 2.0 * rt / n_t
        dt_part = (dft / rt * wt)[:, None] * a
        dx_part = (ft * wt)[:, None] * dd
        out[ib] = (np.einsum("tj,jr->r", dt_part, values[:, :, 0])
                   + np.einsum("tj,jr->r", dx_part, values[:, :, 1]))
    return out
