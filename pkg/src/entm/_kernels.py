"""Compiled inner loops: 4x4 Jacobi diagonalization and the separable-state simplex search.

Everything here works on raw numpy arrays and is called from the validated
public wrappers in :mod:`entm.qcore` and :mod:`entm.measures`.
"""

import numpy as np
from numba import njit

INV_LN2 = 1.0 / np.log(2.0)
LOG_FLOOR = 1e-12
SUPPORT_TOL = 1e-10
PENALTY = 1e6

N_PRODUCT = 16
N_PARAMS = 79


@njit(cache=True)
def jacobi_eigh(a, tol=1e-15, max_sweeps=50):
    """Cyclic complex Jacobi for a small Hermitian matrix.

    Returns unsorted eigenvalues and the unitary whose columns are the
    eigenvectors. Stops when the off-diagonal Frobenius norm drops below
    ``tol`` times the Frobenius norm of ``a``.
    """
    n = a.shape[0]
    A = np.empty((n, n), np.complex128)
    for i in range(n):
        for j in range(n):
            A[i, j] = 0.5 * (a[i, j] + np.conj(a[j, i]))
    V = np.zeros((n, n), np.complex128)
    for i in range(n):
        V[i, i] = 1.0
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j].real ** 2 + A[i, j].imag ** 2
    thresh = (tol * tol) * max(scale, 1e-300)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += A[p, q].real ** 2 + A[p, q].imag ** 2
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                ph = apq / mag
                theta = 0.5 * np.arctan2(2.0 * mag, A[q, q].real - A[p, p].real)
                c = np.cos(theta)
                s = np.sin(theta)
                sp = s * ph
                spc = s * np.conj(ph)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - spc * akq
                    A[k, q] = sp * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - sp * aqk
                    A[q, k] = spc * apk + c * aqk
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - spc * vkq
                    V[k, q] = sp * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i].real
    return w, V


@njit(cache=True)
def decode_separable(x, out):
    """Write sum_k w_k |a_k b_k><a_k b_k| into ``out``.

    ``x[:15]`` are softmax logits (the first of 16 is pinned to zero),
    ``x[15:]`` are (theta_A, phi_A, theta_B, phi_B) for each product state.
    """
    w = np.empty(N_PRODUCT)
    w[0] = 0.0
    for k in range(N_PRODUCT - 1):
        w[k + 1] = x[k]
    m = w.max()
    tot = 0.0
    for k in range(N_PRODUCT):
        w[k] = np.exp(w[k] - m)
        tot += w[k]
    for i in range(4):
        for j in range(4):
            out[i, j] = 0.0
    v = np.empty(4, np.complex128)
    for k in range(N_PRODUCT):
        o = N_PRODUCT - 1 + 4 * k
        ta = 0.5 * x[o]
        tb = 0.5 * x[o + 2]
        a0 = np.cos(ta)
        a1 = np.exp(1j * x[o + 1]) * np.sin(ta)
        b0 = np.cos(tb)
        b1 = np.exp(1j * x[o + 3]) * np.sin(tb)
        v[0] = a0 * b0
        v[1] = a0 * b1
        v[2] = a1 * b0
        v[3] = a1 * b1
        wk = w[k] / tot
        for i in range(4):
            vi = wk * v[i]
            for j in range(4):
                out[i, j] += vi * np.conj(v[j])


@njit(cache=True)
def cross_entropy(rho, sigma):
    """-Tr(rho log2 sigma), or PENALTY + overlap when the support check fails."""
    g, U = jacobi_eigh(sigma)
    t = 0.0
    for k in range(4):
        ov = 0.0
        for i in range(4):
            ci = np.conj(U[i, k])
            for j in range(4):
                ov += (ci * rho[i, j] * U[j, k]).real
        if g[k] < LOG_FLOOR:
            if ov > SUPPORT_TOL:
                return PENALTY + ov
            continue
        t -= ov * np.log(g[k])
    return t * INV_LN2


@njit(cache=True)
def ree_objective(x, rho, neg_entropy, buf):
    decode_separable(x, buf)
    return neg_entropy + cross_entropy(rho, buf)


@njit(cache=True)
def nelder_mead(x0, step, rho, neg_entropy, max_iter, fatol,
                alpha=1.0, gamma=2.0, beta=0.5, shrink=0.5):
    """Standard Nelder-Mead on ``ree_objective`` from an axis-aligned simplex.

    Returns (best x, best f, iterations, converged flag, final value spread).
    """
    n = x0.size
    buf = np.empty((4, 4), np.complex128)
    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    for i in range(n + 1):
        for j in range(n):
            sim[i, j] = x0[j]
        if i > 0:
            sim[i, i - 1] += step
        fs[i] = ree_objective(sim[i], rho, neg_entropy, buf)
    xr = np.empty(n)
    xe = np.empty(n)
    xc = np.empty(n)
    xbar = np.empty(n)
    it = 0
    converged = False
    while True:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]
        spread = fs[n] - fs[0]
        if spread <= fatol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += sim[i, j]
            xbar[j] = acc / n
        for j in range(n):
            xr[j] = xbar[j] + alpha * (xbar[j] - sim[n, j])
        fr = ree_objective(xr, rho, neg_entropy, buf)
        if fr < fs[0]:
            for j in range(n):
                xe[j] = xbar[j] + gamma * (xr[j] - xbar[j])
            fe = ree_objective(xe, rho, neg_entropy, buf)
            if fe < fr:
                sim[n] = xe
                fs[n] = fe
            else:
                sim[n] = xr
                fs[n] = fr
        elif fr < fs[n - 1]:
            sim[n] = xr
            fs[n] = fr
        else:
            if fr < fs[n]:
                for j in range(n):
                    xc[j] = xbar[j] + beta * (xr[j] - xbar[j])
                fc = ree_objective(xc, rho, neg_entropy, buf)
                accept = fc <= fr
            else:
                for j in range(n):
                    xc[j] = xbar[j] + beta * (sim[n, j] - xbar[j])
                fc = ree_objective(xc, rho, neg_entropy, buf)
                accept = fc < fs[n]
            if accept:
                sim[n] = xc
                fs[n] = fc
            else:
                for i in range(1, n + 1):
                    for j in range(n):
                        sim[i, j] = sim[0, j] + shrink * (sim[i, j] - sim[0, j])
                    fs[i] = ree_objective(sim[i], rho, neg_entropy, buf)
    return sim[0].copy(), fs[0], it, converged, fs[n] - fs[0]


@njit(cache=True)
def restarted_nelder_mead(x0, rho, neg_entropy, step, fatol, max_iter, cycle_iter):
    """Nelder-Mead with the simplex rebuilt around the incumbent after each cycle.

    A cycle ends on collapse (value spread <= fatol) or after ``cycle_iter``
    iterations. The search stops once a collapsed cycle fails to improve the
    incumbent by more than ``fatol``; that is the converged outcome.
    """
    buf = np.empty((4, 4), np.complex128)
    x = x0.copy()
    fbest = ree_objective(x, rho, neg_entropy, buf)
    used = 0
    converged = False
    spread = np.inf
    while used < max_iter:
        budget = min(cycle_iter, max_iter - used)
        xn, fn, it, conv, spread = nelder_mead(x, step, rho, neg_entropy, budget, fatol)
        used += max(it, 1)
        gain = fbest - fn
        if fn < fbest:
            x = xn
            fbest = fn
        if conv:
            if gain <= fatol:
                converged = True
                break
            step = max(step * 0.3, 1e-4)
        else:
            step = step * 0.6
    return x, fbest, used, converged, spread


@njit(cache=True)
def separable_pullback(x, M, grad):
    """Gradient of Re Tr(M sigma(x)) with respect to the separable parameters.

    ``M`` must be Hermitian; only the first 79 entries of ``grad`` are written.
    """
    w = np.empty(N_PRODUCT)
    w[0] = 0.0
    for k in range(N_PRODUCT - 1):
        w[k + 1] = x[k]
    m = w.max()
    tot = 0.0
    for k in range(N_PRODUCT):
        w[k] = np.exp(w[k] - m)
        tot += w[k]
    for k in range(N_PRODUCT):
        w[k] /= tot
    c = np.empty(N_PRODUCT)
    v = np.empty(4, np.complex128)
    dv = np.zeros((4, 4), np.complex128)
    Mv = np.empty(4, np.complex128)
    for k in range(N_PRODUCT):
        o = N_PRODUCT - 1 + 4 * k
        ta = 0.5 * x[o]
        tb = 0.5 * x[o + 2]
        ea = np.exp(1j * x[o + 1])
        eb = np.exp(1j * x[o + 3])
        a0 = np.cos(ta)
        a1 = ea * np.sin(ta)
        b0 = np.cos(tb)
        b1 = eb * np.sin(tb)
        da0 = -0.5 * np.sin(ta)
        da1 = 0.5 * ea * np.cos(ta)
        db0 = -0.5 * np.sin(tb)
        db1 = 0.5 * eb * np.cos(tb)
        v[0] = a0 * b0
        v[1] = a0 * b1
        v[2] = a1 * b0
        v[3] = a1 * b1
        # rows: d/dtheta_A, d/dphi_A, d/dtheta_B, d/dphi_B
        dv[0, 0] = da0 * b0
        dv[0, 1] = da0 * b1
        dv[0, 2] = da1 * b0
        dv[0, 3] = da1 * b1
        dv[1, 2] = 1j * a1 * b0
        dv[1, 3] = 1j * a1 * b1
        dv[2, 0] = a0 * db0
        dv[2, 1] = a0 * db1
        dv[2, 2] = a1 * db0
        dv[2, 3] = a1 * db1
        dv[3, 1] = 1j * a0 * b1
        dv[3, 3] = 1j * a1 * b1
        for i in range(4):
            acc = 0.0 + 0.0j
            for j in range(4):
                acc += M[i, j] * v[j]
            Mv[i] = acc
        ck = 0.0
        for i in range(4):
            ck += (np.conj(v[i]) * Mv[i]).real
        c[k] = ck
        for t in range(4):
            acc = 0.0
            for i in range(4):
                acc += (np.conj(dv[t, i]) * Mv[i]).real
            grad[o + t] = 2.0 * w[k] * acc
    cbar = 0.0
    for k in range(N_PRODUCT):
        cbar += w[k] * c[k]
    for k in range(1, N_PRODUCT):
        grad[k - 1] = w[k] * (c[k] - cbar)


@njit(cache=True)
def ree_value_and_grad(x, rho, neg_entropy, grad):
    """Objective and gradient for the quasi-Newton stage.

    The sigma-derivative of -Tr(rho log sigma) is minus the Frechet derivative
    of log at sigma applied to rho: divided differences of log in sigma's
    eigenbasis.
    """
    buf = np.empty((4, 4), np.complex128)
    decode_separable(x, buf)
    g, U = jacobi_eigh(buf)
    Rt = U.conj().T @ rho @ U
    f = 0.0
    for k in range(4):
        if g[k] < LOG_FLOOR:
            if Rt[k, k].real > SUPPORT_TOL:
                grad[:] = 0.0
                return PENALTY + Rt[k, k].real
            continue
        f -= Rt[k, k].real * np.log(g[k])
    f = neg_entropy + f * INV_LN2
    gc = np.empty(4)
    lg = np.empty(4)
    for k in range(4):
        gc[k] = max(g[k], LOG_FLOOR)
        lg[k] = np.log(gc[k])
    for a in range(4):
        for b in range(4):
            if abs(gc[a] - gc[b]) <= 1e-14 * max(gc[a], gc[b]):
                d = 1.0 / gc[a]
            else:
                d = (lg[a] - lg[b]) / (gc[a] - gc[b])
            Rt[a, b] *= -d * INV_LN2
    M = U @ Rt @ U.conj().T
    separable_pullback(x, M, grad)
    return f


@njit(cache=True)
def fit_value_and_grad(x, target, grad):
    """Squared Frobenius distance between sigma(x) and ``target``, with gradient."""
    buf = np.empty((4, 4), np.complex128)
    decode_separable(x, buf)
    D = buf - target
    f = 0.0
    for i in range(4):
        for j in range(4):
            f += D[i, j].real ** 2 + D[i, j].imag ** 2
    separable_pullback(x, 2.0 * D, grad)
    return f


# generalized Horodecki CSS equation, in the r2 <= r3 orientation

@njit(cache=True)
def gh_sigma(R1, r1, r2, r3):
    """(R2, R3, R4, delta); R2 is NaN when delta < -1e-10."""
    delta = ((3.0 * r1 + 1.0) ** 2 - 4.0 * r2 * r3 - 8.0 * R1 * (r1 + 1.0)
             + 16.0 * np.sqrt(max(R1 * (R1 - r1) * r2 * r3, 0.0)))
    d = delta
    if d < 0.0:
        if d < -1e-10:
            return np.nan, np.nan, np.nan, delta
        d = 0.0
    R2 = 0.25 * (1.0 + 3.0 * r1 + 2.0 * r2 - 4.0 * R1 - np.sqrt(d))
    R4 = R1 - r1
    return R2, 1.0 - R1 - R2 - R4, R4, delta


@njit(cache=True)
def gh_defect(R1, R2, r1, r2):
    """Defect of the r2 equation at (R1, R2); NaN if sigma is not admissible."""
    R4 = R1 - r1
    R3 = 1.0 - R1 - R2 - R4
    if not (R2 > 0.0 and R3 > 0.0 and R4 >= 0.0):
        return np.nan
    Y2 = R1 * R4
    z = np.sqrt((R2 - R3) ** 2 + 4.0 * Y2)
    hi = R2 + R3 + z
    # 2 lambda_minus without the cancellation in R2 + R3 - z
    lo = 4.0 * (R2 * R3 - Y2) / hi
    if z <= 0.0 or lo <= 0.0:
        return np.nan
    L = np.log(lo) - np.log(hi)
    return (R2 + 2.0 * R4 / (z * z) * (R2 * R2 - R2 * R3 + 2.0 * Y2)
            + 2.0 * R4 / (L * z) * (R2 - R3) - r2)


@njit(cache=True)
def gh_residual(R1, r1, r2, r3):
    R2, _, _, _ = gh_sigma(R1, r1, r2, r3)
    if not np.isfinite(R2):
        return np.nan
    return gh_defect(R1, R2, r1, r2)


@njit(cache=True)
def gh_R1_of_s(s, r1, r2, r3):
    """R1 on the falling branch of delta(R1) = s^2 (NaN if none)."""
    A = (3.0 * r1 + 1.0) ** 2 - 4.0 * r2 * r3
    B = 8.0 * (r1 + 1.0)
    C2 = 256.0 * r2 * r3
    E = s * s - A
    qa = C2 - B * B
    qb = -(C2 * r1 + 2.0 * B * E)
    qc = -E * E
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return np.nan
    sq = np.sqrt(disc)
    # qa < 0, so this is the larger root
    R1 = (-qb - sq) / (2.0 * qa)
    if R1 < r1 or E + B * R1 < -1e-12:
        return np.nan
    return R1


@njit(cache=True)
def gh_residual_s(s, r1, r2, r3):
    R1 = gh_R1_of_s(s, r1, r2, r3)
    if not np.isfinite(R1):
        return np.nan
    R2 = 0.25 * (1.0 + 3.0 * r1 + 2.0 * r2 - 4.0 * R1 - s)
    return gh_defect(R1, R2, r1, r2)


@njit(cache=True)
def _bisect_s(a, b, fa, r1, r2, r3):
    for _ in range(200):
        c = 0.5 * (a + b)
        if c <= a or c >= b:
            break
        fc = gh_residual_s(c, r1, r2, r3)
        if not np.isfinite(fc):
            break
        if fa * fc <= 0.0:
            b = c
        else:
            a, fa = c, fc
    return 0.5 * (a + b)


@njit(cache=True)
def gh_root_s(r1, r2, r3, n):
    """Root in s = sqrt(delta) on the falling branch (NaN if none brackets).

    Close to r2 = r3 the root sits where delta -> 0 and R2 depends on R1
    through sqrt(delta) with unbounded slope, so bracketing in s is far
    better conditioned there.
    """
    d0 = (3.0 * r1 + 1.0) ** 2 - 4.0 * r2 * r3 - 8.0 * r1 * (r1 + 1.0)
    if d0 <= 0.0:
        return np.nan
    s0 = np.sqrt(d0)
    m = n // 2
    t = np.empty(m + n)
    t[0] = 0.0
    for i in range(m):
        t[i + 1] = 10.0 ** (-14.0 + 14.0 * i / (m - 1))
    for i in range(1, n):
        t[m + i] = i / (n - 1)
    t = np.unique(t)
    prev_x = np.nan
    prev_v = np.nan
    for k in range(t.size):
        x = t[k] * s0
        v = gh_residual_s(x, r1, r2, r3)
        if not np.isfinite(v):
            prev_x = np.nan
            continue
        if v == 0.0:
            return x
        if np.isfinite(prev_x) and prev_v * v < 0.0:
            return _bisect_s(prev_x, x, prev_v, r1, r2, r3)
        prev_x = x
        prev_v = v
    return np.nan


@njit(cache=True)
def _gh_edge(r1, r2, r3, n):
    """Largest admissible R1 (NaN if none)."""
    h = (1.0 - r1) / (n - 1)
    last = -1
    for i in range(1, n):
        if np.isfinite(gh_residual(r1 + i * h, r1, r2, r3)):
            last = i
    if last < 0:
        return np.nan
    a = r1 + last * h
    if last == n - 1:
        return a
    b = a + h
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if np.isfinite(gh_residual(m, r1, r2, r3)):
            a = m
        else:
            b = m
    return a


@njit(cache=True)
def gh_root(r1, r2, r3, n):
    """Nontrivial root R1 of the CSS equation, or NaN when nothing brackets.

    R1 = r1 is always a zero and is skipped. The root can sit extremely close
    to r1 or to the admissible edge, so offsets from r1 are scanned on a
    geometric grid at both ends as well as a uniform one.
    """
    hi = _gh_edge(r1, r2, r3, n)
    if not np.isfinite(hi):
        return np.nan
    m = n // 2
    q = n // 4
    t = np.empty(m + n - 1 + q)
    for i in range(m):
        t[i] = 10.0 ** (-12.0 + 12.0 * i / (m - 1))
    for i in range(1, n):
        t[m + i - 1] = i / (n - 1)
    for i in range(q):
        t[m + n - 1 + i] = 1.0 - 10.0 ** (-14.0 + 11.0 * i / (q - 1))
    t = np.unique(t)
    w = hi - r1
    prev_x = np.nan
    prev_v = np.nan
    first = True
    for k in range(t.size):
        x = r1 + t[k] * w
        v = gh_residual(x, r1, r2, r3)
        if not np.isfinite(v):
            prev_x = np.nan
            continue
        if first:
            first = False
            if abs(v) < 1e-13:
                # cancellation noise next to the trivial zero
                continue
        if np.isfinite(prev_x) and prev_v * v <= 0.0:
            a, b, fa = prev_x, x, prev_v
            for _ in range(200):
                c = 0.5 * (a + b)
                if c <= a or c >= b or b - a <= 1e-15:
                    break
                fc = gh_residual(c, r1, r2, r3)
                if not np.isfinite(fc):
                    break
                if fa * fc <= 0.0:
                    b = c
                else:
                    a, fa = c, fc
            return 0.5 * (a + b)
        prev_x = x
        prev_v = v
    return np.nan
