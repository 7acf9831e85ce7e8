"""Compiled inner loops shared by the objective and the solvers.

Every reduction over rows or coordinates runs in ascending index order with
Kahan compensation, so results are bit-reproducible for a given build.
"""
import numpy as np
from numba import njit

RUNNING = 0
CONVERGED = 1
DIVERGED = 2


@njit(cache=True)
def kahan_sum(v):
    s = 0.0
    c = 0.0
    for i in range(v.shape[0]):
        y = v[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


@njit(cache=True)
def _evaluate_into(rows, logp, weights, logx, alpha, image, comp, terms):
    M, N = logp.shape
    for i in range(N):
        image[i] = 0.0
        comp[i] = 0.0
    f = 0.0
    fc = 0.0
    one = alpha == 1.0
    infinite = False
    for m in range(M):
        w = weights[m]
        if w == 0.0:
            continue
        if one:
            row = 0.0
            rc = 0.0
            hit_zero = False
            for i in range(N):
                lp = logp[m, i]
                if lp == -np.inf:
                    continue
                pi = rows[m, i]
                if logx[i] == -np.inf:
                    hit_zero = True
                else:
                    y = pi * (lp - logx[i]) - rc
                    t = row + y
                    rc = (t - row) - y
                    row = t
                y = w * pi - comp[i]
                t = image[i] + y
                comp[i] = (t - image[i]) - y
                image[i] = t
            if hit_zero:
                row = np.inf
        else:
            mx = -np.inf
            for i in range(N):
                lp = logp[m, i]
                if lp == -np.inf:
                    terms[i] = -np.inf
                else:
                    terms[i] = alpha * lp + (1.0 - alpha) * logx[i]
                if terms[i] > mx:
                    mx = terms[i]
            if mx == np.inf or mx == -np.inf:
                # alpha > 1 with x_i = 0 on the support, or alpha < 1 with x
                # vanishing on the whole support: the divergence is +inf
                row = np.inf
            else:
                s = 0.0
                sc = 0.0
                for i in range(N):
                    if terms[i] == -np.inf:
                        terms[i] = 0.0
                        continue
                    e = np.exp(terms[i] - mx)
                    terms[i] = e
                    y = e - sc
                    t = s + y
                    sc = (t - s) - y
                    s = t
                row = (mx + np.log(s)) / (alpha - 1.0)
                for i in range(N):
                    y = w * (terms[i] / s) - comp[i]
                    t = image[i] + y
                    comp[i] = (t - image[i]) - y
                    image[i] = t
        if row == np.inf:
            # compensation terms turn inf into nan, so track it separately
            infinite = True
            continue
        y = w * row - fc
        t = f + y
        fc = (t - f) - y
        f = t
    if infinite:
        f = np.inf
    return f


@njit(cache=True)
def evaluate(rows, logp, weights, logx, alpha):
    """Return ``(f, image)`` where ``image = x * -grad f(x)``.

    ``logp`` holds ``log`` of the row matrix (``-inf`` on zeros); terms with a
    zero row entry are skipped.  For ``alpha == 1`` the KL branch is used.
    """
    N = logp.shape[1]
    image = np.empty(N)
    f = _evaluate_into(rows, logp, weights, logx, alpha, image, np.empty(N), np.empty(N))
    return f, image


@njit(cache=True)
def _dist2(x, image):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        d = x[i] - image[i]
        y = d * d - c
        t = s + y
        c = (t - s) - y
        s = t
    return np.sqrt(s)


@njit(cache=True)
def rgd_chunk(rows, logp, weights, x, f, image, alpha, step, floor, nsteps, tol,
              div_tol):
    """Advance the Poincare RGD iteration for ``g`` by up to ``nsteps`` steps.

    ``f`` and ``image`` must belong to ``x`` on entry; the inputs are not
    modified.  Stops early when the Riemannian gradient norm
    ``||x - image||`` drops to ``tol`` or when ``g`` rises by more than
    ``div_tol``.  Returns the state of the last iterate.
    """
    N = x.shape[0]
    x = x.copy()
    image = image.copy()
    g = kahan_sum(x) + f
    rg = _dist2(x, image)
    done = 0
    floored = False
    if rg <= tol:
        return x, f, image, g, rg, done, CONVERGED, floored
    status = RUNNING
    logx = np.empty(N)
    comp = np.empty(N)
    terms = np.empty(N)
    while done < nsteps:
        for i in range(N):
            v = x[i] * np.exp(-step * (x[i] - image[i]))
            if v < floor:
                v = floor
                floored = True
            x[i] = v
            logx[i] = np.log(v)
        f = _evaluate_into(rows, logp, weights, logx, alpha, image, comp, terms)
        gn = kahan_sum(x) + f
        done += 1
        rg = _dist2(x, image)
        if not gn <= g + div_tol:
            g = gn
            status = DIVERGED
            break
        g = gn
        if rg <= tol:
            status = CONVERGED
            break
    return x, f, image, g, rg, done, status, floored
