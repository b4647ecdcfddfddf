"""Independent oracles for the tests.

Everything here deliberately avoids the library's computation paths:
dense grid scans with golden-section refinement, hand-enumerated KKT
systems, and rejection sampling.  Expected values in the tests are frozen
from these oracles, never from the code under test.
"""

import itertools

import numpy as np

_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_min(g, lo, hi, tol=1e-12, max_iter=200):
    """Golden-section minimization of a unimodal scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _PHI * (b - a)
    d = a + _PHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - _PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _PHI * (b - a)
            gd = g(d)
    return 0.5 * (a + b)


def grid_golden_min(g, lo, hi, coarse=2001, tol=1e-12):
    """Coarse grid scan, golden-section refinement, then a parabolic polish.

    Golden section alone resolves smooth minima only to about sqrt(eps);
    a three-point parabola fit recovers full precision there, while the
    value comparison keeps the golden iterate whenever the fit misbehaves
    (kinks, boundary minima).
    """
    xs = np.linspace(lo, hi, coarse)
    vals = np.array([g(x) for x in xs])
    k = int(vals.argmin())
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, coarse - 1)]
    m = golden_min(g, a, b, tol=tol)
    h = 1e-4 * max(1.0, abs(m))
    gm, gp, gq = g(m), g(m + h), g(m - h)
    denom = gp - 2.0 * gm + gq
    if denom > 0:
        v = m - 0.5 * h * (gp - gq) / denom
        v = min(max(v, lo), hi)
        # accept the vertex unless it is measurably worse (near a smooth
        # minimum the two values differ only by float noise)
        if abs(v - m) <= 2.0 * h and g(v) <= gm + 1e-10 * (1.0 + abs(gm)):
            return v
    return m


def simplex_projection_grid(x, step=1e-3):
    """Dense grid minimization of ||y - x|| over the probability simplex.

    Supports dimension 2 and 3 (enough for the tests).
    """
    x = np.asarray(x, dtype=float)
    ts = np.arange(0.0, 1.0 + 0.5 * step, step)
    best, best_val = None, np.inf
    if x.size == 2:
        for t in ts:
            y = np.array([t, 1.0 - t])
            v = np.sum((y - x) ** 2)
            if v < best_val:
                best, best_val = y, v
        return best
    if x.size == 3:
        for t1 in ts:
            for t2 in np.arange(0.0, 1.0 - t1 + 0.5 * step, step):
                y = np.array([t1, t2, 1.0 - t1 - t2])
                v = np.sum((y - x) ** 2)
                if v < best_val:
                    best, best_val = y, v
        return best
    raise ValueError("grid oracle supports dimension 2 or 3 only")


def box_vi_active_set(M, q, lo, hi, tol=1e-9):
    """All solutions of the box variational inequality by face enumeration.

    Finds z in [lo, hi] with (M z + q)_i = 0 on free coordinates,
    >= 0 where the lower bound is active and <= 0 where the upper bound is
    active, by trying all 3^d activity patterns.
    """
    M = np.asarray(M, dtype=float)
    q = np.asarray(q, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = q.size
    solutions = []
    for pattern in itertools.product(("free", "lo", "hi"), repeat=d):
        z = np.empty(d)
        free = [i for i, p in enumerate(pattern) if p == "free"]
        for i, p in enumerate(pattern):
            if p == "lo":
                z[i] = lo[i]
            elif p == "hi":
                z[i] = hi[i]
        if free:
            Mff = M[np.ix_(free, free)]
            fixed = [i for i in range(d) if i not in free]
            rhs = -q[free]
            if fixed:
                rhs = rhs - M[np.ix_(free, fixed)] @ z[fixed]
            try:
                z[free] = np.linalg.solve(Mff, rhs)
            except np.linalg.LinAlgError:
                continue
        g = M @ z + q
        ok = np.all(z >= lo - tol) and np.all(z <= hi + tol)
        for i, p in enumerate(pattern):
            if p == "free":
                ok &= abs(g[i]) <= tol
            elif p == "lo":
                ok &= g[i] >= -tol
            else:
                ok &= g[i] <= tol
        if ok and not any(np.allclose(z, s, atol=10 * tol) for s in solutions):
            solutions.append(z.copy())
    return solutions


def prox_oracle_1d(f_scalar, gamma, x, lo, hi, coarse=4001):
    """argmin of gamma f(y) + (y - x)^2 / 2 over [lo, hi] by grid + golden."""
    return grid_golden_min(lambda y: gamma * f_scalar(y) + 0.5 * (y - x) ** 2, lo, hi, coarse)


def sample_box(rng, lo, hi, n):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return lo + (hi - lo) * rng.random((n, lo.size))


def sample_ball(rng, center, radius, n):
    center = np.asarray(center, dtype=float)
    d = center.size
    g = rng.normal(size=(n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return center + g * r[:, None]


def sample_simplex(rng, dim, n):
    return rng.dirichlet(np.ones(dim), size=n)
