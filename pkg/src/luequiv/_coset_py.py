"""Pure numpy implementation of the phase-search kernels.

Mirrors ``_coset.pyx`` line for line; used when the extension is not built
or when ``LUEQUIV_BACKEND=python``.
"""
import numpy as np


def objective_gradient(terms, theta):
    """Return ``(f, sigma1, sigma2, grad)`` at phases ``theta``.

    ``f`` is the sum of squared singular values after the first, which equals
    ``MN - sigma1**2`` on the unitary coset but keeps full relative precision
    near zero.
    """
    e = np.exp(1j * theta)
    R = np.tensordot(e, terms, axes=1)
    U, s, Vh = np.linalg.svd(R, full_matrices=False)
    u = U[:, 0]
    vh = Vh[0]
    f = float(np.dot(s[1:], s[1:]))
    # w_k = e_k u^H T_k v ; v = conj(vh)
    w = e * np.einsum("p,kpq,q->k", u.conj(), terms, vh.conj())
    grad = 2.0 * s[0] * w.imag
    s2 = float(s[1]) if len(s) > 1 else 0.0
    return f, float(s[0]), s2, grad


def descend(terms, theta0, max_iters=500, step0=1.0, step_max=10.0, grow=2.0,
            shrink=0.5, armijo=1e-4, min_step=1e-14, f_stop=1e-26, gap_tol=1e-12):
    """Backtracking gradient descent with theta[0] held fixed.

    Returns ``(theta, f, n_evals, n_iters)``.
    """
    th = np.array(theta0, dtype=float)
    f, s1, s2, g = objective_gradient(terms, th)
    g[0] = 0.0
    evals = 1
    t = step0
    it = 0
    while it < max_iters:
        if f <= f_stop:
            break
        gg = float(np.dot(g, g))
        if gg == 0.0:
            break
        if s1 - s2 < gap_tol:
            t *= 0.5
        accepted = False
        while t >= min_step:
            thn = th - t * g
            fn, s1n, s2n, gn = objective_gradient(terms, thn)
            evals += 1
            if fn <= f - armijo * t * gg:
                accepted = True
                break
            t *= shrink
        if not accepted:
            break
        gn[0] = 0.0
        th, f, s1, s2, g = thn, fn, s1n, s2n, gn
        t = min(t * grow, step_max)
        it += 1
    return th, f, evals, it
