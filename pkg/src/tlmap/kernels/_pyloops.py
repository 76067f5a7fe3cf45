"""Pure-Python simulation kernels.

Fallback for the compiled ``_cloops`` extension; identical signatures and
semantics, selected automatically by ``tlmap.kernels`` when the extension
is not built.
"""

import numpy as np


def ss_simulate(A, B, C, D, u, x0):
    """Run the discrete state recursion x+ = A x + B u, y = C x + D u."""
    n_samples = u.shape[0]
    y = np.empty(n_samples)
    x = x0.astype(np.float64, copy=True)
    for k in range(n_samples):
        uk = u[k]
        y[k] = C @ x + D * uk
        x = A @ x + B * uk
    return y


def arx_free_run(a, b, reldeg, u, y_init):
    """Free-run ARX recursion: y(k) = sum a_i y(k-i) + sum b_j u(k-reldeg-j).

    The first len(y_init) samples are copied verbatim; len(y_init) must be
    at least max(len(a), reldeg + len(b) - 1) so no index goes negative.
    """
    n = u.shape[0]
    na = a.shape[0]
    nb = b.shape[0]
    k0 = y_init.shape[0]
    if k0 < max(na, reldeg + nb - 1):
        raise ValueError("y_init shorter than the maximum lag")
    y = np.empty(n)
    y[:k0] = y_init
    for k in range(k0, n):
        acc = 0.0
        for i in range(na):
            acc += a[i] * y[k - 1 - i]
        for j in range(nb):
            acc += b[j] * u[k - reldeg - j]
        y[k] = acc
    return y


def allpole_filter(a, x):
    """Filter x through 1/A(z) with A(z) = z^n - a_1 z^(n-1) - ... - a_n.

    Zero prehistory: v(k) = x(k) + sum a_i v(k-i), v(j) = 0 for j < 0.
    """
    n = x.shape[0]
    na = a.shape[0]
    v = np.empty(n)
    for k in range(n):
        acc = x[k]
        for i in range(min(na, k)):
            acc += a[i] * v[k - 1 - i]
        v[k] = acc
    return v
