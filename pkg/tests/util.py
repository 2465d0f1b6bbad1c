"""Shared test helpers and independent numerical oracles.

The oracles here deliberately avoid the code paths they check: eigenvalues
come from inertia-count bisection on LDL factorizations, and the matrix
exponential from a scaled-and-squared Taylor series.
"""

import numpy as np
import scipy.linalg


def rand_hermitian(rng, m):
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return (g + g.conj().T) / 2


def rand_unitary(rng, m):
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def rand_density(rng, m):
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return (rho + rho.conj().T) / 2


def _count_negative_ldl_blocks(d):
    """Negative-eigenvalue count of the (block-)diagonal LDL factor."""
    m = d.shape[0]
    count = 0
    k = 0
    while k < m:
        if k + 1 < m and abs(d[k + 1, k]) > 1e-14:
            # 2x2 block: quadratic formula on trace and determinant
            tr = (d[k, k] + d[k + 1, k + 1]).real
            det = (d[k, k] * d[k + 1, k + 1] - abs(d[k + 1, k]) ** 2).real
            disc = np.sqrt(max(tr * tr - 4 * det, 0.0))
            for lam in ((tr + disc) / 2, (tr - disc) / 2):
                if lam < 0:
                    count += 1
            k += 2
        else:
            if d[k, k].real < 0:
                count += 1
            k += 1
    return count


def eig_bisection_oracle(a, iters=90):
    """All eigenvalues of a Hermitian matrix by inertia-count bisection."""
    a = np.asarray(a, dtype=np.complex128)
    m = a.shape[0]
    bound = float(np.linalg.norm(a)) + 1.0
    eye = np.eye(m)

    def count_below(x):
        _, d, _ = scipy.linalg.ldl(a - x * eye, hermitian=True)
        return _count_negative_ldl_blocks(d)

    vals = []
    for k in range(m):
        lo, hi = -bound, bound
        for _ in range(iters):
            mid = (lo + hi) / 2
            if count_below(mid) <= k:
                lo = mid
            else:
                hi = mid
        vals.append((lo + hi) / 2)
    return np.array(vals)


def expm_taylor(a):
    """exp(A) by scaling-and-squaring of a truncated Taylor series."""
    a = np.asarray(a, dtype=np.complex128)
    norm = np.linalg.norm(a)
    s = max(0, int(np.ceil(np.log2(max(norm, 1e-300)))) + 1)
    b = a / 2 ** s
    term = np.eye(a.shape[0], dtype=np.complex128)
    out = term.copy()
    for k in range(1, 40):
        term = term @ b / k
        out += term
        if np.linalg.norm(term) < 1e-18:
            break
    for _ in range(s):
        out = out @ out
    return out


def pauli_fixture_sigma():
    """The 6x6 joint state of the built-in qutrit fixture, entered by hand."""
    i = 1j
    return np.array([
        [1, 0, 1, 0, 0, i],
        [0, 1, 0, -1, -i, 0],
        [1, 0, 1, 0, 0, i],
        [0, -1, 0, 1, i, 0],
        [0, i, 0, -i, 1, 0],
        [-i, 0, -i, 0, 0, 1],
    ], dtype=np.complex128) / 6


def pauli_fixture_sigma_te():
    """Its partial transpose over the environment, also entered by hand."""
    i = 1j
    return np.array([
        [1, 0, 1, 0, 0, -i],
        [0, 1, 0, -1, i, 0],
        [1, 0, 1, 0, 0, i],
        [0, -1, 0, 1, i, 0],
        [0, -i, 0, -i, 1, 0],
        [i, 0, -i, 0, 0, 1],
    ], dtype=np.complex128) / 6
