"""Dense complex matrix kernels.

Everything here operates on plain ``numpy`` complex arrays.  Conventions used
throughout the package: matrices are row-major, and a bipartite index
factorizes as ``r = s * M + e`` with ``s`` the system label and ``e`` the
environment label.
"""

import numpy as np

from . import backend

__all__ = [
    "LinalgError",
    "NotHermitianError",
    "NoConvergenceError",
    "DimensionMismatchError",
    "NotCommutingError",
    "frob",
    "hermitian_eig",
    "unitary_exp_hermitian",
    "partial_transpose",
    "commutator",
    "commutator_norm",
    "simultaneous_diagonalize",
]

#: relative eigenvalue-clustering threshold for degenerate subspaces
DEGENERACY_RTOL = 1e-9


class LinalgError(Exception):
    """Base class for kernel failures."""


class NotHermitianError(LinalgError):
    pass


class NoConvergenceError(LinalgError):
    pass


class DimensionMismatchError(LinalgError):
    pass


class NotCommutingError(LinalgError):
    pass


def frob(a):
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise LinalgError(f"{name} contains non-finite entries")
    return a


def _require_hermitian(a, tol, name="matrix"):
    dev = frob(a - a.conj().T)
    if dev > tol * max(1.0, frob(a)):
        raise NotHermitianError(
            f"{name} is not Hermitian: ||A - A^dag||_F = {dev:.3e}")


def hermitian_eig(a, tol=1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as the columns of a unitary matrix.
    """
    a = _as_square(a)
    _require_hermitian(a, tol)
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return vals, vecs


def unitary_exp_hermitian(h, theta, tol=1e-10):
    """exp(-i * theta * H) for Hermitian H, via exact eigendecomposition."""
    vals, vecs = hermitian_eig(h, tol=tol)
    phases = np.exp(-1j * theta * vals)
    return (vecs * phases) @ vecs.conj().T


def partial_transpose(rho, dim_s, dim_e, subsystem="environment"):
    """Partial transpose of a bipartite matrix with index order r = s*M + e.

    ``subsystem`` selects which tensor factor is transposed: ``"system"``
    swaps the system blocks, ``"environment"`` transposes within each block.
    """
    rho = _as_square(rho, "rho")
    if rho.shape[0] != dim_s * dim_e:
        raise DimensionMismatchError(
            f"rho has dim {rho.shape[0]}, expected {dim_s} * {dim_e}")
    if subsystem not in ("system", "environment"):
        raise ValueError(f"unknown subsystem {subsystem!r}")
    return backend.partial_transpose_dense(
        rho, dim_s, dim_e, subsystem == "environment")


def commutator(a, b):
    a = _as_square(a, "A")
    b = _as_square(b, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def commutator_norm(a, b):
    """Frobenius norm of [A, B]."""
    return frob(commutator(a, b))


def _hermitian_refiners(ops, tol):
    """Split each normal operator into Hermitian refinement stages."""
    refiners = []
    for op in ops:
        herm = (op + op.conj().T) / 2
        anti = (op - op.conj().T) / (2j)
        if frob(anti) > tol * max(1.0, frob(op)):
            refiners.append(herm)
            refiners.append(anti)
        else:
            refiners.append(herm)
    return refiners


def _refine(basis, blocks, h):
    """Diagonalize h restricted to each degenerate block, splitting blocks."""
    thresh = DEGENERACY_RTOL * max(1.0, frob(h))
    new_blocks = []
    for blk in blocks:
        if len(blk) == 1:
            new_blocks.append(blk)
            continue
        sub = basis[:, blk].conj().T @ h @ basis[:, blk]
        sub = (sub + sub.conj().T) / 2
        vals, vecs = np.linalg.eigh(sub)
        basis[:, blk] = basis[:, blk] @ vecs
        start = 0
        for i in range(1, len(blk) + 1):
            if i == len(blk) or vals[i] - vals[i - 1] > thresh:
                new_blocks.append(blk[start:i])
                start = i
    return new_blocks


def _offdiag_residual(basis, ops):
    res = 0.0
    for op in ops:
        d = basis.conj().T @ op @ basis
        res = max(res, frob(d - np.diag(np.diag(d))))
    return res


def simultaneous_diagonalize(ops, tol=1e-9):
    """Common eigenbasis of a family of commuting normal operators.

    The first operator is diagonalized outright; degenerate eigenspaces are
    then refined recursively with the Hermitian and anti-Hermitian parts of
    the remaining operators.  If sequential refinement leaves too large an
    off-diagonal residual, a random Hermitian combination of the refiners is
    tried before giving up.

    Returns ``(basis, diagonals)`` where ``basis`` is unitary and
    ``diagonals[i]`` is the complex diagonal of ``basis^dag ops[i] basis``.
    """
    ops = [_as_square(op, f"ops[{i}]") for i, op in enumerate(ops)]
    if not ops:
        raise ValueError("need at least one operator")
    dim = ops[0].shape[0]
    for i, op in enumerate(ops):
        if op.shape[0] != dim:
            raise DimensionMismatchError("operators must share a dimension")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            cn = commutator_norm(ops[i], ops[j])
            if cn > tol * dim:
                raise NotCommutingError(
                    f"ops[{i}] and ops[{j}] do not commute: ||[A,B]||_F = {cn:.3e}")

    refiners = _hermitian_refiners(ops, tol)
    bound = 10.0 * tol * dim

    basis = np.eye(dim, dtype=np.complex128)
    blocks = [np.arange(dim)]
    for h in refiners:
        blocks = _refine(basis, blocks, h)
    residual = _offdiag_residual(basis, ops)

    if residual > bound:
        # deterministic first, robust second: random Hermitian combination
        rng = np.random.default_rng(0)
        for _ in range(4):
            weights = rng.standard_normal(len(refiners))
            combo = sum(w * h for w, h in zip(weights, refiners))
            _, basis = np.linalg.eigh(combo)
            residual = _offdiag_residual(basis, ops)
            if residual <= bound:
                break
        else:
            raise NotCommutingError(
                f"simultaneous diagonalization residual {residual:.3e} "
                f"exceeds bound {bound:.3e}")

    diagonals = [np.diag(basis.conj().T @ op @ basis).copy() for op in ops]
    return basis, diagonals
