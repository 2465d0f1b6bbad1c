"""The two commutation-condition families and the separability verdict.

Family 1 ("qubit-like"): [R(0), w_0^dag w_j] = 0 for j = 1..N-1, equivalent
to all conditional environment states R_jj(t) being equal.  Family 2
("cross"): [W_j0, W_l0] = 0 for 0 < l < j < N.  Both families vanishing is
necessary and sufficient for separability, and in that case the state admits
an explicit convex decomposition over a common environment eigenbasis.
"""

import json
from dataclasses import dataclass

import numpy as np

from .evolution import conditional_block, joint_state, pair_operator, propagators
from .linalg import commutator_norm, frob, simultaneous_diagonalize

__all__ = [
    "DEFAULT_TOL_COMM",
    "CriterionReport",
    "SeparableDecomposition",
    "NotSeparableError",
    "qubit_like_norms",
    "cross_commutation_norms",
    "decide",
    "decide_from_props",
    "build_decomposition",
]

DEFAULT_TOL_COMM = 1e-9


class NotSeparableError(Exception):
    pass


@dataclass(frozen=True)
class CriterionReport:
    t: float
    qubit_like: tuple        # ((j, norm), ...), j = 1..N-1
    cross: tuple             # ((j, l, norm), ...), 0 < l < j < N
    verdict: str             # "separable" | "entangled"
    margin: float            # smallest |norm - threshold| over all records
    witnesses: tuple         # identifiers of failed conditions
    tol_comm: float
    thresholds: tuple        # (family-1 threshold, family-2 threshold)

    @property
    def separable(self):
        return self.verdict == "separable"

    @property
    def max_qubit_like(self):
        return max((norm for _, norm in self.qubit_like), default=0.0)

    @property
    def max_cross(self):
        return max((norm for _, _, norm in self.cross), default=0.0)

    def to_dict(self):
        return {
            "t": self.t,
            "verdict": self.verdict,
            "qubit_like": [{"j": j, "norm": norm} for j, norm in self.qubit_like],
            "cross": [{"j": j, "l": l, "norm": norm} for j, l, norm in self.cross],
            "margin": self.margin,
            "witnesses": list(self.witnesses),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class SeparableDecomposition:
    """The ensemble {p_n, rho_n, |n(t)>} realizing a separable joint state.

    ``phases[i, n]`` is the unimodular diagonal value of W_i0 on basis state
    n (row 0 is all ones); ``system_states[n]`` is the pure system state
    attached to environment basis state n.
    """

    weights: np.ndarray      # p_n, nonnegative, sums to 1
    env_basis: np.ndarray    # columns |n(t)>
    phases: np.ndarray       # N x M complex, unimodular
    system_states: tuple     # M pure-state density matrices, N x N

    def reconstruct(self):
        n, m = self.phases.shape
        sigma = np.zeros((n * m, n * m), dtype=np.complex128)
        for idx in range(m):
            ket = self.env_basis[:, idx]
            env = np.outer(ket, ket.conj())
            sigma += self.weights[idx] * np.kron(self.system_states[idx], env)
        return sigma


def qubit_like_norms(model, props):
    """Family-1 norms: (j, ||[R(0), w_0^dag w_j]||_F) for j = 1..N-1."""
    w0 = props.w[0]
    out = []
    for j in range(1, model.n):
        out.append((j, commutator_norm(model.r0, w0.conj().T @ props.w[j])))
    return out

def cross_commutation_norms(props):
    """Family-2 norms: (j, l, ||[W_j0, W_l0]||_F) for 0 < l < j."""
    n = len(props.w)
    pair = [pair_operator(props, j, 0) for j in range(n)]
    out = []
    for j in range(2, n):
        for l in range(1, j):
            out.append((j, l, commutator_norm(pair[j], pair[l])))
    return out


def decide_from_props(model, props, tol_comm=DEFAULT_TOL_COMM):
    """Render the verdict from already-built propagators."""
    family1 = tuple(qubit_like_norms(model, props))
    family2 = tuple(cross_commutation_norms(props))
    th1 = tol_comm * max(1.0, frob(model.r0))
    th2 = tol_comm

    witnesses = []
    distances = []
    for j, norm in family1:
        distances.append(abs(norm - th1))
        if norm > th1:
            witnesses.append(f"qubit_like[{j}]")
    for j, l, norm in family2:
        distances.append(abs(norm - th2))
        if norm > th2:
            witnesses.append(f"cross[{j},{l}]")

    return CriterionReport(
        t=props.t,
        qubit_like=family1,
        cross=family2,
        verdict="separable" if not witnesses else "entangled",
        margin=min(distances) if distances else float("inf"),
        witnesses=tuple(witnesses),
        tol_comm=tol_comm,
        thresholds=(th1, th2),
    )


def decide(model, t, tol_comm=DEFAULT_TOL_COMM):
    """Evaluate both condition families at time t and render the verdict."""
    return decide_from_props(model, propagators(model, t), tol_comm=tol_comm)


def build_decomposition(model, props, report):
    """Construct the explicit separable ensemble for a separable verdict.

    Simultaneously diagonalizes R_00(t) and all W_j0(t); the weights are the
    eigenvalues of R_00(t), and each system state is the pure state whose
    amplitudes are c_i rotated by the per-basis-state phases of W_i0.
    """
    if not report.separable:
        raise NotSeparableError(
            "decomposition requires a separable verdict, got entangled")
    n, m = model.n, model.m
    r00 = conditional_block(model, props, 0, 0)
    ops = [r00] + [pair_operator(props, j, 0) for j in range(1, n)]
    basis, diagonals = simultaneous_diagonalize(ops, tol=report.tol_comm)

    weights = np.clip(diagonals[0].real, 0.0, None)
    weights = weights / weights.sum()

    phases = np.ones((n, m), dtype=np.complex128)
    for j in range(1, n):
        d = diagonals[j]
        phases[j] = d / np.abs(d)

    states = []
    for idx in range(m):
        vec = model.c * phases[:, idx]
        states.append(np.outer(vec, vec.conj()))

    return SeparableDecomposition(
        weights=weights,
        env_basis=basis,
        phases=phases,
        system_states=tuple(states),
    )
