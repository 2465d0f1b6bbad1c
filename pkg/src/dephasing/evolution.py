"""Conditional propagators, pair operators, and the joint density matrix."""

from dataclasses import dataclass

import numpy as np

from . import backend
from .linalg import unitary_exp_hermitian

__all__ = [
    "ConditionalPropagators",
    "JointState",
    "propagators",
    "pair_operator",
    "conditional_block",
    "joint_state",
    "decoherence_factors",
]


@dataclass(frozen=True)
class ConditionalPropagators:
    """The environment unitaries conditioned on each system level."""

    t: float
    w: tuple


@dataclass(frozen=True)
class JointState:
    t: float
    sigma: np.ndarray
    dims: tuple  # (N, M)

    def block(self, k, l):
        """The environment operator attached to |k><l|, including c_k c_l^*."""
        n, m = self.dims
        return self.sigma[k * m:(k + 1) * m, l * m:(l + 1) * m]


def propagators(model, t):
    """w_k(t) = exp(-i (H_E + V_k) t) for Hamiltonian-mode models.

    Propagator-mode models are snapshots at a single instant; their stored
    unitaries are returned for every t.
    """
    if model.mode == "propagator":
        return ConditionalPropagators(t=float(t), w=tuple(model.w))
    ws = tuple(unitary_exp_hermitian(model.h_env + vk, t) for vk in model.v)
    return ConditionalPropagators(t=float(t), w=ws)


def pair_operator(props, i, j):
    """W_ij = w_i w_j^dag; unitary, with W_ij = W_ji^dag and W_ii = 1."""
    n = len(props.w)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"pair indices ({i}, {j}) out of range for {n} levels")
    return props.w[i] @ props.w[j].conj().T


def conditional_block(model, props, k, l):
    """R_kl(t) = w_k R(0) w_l^dag."""
    n = len(props.w)
    if not (0 <= k < n and 0 <= l < n):
        raise IndexError(f"block indices ({k}, {l}) out of range for {n} levels")
    return props.w[k] @ model.r0 @ props.w[l].conj().T


def joint_state(model, props):
    """The full joint density matrix: block (k, l) is c_k c_l^* R_kl(t)."""
    sigma = backend.assemble_joint(model.c, props.w, model.r0)
    return JointState(t=props.t, sigma=sigma, dims=(model.n, model.m))


def decoherence_factors(model, props):
    """NxN matrix of reduced coherence factors, entry (k, l) = tr[w_l^dag w_k R(0)].

    Diagonal entries are exactly 1; moduli never exceed 1.
    """
    n = model.n
    wr = [wk @ model.r0 for wk in props.w]
    d = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        for l in range(n):
            d[k, l] = np.trace(props.w[l].conj().T @ wr[k])
    return d
