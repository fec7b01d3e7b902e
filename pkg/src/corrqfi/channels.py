"""Classically correlated Pauli channels.

A single channel use applies one of the four Pauli operators to a qubit with
probabilities fixed by the channel kind and the decoherence strength ``p``.
Consecutive uses on a qubit sequence are Markov-correlated: the conditional
probability of repeating the previous Pauli index is boosted by the
correlation strength ``mu``,

    p(i | j) = (1 - mu) p_i + mu * delta_ij,

so ``mu = 0`` gives independent uses and ``mu = 1`` perfectly repeated ones.
The N-qubit action is a probabilistic mixture of Pauli strings,

    rho -> sum_s p_s (sigma_{s_1} x ... x sigma_{s_N}) rho (same operator),

with the string probabilities given by the Markov chain product.

Chains are enumerated depth first and abandoned as soon as the running
probability product is exactly zero (no epsilon cutoff), which keeps the
stored probabilities exact sums and makes flip channels cost 2^N instead
of 4^N.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .linalg import MAX_DIM, kron, pauli

__all__ = [
    "ChannelKind",
    "ChannelSpec",
    "JointDistribution",
    "single_use_distribution",
    "conditional_probability",
    "joint_distribution",
    "apply_channel",
]


class ChannelKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    BIT_FLIP = "bitflip"
    BIT_PHASE_FLIP = "bitphaseflip"
    PHASE_FLIP = "phaseflip"


# Pauli index applied by each flip channel.
_FLIP_INDEX = {
    ChannelKind.BIT_FLIP: 1,
    ChannelKind.BIT_PHASE_FLIP: 2,
    ChannelKind.PHASE_FLIP: 3,
}


def _check_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ChannelSpec:
    """Channel kind plus decoherence strength p and correlation strength mu."""

    kind: ChannelKind
    p: float
    mu: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "p", _check_unit_interval(self.p, "p"))
        object.__setattr__(self, "mu", _check_unit_interval(self.mu, "mu"))


@dataclass(frozen=True)
class JointDistribution:
    """Nonzero-probability Pauli strings for N correlated channel uses."""

    n_qubits: int
    terms: tuple[tuple[tuple[int, ...], float], ...]

    def total(self) -> float:
        return math.fsum(p for _, p in self.terms)


def single_use_distribution(kind: ChannelKind, p: float) -> np.ndarray:
    """Probability 4-vector over Pauli indices for one channel use."""
    kind = ChannelKind(kind)
    p = _check_unit_interval(p, "p")
    if kind is ChannelKind.DEPOLARIZING:
        return np.array([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    dist = np.zeros(4)
    dist[0] = 1.0 - p
    dist[_FLIP_INDEX[kind]] = p
    return dist


def conditional_probability(
    kind: ChannelKind, p: float, mu: float, i: int, j: int
) -> float:
    """Markov conditional p(i | previous j) = (1 - mu) p_i + mu delta_ij."""
    if i not in (0, 1, 2, 3) or j not in (0, 1, 2, 3):
        raise ValueError("Pauli indices must be in 0..3")
    mu = _check_unit_interval(mu, "mu")
    base = single_use_distribution(kind, p)
    return (1.0 - mu) * float(base[i]) + (mu if i == j else 0.0)


def joint_distribution(
    kind: ChannelKind, p: float, mu: float, n_qubits: int
) -> JointDistribution:
    """Enumerate all nonzero-probability index strings for N channel uses."""
    if not 1 <= n_qubits <= 6:
        raise ValueError(f"n_qubits must be in 1..6, got {n_qubits}")
    mu = _check_unit_interval(mu, "mu")
    base = single_use_distribution(kind, p)
    terms: list[tuple[tuple[int, ...], float]] = []

    def extend(prefix: list[int], prob: float) -> None:
        if len(prefix) == n_qubits:
            terms.append((tuple(prefix), prob))
            return
        last = prefix[-1] if prefix else None
        for i in range(4):
            if last is None:
                q = float(base[i])
            else:
                q = (1.0 - mu) * float(base[i]) + (mu if i == last else 0.0)
            branch = prob * q
            if branch == 0.0:
                continue
            extend(prefix + [i], branch)

    extend([], 1.0)
    return JointDistribution(n_qubits, tuple(terms))


def apply_channel(rho0: np.ndarray, spec: ChannelSpec) -> np.ndarray:
    """Push an operator through the correlated channel.

    ``rho0`` may be any 2^N x 2^N matrix (the map is linear, so derivative
    matrices go through the same way as states).  Pauli-string operators are
    built once per nonzero term by extending shared Kronecker prefixes, and
    terms are summed in a fixed depth-first order for reproducibility.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho0.shape}")
    dim = rho0.shape[0]
    n = dim.bit_length() - 1
    if dim != 2**n or not 1 <= n <= 6 or dim > MAX_DIM:
        raise ValueError(f"dimension {dim} is not 2^N with N in 1..6")
    base = single_use_distribution(spec.kind, spec.p)
    paulis = [pauli(i) for i in range(4)]
    out = np.zeros_like(rho0)

    def extend(depth: int, last: int | None, prob: float, op: np.ndarray) -> None:
        nonlocal out
        if depth == n:
            # Pauli strings are Hermitian, so U rho U^dag == U rho U.
            out += prob * (op @ rho0 @ op)
            return
        for i in range(4):
            if last is None:
                q = float(base[i])
            else:
                q = (1.0 - spec.mu) * float(base[i]) + (spec.mu if i == last else 0.0)
            branch = prob * q
            if branch == 0.0:
                continue
            extend(depth + 1, i, branch, kron(op, paulis[i]))

    extend(0, None, 1.0, np.array([[1.0 + 0j]]))
    return out
