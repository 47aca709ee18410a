"""Quantum channels in Kraus form.

A :class:`KrausMap` is any completely positive map ``rho -> sum_i V_i rho V_i^dag``;
a :class:`Channel` is one that is also trace preserving. The Choi matrix
convention is ``(id (x) phi)`` applied to the unnormalised ``sum_ij |ii><jj|``,
input factor first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DimensionError,
    Tolerance,
    as_matrix,
    dagger,
    eig_hermitian,
    haar_isometry,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    pauli_word,
    resolve_tol,
)


class KrausMap:
    """Completely positive map given by Kraus operators of shape ``(dim_out, dim_in)``."""

    def __init__(self, kraus: Sequence[np.ndarray]):
        ops = [as_matrix(k) for k in kraus]
        if not ops:
            raise ValueError("a Kraus map needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one shape")
        self._kraus = np.array(ops)
        self._kraus.setflags(write=False)

    @property
    def kraus(self) -> np.ndarray:
        """Read-only stack of Kraus operators, shape ``(r, dim_out, dim_in)``."""
        return self._kraus

    @property
    def dim_in(self) -> int:
        return self._kraus.shape[2]

    @property
    def dim_out(self) -> int:
        return self._kraus.shape[1]

    @property
    def num_kraus(self) -> int:
        return self._kraus.shape[0]

    def __call__(self, rho):
        return apply(self, rho)

    def __repr__(self):
        return f"{type(self).__name__}(dim_in={self.dim_in}, dim_out={self.dim_out}, num_kraus={self.num_kraus})"


class Channel(KrausMap):
    """Trace-preserving Kraus map; ``sum V_i^dag V_i = I`` is checked on construction."""

    def __init__(self, kraus: Sequence[np.ndarray], tol: Tolerance | None = None):
        super().__init__(kraus)
        tol = resolve_tol(tol)
        gram = np.einsum("kai,kaj->ij", self._kraus.conj(), self._kraus)
        # looser than the default tolerance: Kraus lists read from files are rounded
        if not Tolerance(max(tol.absolute, 1e-8), tol.relative).close(gram, np.eye(self.dim_in)):
            raise ValueError("Kraus operators are not trace preserving")


@dataclass(frozen=True)
class StinespringDilation:
    """Isometry ``dim_in -> dim_out * env_dim`` with the environment as the minor factor."""

    env_dim: int
    isometry: np.ndarray
    env_state_index: int = 0

    @property
    def dim_out(self) -> int:
        return self.isometry.shape[0] // self.env_dim


def apply(phi: KrausMap, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (phi.dim_in, phi.dim_in):
        raise DimensionError(f"input of shape {rho.shape} for a map on dimension {phi.dim_in}")
    V = phi.kraus
    return np.einsum("kab,bc,kdc->ad", V, rho, V.conj())


def compose(phi: KrausMap, psi: KrausMap) -> KrausMap:
    """``phi o psi`` (``psi`` acts first); Kraus set ``{V_i W_j}``."""
    if psi.dim_out != phi.dim_in:
        raise DimensionError("compose: psi output dimension differs from phi input dimension")
    ops = [v @ w for v in phi.kraus for w in psi.kraus]
    return _same_kind(ops, phi, psi)


def tensor(phi: KrausMap, psi: KrausMap) -> KrausMap:
    ops = [np.kron(v, w) for v in phi.kraus for w in psi.kraus]
    return _same_kind(ops, phi, psi)


def _same_kind(ops, *maps) -> KrausMap:
    if all(isinstance(m, Channel) for m in maps):
        return Channel(ops)
    return KrausMap(ops)


def choi(phi: KrausMap) -> np.ndarray:
    V = phi.kraus
    # vec with the input index major: C[(i,a),(j,b)] = sum_k V_k[a,i] conj(V_k[b,j])
    vecs = np.transpose(V, (0, 2, 1)).reshape(V.shape[0], -1)
    return vecs.T @ vecs.conj()


def channels_equal(phi: KrausMap, psi: KrausMap, tol: Tolerance | None = None) -> bool:
    if (phi.dim_in, phi.dim_out) != (psi.dim_in, psi.dim_out):
        raise DimensionError("channels act between different dimensions")
    return resolve_tol(tol).close(choi(phi), choi(psi))


def dual(phi: KrausMap) -> KrausMap:
    """Heisenberg-picture map with Kraus operators ``V_i^dag`` (unital, not trace preserving)."""
    return KrausMap([dagger(v) for v in phi.kraus])


def identity_channel(d: int) -> Channel:
    return Channel([np.eye(d)])


def unitary_channel(u) -> Channel:
    u = as_matrix(u)
    if not is_unitary(u):
        raise ValueError("matrix is not unitary")
    return Channel([u])


def stinespring(phi: KrausMap) -> StinespringDilation:
    V = phi.kraus
    r = V.shape[0]
    iso = np.transpose(V, (1, 0, 2)).reshape(phi.dim_out * r, phi.dim_in)
    return StinespringDilation(env_dim=r, isometry=iso)


def dilation_channel(dil: StinespringDilation, trace_out: str = "env") -> np.ndarray:
    """Kraus stack of the map obtained by tracing out ``"env"`` or ``"system"``."""
    d_out, r = dil.dim_out, dil.env_dim
    blocks = dil.isometry.reshape(d_out, r, -1)
    if trace_out == "env":
        return np.transpose(blocks, (1, 0, 2))
    if trace_out == "system":
        return blocks
    raise ValueError("trace_out must be 'env' or 'system'")


def apply_dilation(dil: StinespringDilation, rho, trace_out: str = "env") -> np.ndarray:
    """Partial trace of ``iso rho iso^dag`` over the environment or the system."""
    big = dil.isometry @ as_matrix(rho) @ dagger(dil.isometry)
    keep = [0] if trace_out == "env" else [1]
    return partial_trace(big, [dil.dim_out, dil.env_dim], keep)


def complementary(phi: KrausMap) -> KrausMap:
    """Channel onto the environment: ``(phi#(rho))_ij = tr(V_j^dag V_i rho)``."""
    ops = dilation_channel(stinespring(phi), trace_out="system")
    return _same_kind(list(ops), phi)


def minimal_kraus(phi: KrausMap, tol: Tolerance | None = None) -> KrausMap:
    """Kraus operators from the nonzero Choi eigenpairs (count = Choi rank)."""
    tol = resolve_tol(tol)
    w, vecs = eig_hermitian(choi(phi), tol)
    ops = [
        np.sqrt(mu) * vecs[:, idx].reshape(phi.dim_in, phi.dim_out).T
        for idx, mu in enumerate(w)
        if mu > tol.absolute
    ]
    if not ops:
        ops = [np.zeros((phi.dim_out, phi.dim_in))]
    return _same_kind(ops, phi)


def phase_damping(n: int, i: int) -> Channel:
    """``rho -> (rho + Z_i rho Z_i) / 2`` on qubit ``i`` (1-based) of ``n``."""
    if n < 1 or not 1 <= i <= n:
        raise ValueError(f"qubit index {i} out of range for {n} qubits")
    z = pauli_word("I" * (i - 1) + "Z" + "I" * (n - i))
    return Channel([np.eye(2 ** n) / np.sqrt(2), z / np.sqrt(2)])


def full_dephasing(n: int) -> Channel:
    """Composition of :func:`phase_damping` over all ``n`` qubits."""
    if n < 1:
        raise ValueError("need at least one qubit")
    out = phase_damping(n, 1)
    for i in range(2, n + 1):
        out = compose(phase_damping(n, i), out)
    return out


def depolarizing(n_dim: int) -> Channel:
    """Completely depolarizing channel with matrix-unit Kraus set ``|i><j| / sqrt(N)``."""
    if n_dim < 2:
        raise ValueError("depolarizing channel needs dimension >= 2")
    ops = []
    for i in range(n_dim):
        for j in range(n_dim):
            e = np.zeros((n_dim, n_dim), dtype=complex)
            e[i, j] = 1 / np.sqrt(n_dim)
            ops.append(e)
    return Channel(ops)


def random_unitary_channel(unitaries, probs, tol: Tolerance | None = None) -> Channel:
    tol = resolve_tol(tol)
    probs = np.asarray(probs, dtype=float)
    if len(unitaries) != len(probs) or len(probs) == 0:
        raise ValueError("need one probability per unitary")
    if np.any(probs < 0) or not abs(probs.sum() - 1) <= max(tol.absolute, 1e-12):
        raise ValueError("probabilities must be non-negative and sum to 1")
    ops = []
    for u, p in zip(unitaries, probs):
        u = as_matrix(u)
        if not is_unitary(u, tol):
            raise ValueError("random unitary channel member is not unitary")
        ops.append(np.sqrt(p) * u)
    return Channel(ops, tol)


def pinching(d: int) -> Channel:
    """Complete dephasing in the computational basis of ``C^d``."""
    ops = []
    for i in range(d):
        p = np.zeros((d, d), dtype=complex)
        p[i, i] = 1
        ops.append(p)
    return Channel(ops)


def mix(channels: Sequence[KrausMap], weights) -> Channel:
    """Convex combination ``sum_k w_k phi_k``."""
    weights = np.asarray(weights, dtype=float)
    ops = [np.sqrt(w) * v for ch, w in zip(channels, weights) if w > 0 for v in ch.kraus]
    return Channel(ops)


def random_channel(d_in: int, rng: np.random.Generator, num_kraus: int = 2, d_out: int | None = None) -> Channel:
    """Channel from a Haar-random Stinespring isometry."""
    d_out = d_in if d_out is None else d_out
    iso = haar_isometry(d_out * num_kraus, d_in, rng)
    return Channel(list(np.transpose(iso.reshape(d_out, num_kraus, d_in), (1, 0, 2))))


def channel_to_json(phi: KrausMap) -> dict:
    return {
        "dim_in": phi.dim_in,
        "dim_out": phi.dim_out,
        "kraus": [matrix_to_json(v) for v in phi.kraus],
    }


def channel_from_json(obj) -> Channel:
    """Parse the Kraus-list format or the ``random_unitary`` Pauli shorthand."""
    if not isinstance(obj, dict):
        raise ValueError("channel JSON must be an object")
    if "random_unitary" in obj:
        spec = obj["random_unitary"]
        try:
            words, probs = spec["paulis"], spec["probs"]
        except (KeyError, TypeError):
            raise ValueError("random_unitary needs 'paulis' and 'probs'") from None
        return random_unitary_channel([pauli_word(w) for w in words], probs)
    try:
        ops = [matrix_from_json(m) for m in obj["kraus"]]
    except (KeyError, TypeError):
        raise ValueError("channel JSON needs a 'kraus' list") from None
    phi = Channel(ops)
    for key, val in (("dim_in", phi.dim_in), ("dim_out", phi.dim_out)):
        if key in obj and int(obj[key]) != val:
            raise DimensionError(f"{key}={obj[key]} does not match Kraus shape")
    return phi


__all__ = [
    "KrausMap", "Channel", "StinespringDilation", "apply", "compose", "tensor", "choi",
    "channels_equal", "dual", "identity_channel", "unitary_channel", "stinespring",
    "apply_dilation", "complementary", "minimal_kraus", "phase_damping", "full_dephasing",
    "depolarizing", "random_unitary_channel", "pinching", "mix", "random_channel",
    "channel_to_json", "channel_from_json",
]
