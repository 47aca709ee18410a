"""Subspace and subsystem codes, and the two-qubit private subsystem encoding.

A :class:`SubsystemCode` is an isometry ``A (x) B -> S`` (A the major factor).
Subspaces are the ``dim_a == 1`` case.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    PAULIS,
    DimensionError,
    Tolerance,
    as_matrix,
    dagger,
    is_hermitian,
    is_isometry,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    pauli_decompose,
    pauli_word,
    resolve_tol,
)

#: T = (|0>(<0| + <1|) + i|1>(<0| - <1|)) / sqrt(2); maps X -> Z, Y -> X, Z -> Y
T_GATE = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)
CNOT_12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CNOT_21 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)

ENCODER_GATES = {
    "CNOT(1->2)": CNOT_12,
    "CNOT(2->1)": CNOT_21,
    "T(1)": np.kron(T_GATE, PAULIS["I"]),
    "T(2)": np.kron(PAULIS["I"], T_GATE),
}

#: logical Pauli operators of the two-qubit private code
FRAME_WORDS = ("XX", "YI", "ZX")


@dataclass(frozen=True)
class SubsystemCode:
    dim_a: int
    dim_b: int
    embedding: np.ndarray

    def __post_init__(self):
        emb = as_matrix(self.embedding)
        object.__setattr__(self, "embedding", emb)
        if emb.shape[1] != self.dim_a * self.dim_b:
            raise DimensionError("embedding columns must equal dim_a * dim_b")
        if emb.shape[0] < emb.shape[1]:
            raise DimensionError("dim_a * dim_b exceeds the system dimension")
        if not is_isometry(emb, Tolerance(1e-8)):
            raise ValueError("embedding is not an isometry")

    @property
    def dim_s(self) -> int:
        return self.embedding.shape[0]

    @property
    def projector(self) -> np.ndarray:
        """Projector onto the ``A (x) B`` sector of ``S``."""
        return self.embedding @ dagger(self.embedding)

    @property
    def is_subspace(self) -> bool:
        return self.dim_a == 1

    def sector_isometry(self, psi_a) -> np.ndarray:
        """The map ``B -> S``, ``|i> -> embedding (|psi_a> (x) |i>)``."""
        psi_a = as_matrix(psi_a).reshape(self.dim_a, 1)
        return self.embedding @ np.kron(psi_a, np.eye(self.dim_b))


@dataclass(frozen=True)
class LogicalFrame:
    x_l: np.ndarray
    y_l: np.ndarray
    z_l: np.ndarray
    words: tuple[str, str, str] | None = None
    # x_l @ y_l == sign * 1j * z_l
    sign: int = 1

    def check(self, tol: Tolerance | None = None) -> bool:
        tol = resolve_tol(tol)
        ops = (self.x_l, self.y_l, self.z_l)
        d = self.x_l.shape[0]
        for op in ops:
            if not (is_hermitian(op, tol) and is_unitary(op, tol) and tol.small(abs(np.trace(op)))):
                return False
        for a, b in itertools.combinations(ops, 2):
            if not tol.close(a @ b + b @ a, np.zeros((d, d))):
                return False
        return tol.close(self.x_l @ self.y_l, self.sign * 1j * self.z_l)


@dataclass(frozen=True)
class EncoderCircuit:
    """A resolved gate sequence (first gate applied first) and its conjugation table."""

    gates: tuple[str, ...]
    unitary: np.ndarray = field(repr=False)
    images: dict[str, tuple[complex, str]] = field(default_factory=dict)


def subspace_code(basis, tol: Tolerance | None = None) -> SubsystemCode:
    """Subspace spanned by orthonormal vectors (a 2-d array is read column by column)."""
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        basis = list(basis.T)
    vecs = [as_matrix(v).reshape(-1) for v in basis]
    if not vecs:
        raise ValueError("need at least one basis vector")
    emb = np.column_stack(vecs)
    if not is_isometry(emb, tol):
        raise ValueError("basis vectors are not orthonormal")
    return SubsystemCode(1, emb.shape[1], emb)


def embed(code: SubsystemCode, sigma_a, sigma_b) -> np.ndarray:
    """``embedding (sigma_a (x) sigma_b) embedding^dag`` (linear in both arguments)."""
    sigma_a = as_matrix(sigma_a)
    sigma_b = as_matrix(sigma_b)
    if sigma_a.shape != (code.dim_a, code.dim_a) or sigma_b.shape != (code.dim_b, code.dim_b):
        raise DimensionError("operator dimensions do not match the code")
    W = code.embedding
    return W @ np.kron(sigma_a, sigma_b) @ dagger(W)


def logical_bloch_state(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """``(II + alpha XX + beta YI + gamma ZX) / 4``."""
    if alpha ** 2 + beta ** 2 + gamma ** 2 > 1 + 1e-12:
        raise ValueError("Bloch vector lies outside the unit ball")
    x, y, z = (pauli_word(w) for w in FRAME_WORDS)
    return (np.eye(4) + alpha * x + beta * y + gamma * z) / 4


def _pauli_image(u: np.ndarray, word: str) -> tuple[complex, str] | None:
    img = u @ pauli_word(word) @ dagger(u)
    coeffs = pauli_decompose(img, cutoff=1e-9)
    if len(coeffs) != 1:
        return None
    (w, c), = coeffs.items()
    return complex(np.round(c.real, 12) + 1j * np.round(c.imag, 12)), w


def encoder_candidates():
    """Gate orderings of two CNOTs and one T gate, in the order they are tried."""
    cnots = ("CNOT(1->2)", "CNOT(2->1)")
    ts = ("T(1)", "T(2)")
    for t in ts:
        for first, second in itertools.product(cnots, repeat=2):
            for pos in (2, 1, 0):
                seq = [first, second]
                seq.insert(pos, t)
                yield tuple(seq)


def resolve_encoder(target=FRAME_WORDS) -> EncoderCircuit:
    """First gate ordering whose conjugation maps ``{IX, IY, IZ}`` onto ``target`` up to sign."""
    for seq in encoder_candidates():
        u = np.eye(4, dtype=complex)
        for g in seq:
            u = ENCODER_GATES[g] @ u
        images = {w: _pauli_image(u, w) for w in ("IX", "IY", "IZ")}
        if any(v is None for v in images.values()):
            continue
        if sorted(v[1] for v in images.values()) == sorted(target) and all(
            abs(abs(v[0]) - 1) < 1e-9 and abs(v[0].imag) < 1e-9 for v in images.values()
        ):
            return EncoderCircuit(gates=seq, unitary=u, images=images)
    raise RuntimeError("no encoder ordering reproduces the logical frame")


def two_qubit_encoder() -> np.ndarray:
    """Unitary of the resolved CNOT, CNOT, T circuit."""
    return resolve_encoder().unitary


def paper_subsystem_code() -> tuple[SubsystemCode, LogicalFrame, np.ndarray]:
    """Two-qubit code with logical frame ``X_L = XX, Y_L = YI, Z_L = ZX`` and ``sigma_A = I/2``.

    The circuit sends the B-qubit Paulis ``X, Y, Z`` to ``ZX, XX, YI``; a
    ``T^dag`` relabelling on B (cycling ``X -> Y -> Z -> X``) aligns them with
    the frame so that ``embed(I/2, (I + aX + bY + cZ)/2)`` equals
    ``logical_bloch_state(a, b, c)``.
    """
    u = two_qubit_encoder()
    emb = u @ np.kron(np.eye(2), dagger(T_GATE))
    code = SubsystemCode(2, 2, emb)
    frame = LogicalFrame(*(pauli_word(w) for w in FRAME_WORDS), words=FRAME_WORDS)
    return code, frame, np.eye(2, dtype=complex) / 2


def n_qubit_private_code(n: int) -> tuple[SubsystemCode, np.ndarray]:
    """Two-qubit code on qubits 1-2 with maximally mixed ancillas on qubits 3..n.

    ``A`` = qubit 1 (x) qubits 3..n, ``B`` = the logical qubit; ``sigma_A = I / 2**(n-1)``.
    """
    if n < 2:
        raise ValueError("need at least two qubits")
    code2, _, _ = paper_subsystem_code()
    if n == 2:
        return code2, np.eye(2, dtype=complex) / 2
    rest = 2 ** (n - 2)
    # reorder |a1, a_rest, b> -> |a1, b, a_rest>
    perm = np.zeros((4 * rest, 4 * rest), dtype=complex)
    for a1, ar, b in itertools.product(range(2), range(rest), range(2)):
        perm[(a1 * 2 + b) * rest + ar, (a1 * rest + ar) * 2 + b] = 1
    emb = np.kron(code2.embedding, np.eye(rest)) @ perm
    dim_a = 2 * rest
    return SubsystemCode(dim_a, 2, emb), np.eye(dim_a, dtype=complex) / dim_a


def code_to_json(code: SubsystemCode) -> dict:
    return {"dim_a": code.dim_a, "dim_b": code.dim_b, "embedding": matrix_to_json(code.embedding)}


def code_from_json(obj) -> SubsystemCode:
    if not isinstance(obj, dict):
        raise ValueError("code JSON must be an object")
    if "basis" in obj:
        return subspace_code([matrix_from_json(v) for v in obj["basis"]])
    try:
        return SubsystemCode(int(obj["dim_a"]), int(obj["dim_b"]), matrix_from_json(obj["embedding"]))
    except KeyError as exc:
        raise ValueError(f"code JSON missing {exc.args[0]!r}") from None


def frame_to_json(frame: LogicalFrame) -> dict:
    if frame.words is not None:
        return {"x_l": frame.words[0], "y_l": frame.words[1], "z_l": frame.words[2]}
    return {k: matrix_to_json(getattr(frame, k)) for k in ("x_l", "y_l", "z_l")}


def frame_from_json(obj) -> LogicalFrame:
    vals = [obj[k] for k in ("x_l", "y_l", "z_l")]
    if all(isinstance(v, str) for v in vals):
        return LogicalFrame(*(pauli_word(v) for v in vals), words=tuple(vals))
    return LogicalFrame(*(matrix_from_json(v) for v in vals))


__all__ = [
    "SubsystemCode", "LogicalFrame", "EncoderCircuit", "T_GATE", "subspace_code", "embed",
    "logical_bloch_state", "encoder_candidates", "resolve_encoder", "two_qubit_encoder",
    "paper_subsystem_code", "n_qubit_private_code", "code_to_json", "code_from_json",
    "frame_to_json", "frame_from_json",
]
