"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` complex arrays. Qubit ordering is big-endian:
in ``pauli_word("ZX")`` the ``Z`` acts on the most significant tensor factor.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit Pauli products: (a, b) -> (phase, c) with a @ b = phase * c
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used for all numerical equality tests."""

    absolute: float = 1e-9
    relative: float = 1e-9

    def __post_init__(self):
        if self.absolute < 0 or self.relative < 0:
            raise ValueError("tolerances must be non-negative")

    def close(self, a, b) -> bool:
        """``max|a - b| <= absolute + relative * max|b|``."""
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape:
            return False
        scale = float(np.max(np.abs(b))) if b.size else 0.0
        return float(np.max(np.abs(a - b), initial=0.0)) <= self.absolute + self.relative * scale

    def small(self, x: float) -> bool:
        return abs(x) <= self.absolute


def default_tolerance() -> Tolerance:
    """The default tolerance; ``PRIVMAP_TOL`` overrides the absolute part."""
    env = os.environ.get("PRIVMAP_TOL")
    if env:
        return Tolerance(absolute=float(env))
    return Tolerance()


def resolve_tol(tol: Tolerance | float | None) -> Tolerance:
    if tol is None:
        return default_tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(absolute=float(tol))


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"expected a non-empty matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product; the first operand is the most significant factor."""
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor of ``m`` whose index is not in ``keep``.

    ``dims`` lists the factor dimensions (most significant first). The kept
    factors stay in their original order.
    """
    m = np.asarray(m, dtype=complex)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError("factor dimensions must be positive")
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionError(f"matrix of shape {m.shape} does not match dims {dims}")
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # einsum subscripts: row factors 0..n-1, column factors n..2n-1
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    col = letters[n:]
    for i in traced:
        col[i] = letters[i]
    out = [letters[i] for i in keep] + [col[i] for i in keep]
    expr = "".join(letters[:n]) + "".join(col) + "->" + "".join(out)
    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(expr, t).reshape(kept_dim, kept_dim)


def pauli_word(word: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``pauli_word("ZX")``."""
    if not word:
        raise ValueError("empty Pauli word")
    try:
        return tensor_product(*(PAULIS[c] for c in word))
    except KeyError as exc:
        raise ValueError(f"invalid Pauli symbol {exc.args[0]!r} in {word!r}") from None


def pauli_product(w1: str, w2: str) -> tuple[complex, str]:
    """Symbol-wise product: ``pauli_word(w1) @ pauli_word(w2) == phase * pauli_word(w)``."""
    if len(w1) != len(w2):
        raise ValueError("Pauli words must have equal length")
    phase: complex = 1
    out = []
    for a, b in zip(w1, w2):
        p, c = _PAULI_PRODUCT[(a, b)]
        phase *= p
        out.append(c)
    return phase, "".join(out)


def pauli_decompose(m, cutoff: float = 1e-12) -> dict[str, complex]:
    """Coefficients of ``m`` in the Pauli-word basis (dimension must be ``2**n``)."""
    m = as_matrix(m)
    d = m.shape[0]
    n = d.bit_length() - 1
    if m.shape != (d, d) or 2 ** n != d:
        raise DimensionError("Pauli decomposition needs a square 2**n matrix")
    coeffs = {}
    for letters in itertools.product("IXYZ", repeat=n):
        w = "".join(letters)
        c = np.trace(pauli_word(w) @ m) / d
        if abs(c) > cutoff:
            coeffs[w] = complex(c)
    return coeffs


def is_hermitian(m, tol: Tolerance | None = None) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and resolve_tol(tol).close(m, dagger(m))


def _canonical_subspace_basis(vecs: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(vecs) that depends only on the subspace.

    Gram-Schmidt on the projections of the computational basis vectors,
    taken in order, with a positive real leading entry for each vector.
    """
    d, k = vecs.shape
    proj = vecs @ dagger(vecs)
    out: list[np.ndarray] = []
    for idx in range(d):
        v = proj[:, idx].copy()
        for u in out:
            v -= (np.vdot(u, v)) * u
        nrm = np.linalg.norm(v)
        if nrm > 1e-7:
            out.append(v / nrm)
            if len(out) == k:
                break
    basis = np.column_stack(out)
    # reorthonormalise against accumulated rounding
    q, r = np.linalg.qr(basis)
    q = q * (np.sign(np.diag(r).real) + (np.diag(r).real == 0))
    return _fix_phases(q)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-10 * max(1.0, np.abs(col).max())))
        if abs(col[idx]) > 0:
            out[:, j] = col * (abs(col[idx]) / col[idx])
    return out


def eig_hermitian(m, tol: Tolerance | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns.

    Degenerate eigenvalues (equal within ``tol``) get a canonical basis of
    their eigenspace, so repeated calls and equivalent inputs give identical
    vectors; ``I/4`` returns the computational basis.
    """
    tol = resolve_tol(tol)
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("eig_hermitian needs a square matrix")
    if not tol.close(m, dagger(m)):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    w = w[::-1]
    v = v[:, ::-1]
    gap = max(tol.absolute, 1e-12) * 100
    vecs = np.empty_like(v)
    start = 0
    d = len(w)
    while start < d:
        stop = start + 1
        while stop < d and w[stop - 1] - w[stop] <= gap:
            stop += 1
        block = v[:, start:stop]
        vecs[:, start:stop] = _canonical_subspace_basis(block) if stop - start > 1 else _fix_phases(block)
        start = stop
    return w.copy(), vecs


def trace_norm(m) -> float:
    """Sum of singular values (eigenvalue magnitudes for Hermitian input)."""
    m = np.asarray(m, dtype=complex)
    if m.shape[0] == m.shape[1] and np.allclose(m, dagger(m), atol=1e-13):
        return float(np.abs(np.linalg.eigvalsh((m + dagger(m)) / 2)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def is_isometry(m, tol: Tolerance | None = None) -> bool:
    """True iff ``m^dagger m = I`` within tolerance."""
    m = np.asarray(m, dtype=complex)
    return resolve_tol(tol).close(dagger(m) @ m, np.eye(m.shape[1]))


def is_unitary(m, tol: Tolerance | None = None) -> bool:
    m = np.asarray(m, dtype=complex)
    return m.shape[0] == m.shape[1] and is_isometry(m, tol) and resolve_tol(tol).close(
        m @ dagger(m), np.eye(m.shape[0])
    )


def isometry_defect(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[1]))))


def gell_mann_basis(d: int) -> np.ndarray:
    """Generalized Gell-Mann matrices: ``d**2 - 1`` traceless Hermitian operators.

    For ``d = 2`` these are X, Y, Z.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            mats.append(s)
            mats.append(a)
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1
        g[l, l] = -l
        mats.append(np.sqrt(2 / (l * (l + 1))) * g)
    if not mats:
        return np.zeros((0, d, d), dtype=complex)
    # X, Y, Z order for qubits: symmetric, antisymmetric, diagonal already matches
    return np.array(mats)


def hermitian_basis(d: int) -> np.ndarray:
    """``I/d`` followed by the Gell-Mann matrices; spans all operators on C^d."""
    return np.concatenate([np.eye(d, dtype=complex)[None] / d, gell_mann_basis(d)])


def matrix_units(d_rows: int, d_cols: int | None = None) -> np.ndarray:
    d_cols = d_rows if d_cols is None else d_cols
    units = np.zeros((d_rows * d_cols, d_rows, d_cols), dtype=complex)
    for idx in range(d_rows * d_cols):
        units[idx, idx // d_cols, idx % d_cols] = 1
    return units


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows`` (QR with the R-phase correction)."""
    if cols > rows:
        raise DimensionError("an isometry cannot have more columns than rows")
    z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_isometry(d, d, rng)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble of the given rank."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + dagger(g)) / 2


def ket(bits: str) -> np.ndarray:
    """Computational basis column vector, e.g. ``ket("01")``."""
    v = np.zeros((2 ** len(bits), 1), dtype=complex)
    v[int(bits, 2), 0] = 1
    return v


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.ravel()],
        "im": [float(x) for x in m.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(obj["re"])), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {re.size}/{im.size}")
    return as_matrix((re + 1j * im).reshape(rows, cols))
