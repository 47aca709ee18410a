"""Error-correction side: Knill-Laflamme checks, complementarity, measurement channels."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .channels import KrausMap, apply, choi, complementary, compose, dual, minimal_kraus
from .codes import SubsystemCode, embed
from .linalg import (
    DimensionError,
    Tolerance,
    as_matrix,
    dagger,
    eig_hermitian,
    hermitian_basis,
    partial_trace,
    random_hermitian,
    resolve_tol,
    trace_norm,
)
from .privacy import is_operator_private, is_private


@dataclass
class ComplementarityReport:
    private_for_phi: bool
    operator_correctable_for_complement: bool
    complement_is_measurement: bool
    notes: str = ""

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj) -> "ComplementarityReport":
        return cls(**obj)


@dataclass
class CorrectabilityWitness:
    recovery: KrausMap
    tau_a: np.ndarray
    residual: float
    accepted: bool = False


@dataclass(frozen=True)
class MeasurementStructure:
    """``phi(rho) = sum_m <v_m|rho|v_m> |u_m><u_m|`` with orthonormal ``v`` and ``u``."""

    inputs: np.ndarray
    outputs: np.ndarray

    @property
    def num_outcomes(self) -> int:
        return self.inputs.shape[1]

    def kraus(self) -> list[np.ndarray]:
        """Rank-one Kraus operators ``|u_m><v_m|``."""
        return [np.outer(self.outputs[:, m], self.inputs[:, m].conj()) for m in range(self.num_outcomes)]


def knill_laflamme_check(phi: KrausMap, code: SubsystemCode, tol: Tolerance | None = None):
    """``P V_i^dag V_j P = c_ij P`` for all Kraus pairs; returns ``(verdict, c)``."""
    tol = resolve_tol(tol)
    if code.dim_a != 1:
        raise ValueError("Knill-Laflamme conditions here are for subspace codes (dim_a = 1)")
    if phi.dim_in != code.dim_s:
        raise DimensionError("channel and code dimensions differ")
    W = code.embedding
    K = np.einsum("kab,bc->kac", phi.kraus, W)  # V_k W
    gram = np.einsum("iab,jac->ijbc", K.conj(), K)  # W^dag V_i^dag V_j W
    c = np.einsum("ijbb->ij", gram) / code.dim_b
    ok = tol.close(gram, c[:, :, None, None] * np.eye(code.dim_b)[None, None])
    return ok, c


def operator_knill_laflamme_check(e: KrausMap, code: SubsystemCode, tol: Tolerance | None = None) -> bool:
    """Operator-subsystem conditions: ``W^dag V_i^dag V_j W = g_ij (x) I_B`` for all pairs."""
    tol = resolve_tol(tol)
    if e.dim_in != code.dim_s:
        raise DimensionError("channel and code dimensions differ")
    W = code.embedding
    K = np.einsum("kab,bc->kac", e.kraus, W)
    gram = np.einsum("iab,jac->ijbc", K.conj(), K)
    da, db = code.dim_a, code.dim_b
    for i in range(gram.shape[0]):
        for j in range(gram.shape[1]):
            blk = gram[i, j]
            g = partial_trace(blk, [da, db], [0]) / db
            if not tol.close(blk, np.kron(g, np.eye(db))):
                return False
    return True


def operator_correctable_check(e: KrausMap, code: SubsystemCode, tol: Tolerance | None = None) -> bool:
    """``B`` is operator-correctable for ``e`` iff it is operator-private for the complement of ``e``."""
    return is_operator_private(complementary(e), code, tol).per_state


def measurement_structure(phi: KrausMap, tol: Tolerance | None = None) -> MeasurementStructure | None:
    """Detect a von Neumann measurement channel, independent of the Kraus representation.

    For such a channel ``phi^dag o phi`` is the pinching onto the measured
    basis; the basis is read off a generic Hermitian operator pinched by it,
    and then each ``phi(|v_m><v_n|)`` is checked.
    """
    tol = resolve_tol(tol)
    loose = Tolerance(max(tol.absolute, 1e-9) * 100, tol.relative)
    pinch = compose(dual(phi), phi)
    if not loose.close(choi(compose(pinch, pinch)), choi(pinch)):
        return None
    d = phi.dim_in
    probe = random_hermitian(d, np.random.default_rng(20120521))
    evals, vecs = eig_hermitian(apply(pinch, probe), loose)
    if d > 1 and np.min(np.abs(np.diff(evals))) < 1e-6:
        return None
    outs = []
    for m in range(d):
        for n in range(d):
            img = apply(phi, np.outer(vecs[:, m], vecs[:, n].conj()))
            if m != n and not loose.small(np.abs(img).max()):
                return None
        w, u = eig_hermitian(apply(phi, np.outer(vecs[:, m], vecs[:, m].conj())), loose)
        if not (abs(w[0] - 1) <= loose.absolute and np.all(np.abs(w[1:]) <= loose.absolute)):
            return None
        outs.append(u[:, 0])
    outputs = np.column_stack(outs)
    if not loose.close(dagger(outputs) @ outputs, np.eye(d)):
        return None
    return MeasurementStructure(vecs, outputs)


def is_von_neumann_measurement(phi: KrausMap, tol: Tolerance | None = None) -> bool:
    """True iff ``phi`` measures in an orthonormal basis and records the outcome orthogonally.

    The number of outcomes must also equal the Choi rank (the minimal Kraus count).
    """
    structure = measurement_structure(phi, tol)
    if structure is None:
        return False
    return minimal_kraus(phi, tol).num_kraus == structure.num_outcomes


def complementarity_pair_report(phi: KrausMap, code: SubsystemCode, sigma_a, tol: Tolerance | None = None) -> ComplementarityReport:
    tol = resolve_tol(tol)
    private, _ = is_private(phi, code, sigma_a, tol)
    comp = complementary(phi)
    correctable = operator_correctable_check(comp, code, tol)
    measurement = is_von_neumann_measurement(comp, tol)
    op_private = is_operator_private(phi, code, tol).per_state
    if op_private:
        notes = "operator private: complementarity applies"
        if private != correctable:
            notes += "; MISMATCH between privacy and complementary correctability"
    elif private:
        notes = "private but not operator private: complementarity fails"
    else:
        notes = "not private for phi"
    return ComplementarityReport(private, correctable, measurement, notes)


def fixed_state_correctable_check(
    e: KrausMap,
    code: SubsystemCode,
    sigma_a,
    recovery: KrausMap,
    tol: Tolerance | None = None,
) -> CorrectabilityWitness:
    """Check ``R o E (sigma_A (x) sigma_B) = tau_A (x) sigma_B`` for one fixed ``sigma_A``.

    ``tau_A`` is read from the ``A (x) B`` sector of ``R o E(sigma_A (x) I/d_B)``;
    the residual is the largest trace-norm violation over an operator basis of B.
    """
    tol = resolve_tol(tol)
    sigma_a = as_matrix(sigma_a)
    if e.dim_in != code.dim_s or recovery.dim_in != e.dim_out or recovery.dim_out != code.dim_s:
        raise DimensionError("channel, recovery and code dimensions are incompatible")
    if sigma_a.shape != (code.dim_a, code.dim_a):
        raise DimensionError("sigma_a does not act on the code's A factor")
    re = compose(recovery, e)
    W = code.embedding
    db = code.dim_b
    mixed = apply(re, embed(code, sigma_a, np.eye(db) / db))
    tau_a = partial_trace(dagger(W) @ mixed @ W, [code.dim_a, db], [0])
    residual = 0.0
    for g in hermitian_basis(db):
        out = apply(re, embed(code, sigma_a, g))
        residual = max(residual, trace_norm(out - embed(code, tau_a, g)))
    return CorrectabilityWitness(recovery, tau_a, residual, residual <= tol.absolute * db ** 2)


__all__ = [
    "ComplementarityReport", "CorrectabilityWitness", "MeasurementStructure", "knill_laflamme_check",
    "operator_knill_laflamme_check", "operator_correctable_check", "measurement_structure",
    "is_von_neumann_measurement", "complementarity_pair_report", "fixed_state_correctable_check",
]
