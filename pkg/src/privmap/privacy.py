"""Privacy certification for subspace and subsystem codes.

``B`` is private for ``phi`` at a fixed ``sigma_A`` when
``phi(embed(sigma_A, sigma_B))`` is one state ``rho_0`` for every density
``sigma_B``. By linearity that is the same as every traceless operator on
``B`` being sent to zero, which is what :func:`privacy_defect` measures.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channels import KrausMap, apply, choi, dual
from .codes import SubsystemCode, embed, subspace_code
from .linalg import (
    DimensionError,
    Tolerance,
    as_matrix,
    dagger,
    eig_hermitian,
    gell_mann_basis,
    haar_isometry,
    hermitian_basis,
    isometry_defect,
    matrix_from_json,
    matrix_to_json,
    matrix_units,
    resolve_tol,
)


class NotPrivate(Exception):
    """The code is not private for the channel (raised by :func:`certify_theorem2`)."""


@dataclass
class DefectReport:
    defect: float
    worst_input: np.ndarray
    rho_0: np.ndarray
    contributions: list[float] = field(default_factory=list)
    trial: int | None = None

    def to_json(self) -> dict:
        out = {
            "defect": float(self.defect),
            "worst_input": matrix_to_json(self.worst_input),
            "rho_0": matrix_to_json(self.rho_0),
            "contributions": [float(c) for c in self.contributions],
        }
        if self.trial is not None:
            out["trial"] = int(self.trial)
        return out

    @classmethod
    def from_json(cls, obj) -> "DefectReport":
        return cls(
            defect=float(obj["defect"]),
            worst_input=matrix_from_json(obj["worst_input"]),
            rho_0=matrix_from_json(obj["rho_0"]),
            contributions=[float(c) for c in obj.get("contributions", [])],
            trial=obj.get("trial"),
        )


@dataclass
class PrivacyCertificate:
    """Witness that ``sqrt(p_k) V_j|psi_A,k> = sum_il lam[(j,k),(i,l)] sqrt(q_l) |phi_l><i|``.

    Rows of ``lam`` are indexed ``j * len(p) + k``, columns ``i * len(q) + l``.
    """

    sigma_a: np.ndarray
    rho_0: np.ndarray
    lam: np.ndarray
    p: np.ndarray
    q: np.ndarray
    psi_a: np.ndarray
    phi: np.ndarray
    unitary_flag: bool
    reconstruction_residual: float
    isometry_residual: float
    unitarity_residual: float | None
    choi_residual: float

    def to_json(self) -> dict:
        return {
            "sigma_a": matrix_to_json(self.sigma_a),
            "rho_0": matrix_to_json(self.rho_0),
            "lambda": matrix_to_json(self.lam),
            "p": [float(x) for x in self.p],
            "q": [float(x) for x in self.q],
            "psi_a": matrix_to_json(self.psi_a),
            "phi": matrix_to_json(self.phi),
            "unitary_flag": bool(self.unitary_flag),
            "residuals": {
                "reconstruction": self.reconstruction_residual,
                "isometry": self.isometry_residual,
                "unitarity": self.unitarity_residual,
                "choi": self.choi_residual,
            },
        }

    @classmethod
    def from_json(cls, obj) -> "PrivacyCertificate":
        res = obj["residuals"]
        return cls(
            sigma_a=matrix_from_json(obj["sigma_a"]),
            rho_0=matrix_from_json(obj["rho_0"]),
            lam=matrix_from_json(obj["lambda"]),
            p=np.asarray(obj["p"], dtype=float),
            q=np.asarray(obj["q"], dtype=float),
            psi_a=matrix_from_json(obj["psi_a"]),
            phi=matrix_from_json(obj["phi"]),
            unitary_flag=bool(obj["unitary_flag"]),
            reconstruction_residual=res["reconstruction"],
            isometry_residual=res["isometry"],
            unitarity_residual=res["unitarity"],
            choi_residual=res["choi"],
        )


@dataclass(frozen=True)
class OperatorPrivacy:
    """Outcome of the operator-privacy test.

    ``per_state``: for every ``sigma_A`` the output is constant in ``sigma_B``.
    ``state_independent``: additionally that constant does not depend on ``sigma_A``.
    Truthiness follows ``per_state``.
    """

    per_state: bool
    state_independent: bool
    defect: float
    a_dependence: float

    def __bool__(self):
        return self.per_state


def _check_dims(phi: KrausMap, code: SubsystemCode, sigma_a=None):
    if phi.dim_in != code.dim_s:
        raise DimensionError(f"channel acts on dimension {phi.dim_in}, code lives in {code.dim_s}")
    if sigma_a is not None:
        sigma_a = as_matrix(sigma_a)
        if sigma_a.shape != (code.dim_a, code.dim_a):
            raise DimensionError("sigma_a does not act on the code's A factor")
        return sigma_a
    return None


def _output_norms(phi: KrausMap, embedding: np.ndarray, ops: np.ndarray) -> np.ndarray:
    return kernels.output_trace_norms(phi.kraus, embedding[None], ops)[0]


def privacy_defect(phi: KrausMap, code: SubsystemCode, sigma_a) -> DefectReport:
    """Sum over the Gell-Mann basis ``G`` of B of ``|| phi(embed(sigma_a, G)) ||_tr``."""
    sigma_a = _check_dims(phi, code, sigma_a)
    basis = gell_mann_basis(code.dim_b)
    rho_0 = apply(phi, embed(code, sigma_a, np.eye(code.dim_b) / code.dim_b))
    if len(basis) == 0:
        return DefectReport(0.0, np.zeros((1, 1), dtype=complex), rho_0)
    ops = np.array([np.kron(sigma_a, g) for g in basis])
    norms = _output_norms(phi, code.embedding, ops)
    worst = int(np.argmax(norms))
    return DefectReport(float(norms.sum()), basis[worst], rho_0, contributions=list(map(float, norms)))


def is_private(phi: KrausMap, code: SubsystemCode, sigma_a, tol: Tolerance | None = None):
    """``(verdict, rho_0)``; accepts when the defect is at most ``tol * dim_b**2``."""
    tol = resolve_tol(tol)
    report = privacy_defect(phi, code, sigma_a)
    return report.defect <= tol.absolute * code.dim_b ** 2, report.rho_0


def is_operator_private(phi: KrausMap, code: SubsystemCode, tol: Tolerance | None = None) -> OperatorPrivacy:
    tol = resolve_tol(tol)
    _check_dims(phi, code)
    basis_a = hermitian_basis(code.dim_a)
    basis_b = gell_mann_basis(code.dim_b)
    if len(basis_b):
        ops = np.array([np.kron(h, g) for h in basis_a for g in basis_b])
        defect = float(_output_norms(phi, code.embedding, ops).sum())
    else:
        defect = 0.0
    ga = gell_mann_basis(code.dim_a)
    if len(ga):
        ops_a = np.array([np.kron(g, np.eye(code.dim_b) / code.dim_b) for g in ga])
        a_dep = float(_output_norms(phi, code.embedding, ops_a).sum())
    else:
        a_dep = 0.0
    per_state = defect <= tol.absolute * (code.dim_a * code.dim_b) ** 2
    independent = per_state and a_dep <= tol.absolute * code.dim_a ** 2
    return OperatorPrivacy(per_state, independent, defect, a_dep)


def _drop_small(w: np.ndarray, vecs: np.ndarray, tol: Tolerance):
    # never drop the leading eigenvalue, however loose the tolerance
    keep = w > min(tol.absolute, 0.5 * w.max())
    return w[keep], vecs[:, keep]


def certify_theorem2(phi: KrausMap, code: SubsystemCode, sigma_a, tol: Tolerance | None = None) -> PrivacyCertificate:
    """Build the isometry ``lam`` relating the two Kraus families of the ``B -> S`` channel.

    One family is ``sqrt(p_k) V_j E_k`` with ``E_k: |i> -> embedding(|psi_A,k> (x) |i>)``,
    the other ``sqrt(q_l) |phi_l><i|`` from the spectrum of ``rho_0``. Both
    describe the same channel exactly when the code is private.
    """
    tol = resolve_tol(tol)
    sigma_a = _check_dims(phi, code, sigma_a)
    p, psi_a = _drop_small(*eig_hermitian(sigma_a, tol), tol)
    d_b = code.dim_b

    left = [
        np.sqrt(pk) * v @ code.sector_isometry(psi_a[:, k])
        for v in phi.kraus
        for k, pk in enumerate(p)
    ]
    rho_0 = apply(phi, embed(code, sigma_a, np.eye(d_b) / d_b))
    q, phis = _drop_small(*eig_hermitian(rho_0, tol), tol)
    eye_b = np.eye(d_b)
    right = [np.sqrt(ql) * np.outer(phis[:, l], eye_b[i]) for i in range(d_b) for l, ql in enumerate(q)]

    choi_res = float(np.max(np.abs(choi(KrausMap(left)) - choi(KrausMap(right)))))
    if choi_res > tol.absolute + tol.relative:
        raise NotPrivate(f"Choi matrices of the two Kraus families differ by {choi_res:.3e}")

    L = np.array(left)  # (J*K, d_s, d_b)
    # lam[(jk),(il)] = <phi_l| L_jk |i> / sqrt(q_l)
    lam = np.einsum("al,nai->nil", phis.conj(), L) / np.sqrt(q)[None, None, :]
    lam = lam.reshape(len(left), d_b * len(q))
    R = np.array(right)
    recon = np.einsum("nm,mab->nab", lam, R)
    recon_res = float(np.max(np.abs(recon - L)))
    iso_res = isometry_defect(lam)
    uni_res = None
    unitary = False
    if lam.shape[0] == lam.shape[1]:
        uni_res = float(np.max(np.abs(lam @ dagger(lam) - np.eye(lam.shape[0]))))
        unitary = uni_res <= max(tol.absolute, 1e-9) and iso_res <= max(tol.absolute, 1e-9)
    return PrivacyCertificate(
        sigma_a=sigma_a, rho_0=rho_0, lam=lam, p=p, q=q, psi_a=psi_a, phi=phis,
        unitary_flag=unitary, reconstruction_residual=recon_res, isometry_residual=iso_res,
        unitarity_residual=uni_res, choi_residual=choi_res,
    )


def heisenberg_private_check(phi: KrausMap, code: SubsystemCode, rho_0, tol: Tolerance | None = None) -> bool:
    """``P phi^dag(M) P == tr(M rho_0) P`` for every matrix unit ``M`` on S."""
    tol = resolve_tol(tol)
    if code.dim_a != 1:
        raise ValueError("the Heisenberg-picture condition applies to subspace codes (dim_a = 1)")
    _check_dims(phi, code)
    rho_0 = as_matrix(rho_0)
    P = code.projector
    V = dual(phi).kraus
    units = matrix_units(phi.dim_out)
    lhs = np.einsum("ab,kbc,mcd,ked,ef->maf", P, V, units, V.conj(), P, optimize=True)
    rhs = np.einsum("mab,ba->m", units, rho_0)[:, None, None] * P[None]
    return tol.close(lhs, rhs)


# search ------------------------------------------------------------------

_CHUNK = 512


def _trial_isometries(d: int, k: int, seed: int, start: int, stop: int) -> np.ndarray:
    return np.array([haar_isometry(d, k, np.random.default_rng([seed, t])) for t in range(start, stop)])


def _polar(w: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(w, full_matrices=False)
    return u @ vh


def _polish(phi: KrausMap, w: np.ndarray, basis: np.ndarray, seed: int, trial: int, iters: int):
    """Gradient-free refinement: random single-entry perturbations, re-orthonormalised."""
    rng = np.random.default_rng([seed, trial, 1])
    best = float(_output_norms(phi, w, basis).sum())
    step = 0.1
    d, k = w.shape
    for _ in range(iters):
        row, col = rng.integers(d), rng.integers(k)
        cand = w.copy()
        cand[row, col] += step * np.exp(2j * np.pi * rng.random())
        cand = _polar(cand)
        val = float(_output_norms(phi, cand, basis).sum())
        if val < best:
            w, best = cand, val
            step = min(step * 1.5, 1.0)
        else:
            step = max(step * 0.9, 1e-6)
    return best, w


def search_private_subspace(
    phi: KrausMap,
    dim: int,
    trials: int,
    seed: int,
    *,
    refine: int = 8,
    polish_iters: int = 200,
    workers: int = 1,
):
    """Haar-sampled search for a ``dim``-dimensional private subspace.

    Each trial draws its isometry from a generator seeded with ``(seed, trial)``;
    the ``refine`` best samples (ordered by defect, then trial index) are
    polished. Returns ``(code, report)`` for the lowest defect found; the
    result is identical for any ``workers`` count.
    """
    if dim < 2:
        raise ValueError("target subspace dimension must be >= 2")
    if trials < 1:
        raise ValueError("need at least one trial")
    d = phi.dim_in
    if dim > d:
        raise DimensionError("subspace dimension exceeds the system dimension")
    basis = gell_mann_basis(dim)

    def run_chunk(start):
        stop = min(start + _CHUNK, trials)
        isos = _trial_isometries(d, dim, seed, start, stop)
        return isos, kernels.output_trace_norms(phi.kraus, isos, basis).sum(axis=1)

    starts = range(0, trials, _CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    isos = np.concatenate([p[0] for p in parts])
    defects = np.concatenate([p[1] for p in parts])

    order = np.lexsort((np.arange(trials), defects))[: max(1, refine)]
    candidates = []
    for t in order:
        t = int(t)
        if polish_iters > 0:
            val, w = _polish(phi, isos[t], basis, seed, t, polish_iters)
        else:
            val, w = float(defects[t]), isos[t]
        candidates.append((val, t, w))
    val, t, w = min(candidates, key=lambda c: (c[0], c[1]))
    code = subspace_code(list(w.T), Tolerance(1e-8))
    report = privacy_defect(phi, code, np.ones((1, 1)))
    report.trial = t
    return code, report


__all__ = [
    "NotPrivate", "DefectReport", "PrivacyCertificate", "OperatorPrivacy", "privacy_defect",
    "is_private", "is_operator_private", "certify_theorem2", "heisenberg_private_check",
    "search_private_subspace",
]
