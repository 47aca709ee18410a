"""Verification toolkit for private quantum subsystems.

Channels are Kraus lists (:mod:`privmap.channels`), codes are isometries
``A (x) B -> S`` (:mod:`privmap.codes`), privacy is certified by
:mod:`privmap.privacy` and the error-correction side lives in :mod:`privmap.qec`.
"""
from .channels import (
    Channel,
    KrausMap,
    apply,
    channels_equal,
    choi,
    complementary,
    compose,
    depolarizing,
    dual,
    full_dephasing,
    minimal_kraus,
    phase_damping,
    random_unitary_channel,
    stinespring,
    tensor,
)
from .codes import (
    LogicalFrame,
    SubsystemCode,
    embed,
    logical_bloch_state,
    n_qubit_private_code,
    paper_subsystem_code,
    subspace_code,
    two_qubit_encoder,
)
from .kernels import BACKEND
from .linalg import Tolerance, eig_hermitian, partial_trace, pauli_word, tensor_product
from .privacy import (
    DefectReport,
    NotPrivate,
    PrivacyCertificate,
    certify_theorem2,
    heisenberg_private_check,
    is_operator_private,
    is_private,
    privacy_defect,
    search_private_subspace,
)
from .qec import (
    ComplementarityReport,
    complementarity_pair_report,
    fixed_state_correctable_check,
    is_von_neumann_measurement,
    knill_laflamme_check,
    operator_correctable_check,
)

__version__ = "0.1.0"

__all__ = [
    "apply", "BACKEND", "certify_theorem2", "Channel", "channels_equal", "choi",
    "complementarity_pair_report", "ComplementarityReport", "complementary", "compose",
    "DefectReport", "depolarizing", "dual", "eig_hermitian", "embed",
    "fixed_state_correctable_check", "full_dephasing", "heisenberg_private_check",
    "is_operator_private", "is_private", "is_von_neumann_measurement", "knill_laflamme_check",
    "KrausMap", "logical_bloch_state", "LogicalFrame", "minimal_kraus", "n_qubit_private_code",
    "NotPrivate", "operator_correctable_check", "paper_subsystem_code", "partial_trace",
    "pauli_word", "phase_damping", "privacy_defect", "PrivacyCertificate",
    "random_unitary_channel", "search_private_subspace", "stinespring", "subspace_code",
    "SubsystemCode", "tensor", "tensor_product", "Tolerance", "two_qubit_encoder",
]
