"""Pure numpy implementation of the compiled kernels (same contract)."""
import numpy as np


def output_trace_norms(kraus, isos, ops):
    """``out[t, g] = || sum_j V_j W_t X_g W_t^dag V_j^dag ||_tr`` for Hermitian ``X_g``."""
    V = np.asarray(kraus, dtype=complex)
    W = np.asarray(isos, dtype=complex)
    X = np.asarray(ops, dtype=complex)
    d, k = W.shape[1], W.shape[2]
    if V.shape[2] != d or X.shape[1:] != (k, k):
        raise ValueError("incompatible kernel operand shapes")
    K = np.einsum("jab,tbc->tjac", V, W)  # (T, r, d, k)
    KX = np.einsum("tjab,gbc->tgjac", K, X)
    Y = np.einsum("tgjac,tjbc->tgab", KX, K.conj())
    return np.abs(np.linalg.eigvalsh(Y)).sum(axis=-1)
