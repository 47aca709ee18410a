import os
import subprocess
import sys

import numpy as np
import pytest

from privmap import _kernels_py, kernels
from privmap.linalg import gell_mann_basis, haar_isometry, trace_norm

try:
    from privmap import _kernels as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None


def reference(kraus, isos, ops):
    out = np.zeros((len(isos), len(ops)))
    for t, w in enumerate(isos):
        for g, x in enumerate(ops):
            y = sum(v @ w @ x @ w.conj().T @ v.conj().T for v in kraus)
            out[t, g] = trace_norm(y)
    return out


def random_case(rng, r, d, k, T, m):
    kraus = rng.normal(size=(r, d, d)) + 1j * rng.normal(size=(r, d, d))
    isos = np.array([haar_isometry(d, k, rng) for _ in range(T)])
    x = rng.normal(size=(m, k, k)) + 1j * rng.normal(size=(m, k, k))
    return kraus, isos, x + x.conj().transpose(0, 2, 1)


@pytest.mark.parametrize("shape", [(1, 2, 1, 3, 1), (4, 4, 2, 5, 3), (3, 8, 4, 2, 15), (2, 6, 6, 1, 4)])
def test_python_kernel_matches_reference(rng, shape):
    case = random_case(rng, *shape)
    np.testing.assert_allclose(_kernels_py.output_trace_norms(*case), reference(*case), atol=1e-10)


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
@pytest.mark.parametrize("shape", [(1, 2, 1, 3, 1), (4, 4, 2, 5, 3), (3, 8, 4, 2, 15), (2, 6, 6, 1, 4)])
def test_compiled_kernel_matches_python(rng, shape):
    case = random_case(rng, *shape)
    np.testing.assert_allclose(compiled.output_trace_norms(*case), _kernels_py.output_trace_norms(*case), atol=1e-10)


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
def test_compiled_kernel_accepts_readonly_inputs(rng):
    kraus, isos, ops = random_case(rng, 2, 4, 2, 3, 3)
    for arr in (kraus, isos, ops):
        arr.setflags(write=False)
    assert compiled.output_trace_norms(kraus, isos, ops).shape == (3, 3)


@pytest.mark.parametrize("impl", [_kernels_py] + ([compiled] if compiled is not None else []))
def test_shape_mismatch(impl):
    with pytest.raises(ValueError):
        impl.output_trace_norms(np.zeros((1, 4, 4)), np.zeros((1, 3, 2)), gell_mann_basis(2))


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None and not os.environ.get("PRIVMAP_PURE_PYTHON"):
        assert kernels.BACKEND == "cython"


def test_pure_python_override():
    code = "from privmap import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env={"PRIVMAP_PURE_PYTHON": "1", "PATH": ""}
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("impl", [_kernels_py] + ([compiled] if compiled is not None else []))
@pytest.mark.parametrize("d_out", [1, 3, 6])
def test_rectangular_kraus(rng, impl, d_out):
    kraus = rng.normal(size=(3, d_out, 4)) + 1j * rng.normal(size=(3, d_out, 4))
    _, isos, ops = random_case(rng, 1, 4, 2, 3, 3)
    np.testing.assert_allclose(impl.output_trace_norms(kraus, isos, ops), reference(kraus, isos, ops), atol=1e-10)
