import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import haar
from luequiv import kernels
from luequiv.phase import build_coset_tensor

BACKENDS = kernels.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.get_backend(request.param)


def test_compiled_backend_is_active():
    # the editable install builds the extension; losing it silently would hide a build break
    assert "cython" in BACKENDS
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("M,N", [(2, 2), (2, 4), (3, 3), (4, 4)])
def test_backends_agree_on_objective_and_gradient(M, N, rng):
    ct = build_coset_tensor(haar(M * N, rng), haar(M * N, rng), M, N)
    th = rng.uniform(0, 2 * np.pi, M * N)
    ref = kernels.get_backend("python").objective_gradient(ct.terms, th)
    for name in BACKENDS:
        out = kernels.get_backend(name).objective_gradient(ct.terms, th)
        assert out[0] == pytest.approx(ref[0], abs=1e-12)
        assert out[1] == pytest.approx(ref[1], abs=1e-12)
        np.testing.assert_allclose(out[3], ref[3], atol=1e-12)


def test_descent_reaches_the_same_point(backend, rng):
    X = haar(6, rng)
    W = np.kron(haar(2, rng), haar(3, rng))
    Y = W.conj().T @ X
    ct = build_coset_tensor(X, Y, 2, 3)
    th0 = np.concatenate([[0.0], rng.uniform(0, 2 * np.pi, 5)])
    th, f, evals, iters = backend.descend(ct.terms, th0)
    ref = kernels.get_backend("python").descend(ct.terms, th0)
    assert th[0] == 0.0
    assert abs(f - ref[1]) <= 1e-9
    assert f <= ref[1] + 1e-9
    assert evals >= iters + 1


def test_descend_leaves_input_untouched(backend, rng):
    ct = build_coset_tensor(haar(4, rng), haar(4, rng), 2, 2)
    th0 = np.array([0.0, 1.0, 2.0, 3.0])
    backend.descend(ct.terms, th0, max_iters=5)
    np.testing.assert_array_equal(th0, [0.0, 1.0, 2.0, 3.0])


def test_zero_iterations_evaluates_once(backend, rng):
    ct = build_coset_tensor(haar(4, rng), haar(4, rng), 2, 2)
    th0 = np.array([0.0, 1.0, 2.0, 3.0])
    th, f, evals, iters = backend.descend(ct.terms, th0, max_iters=0)
    assert (evals, iters) == (1, 0)
    assert f == pytest.approx(backend.objective_gradient(ct.terms, th0)[0])


def test_env_var_forces_numpy_fallback():
    env = dict(os.environ, LUEQUIV_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import luequiv; print(luequiv.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
