from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp

from folksim.kernels import as_csr_float, available_backends, csr_dense, get_backend, set_backend, use_backend


def _random_case(seed: int):
    rng = np.random.default_rng(seed)
    a = sp.random(37, 23, density=0.15, random_state=seed, format="csr") * 3
    dense = rng.standard_normal((23, 11))
    return as_csr_float(a), dense


def test_python_backend_always_available():
    assert "python" in available_backends()
    assert get_backend() == available_backends()[0]


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        set_backend("fortran")


def test_use_backend_restores():
    before = get_backend()
    with use_backend("python"):
        assert get_backend() == "python"
    assert get_backend() == before


@pytest.mark.parametrize("backend", available_backends())
def test_matches_scipy(backend):
    a, dense = _random_case(3)
    with use_backend(backend):
        out = csr_dense(a, dense)
    assert out.flags.c_contiguous
    np.testing.assert_allclose(out, a.toarray() @ dense, atol=1e-12)


@pytest.mark.skipif("cython" not in available_backends(), reason="extension not built")
def test_backends_agree_bitwise():
    a, dense = _random_case(7)
    with use_backend("cython"):
        c = csr_dense(a, dense)
    with use_backend("python"):
        p = csr_dense(a, dense)
    assert np.array_equal(c, p)


@pytest.mark.skipif("cython" not in available_backends(), reason="extension not built")
def test_thread_count_does_not_change_result():
    a, dense = _random_case(11)
    with use_backend("cython"):
        outs = [csr_dense(a, dense, threads=t) for t in (1, 2, 4)]
    assert all(np.array_equal(outs[0], o) for o in outs[1:])


def test_empty_rows_give_zero_rows():
    a = as_csr_float(sp.csr_matrix((3, 4)))
    for b in available_backends():
        with use_backend(b):
            assert not csr_dense(a, np.ones((4, 2))).any()


def test_shape_mismatch():
    a, _ = _random_case(1)
    with pytest.raises(ValueError, match="shape mismatch"):
        csr_dense(a, np.ones((5, 2)))
