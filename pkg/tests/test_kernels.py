"""Backend-agreement and frozen-value tests for the objective kernels."""

import math

import numpy as np
import pytest

from indexcoding.kernels import _reference

try:
    from indexcoding.kernels import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = [_reference] + ([_compiled] if _compiled is not None else [])


def _random_inputs(K, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((K, K))
    Xdot = rng.standard_normal((K, K))
    mask = (rng.random((K, K)) < 0.4).astype(np.float64)
    np.fill_diagonal(mask, 0.0)
    return X, Xdot, mask


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND_NAME)
class TestKernelValues:
    def test_reg_value_identity_k2(self, impl):
        # 0.001 * (2*sqrt(1 + 1e-4) + 2*0.01), diagonal penalty vanishes
        expected = 0.001 * (2.0 * math.sqrt(1.0 + 1e-4) + 2.0 * 0.01)
        assert impl.reg_value(np.eye(2), 0.001, 0.01) == pytest.approx(
            expected, rel=1e-14
        )
        assert expected == pytest.approx(0.0020201, rel=1e-5)

    def test_reg_value_scalar(self, impl):
        X = np.array([[0.25]])
        expected = 0.5 * (0.25 - 1.0) ** 2 + 0.001 * math.sqrt(0.0625 + 1e-4)
        assert impl.reg_value(X, 0.001, 0.01) == pytest.approx(expected, rel=1e-14)

    def test_reg_gmat_scalar(self, impl):
        X = np.array([[0.5]])
        got = impl.reg_gmat(X, 0.2, 0.1)
        expected = (0.5 - 1.0) + 0.2 * 0.5 / math.sqrt(0.25 + 0.01)
        assert got[0, 0] == pytest.approx(expected, rel=1e-14)

    def test_ref_value_single_entry(self, impl):
        X = np.array([[1.0, 0.1], [0.0, 1.0]])
        mask = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert impl.ref_value(X, mask) == pytest.approx(0.005, rel=1e-14)

    def test_ref_gdot_is_linear(self, impl):
        _, Xdot, mask = _random_inputs(4, 3)
        a = impl.ref_gdot(Xdot, mask)
        b = impl.ref_gdot(2.0 * Xdot, mask)
        np.testing.assert_allclose(b, 2.0 * a, rtol=1e-14)


@pytest.mark.skipif(_compiled is None, reason="compiled kernels not built")
@pytest.mark.parametrize("K", [1, 2, 5, 16])
def test_backends_agree(K):
    X, Xdot, mask = _random_inputs(K, K + 100)
    rho, eps = 0.001, 0.01
    assert _compiled.reg_value(X, rho, eps) == pytest.approx(
        _reference.reg_value(X, rho, eps), rel=1e-13
    )
    np.testing.assert_allclose(
        _compiled.reg_gmat(X, rho, eps), _reference.reg_gmat(X, rho, eps), rtol=1e-13
    )
    np.testing.assert_allclose(
        _compiled.reg_gdot(X, Xdot, rho, eps),
        _reference.reg_gdot(X, Xdot, rho, eps),
        rtol=1e-13,
    )
    assert _compiled.ref_value(X, mask) == pytest.approx(
        _reference.ref_value(X, mask), rel=1e-13
    )
    np.testing.assert_allclose(
        _compiled.ref_gmat(X, mask), _reference.ref_gmat(X, mask), rtol=1e-13
    )
    np.testing.assert_allclose(
        _compiled.ref_gdot(Xdot, mask), _reference.ref_gdot(Xdot, mask), rtol=1e-13
    )


def test_read_only_inputs_accepted():
    X = np.eye(3)
    X.flags.writeable = False
    mask = np.zeros((3, 3))
    mask.flags.writeable = False
    for impl in BACKENDS:
        impl.reg_value(X, 0.001, 0.01)
        impl.ref_value(X, mask)
