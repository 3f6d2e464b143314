import numpy as np
import pytest

from bifront import FrontProblem, fisher_burgers, integrate_backward, power_model
from bifront import kernel


def test_backend_selected():
    assert kernel.BACKEND in kernel.available_backends()
    assert "python" in kernel.available_backends()


@pytest.mark.skipif("cython" not in kernel.available_backends(), reason="compiled kernel not built")
@pytest.mark.parametrize("model,eps,c", [
    (fisher_burgers(1.0, 1.0), 2e-3, 0.08),
    (fisher_burgers(1.0, -0.5), 2e-3, 0.6),
    (power_model(1.0, 1.5), 1e-2, 0.13),
    (power_model(2.0, 2.0), 1e-1, 0.05),
])
def test_backends_agree(model, eps, c):
    p = FrontProblem(model, eps, c)
    a = integrate_backward(p, backend="cython")
    b = integrate_backward(p, backend="python")
    assert a.verdict is b.verdict
    assert a.v_grid.shape == b.v_grid.shape
    assert np.allclose(a.y_values, b.y_values, rtol=1e-12, atol=0.0)


def test_step_cap_densifies_output():
    p = FrontProblem(fisher_burgers(1.0, 0.05), 2e-3, 0.2)
    coarse = integrate_backward(p)
    fine = integrate_backward(p, h_max=1e-3)
    assert np.max(np.abs(np.diff(fine.v_grid))) <= 1e-3 * (1 + 1e-12)
    assert fine.v_grid.size > coarse.v_grid.size
    assert fine.y_at(0.5) == pytest.approx(coarse.y_at(0.5), rel=1e-6)
