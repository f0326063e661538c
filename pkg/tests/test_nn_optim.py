import numpy as np
import pytest

from foleygen.errors import ConfigError
from foleygen.nn import Adam, Linear
from foleygen.rng import RngStream


def make_param(value):
    lin = Linear(1, 1, RngStream(0, "p"), dtype=np.float64, bias=False)
    lin.w.value[...] = value
    return lin.w


def test_zero_grad_leaves_params_unchanged():
    p = make_param(0.7)
    Adam([p], lr=0.1).step()
    assert p.value[0, 0] == pytest.approx(0.7)


@pytest.mark.parametrize("g", [1e-6, 1.0, 1e4])
def test_first_step_magnitude_is_lr(g):
    # hand-computed bias-corrected step: m_hat = g, v_hat = g^2,
    # |update| = lr * |g| / (|g| + eps) ~= lr for any grad scale
    p = make_param(0.0)
    p.grad[...] = g
    Adam([p], lr=1e-2, eps=1e-8).step()
    exact = 1e-2 * g / (g + 1e-8)
    assert abs(p.value[0, 0]) == pytest.approx(exact, rel=1e-10)
    assert abs(p.value[0, 0]) == pytest.approx(1e-2, rel=2e-2)
    assert p.value[0, 0] < 0  # moves against the gradient


def test_warmup_ramp_is_linear():
    opt = Adam([make_param(0.0)], lr=2.0, warmup=10)
    for k in range(1, 11):
        assert opt.effective_lr(k) == pytest.approx(2.0 * k / 10)
    assert opt.effective_lr(11) == pytest.approx(2.0)


def test_nonpositive_lr_rejected():
    with pytest.raises(ConfigError):
        Adam([make_param(0.0)], lr=0.0)
    with pytest.raises(ConfigError):
        Adam([make_param(0.0)], lr=-1e-3)
