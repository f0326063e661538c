import numpy as np
import pytest

from foleygen.errors import ContractError, StateError
from foleygen.nn import (
    Conv1D,
    Conv2D,
    Embedding,
    GELU,
    LayerNorm,
    Linear,
    ReLU,
    Sequential,
    SinusoidalTimeEmbedding,
    Upsample2D,
)
from foleygen.rng import RngStream

from gradcheck import check_module_grads, finite_diff, rel_err

F64 = np.float64


def rng(name="t"):
    return RngStream(1234, name)


def test_linear_identity():
    lin = Linear(3, 3, rng(), dtype=F64)
    lin.w.value[...] = np.eye(3)
    lin.b.value[...] = 0.0
    x = np.array([[0.5, -1.0, 2.0]])
    assert np.allclose(lin(x), x)


def test_linear_scalar_affine():
    lin = Linear(1, 1, rng(), dtype=F64)
    lin.w.value[...] = [[2.0]]
    lin.b.value[...] = [1.0]
    assert np.allclose(lin(np.array([[3.0]])), [[7.0]])


def test_mlp_matches_scalar_recomputation():
    # two matmuls + GELU re-evaluated with plain Python loops
    r = rng("mlp")
    l1, act, l2 = Linear(4, 3, r.child("a"), F64), GELU(), Linear(3, 2, r.child("b"), F64)
    mlp = Sequential(l1, act, l2)
    x = r.child("x").normal((1, 4), F64)
    got = mlp(x)[0]

    from math import erf, sqrt
    h = [sum(x[0][i] * l1.w.value[i, j] for i in range(4)) + l1.b.value[j]
         for j in range(3)]
    a = [0.5 * v * (1.0 + erf(v / sqrt(2.0))) for v in h]
    want = [sum(a[i] * l2.w.value[i, j] for i in range(3)) + l2.b.value[j]
            for j in range(2)]
    assert np.allclose(got, want, rtol=1e-12)


def test_weight_grad_1x1():
    lin = Linear(1, 1, rng(), dtype=F64, bias=False)
    lin(np.array([[3.0]]))
    lin.backward(np.array([[1.0]]))
    assert lin.w.grad[0, 0] == pytest.approx(3.0)


def test_zero_upstream_gives_zero_grads():
    conv = Conv2D(2, 3, rng=rng("z"), dtype=F64)
    x = rng("zx").normal((2, 2, 5, 5), F64)
    conv(x)
    conv.backward(np.zeros((2, 3, 5, 5)))
    for p in conv.parameters():
        assert np.all(p.grad == 0.0)


def test_backward_before_forward_raises():
    with pytest.raises(StateError):
        Linear(2, 2, rng()).backward(np.zeros((1, 2)))


def test_shape_mismatch_raises():
    with pytest.raises(ContractError):
        Linear(3, 2, rng())(np.zeros((1, 4)))
    with pytest.raises(ContractError):
        Conv2D(2, 2, rng=rng())(np.zeros((1, 3, 4, 4)))


@pytest.mark.parametrize("seed", range(5))
def test_gradcheck_linear(seed):
    r = RngStream(seed, "gc-lin")
    m = Linear(4, 3, r.child("init"), F64)
    check_module_grads(m, r.child("x").normal((3, 4), F64), r.child("r"))


@pytest.mark.parametrize("stride", [1, 2])
def test_gradcheck_conv2d(stride):
    r = RngStream(stride, "gc-c2")
    m = Conv2D(2, 3, k=3, stride=stride, pad=1, rng=r.child("init"), dtype=F64)
    check_module_grads(m, r.child("x").normal((2, 2, 5, 6), F64), r.child("r"))


@pytest.mark.parametrize("stride", [1, 2])
def test_gradcheck_conv1d(stride):
    r = RngStream(stride, "gc-c1")
    m = Conv1D(2, 4, k=3, stride=stride, pad=1, rng=r.child("init"), dtype=F64)
    check_module_grads(m, r.child("x").normal((2, 2, 7), F64), r.child("r"))


@pytest.mark.parametrize("cls", [GELU, ReLU])
def test_gradcheck_activations(cls):
    r = RngStream(7, f"gc-{cls.__name__}")
    # keep ReLU inputs away from the kink
    x = r.child("x").normal((4, 5), F64)
    x[np.abs(x) < 1e-2] += 0.1
    check_module_grads(cls(), x, r.child("r"))


def test_gradcheck_layernorm():
    r = RngStream(11, "gc-ln")
    m = LayerNorm(6, dtype=F64)
    m.g.value[...] = r.child("g").normal(6, F64) + 1.0
    check_module_grads(m, r.child("x").normal((3, 6), F64), r.child("r"))


def test_gradcheck_upsample():
    r = RngStream(13, "gc-up")
    check_module_grads(Upsample2D(2), r.child("x").normal((1, 2, 3, 4), F64),
                       r.child("r"))


def test_gradcheck_embedding():
    r = RngStream(17, "gc-emb")
    m = Embedding(10, 4, r.child("init"), F64)
    ids = np.array([[1, 3, 3], [0, 9, 2]])
    check_module_grads(m, ids, r.child("r"), check_input=False)


def test_gradcheck_mlp_chain():
    r = RngStream(19, "gc-chain")
    m = Sequential(Linear(5, 8, r.child("a"), F64), GELU(),
                   LayerNorm(8, dtype=F64), Linear(8, 2, r.child("b"), F64))
    check_module_grads(m, r.child("x").normal((4, 5), F64), r.child("r"))


def test_time_embedding_shapes_and_values():
    emb = SinusoidalTimeEmbedding(8)
    out = emb(np.array([0, 1, 5]), dtype=F64)
    assert out.shape == (3, 8)
    # t=0: sin part 0, cos part 1
    assert np.allclose(out[0, :4], 0.0)
    assert np.allclose(out[0, 4:], 1.0)
    assert out[1, 0] == pytest.approx(np.sin(1.0))


def test_training_determinism_ten_steps():
    # same seed => bit-identical parameters after 10 Adam steps
    from foleygen.nn import Adam

    def run():
        r = RngStream(99, "det")
        m = Sequential(Linear(6, 6, r.child("a")), GELU(), Linear(6, 1, r.child("b")))
        opt = Adam(m.parameters(), lr=1e-3)
        x = r.child("x").normal((8, 6))
        for _ in range(10):
            m.zero_grad()
            y = m(x)
            m.backward(np.ones_like(y))
            opt.step()
        return np.concatenate([p.value.ravel() for p in m.parameters()])

    a, b = run(), run()
    assert a.tobytes() == b.tobytes()
