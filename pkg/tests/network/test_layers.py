"""Tests for network layers, normalizers and the network set."""

import numpy as np
import pytest
import torch

from fracflow.autodiff import DTYPE
from fracflow.network import (
    EPS_STD,
    FIELD_ROLES,
    MLP,
    WEIGHT_ROLES,
    FourierMLP,
    MLPConfig,
    NetworkError,
    NonFiniteActivationError,
    Normalizer,
    adaptive_slopes,
    build_network,
    saturation_head,
)
from tests.fixtures import benchmark_problem, small_networks


def test_config_rejects_empty_network():
    """Width and depth must be positive."""
    with pytest.raises(NetworkError):
        MLPConfig(width=0)
    with pytest.raises(NetworkError):
        MLPConfig(depth=0)


def test_mlp_shape_and_dtype():
    """An MLP maps (n, 4) rows to (n, 1) float64 outputs."""
    net = build_network(MLPConfig(width=10, depth=3), seed=0)
    assert isinstance(net, MLP)
    out = net(torch.zeros(5, 4, dtype=DTYPE))
    assert out.shape == (5, 1)
    assert out.dtype == DTYPE


def test_adaptive_slopes():
    """Adaptive networks own one trainable slope per hidden layer."""
    assert len(adaptive_slopes(build_network(MLPConfig(width=6, depth=3), 0))) == 3
    assert adaptive_slopes(build_network(MLPConfig(width=6, depth=3, adaptive=False), 0)) == []
    for s in adaptive_slopes(build_network(MLPConfig(width=6, depth=2), 0)):
        assert s.item() == 1.0


def test_glorot_init_is_seeded():
    """The same seed builds identical weights and biases start at zero."""
    a = build_network(MLPConfig(width=6, depth=2), seed=5)
    b = build_network(MLPConfig(width=6, depth=2), seed=5)
    c = build_network(MLPConfig(width=6, depth=2), seed=6)
    assert torch.equal(a.hidden[0].weight, b.hidden[0].weight)
    assert not torch.equal(a.hidden[0].weight, c.hidden[0].weight)
    assert torch.count_nonzero(a.hidden[0].bias) == 0


def test_fourier_mlp_real_output():
    """The Fourier path returns real values and stays differentiable."""
    net = build_network(MLPConfig(width=10, depth=2, fourier_path=True), seed=0)
    assert isinstance(net, FourierMLP)
    x = torch.randn(7, 4, dtype=DTYPE, requires_grad=True)
    out = net(x)
    assert out.shape == (7, 1)
    assert not torch.is_complex(out)
    out.sum().backward()
    assert torch.isfinite(x.grad).all()


def test_nonfinite_activation_is_reported():
    """A NaN input surfaces as a non-finite activation error."""
    net = build_network(MLPConfig(width=4, depth=1), seed=0)
    with pytest.raises(NonFiniteActivationError):
        net(torch.full((1, 4), float("nan"), dtype=DTYPE))


def test_normalizer_fit():
    """fit should use the population standard deviation per column."""
    data = np.array([[1.0, 5.0], [3.0, 5.0]])
    n = Normalizer.fit(data)
    np.testing.assert_allclose(n.mean, [2.0, 5.0])
    np.testing.assert_allclose(n.std, [1.0, EPS_STD])


def test_normalizer_inverse():
    """denormalize undoes normalize for arrays and tensors."""
    n = Normalizer(mean=[1.0, -2.0], std=[0.5, 4.0])
    x = np.array([[3.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(n.denormalize(n.normalize(x)), x)
    t = torch.as_tensor(x, dtype=DTYPE)
    assert torch.allclose(n.denormalize(n.normalize(t)), t)
    assert Normalizer.from_dict(n.to_dict()).to_dict() == n.to_dict()


def test_normalizer_from_range():
    """from_range uses the uniform distribution's mean and deviation."""
    n = Normalizer.from_range([0.0], [12.0])
    assert n.mean[0] == 6.0
    assert n.std[0] == pytest.approx(12.0 / np.sqrt(12.0))


def test_saturation_head_window_and_slope():
    """The head stays inside the window with unit slope at the midpoint."""
    raw = torch.tensor([-100.0, 0.4, 100.0], dtype=DTYPE, requires_grad=True)
    s = saturation_head(raw, 0.1, 0.7)
    assert (s >= 0.1).all() and (s <= 0.7).all()
    s[1].backward()
    assert raw.grad[1].item() == pytest.approx(1.0)
    assert saturation_head(0.4, 0.1, 0.7) == pytest.approx(0.4)


def test_network_set_roles_and_windows():
    """The set holds every role and keeps saturations inside the window."""
    problem = benchmark_problem()
    nets = small_networks(problem)
    assert set(nets.fields) == set(FIELD_ROLES)
    assert set(nets.weights) == set(WEIGHT_ROLES)

    X = torch.as_tensor(np.array([[0.0, 0.01, 0.0, 10.0], [0.005, 0.05, 0.0, 1e5]]), dtype=DTYPE)
    sw, p = nets.matrix(X)
    assert sw.shape == (2,) and p.shape == (2,)
    assert (sw > problem.matrix.corey.s_wc).all()
    assert (sw < problem.matrix.corey.s_max).all()
    assert nets.omega("omega_m", X).shape == (2,)


def test_network_set_seeds_differ_per_role():
    """Each role gets its own seed so networks are not clones."""
    nets = small_networks(benchmark_problem(), seed=0)
    a = nets.fields["matrix_p"].net.hidden[0].weight
    b = nets.fields["fracture_p"].net.hidden[0].weight
    assert not torch.equal(a, b)


def test_field_and_weight_parameters_are_disjoint():
    """Field and weight parameter groups do not overlap."""
    nets = small_networks(benchmark_problem())
    field_ids = {id(p) for p in nets.field_parameters()}
    weight_ids = {id(p) for p in nets.weight_parameters()}
    assert field_ids and weight_ids
    assert not field_ids & weight_ids
