import numpy as np
import pytest

from frec.core import InvalidArgumentError, uniform_grid
from frec.simulate import (
    BURN_IN,
    ModelKind,
    ModelSpec,
    NoiseSpec,
    Seed,
    apply_kernel_operator,
    calibrated_kernel,
    far_kernel,
    gen_model,
    gen_noise,
    hs_norm,
    model2_basis,
    model2_coefficient,
)

G = uniform_grid(50)


def test_brownian_bridge_is_pinned():
    w = gen_noise(NoiseSpec("bb"), G, Seed(1), size=100)
    assert np.all(w[:, 0] == 0.0) and np.all(w[:, -1] == 0.0)
    var = w.var(axis=0)
    s = G.points
    assert np.allclose(var[1:-1], (s * (1 - s))[1:-1], rtol=0.5)


def test_brownian_motion_variance():
    w = gen_noise(NoiseSpec("bm"), G, Seed(2), size=20000)
    np.testing.assert_allclose(w.var(axis=0), G.points, atol=0.03)
    assert np.all(w[:, 0] == 0.0)


def test_gaussian_process_covariance():
    spec = NoiseSpec("gp", gp_scale=0.2, gp_range=0.3)
    w = gen_noise(spec, G, Seed(3), size=20000)
    cov = np.cov(w, rowvar=False)
    s = G.points
    want = 0.2 * np.exp(-0.3 * np.abs(s[:, None] - s[None, :]))
    np.testing.assert_allclose(cov, want, atol=0.012)


def test_noise_on_grid_without_endpoint():
    from frec.core import Grid

    g = Grid([0.1, 0.5, 0.9])
    w = gen_noise(NoiseSpec("bb"), g, Seed(0), size=5)
    assert w.shape == (5, 3) and np.all(w != 0)


def test_seeds_are_reproducible_and_independent():
    a = gen_noise(NoiseSpec(), G, Seed(5, 1), size=3)
    np.testing.assert_array_equal(a, gen_noise(NoiseSpec(), G, Seed(5, 1), size=3))
    assert not np.array_equal(a, gen_noise(NoiseSpec(), G, Seed(5, 2), size=3))
    assert not np.array_equal(a, gen_noise(NoiseSpec(), G, Seed(6, 1), size=3))


@pytest.mark.parametrize("norm", [0.3, 0.5, 0.7, 0.975, 1.0])
@pytest.mark.parametrize("which", ["far", "break"])
def test_kernel_calibration(norm, which):
    assert abs(hs_norm(calibrated_kernel(G, norm, which), G) - norm) < 1e-10


def test_hs_norm_of_constant_kernel():
    assert hs_norm(lambda u, s: 3.0 + 0 * u, G) == pytest.approx(3.0)


def test_kernel_operator_on_constant():
    y = apply_kernel_operator(far_kernel, np.ones(G.m), G)
    s = G.points
    want = np.exp(s**2 / 2) * np.mean(np.exp(G.points**2 / 2))
    np.testing.assert_allclose(y, want, rtol=1e-12)


def test_model2_unit_root():
    eig = np.sort(np.abs(np.linalg.eigvals(model2_coefficient())))
    assert eig[-1] == pytest.approx(1.0, abs=1e-14)
    assert eig[0] < 1
    b = model2_basis(G)
    np.testing.assert_allclose(b * G.weights @ b.T, np.eye(2), atol=1e-12)


def test_model2_requires_bm():
    with pytest.raises(InvalidArgumentError):
        gen_model(ModelSpec("m2", 10), NoiseSpec("gp"), G, Seed(0))


def test_random_walk_is_cumulative_noise():
    eps = np.random.default_rng(0).standard_normal((30, G.m))
    s = gen_model(ModelSpec("m1", 30), NoiseSpec(), G, Seed(0), innovations=eps)
    np.testing.assert_allclose(s.values, np.cumsum(eps, axis=0))


def test_far_recursion_by_hand():
    n = 5
    eps = np.random.default_rng(1).standard_normal((BURN_IN + n, G.m))
    s = gen_model(ModelSpec("m4", n, psi1_norm=0.5), NoiseSpec(), G, Seed(0), innovations=eps)
    k = calibrated_kernel(G, 0.5)
    x = np.zeros(G.m)
    path = []
    for e in eps:
        x = apply_kernel_operator(k, x, G) + e
        path.append(x)
    np.testing.assert_allclose(s.values, np.array(path)[BURN_IN:], atol=1e-12)


def test_mean_break():
    n = 10
    eps = np.zeros((BURN_IN + n, G.m))
    s = gen_model(ModelSpec("m5", n, break_at=4), NoiseSpec(), G, Seed(0), innovations=eps)
    assert np.all(s.values[:4] == 0.0) and np.all(s.values[4:] == 2.0)


def test_operator_break_continues_the_path():
    n = 6
    eps = np.random.default_rng(2).standard_normal((BURN_IN + n, G.m))
    s = gen_model(ModelSpec("m6", n, break_at=3), NoiseSpec(), G, Seed(0), innovations=eps)
    k2 = calibrated_kernel(G, 0.5, "far")
    want = apply_kernel_operator(k2, s.values[2], G) + eps[BURN_IN + 3]
    np.testing.assert_allclose(s.values[3], want, atol=1e-12)
    k1 = calibrated_kernel(G, 0.7, "break")
    want = apply_kernel_operator(k1, s.values[1], G) + eps[BURN_IN + 2]
    np.testing.assert_allclose(s.values[2], want, atol=1e-12)


@pytest.mark.parametrize("model", [m.value for m in ModelKind])
def test_every_model_is_deterministic(model):
    a = gen_model(ModelSpec(model, 40), NoiseSpec(), G, Seed(9, 3))
    b = gen_model(ModelSpec(model, 40), NoiseSpec(), G, Seed(9, 3))
    assert a == b and a.n == 40 and np.all(np.isfinite(a.values))


def test_spec_validation():
    with pytest.raises(InvalidArgumentError):
        ModelSpec("m1", 0)
    with pytest.raises(InvalidArgumentError):
        ModelSpec("m5", 10, break_at=11)
    with pytest.raises(InvalidArgumentError):
        NoiseSpec("gp", gp_scale=-1.0)
    with pytest.raises(InvalidArgumentError):
        gen_model(ModelSpec("m1", 5), NoiseSpec(), G, Seed(0), innovations=np.zeros((4, G.m)))
    with pytest.raises(ValueError):
        ModelSpec("m7", 10)
