import math

import numpy as np
import pytest
from oracles import diffusion_step, laplace_inpaint

from rdsinpaint.guidance import charbonnier_weight, guidance
from rdsinpaint.morphology import upwind_dilation_magnitude, upwind_erosion_magnitude
from rdsinpaint.params import couple_parameters, homogeneous_diffusion_params
from rdsinpaint.rds_solver import blending_weight, initial_state, inpaint, inpaint_vector, rds_step, shock_guidance
from rdsinpaint.stencils import delta_laplacian, gaussian_convolve, second_derivatives, sobel
from rdsinpaint.structure import joint_structure_tensor


def random_problem(rng, n=24, density=0.3, channels=None):
    shape = (n, n) if channels is None else (channels, n, n)
    f = rng.random(shape) * 255
    mask = rng.random((n, n)) < density
    mask[0, 0] = True
    return f, mask


def test_constant_fixed_point(rng):
    f = np.full((12, 12), 80.0)
    mask = rng.random((12, 12)) < 0.2
    mask[3, 3] = True
    out, report = inpaint(f, mask, couple_parameters(1.0, 2.0, max_iterations=20))
    np.testing.assert_array_equal(out, f)
    assert report.iterations_run == 1


def test_all_known_is_noop(rng):
    f = rng.random((10, 10)) * 255
    out, report = inpaint(f, np.ones((10, 10), bool), couple_parameters(2.0, 1.0))
    np.testing.assert_array_equal(out, f)
    assert report.iterations_run == 0
    np.testing.assert_array_equal(rds_step(f, np.ones((10, 10), bool), couple_parameters(2.0, 1.0))[0], f)


def test_no_known_pixels():
    with pytest.raises(ValueError, match="no known"):
        inpaint(np.zeros((8, 8)), np.zeros((8, 8), bool), couple_parameters(1.0, 1.0))


def test_mask_shape_checked():
    with pytest.raises(ValueError):
        inpaint(np.zeros((8, 8)), np.ones((8, 9), bool), couple_parameters(1.0, 1.0))


def test_initial_state_mean(rng):
    f, mask = random_problem(rng, channels=2)
    u = initial_state(f, mask, "mean")
    for c in range(2):
        np.testing.assert_array_equal(u[c][mask], f[c][mask])
        assert np.allclose(u[c][~mask], f[c][mask].mean(), rtol=1e-15)
    z = initial_state(f, mask, "zero")
    np.testing.assert_array_equal(z[:, ~mask], 0)


def test_diffusion_limit_step_bit_exact(rng):
    p = homogeneous_diffusion_params()
    for _ in range(5):
        f, mask = random_problem(rng)
        u = initial_state(f[np.newaxis], mask)[0]
        for _ in range(3):
            expected = diffusion_step(u, mask, p.tau)
            u_next = rds_step(u, mask, p)[0]
            np.testing.assert_array_equal(u_next, expected)
            u = u_next


def test_diffusion_limit_matches_laplace_solution(rng):
    f, mask = random_problem(rng, n=20, density=0.15)
    out, report = inpaint(f, mask, homogeneous_diffusion_params(stop_tolerance=1e-11))
    assert report.final_max_update < 1e-11
    np.testing.assert_allclose(out, laplace_inpaint(f, mask), rtol=0, atol=1e-6)


def test_step_matches_assembled_terms(rng):
    """One RDS step against a plain-numpy assembly of weight, guidance and transport."""
    f, mask = random_problem(rng, n=20, channels=3)
    p = couple_parameters(1.2, 6.0)
    u = initial_state(f, mask) + rng.normal(size=f.shape) * np.where(mask, 0, 20)
    sq = np.mean([sum(d * d for d in sobel(gaussian_convolve(c, p.nu))) for c in u], axis=0)
    g = charbonnier_weight(sq, p.lam)
    np.testing.assert_allclose(blending_weight(u, p), g, rtol=1e-13)
    field = joint_structure_tensor(u, p.sigma, p.rho)
    expected = np.empty_like(u)
    for c, uc in enumerate(u):
        uxx, uyy, uxy = second_derivatives(gaussian_convolve(uc, p.sigma))
        dww = field.c**2 * uxx + 2 * field.c * field.s * uxy + field.s**2 * uyy
        s = guidance(dww, p.epsilon)
        np.testing.assert_allclose(shock_guidance(u, p)[c], s, rtol=1e-9, atol=1e-12)
        m = np.where(s < 0, upwind_dilation_magnitude(uc), upwind_erosion_magnitude(uc))
        rate = g * delta_laplacian(uc) - (1 - g) * s * m
        expected[c] = np.where(mask, uc, uc + p.tau * rate)
    np.testing.assert_allclose(rds_step(u, mask, p), expected, rtol=0, atol=1e-9)


def test_known_pixels_frozen_every_iterate(rng):
    f, mask = random_problem(rng, channels=2)

    def check(k, u):
        np.testing.assert_array_equal(u[:, mask], f[:, mask])

    inpaint_vector(f, mask, couple_parameters(1.5, 3.0, max_iterations=40), callback=check)


def test_stop_rule(rng):
    f, mask = random_problem(rng, n=16, density=0.4)
    out, report = inpaint(f, mask, couple_parameters(1.0, 2.0, stop_tolerance=1e-2))
    assert report.final_max_update < 1e-2
    assert 0 < report.iterations_run < 100_000
    _, capped = inpaint(f, mask, couple_parameters(1.0, 2.0, max_iterations=7, stop_tolerance=0))
    assert capped.iterations_run == 7


def test_identical_channels_match_scalar(rng):
    f, mask = random_problem(rng, n=20)
    p = couple_parameters(1.5, 2.0, max_iterations=50, stop_tolerance=0)
    scalar, _ = inpaint(f, mask, p)
    vector, _ = inpaint(np.stack([f, f, f]), mask, p)
    for c in range(3):
        np.testing.assert_array_equal(vector[c], scalar)


def test_channel_permutation(rng):
    f, mask = random_problem(rng, n=20, channels=3)
    p = couple_parameters(1.5, 2.0, max_iterations=50, stop_tolerance=0)
    out, _ = inpaint(f, mask, p)
    perm = [2, 0, 1]
    out_p, _ = inpaint(f[perm], mask, p)
    np.testing.assert_allclose(out_p, out[perm], rtol=0, atol=1e-9)


def test_layout_preserved(rng):
    f, mask = random_problem(rng, n=12)
    p = couple_parameters(1.0, 1.0, max_iterations=3)
    assert inpaint(f, mask, p)[0].shape == (12, 12)
    assert inpaint(f[np.newaxis], mask, p)[0].shape == (1, 12, 12)


def test_lag_one_is_default_and_lag_runs(rng):
    f, mask = random_problem(rng, n=16)
    base = dict(max_iterations=12, stop_tolerance=0)
    a, _ = inpaint(f, mask, couple_parameters(1.0, 2.0, **base))
    b, _ = inpaint(f, mask, couple_parameters(1.0, 2.0, lag=1, **base))
    np.testing.assert_array_equal(a, b)
    c, report = inpaint(f, mask, couple_parameters(1.0, 2.0, lag=4, **base))
    assert report.within_bounds() and not np.array_equal(a, c)


@pytest.mark.parametrize("kw", [dict(guidance="sign", epsilon=0.0), dict(shock="alvarez_mazorra"),
                                dict(init="zero"), dict(delta=0.0), dict(delta=1.0)])
def test_variants_respect_bounds(rng, kw):
    f, mask = random_problem(rng, n=20)
    _, report = inpaint(f, mask, couple_parameters(1.5, 2.0, max_iterations=80, **kw))
    assert report.within_bounds()
    assert report.input_max <= f[mask].max()


def test_deterministic(rng):
    f, mask = random_problem(rng, channels=3)
    p = couple_parameters(2.0, 3.0, max_iterations=30)
    np.testing.assert_array_equal(inpaint(f, mask, p)[0], inpaint(f, mask, p)[0])


def test_weight_is_one_without_shock(rng):
    f, _ = random_problem(rng, channels=2)
    np.testing.assert_array_equal(blending_weight(f, homogeneous_diffusion_params()), 1.0)
    assert math.isinf(homogeneous_diffusion_params().lam)
