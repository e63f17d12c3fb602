import math

import numpy as np
import pytest
from conftest import DIHEDRAL, apply, grid

from rdsinpaint.structure import (
    StructureField,
    directional_second_derivative,
    directional_second_derivative_presmoothed,
    dominant_eigenvalue,
    dominant_eigenvector,
    joint_structure_tensor,
    structure_tensor,
)

R2 = 1 / math.sqrt(2)


class TestDominantEigenvector:
    @pytest.mark.parametrize("j,expected", [
        ((4.0, 0.0, 1.0), (1.0, 0.0)),
        ((1.0, 0.0, 4.0), (0.0, 1.0)),
        ((2.0, 1.0, 2.0), (R2, R2)),
        ((2.0, -1.0, 2.0), (R2, -R2)),
        ((0.0, 0.0, 0.0), (1.0, 0.0)),
        ((3.0, 0.0, 3.0), (1.0, 0.0)),
    ])
    def test_examples(self, j, expected):
        c, s = dominant_eigenvector(*j)
        assert c == pytest.approx(expected[0], abs=1e-15)
        assert s == pytest.approx(expected[1], abs=1e-15)

    def test_random_matrices_oracle(self, rng):
        n = 10_000
        scale = 10.0 ** rng.uniform(-6, 6, n)
        jxx, jyy = rng.normal(size=(2, n)) * scale
        jxy = rng.normal(size=n) * scale
        # a share of nearly isotropic and nearly diagonal tensors
        jyy[:500] = jxx[:500] * (1 + 1e-12 * rng.normal(size=500))
        jxy[500:1000] *= 1e-13
        mu = dominant_eigenvalue(jxx, jxy, jyy)
        for k in range(n):
            c, s = dominant_eigenvector(jxx[k], jxy[k], jyy[k])
            J = np.array([[jxx[k], jxy[k]], [jxy[k], jyy[k]]])
            w = np.array([c, s])
            assert abs(math.hypot(c, s) - 1) < 1e-12
            assert np.linalg.norm(J @ w - mu[k] * w) <= 1e-9 * (np.linalg.norm(J, 2) + 1)
            assert c > 0 or (c == 0 and s > 0)

    def test_agrees_with_lapack(self, rng):
        for _ in range(200):
            a = rng.normal(size=(2, 2))
            J = a @ a.T
            vals, vecs = np.linalg.eigh(J)
            w = vecs[:, 1] * np.sign(vecs[0, 1] or 1)
            np.testing.assert_allclose(dominant_eigenvector(J[0, 0], J[0, 1], J[1, 1]), w, atol=1e-10)


class TestStructureTensor:
    def test_x_ramp(self):
        x, _ = grid(24)
        for sigma, rho in ((0, 0), (1.0, 0), (1.0, 1.5)):
            f = structure_tensor(3 * x, sigma, rho)
            core = (slice(10, 14), slice(10, 14))
            np.testing.assert_allclose(f.jxy[core], 0, atol=1e-9)
            np.testing.assert_allclose(f.jyy[core], 0, atol=1e-9)
            assert np.all(f.jxx[core] > 0)
            np.testing.assert_allclose(f.c[core], 1.0)
            np.testing.assert_allclose(f.s[core], 0.0, atol=1e-9)

    def test_y_ramp(self):
        _, y = grid(16)
        f = structure_tensor(y, 0.8, 0)
        np.testing.assert_allclose(np.abs(f.s[4:12, 4:12]), 1.0)
        np.testing.assert_allclose(f.c[4:12, 4:12], 0.0, atol=1e-12)

    def test_constant(self):
        f = structure_tensor(np.full((8, 8), 5.0), 1.0, 2.0)
        np.testing.assert_array_equal(f.jxx, 0)
        np.testing.assert_array_equal(f.c, 1.0)
        np.testing.assert_array_equal(f.s, 0.0)

    def test_rho_zero_is_outer_product(self, rng):
        from rdsinpaint.stencils import gaussian_convolve, sobel

        img = rng.random((12, 12)) * 255
        gx, gy = sobel(gaussian_convolve(img, 1.2))
        f = structure_tensor(img, 1.2, 0)
        np.testing.assert_allclose(f.jxx, gx * gx, rtol=1e-14)
        np.testing.assert_allclose(f.jxy, gx * gy, rtol=1e-14)
        np.testing.assert_allclose(f.jyy, gy * gy, rtol=1e-14)

    def test_rotation_rotates_tensor(self, rng):
        img = rng.random((30, 30)) * 255
        f = structure_tensor(img, 1.0, 2.0)
        g = structure_tensor(np.rot90(img).copy(), 1.0, 2.0)
        # rot90 maps (x, y) to (y, -x) in array terms: J' = R J R^T with R = [[0, 1], [-1, 0]]
        rot = np.rot90
        core = (slice(8, 22), slice(8, 22))
        np.testing.assert_allclose(g.jxx[core], rot(f.jyy)[core], rtol=0, atol=1e-8)
        np.testing.assert_allclose(g.jyy[core], rot(f.jxx)[core], rtol=0, atol=1e-8)
        np.testing.assert_allclose(g.jxy[core], -rot(f.jxy)[core], rtol=0, atol=1e-8)

    @pytest.mark.parametrize("op", sorted(DIHEDRAL))
    def test_eigenvector_products_dihedral(self, rng, op):
        img = rng.random((20, 20)) * 255
        f = structure_tensor(img, 1.5, 2.4)
        g = structure_tensor(apply(op, img), 1.5, 2.4)
        swap = op in ("rot90", "rot270", "transpose", "antitranspose")
        cc, ss = (f.s * f.s, f.c * f.c) if swap else (f.c * f.c, f.s * f.s)
        np.testing.assert_array_equal(g.c * g.c, apply(op, cc))
        np.testing.assert_array_equal(g.s * g.s, apply(op, ss))
        np.testing.assert_array_equal(np.abs(g.c * g.s), apply(op, np.abs(f.c * f.s)))

    def test_negative_scale(self):
        with pytest.raises(ValueError):
            structure_tensor(np.zeros((5, 5)), -1, 0)


class TestJointStructureTensor:
    def test_identical_channels(self, rng):
        img = rng.random((14, 14)) * 255
        single = structure_tensor(img, 1.0, 1.6)
        for n in (1, 2, 3):
            joint = joint_structure_tensor(np.stack([img] * n), 1.0, 1.6)
            for name in ("jxx", "jxy", "jyy", "c", "s"):
                np.testing.assert_array_equal(getattr(joint, name), getattr(single, name))

    def test_crossed_ramps_isotropic(self):
        x, y = grid(12)
        f = joint_structure_tensor(np.stack([x, y]), 0, 0)
        core = (slice(1, -1), slice(1, -1))
        np.testing.assert_allclose(f.jxx[core], 0.5)
        np.testing.assert_allclose(f.jyy[core], 0.5)
        np.testing.assert_array_equal(f.jxy[core], 0)
        np.testing.assert_array_equal(f.c[core], 1.0)
        np.testing.assert_array_equal(f.s[core], 0.0)

    def test_is_channel_average(self, rng):
        imgs = rng.random((3, 12, 12)) * 255
        joint = joint_structure_tensor(imgs, 0.7, 1.1)
        parts = [structure_tensor(c, 0.7, 1.1) for c in imgs]
        for name in ("jxx", "jxy", "jyy"):
            np.testing.assert_allclose(getattr(joint, name), np.mean([getattr(p, name) for p in parts], axis=0),
                                       rtol=1e-12, atol=1e-9)


class TestDirectionalDerivative:
    def test_axis_direction(self):
        x, _ = grid(10)
        ones, zeros = np.ones((10, 10)), np.zeros((10, 10))
        out = directional_second_derivative_presmoothed(x * x, ones, zeros)
        np.testing.assert_array_equal(out[1:-1, 1:-1], 2.0)

    def test_diagonal_direction_on_xy(self):
        x, y = grid(10)
        c = np.full((10, 10), R2)
        out = directional_second_derivative_presmoothed(x * y, c, c)
        np.testing.assert_allclose(out[1:-1, 1:-1], 1.0, rtol=1e-14)

    def test_constant(self, rng):
        f = StructureField.from_tensor(*(rng.random((3, 8, 8))))
        np.testing.assert_array_equal(directional_second_derivative(np.full((8, 8), 2.0), f, 1.3), 0.0)

    def test_sign_flip_bit_identical(self, rng):
        img = rng.random((16, 16)) * 255
        f = structure_tensor(img, 1.0, 2.0)
        a = directional_second_derivative(img, f, 1.0)
        b = directional_second_derivative(img, f.flipped_sign(), 1.0)
        np.testing.assert_array_equal(a, b)
        assert np.any(a != 0)

    def test_shape_mismatch(self, rng):
        f = structure_tensor(rng.random((6, 6)), 0, 0)
        with pytest.raises(ValueError):
            directional_second_derivative(np.zeros((7, 6)), f, 1.0)
