"""Compiled pixel loops shared by the public stencil, structure and morphology modules.

Every kernel groups its floating-point sums so that mirrored neighbours are
added first (``a + b`` is exact-commutative), which makes the results
bit-identical under flips and 90 degree rotations of the grid.

Arrays are indexed ``[j, i]`` with ``i`` the x (column) index and ``j`` the
y (row) index.  Out-of-range neighbours of the 3x3 stencils are resolved by
mirroring with duplication of the boundary cell, i.e. by clamping.
"""

import math

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)


@_jit
def reflect_index(i, n):
    period = 2 * n
    i = i % period
    if i >= n:
        i = period - 1 - i
    return i


@_jit
def _padded_index(n, r, zero):
    idx = np.empty(n + 2 * r, dtype=np.int64)
    for k in range(n + 2 * r):
        pos = k - r
        if zero and (pos < 0 or pos >= n):
            idx[k] = -1
        else:
            idx[k] = reflect_index(pos, n)
    return idx


@_jit
def correlate_x(u, weights, zero):
    """Symmetric 1-D correlation along rows; ``weights[k]`` is the tap at offset +-k."""
    ny, nx = u.shape
    r = weights.shape[0] - 1
    idx = _padded_index(nx, r, zero)
    out = np.empty_like(u)
    line = np.empty(nx + 2 * r)
    w0 = weights[0]
    for j in range(ny):
        for k in range(nx + 2 * r):
            line[k] = 0.0 if idx[k] < 0 else u[j, idx[k]]
        row = out[j]
        for i in range(nx):
            row[i] = w0 * line[i + r]
        for k in range(1, r + 1):
            wk = weights[k]
            left = line[r - k : r - k + nx]
            right = line[r + k : r + k + nx]
            for i in range(nx):
                row[i] += wk * (left[i] + right[i])
    return out


@_jit
def correlate_y(u, weights, zero):
    """Column counterpart of :func:`correlate_x` with the same per-pixel summation order."""
    ny, nx = u.shape
    r = weights.shape[0] - 1
    idx = _padded_index(ny, r, zero)
    out = np.empty_like(u)
    w0 = weights[0]
    for j in range(ny):
        row = out[j]
        centre = u[idx[j + r]]
        for i in range(nx):
            row[i] = w0 * centre[i]
        for k in range(1, r + 1):
            wk = weights[k]
            jm = idx[j + r - k]
            jp = idx[j + r + k]
            # a zero-padded partner contributes exactly nothing to its pair sum
            if jm >= 0 and jp >= 0:
                a = u[jm]
                b = u[jp]
                for i in range(nx):
                    row[i] += wk * (a[i] + b[i])
            elif jm >= 0 or jp >= 0:
                a = u[max(jm, jp)]
                for i in range(nx):
                    row[i] += wk * a[i]
    return out


@_jit
def sobel(u, h):
    ny, nx = u.shape
    gx = np.empty_like(u)
    gy = np.empty_like(u)
    scale = 1.0 / (8.0 * h)
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            # outer rows/columns are paired before the doubled centre term
            dx_p = u[jp, ip] - u[jp, im]
            dx_0 = u[j, ip] - u[j, im]
            dx_m = u[jm, ip] - u[jm, im]
            gx[j, i] = ((dx_p + dx_m) + 2.0 * dx_0) * scale
            dy_p = u[jp, ip] - u[jm, ip]
            dy_0 = u[jp, i] - u[jm, i]
            dy_m = u[jp, im] - u[jm, im]
            gy[j, i] = ((dy_p + dy_m) + 2.0 * dy_0) * scale
    return gx, gy


@_jit
def second_derivatives(u, h):
    ny, nx = u.shape
    uxx = np.empty_like(u)
    uyy = np.empty_like(u)
    uxy = np.empty_like(u)
    h2 = h * h
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            c = u[j, i]
            uxx[j, i] = ((u[j, ip] + u[j, im]) - 2.0 * c) / h2
            uyy[j, i] = ((u[jp, i] + u[jm, i]) - 2.0 * c) / h2
            uxy[j, i] = ((u[jp, ip] + u[jm, im]) - (u[jp, im] + u[jm, ip])) / (4.0 * h2)
    return uxx, uyy, uxy


@_jit
def _laplacian_at(u, j, i, jm, jp, im, ip, wa, wd):
    c4 = 4.0 * u[j, i]
    axial = (u[j, ip] + u[j, im]) + (u[jp, i] + u[jm, i])
    diag = (u[jp, ip] + u[jm, im]) + (u[jp, im] + u[jm, ip])
    return wa * (axial - c4) + wd * (diag - c4)


@_jit
def _dilation_at(u, j, i, jm, jp, im, ip, wa, wd):
    c = u[j, i]
    ax = max(u[j, ip] - c, u[j, im] - c, 0.0)
    ay = max(u[jp, i] - c, u[jm, i] - c, 0.0)
    d1 = max(u[jp, ip] - c, u[jm, im] - c, 0.0)
    d2 = max(u[jp, im] - c, u[jm, ip] - c, 0.0)
    return wa * math.sqrt(ax * ax + ay * ay) + wd * math.sqrt(d1 * d1 + d2 * d2)


@_jit
def _erosion_at(u, j, i, jm, jp, im, ip, wa, wd):
    c = u[j, i]
    ax = max(c - u[j, ip], c - u[j, im], 0.0)
    ay = max(c - u[jp, i], c - u[jm, i], 0.0)
    d1 = max(c - u[jp, ip], c - u[jm, im], 0.0)
    d2 = max(c - u[jp, im], c - u[jm, ip], 0.0)
    return wa * math.sqrt(ax * ax + ay * ay) + wd * math.sqrt(d1 * d1 + d2 * d2)


@_jit
def delta_laplacian(u, delta, h):
    ny, nx = u.shape
    out = np.empty_like(u)
    wa = (1.0 - delta) / (h * h)
    wd = delta / (2.0 * h * h)
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            out[j, i] = _laplacian_at(u, j, i, jm, jp, max(i - 1, 0), min(i + 1, nx - 1), wa, wd)
    return out


@_jit
def _upwind(u, delta, h, dilation):
    ny, nx = u.shape
    out = np.empty_like(u)
    wa = (1.0 - delta) / h
    wd = delta / (math.sqrt(2.0) * h)
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            if dilation:
                out[j, i] = _dilation_at(u, j, i, jm, jp, im, ip, wa, wd)
            else:
                out[j, i] = _erosion_at(u, j, i, jm, jp, im, ip, wa, wd)
    return out


@_jit
def upwind_dilation(u, delta, h):
    return _upwind(u, delta, h, True)


@_jit
def upwind_erosion(u, delta, h):
    return _upwind(u, delta, h, False)


@_jit
def transport(u, f, delta, h):
    """``f * M`` with M the dilation magnitude where ``f < 0`` and the erosion magnitude elsewhere."""
    ny, nx = u.shape
    out = np.empty_like(u)
    wa = (1.0 - delta) / h
    wd = delta / (math.sqrt(2.0) * h)
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            fv = f[j, i]
            if fv < 0.0:
                out[j, i] = fv * _dilation_at(u, j, i, jm, jp, im, ip, wa, wd)
            else:
                out[j, i] = fv * _erosion_at(u, j, i, jm, jp, im, ip, wa, wd)
    return out


@_jit
def rds_update(u, known, g, s, with_shock, delta, h, tau, out):
    """Write ``u + tau (g Lap u - (1 - g) s M)`` into ``out``; known pixels copied.

    Returns the largest absolute change.
    """
    ny, nx = u.shape
    wa = (1.0 - delta) / (h * h)
    wd = delta / (2.0 * h * h)
    ma = (1.0 - delta) / h
    md = delta / (math.sqrt(2.0) * h)
    largest = 0.0
    for j in range(ny):
        jm = max(j - 1, 0)
        jp = min(j + 1, ny - 1)
        for i in range(nx):
            if known[j, i]:
                out[j, i] = u[j, i]
                continue
            im = max(i - 1, 0)
            ip = min(i + 1, nx - 1)
            gv = g[j, i]
            rate = gv * _laplacian_at(u, j, i, jm, jp, im, ip, wa, wd)
            if with_shock:
                sv = s[j, i]
                if sv < 0.0:
                    m = sv * _dilation_at(u, j, i, jm, jp, im, ip, ma, md)
                else:
                    m = sv * _erosion_at(u, j, i, jm, jp, im, ip, ma, md)
                rate = rate - (1.0 - gv) * m
            value = u[j, i] + tau * rate
            out[j, i] = value
            largest = max(largest, abs(value - u[j, i]))
    return largest


@_jit
def dominant_eigenvector(jxx, jxy, jyy, rtol):
    """Unit eigenvector (c, s) of the larger eigenvalue of [[jxx, jxy], [jxy, jyy]].

    The squared components are formed without cancellation: the large one as
    (D + |p|) / 2D and the small one as q^2 / (2D (D + |p|)), p = jxx - jyy,
    q = 2 jxy, D = sqrt(p^2 + q^2).
    """
    p = jxx - jyy
    q = 2.0 * jxy
    d = math.sqrt(p * p + q * q)
    if d <= rtol * (abs(jxx) + abs(jyy)) or d == 0.0:
        return 1.0, 0.0
    if p >= 0.0:
        c2 = (d + p) / (2.0 * d)
        s2 = (q * q) / (2.0 * d * (d + p))
    else:
        s2 = (d - p) / (2.0 * d)
        c2 = (q * q) / (2.0 * d * (d - p))
    c = math.sqrt(c2)
    s = math.sqrt(s2)
    if q < 0.0 and c > 0.0:
        s = -s
    return c, s


@_jit
def eigenvector_field(jxx, jxy, jyy, rtol):
    ny, nx = jxx.shape
    c = np.empty_like(jxx)
    s = np.empty_like(jxx)
    for j in range(ny):
        for i in range(nx):
            c[j, i], s[j, i] = dominant_eigenvector(jxx[j, i], jxy[j, i], jyy[j, i], rtol)
    return c, s


@_jit
def directional_combine(uxx, uyy, uxy, c, s):
    ny, nx = uxx.shape
    out = np.empty_like(uxx)
    for j in range(ny):
        for i in range(nx):
            cc = c[j, i] * c[j, i]
            ss = s[j, i] * s[j, i]
            cs = c[j, i] * s[j, i]
            out[j, i] = (cc * uxx[j, i] + ss * uyy[j, i]) + 2.0 * cs * uxy[j, i]
    return out


@_jit
def gaussian_xy(u, half, zero):
    return correlate_y(correlate_x(u, half, zero), half, zero)


@_jit
def gaussian_yx(u, half, zero):
    return correlate_x(correlate_y(u, half, zero), half, zero)


@_jit
def gaussian_2d(u, half, zero):
    """Average of the x-then-y and y-then-x separable passes."""
    xy = gaussian_xy(u, half, zero)
    yx = gaussian_yx(u, half, zero)
    ny, nx = u.shape
    for j in range(ny):
        for i in range(nx):
            xy[j, i] = 0.5 * (xy[j, i] + yx[j, i])
    return xy


@_jit
def sobel_square(v, h):
    gx, gy = sobel(v, h)
    ny, nx = v.shape
    for j in range(ny):
        for i in range(nx):
            gx[j, i] = gx[j, i] * gx[j, i] + gy[j, i] * gy[j, i]
    return gx


@_jit
def sobel_products(v, h):
    gx, gy = sobel(v, h)
    return gx * gx, gx * gy, gy * gy


@_jit
def gradient_direction_second(v, h, eps):
    """Second derivative of ``v`` along its normalised Sobel gradient; 0 where |grad v| < eps."""
    gx, gy = sobel(v, h)
    uxx, uyy, uxy = second_derivatives(v, h)
    ny, nx = v.shape
    out = np.empty_like(v)
    for j in range(ny):
        for i in range(nx):
            norm = math.sqrt(gx[j, i] * gx[j, i] + gy[j, i] * gy[j, i])
            if norm < eps:
                out[j, i] = 0.0
                continue
            c = gx[j, i] / norm
            s = gy[j, i] / norm
            out[j, i] = (c * c * uxx[j, i] + s * s * uyy[j, i]) + 2.0 * (c * s) * uxy[j, i]
    return out


@_jit
def charbonnier(sq, lam):
    out = np.empty_like(sq)
    lam2 = lam * lam
    ny, nx = sq.shape
    for j in range(ny):
        for i in range(nx):
            out[j, i] = 1.0 / math.sqrt(1.0 + sq[j, i] / lam2)
    return out
