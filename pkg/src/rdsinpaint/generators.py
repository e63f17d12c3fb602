"""Synthetic inputs: random masks, dipoles and simple binary shapes.

Continuous coordinates put pixel ``[j, i]`` on the unit square
``[i, i+1) x [j, j+1)``, so its centre is ``(i + 0.5, j + 0.5)``.  Angles are
in degrees and measured from the x axis towards the y axis (down the rows).
All generators are pure functions of their arguments.
"""

from __future__ import annotations

import math

import numpy as np


def _check_size(width: int, height: int) -> None:
    if width < 3 or height < 3:
        raise ValueError(f"grid must be at least 3x3, got {width}x{height}")


def _centres(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    jj, ii = np.mgrid[0:height, 0:width]
    return ii + 0.5, jj + 0.5


def gen_random_mask(width: int, height: int, density: float, seed: int = 0) -> np.ndarray:
    """Boolean mask with exactly ``round(density * width * height)`` known pixels.

    The pixels are drawn without replacement from ``numpy.random.default_rng(seed)``.
    """
    _check_size(width, height)
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    total = width * height
    count = max(1, round(density * total))
    flat = np.zeros(total, dtype=bool)
    flat[np.random.default_rng(seed).choice(total, size=count, replace=False)] = True
    return flat.reshape(height, width)


def _normal(angle: float) -> tuple[float, float]:
    a = math.radians(angle)
    return -math.sin(a), math.cos(a)


def dipole_pixels(point, angle: float) -> tuple[tuple[int, int], tuple[int, int]]:
    """Pixels ``(j, i)`` on the positive and the negative side of a line.

    The line passes through ``point = (x, y)`` with direction ``angle``; its
    positive side is the one the normal ``(-sin, cos)`` points into.  The two
    pixels are axis neighbours across the line, chosen along the axis closest
    to the normal.
    """
    nx, ny = _normal(angle)
    step = (1 if nx > 0 else -1, 0) if abs(nx) >= abs(ny) else (0, 1 if ny > 0 else -1)
    x, y = point
    pos = (math.floor(y + 0.5 * step[1]), math.floor(x + 0.5 * step[0]))
    neg = (math.floor(y - 0.5 * step[1]), math.floor(x - 0.5 * step[0]))
    return pos, neg


def gen_dipole(width: int, height: int, point, angle: float, values=(0.0, 255.0)):
    """Single dipole: the ``high`` value on the positive side of the line, ``low`` opposite.

    Returns ``(image, mask)`` with the image of shape ``(1, height, width)``
    and exactly two known pixels.
    """
    _check_size(width, height)
    low, high = values
    pos, neg = dipole_pixels(point, angle)
    for j, i in (pos, neg):
        if not (0 <= i < width and 0 <= j < height):
            raise ValueError(f"dipole pixel (i={i}, j={j}) outside the {width}x{height} grid")
    img = np.zeros((1, height, width))
    mask = np.zeros((height, width), dtype=bool)
    img[0][pos] = high
    img[0][neg] = low
    mask[pos] = mask[neg] = True
    return img, mask


def half_plane(width: int, height: int, point, angle: float, values=(0.0, 255.0)) -> np.ndarray:
    """Analytic half-plane matching :func:`gen_dipole`, evaluated at pixel centres."""
    _check_size(width, height)
    low, high = values
    x, y = _centres(width, height)
    nx, ny = _normal(angle)
    side = nx * (x - point[0]) + ny * (y - point[1])
    return np.where(side > 0, high, low)


def gen_disk_dipoles(size: int, radius: float, values=(0.0, 255.0)):
    """Four dipoles on the axis points of a centred circle, ``high`` inside.

    Returns ``(image, mask)`` with 8 known pixels.
    """
    _check_size(size, size)
    c = size / 2
    img = np.zeros((1, size, size))
    mask = np.zeros((size, size), dtype=bool)
    # tangent directions chosen so that the normal points to the centre
    for (px, py), angle in (((c + radius, c), 90.0), ((c, c + radius), 180.0),
                            ((c - radius, c), 270.0), ((c, c - radius), 0.0)):
        part, known = gen_dipole(size, size, (px, py), angle, values)
        img[:, known] = part[:, known]
        mask |= known
    return img, mask


def disk(size: int, radius: float, values=(0.0, 255.0)) -> np.ndarray:
    """Centred disk, ``high`` inside, evaluated at pixel centres."""
    _check_size(size, size)
    low, high = values
    x, y = _centres(size, size)
    c = size / 2
    return np.where((x - c) ** 2 + (y - c) ** 2 < radius * radius, high, low)


def line_segment(width: int, height: int, point, angle: float, length: float, thickness: float,
                 values=(0.0, 255.0)) -> np.ndarray:
    """Bar of the given ``length`` and ``thickness`` centred on ``point``."""
    _check_size(width, height)
    low, high = values
    x, y = _centres(width, height)
    a = math.radians(angle)
    along = (x - point[0]) * math.cos(a) + (y - point[1]) * math.sin(a)
    across = -(x - point[0]) * math.sin(a) + (y - point[1]) * math.cos(a)
    return np.where((np.abs(along) <= length / 2) & (np.abs(across) <= thickness / 2), high, low)


def cross(size: int, bar: float, values=(0.0, 255.0)) -> np.ndarray:
    """Centred axis-aligned cross with bars of width ``bar``."""
    _check_size(size, size)
    low, high = values
    x, y = _centres(size, size)
    c = size / 2
    return np.where((np.abs(x - c) <= bar / 2) | (np.abs(y - c) <= bar / 2), high, low)


def centre_square(size: int, side: float) -> np.ndarray:
    """True inside the centred square of the given side length."""
    x, y = _centres(size, size)
    c = size / 2
    return (np.abs(x - c) <= side / 2) & (np.abs(y - c) <= side / 2)


def triangle_vertices(size: int, circumradius: float) -> list[tuple[float, float]]:
    """Vertices of an upright equilateral triangle centred in the grid."""
    c = size / 2
    return [(c + circumradius * math.cos(a), c + circumradius * math.sin(a))
            for a in np.deg2rad([-90.0, 30.0, 150.0])]


def triangle(size: int, circumradius: float, values=(0.0, 255.0)) -> np.ndarray:
    """Filled equilateral triangle from :func:`triangle_vertices`."""
    _check_size(size, size)
    low, high = values
    x, y = _centres(size, size)
    verts = triangle_vertices(size, circumradius)
    inside = np.ones((size, size), dtype=bool)
    for k in range(3):
        (x1, y1), (x2, y2) = verts[k], verts[(k + 1) % 3]
        inside &= (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) >= 0
    return np.where(inside, high, low)


def disks_mask(size: int, centres, radius: float) -> np.ndarray:
    """Union of disks of equal radius."""
    x, y = _centres(size, size)
    mask = np.zeros((size, size), dtype=bool)
    for cx, cy in centres:
        mask |= (x - cx) ** 2 + (y - cy) ** 2 <= radius * radius
    return mask


def grey_scene(size: int) -> np.ndarray:
    """Piecewise smooth test image: a ramp with a disk, a rectangle and a thin stripe."""
    _check_size(size, size)
    x, y = _centres(size, size)
    s = size / 256
    img = 60.0 + 120.0 * x / size
    img = np.where((x - 90 * s) ** 2 + (y - 100 * s) ** 2 < (40 * s) ** 2, 20.0, img)
    img = np.where((np.abs(x - 180 * s) < 35 * s) & (np.abs(y - 170 * s) < 50 * s), 230.0, img)
    return np.where(np.abs((x - y) / math.sqrt(2) + 60 * s) < 6 * s, 250.0, img)


def colour_scene(size: int) -> np.ndarray:
    """Three-channel test image with coloured shapes on a two-tone background."""
    _check_size(size, size)
    x, y = _centres(size, size)
    s = size / 128
    base = np.where(x + y < size, 1.0, 0.0)
    img = np.stack([40 + 150 * base, 90 + 60 * base, 200 - 120 * base])
    shapes = [
        ((x - 40 * s) ** 2 + (y - 45 * s) ** 2 < (22 * s) ** 2, (230.0, 40.0, 40.0)),
        ((np.abs(x - 90 * s) < 20 * s) & (np.abs(y - 85 * s) < 26 * s), (30.0, 200.0, 60.0)),
        (np.abs((x - y) / math.sqrt(2)) < 4 * s, (250.0, 240.0, 30.0)),
    ]
    for inside, colour in shapes:
        for c in range(3):
            img[c] = np.where(inside, colour[c], img[c])
    return img
