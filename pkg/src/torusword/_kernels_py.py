"""Pure numpy implementations of the hot kernels.

Same API as the compiled module ``torusword._speedups``; selection happens
in :mod:`torusword.kernels`.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "pure"


def count_factors(data, n, alphabet_size=0):
    """Count the length-``n`` blocks of a symbol array.

    Returns a dict mapping the raw bytes of each block to its number of
    occurrences at positions ``0 .. len(data)-n``.
    """
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.uint8))
    L = arr.shape[0]
    if n <= 0:
        raise ValueError("block length must be positive")
    if L < n:
        return {}
    if L - n + 1 < 64:
        raw = arr.tobytes()
        out = {}
        for i in range(L - n + 1):
            key = raw[i : i + n]
            out[key] = out.get(key, 0) + 1
        return out
    windows = np.lib.stride_tricks.sliding_window_view(arr, n)
    # void view makes np.unique treat each window as one opaque key
    keys = np.ascontiguousarray(windows).view(np.dtype((np.void, n))).ravel()
    uniq, counts = np.unique(keys, return_counts=True)
    return {u.tobytes(): int(c) for u, c in zip(uniq, counts)}


def code_orbit_interval(x0, lo, hi, shift, count, eps):
    """Code ``count`` steps of a piecewise translation of half-open intervals.

    Each step locates the cell with ``lo[i] <= x < hi[i]`` and moves by
    ``shift[i]``.  Points strictly inside the ``eps`` band around a cell
    endpoint (exact lower endpoints excluded) stop the coding.

    Returns ``(codes, x_final, hit_boundary)``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    shift = np.asarray(shift, dtype=float)
    m = lo.shape[0]
    codes = np.empty(count, dtype=np.uint8)
    x = float(x0)
    hit = False
    done = 0
    for step in range(count):
        cell = -1
        for i in range(m):
            if lo[i] <= x < hi[i]:
                cell = i
                break
        if cell < 0:
            hit = True
            break
        a, b = lo[cell], hi[cell]
        if (x - a < eps and x != a) or (b - x < eps):
            hit = True
            break
        codes[step] = cell
        x += shift[cell]
        done += 1
    return codes[:done], x, hit


def code_orbit_pgram(x0, origin, minv, shift, count, eps):
    """Code a piecewise translation whose cells are half-open parallelograms.

    ``minv[i]`` is the inverse of the 2x2 span matrix of cell ``i``; a point
    is inside when both local coordinates lie in ``[0, 1)``.  The ``eps``
    band is applied in local coordinates.
    """
    origin = np.asarray(origin, dtype=float)
    minv = np.asarray(minv, dtype=float)
    shift = np.asarray(shift, dtype=float)
    m = origin.shape[0]
    codes = np.empty(count, dtype=np.uint8)
    x = float(x0[0])
    y = float(x0[1])
    hit = False
    done = 0
    for step in range(count):
        cell = -1
        for i in range(m):
            tx = x - origin[i, 0]
            ty = y - origin[i, 1]
            u = minv[i, 0, 0] * tx + minv[i, 0, 1] * ty
            v = minv[i, 1, 0] * tx + minv[i, 1, 1] * ty
            if 0.0 <= u < 1.0 and 0.0 <= v < 1.0:
                if (
                    (u < eps and u != 0.0)
                    or (v < eps and v != 0.0)
                    or 1.0 - u < eps
                    or 1.0 - v < eps
                ):
                    cell = -2
                else:
                    cell = i
                break
        if cell < 0:
            hit = True
            break
        codes[step] = cell
        x += shift[cell, 0]
        y += shift[cell, 1]
        done += 1
    return codes[:done], np.array([x, y]), hit
