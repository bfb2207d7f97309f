"""Pure-numpy image transform kernel, used when the compiled kernel is absent.

Arithmetic here must stay bit-identical to the scalar pipeline in
``colorspace``/``cvd``/``daltonize``: the matrix term order matches
``cvd.apply_matrix3`` and the transfer functions use the same expressions as
``linearize_channel`` / ``delinearize_channel``.  Do not reorder operations.
"""

from __future__ import annotations

import numpy as np

_SRGB_CUTOFF = 0.04045
_LINEAR_CUTOFF = 0.0031308


def _decode(u):
    return np.where(u <= _SRGB_CUTOFF, u / 12.92, ((u + 0.055) / 1.055) ** 2.4)


def _encode(v):
    # the v >= 1.0 arm keeps white an exact fixed point (1.055 - 0.055 < 1.0
    # in binary floating point), matching the scalar conversion bit for bit
    return np.where(
        v <= _LINEAR_CUTOFF,
        v * 12.92,
        np.where(v >= 1.0, v, 1.055 * v ** (1.0 / 2.4) - 0.055),
    )


def _stages(r, g, b, sim, corr, do_correct):
    m00, m01, m02 = sim[0]
    m10, m11, m12 = sim[1]
    m20, m21, m22 = sim[2]
    r2 = np.clip(m00 * r + m01 * g + m02 * b, 0.0, 1.0)
    g2 = np.clip(m10 * r + m11 * g + m12 * b, 0.0, 1.0)
    b2 = np.clip(m20 * r + m21 * g + m22 * b, 0.0, 1.0)
    if not do_correct:
        return r2, g2, b2
    c00, c01, c02 = corr[0]
    c10, c11, c12 = corr[1]
    c20, c21, c22 = corr[2]
    er = r - r2
    eg = g - g2
    eb = b - b2
    rc = np.clip(r + (c00 * er + c01 * eg + c02 * eb), 0.0, 1.0)
    gc = np.clip(g + (c10 * er + c11 * eg + c12 * eb), 0.0, 1.0)
    bc = np.clip(b + (c20 * er + c21 * eg + c22 * eb), 0.0, 1.0)
    return rc, gc, bc


def transform_block(src, dst, sim, corr, do_correct, linear):
    """Float pipeline over an (h, w, 3) block: decode, simulate, correct, encode."""
    r = src[..., 0]
    g = src[..., 1]
    b = src[..., 2]
    if linear:
        r = _decode(r)
        g = _decode(g)
        b = _decode(b)
    r, g, b = _stages(r, g, b, sim, corr, do_correct)
    if linear:
        r = _encode(r)
        g = _encode(g)
        b = _encode(b)
    dst[..., 0] = r
    dst[..., 1] = g
    dst[..., 2] = b


def transform_block_u8(src, dst, sim, corr, do_correct, linear, lut, thresholds, coarse):
    """8-bit pipeline: table decode, simulate, correct, threshold quantize.

    ``lut`` holds the linear value of each 8-bit code, ``thresholds`` the
    exact rounding boundaries of the encode-then-quantize chain, so this path
    produces the same bytes as the float pipeline followed by quantization.
    ``coarse`` seeds the compiled kernel's threshold search; the vectorized
    binary search here computes the same counts without it.
    """
    del coarse
    if linear:
        r = lut[src[..., 0]]
        g = lut[src[..., 1]]
        b = lut[src[..., 2]]
    else:
        r = src[..., 0] / 255.0
        g = src[..., 1] / 255.0
        b = src[..., 2] / 255.0
    r, g, b = _stages(r, g, b, sim, corr, do_correct)
    if linear:
        dst[..., 0] = np.searchsorted(thresholds, r, side="right").astype(np.uint8)
        dst[..., 1] = np.searchsorted(thresholds, g, side="right").astype(np.uint8)
        dst[..., 2] = np.searchsorted(thresholds, b, side="right").astype(np.uint8)
    else:
        dst[..., 0] = np.floor(r * 255.0 + 0.5).astype(np.uint8)
        dst[..., 1] = np.floor(g * 255.0 + 0.5).astype(np.uint8)
        dst[..., 2] = np.floor(b * 255.0 + 0.5).astype(np.uint8)
