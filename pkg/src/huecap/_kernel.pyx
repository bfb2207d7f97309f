# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel recolor kernel; hot-path twin of ``_kernel_py``.

Every expression mirrors the pure-Python kernel (and through it the scalar
pipeline) term for term so the two produce bit-identical output.  Do not
reorder arithmetic; the extension is compiled with FP contraction off for the
same reason.
"""

from libc.math cimport floor, pow


cdef double SRGB_CUTOFF = 0.04045
cdef double LINEAR_CUTOFF = 0.0031308


cdef inline double _clamp01(double x) noexcept nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


cdef inline double _decode(double u) noexcept nogil:
    if u <= SRGB_CUTOFF:
        return u / 12.92
    return pow((u + 0.055) / 1.055, 2.4)


cdef inline double _encode(double v) noexcept nogil:
    if v <= LINEAR_CUTOFF:
        return v * 12.92
    if v >= 1.0:
        # keep white an exact fixed point: 1.055 - 0.055 rounds below 1.0
        return v
    return 1.055 * pow(v, 1.0 / 2.4) - 0.055


cdef inline Py_ssize_t _search_right(const double[::1] thr, const int[::1] coarse,
                                     double v) noexcept nogil:
    # Count of thresholds <= v (numpy searchsorted side="right" semantics).
    # coarse[b] pre-counts thresholds at or below the left edge of bucket b,
    # and buckets are narrower than the minimum threshold spacing, so the
    # trailing scan advances at most one step.
    cdef Py_ssize_t idx = <Py_ssize_t> (v * 4096.0)
    if idx > 4095:
        idx = 4095
    cdef Py_ssize_t k = coarse[idx]
    cdef Py_ssize_t n = thr.shape[0]
    while k < n and thr[k] <= v:
        k += 1
    return k


def transform_block(const double[:, :, ::1] src, double[:, :, ::1] dst,
                    const double[:, ::1] sim, const double[:, ::1] corr,
                    bint do_correct, bint linear):
    """Float pipeline over an (h, w, 3) block: decode, simulate, correct, encode."""
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], i, j
    cdef double r, g, b, r2, g2, b2, er, eg, eb
    cdef double m00 = sim[0, 0], m01 = sim[0, 1], m02 = sim[0, 2]
    cdef double m10 = sim[1, 0], m11 = sim[1, 1], m12 = sim[1, 2]
    cdef double m20 = sim[2, 0], m21 = sim[2, 1], m22 = sim[2, 2]
    cdef double c00 = corr[0, 0], c01 = corr[0, 1], c02 = corr[0, 2]
    cdef double c10 = corr[1, 0], c11 = corr[1, 1], c12 = corr[1, 2]
    cdef double c20 = corr[2, 0], c21 = corr[2, 1], c22 = corr[2, 2]
    with nogil:
        for i in range(h):
            for j in range(w):
                r = src[i, j, 0]
                g = src[i, j, 1]
                b = src[i, j, 2]
                if linear:
                    r = _decode(r)
                    g = _decode(g)
                    b = _decode(b)
                r2 = _clamp01(m00 * r + m01 * g + m02 * b)
                g2 = _clamp01(m10 * r + m11 * g + m12 * b)
                b2 = _clamp01(m20 * r + m21 * g + m22 * b)
                if do_correct:
                    er = r - r2
                    eg = g - g2
                    eb = b - b2
                    r2 = _clamp01(r + (c00 * er + c01 * eg + c02 * eb))
                    g2 = _clamp01(g + (c10 * er + c11 * eg + c12 * eb))
                    b2 = _clamp01(b + (c20 * er + c21 * eg + c22 * eb))
                if linear:
                    r2 = _encode(r2)
                    g2 = _encode(g2)
                    b2 = _encode(b2)
                dst[i, j, 0] = r2
                dst[i, j, 1] = g2
                dst[i, j, 2] = b2


def transform_block_u8(const unsigned char[:, :, ::1] src, unsigned char[:, :, ::1] dst,
                       const double[:, ::1] sim, const double[:, ::1] corr,
                       bint do_correct, bint linear,
                       const double[::1] lut, const double[::1] thresholds,
                       const int[::1] coarse):
    """8-bit pipeline: table decode, simulate, correct, threshold quantize."""
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], i, j
    cdef double r, g, b, r2, g2, b2, er, eg, eb
    cdef double m00 = sim[0, 0], m01 = sim[0, 1], m02 = sim[0, 2]
    cdef double m10 = sim[1, 0], m11 = sim[1, 1], m12 = sim[1, 2]
    cdef double m20 = sim[2, 0], m21 = sim[2, 1], m22 = sim[2, 2]
    cdef double c00 = corr[0, 0], c01 = corr[0, 1], c02 = corr[0, 2]
    cdef double c10 = corr[1, 0], c11 = corr[1, 1], c12 = corr[1, 2]
    cdef double c20 = corr[2, 0], c21 = corr[2, 1], c22 = corr[2, 2]
    with nogil:
        for i in range(h):
            for j in range(w):
                if linear:
                    r = lut[src[i, j, 0]]
                    g = lut[src[i, j, 1]]
                    b = lut[src[i, j, 2]]
                else:
                    r = src[i, j, 0] / 255.0
                    g = src[i, j, 1] / 255.0
                    b = src[i, j, 2] / 255.0
                r2 = _clamp01(m00 * r + m01 * g + m02 * b)
                g2 = _clamp01(m10 * r + m11 * g + m12 * b)
                b2 = _clamp01(m20 * r + m21 * g + m22 * b)
                if do_correct:
                    er = r - r2
                    eg = g - g2
                    eb = b - b2
                    r2 = _clamp01(r + (c00 * er + c01 * eg + c02 * eb))
                    g2 = _clamp01(g + (c10 * er + c11 * eg + c12 * eb))
                    b2 = _clamp01(b + (c20 * er + c21 * eg + c22 * eb))
                if linear:
                    dst[i, j, 0] = <unsigned char> _search_right(thresholds, coarse, r2)
                    dst[i, j, 1] = <unsigned char> _search_right(thresholds, coarse, g2)
                    dst[i, j, 2] = <unsigned char> _search_right(thresholds, coarse, b2)
                else:
                    dst[i, j, 0] = <unsigned char> floor(r2 * 255.0 + 0.5)
                    dst[i, j, 1] = <unsigned char> floor(g2 * 255.0 + 0.5)
                    dst[i, j, 2] = <unsigned char> floor(b2 * 255.0 + 0.5)
