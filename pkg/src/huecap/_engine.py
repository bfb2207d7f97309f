"""Kernel selection and row-parallel dispatch for the image pipelines.

The compiled Cython kernel is preferred when its extension module imports;
otherwise the pure-numpy fallback is used.  Setting ``HUECAP_PURE_PYTHON=1``
forces the fallback.  Both kernels satisfy the same bit-exact contract, so
the choice (and the worker count) never changes output bytes.
"""

from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernel_py
from .colorspace import delinearize_channel, linearize_channel
from .errors import DomainError

_FORCE_PY = os.environ.get("HUECAP_PURE_PYTHON", "") not in ("", "0")
if _FORCE_PY:
    _compiled = None
else:
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None


def active_kernel() -> str:
    """Name of the kernel selected at import: "compiled" or "python"."""
    return "python" if _compiled is None else "compiled"


def available_kernels() -> tuple[str, ...]:
    return ("python",) if _compiled is None else ("compiled", "python")


def _impl(kernel: str | None):
    if kernel is None:
        kernel = active_kernel()
    if kernel == "python":
        return _kernel_py
    if kernel == "compiled":
        if _compiled is None:
            raise DomainError("compiled kernel is not available in this installation")
        return _compiled
    raise DomainError(f"unknown kernel {kernel!r}; expected 'compiled' or 'python'")


@functools.lru_cache(maxsize=1)
def decode_lut() -> np.ndarray:
    """Linear value of every 8-bit sRGB code, via the scalar transfer function."""
    lut = np.array([linearize_channel(k / 255.0) for k in range(256)])
    lut.setflags(write=False)
    return lut


def _quantized_srgb(x: float) -> int:
    # the value an 8-bit writer stores for linear x: encode, scale, round half up
    return int(math.floor(255.0 * delinearize_channel(x) + 0.5))


@functools.lru_cache(maxsize=1)
def encode_thresholds() -> np.ndarray:
    """Exact rounding boundaries of the encode-then-quantize chain.

    ``thresholds[k-1]`` is the smallest float64 in [0, 1] whose encoded,
    quantized value reaches k.  Counting thresholds <= x therefore reproduces
    ``floor(255 * delinearize_channel(x) + 0.5)`` bit for bit, letting the
    8-bit kernels skip the pow call entirely.
    """
    thr = np.empty(255)
    for k in range(1, 256):
        lo, hi = 0.0, 1.0
        for _ in range(200):
            if math.nextafter(lo, math.inf) >= hi:
                break
            mid = 0.5 * (lo + hi)
            if _quantized_srgb(mid) >= k:
                hi = mid
            else:
                lo = mid
        thr[k - 1] = hi
    thr.setflags(write=False)
    return thr


@functools.lru_cache(maxsize=1)
def encode_index() -> np.ndarray:
    """Per-bucket threshold counts used to seed the compiled encode search.

    ``index[b]`` counts thresholds at or below ``b / 4096``; the bucket width
    is below the minimum threshold spacing, so a search seeded here finishes
    in at most one extra comparison.
    """
    edges = np.arange(4096, dtype=np.float64) / 4096.0
    idx = np.searchsorted(encode_thresholds(), edges, side="right").astype(np.int32)
    idx.setflags(write=False)
    return idx


_ZERO3 = np.zeros((3, 3))
_ZERO3.setflags(write=False)


def _run_blocks(fn, src, dst, args, workers: int | None):
    height = src.shape[0]
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    workers = max(1, min(int(workers), height))
    if workers == 1:
        fn(src, dst, *args)
        return
    step = -(-height // workers)  # ceil division
    bounds = [(a, min(a + step, height)) for a in range(0, height, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, src[a:b], dst[a:b], *args) for a, b in bounds]
        for fut in futures:
            fut.result()


def _prep_matrices(sim, corr):
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    corr = _ZERO3 if corr is None else np.ascontiguousarray(corr, dtype=np.float64)
    if sim.shape != (3, 3) or corr.shape != (3, 3):
        raise DomainError("simulation and correction matrices must be 3x3")
    return sim, corr


def recolor_array(pixels, sim, corr, do_correct: bool, linear: bool,
                  workers: int | None = None, kernel: str | None = None) -> np.ndarray:
    """Transform an (h, w, 3) float array of sRGB-encoded values in [0, 1]."""
    src = np.ascontiguousarray(pixels, dtype=np.float64)
    sim, corr = _prep_matrices(sim, corr)
    dst = np.empty_like(src)
    fn = _impl(kernel).transform_block
    _run_blocks(fn, src, dst, (sim, corr, bool(do_correct), bool(linear)), workers)
    return dst


def recolor_array_u8(rgb, sim, corr, do_correct: bool, linear: bool,
                     workers: int | None = None, kernel: str | None = None) -> np.ndarray:
    """Transform an (h, w, 3) uint8 array; bit-equal to the float path plus quantization."""
    src = np.ascontiguousarray(rgb, dtype=np.uint8)
    sim, corr = _prep_matrices(sim, corr)
    dst = np.empty_like(src)
    fn = _impl(kernel).transform_block_u8
    args = (sim, corr, bool(do_correct), bool(linear), decode_lut(),
            encode_thresholds(), encode_index())
    _run_blocks(fn, src, dst, args, workers)
    return dst
