"""Spectral-trace rasterization and report-image preprocessing.

Covers the image path of both vision experiments: plotting a 1-d
intensity series as a black-on-white trace image, plus the report-image
cleanup chain (Otsu binarization, convex-hull auto-crop, bilinear
rescale) applied before CNN input.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

RASTER_RESOLUTIONS = (32, 64, 128, 256, 512, 800)


class ImagingError(ValueError):
    """Raised for degenerate or unusable image input."""


@dataclass(frozen=True)
class GrayImage:
    """Grayscale raster with row-major intensities in [0, 1]."""

    pixels: np.ndarray  # shape (height, width)

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2:
            raise ImagingError("pixels must be a 2-d row-major array")
        if not np.isfinite(pixels).all():
            raise ImagingError("pixel intensities must be finite")
        if pixels.size and (pixels.min() < 0.0 or pixels.max() > 1.0):
            raise ImagingError("pixel intensities must lie in [0, 1]")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


@dataclass(frozen=True)
class SpectralRecord:
    """One spectral intensity series with an optional class label."""

    intensities: np.ndarray
    label: Optional[int] = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.intensities, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ImagingError("spectrum needs at least two intensity samples")
        if not np.isfinite(arr).all():
            raise ImagingError("spectrum intensities must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "intensities", arr)


# ---------------------------------------------------------------------------
# Spectrum -> trace image
# ---------------------------------------------------------------------------

def rasterize_spectrum(rec: SpectralRecord, resolution: int) -> GrayImage:
    """Plot the spectrum as a square black-on-white trace image.

    Intensities are min-max normalized then linearly resampled to
    `resolution` x-positions; higher intensity is drawn higher. Columns
    are connected by filling the vertical span to the previous column,
    so every column has at least one trace pixel. A constant spectrum
    becomes a horizontal mid-height line.
    """
    if resolution < 16:
        raise ImagingError("resolution must be at least 16 pixels")
    x = rec.intensities
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        v = np.full(x.size, 0.5)
    else:
        v = (x - lo) / (hi - lo)
    positions = np.linspace(0.0, x.size - 1.0, resolution)
    resampled = np.interp(positions, np.arange(x.size), v)
    rows = np.rint((1.0 - resampled) * (resolution - 1)).astype(int)

    pixels = np.ones((resolution, resolution))
    pixels[rows[0], 0] = 0.0
    for col in range(1, resolution):
        top = min(rows[col - 1], rows[col])
        bottom = max(rows[col - 1], rows[col])
        pixels[top : bottom + 1, col] = 0.0
    return GrayImage(pixels=pixels)


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------

def otsu_threshold(levels: np.ndarray) -> int:
    """Otsu's threshold over 256 gray levels (ties toward the lower level)."""
    hist = np.bincount(levels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    cum_w = np.cumsum(hist)
    cum_mu = np.cumsum(hist * np.arange(256))
    mu_total = cum_mu[-1]
    w0 = cum_w
    w1 = total - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = cum_mu / w0
        mu1 = (mu_total - cum_mu) / w1
        sigma_b = w0 * w1 * (mu0 - mu1) ** 2
    sigma_b[~np.isfinite(sigma_b)] = 0.0
    return int(np.argmax(sigma_b))


def binarize(img: GrayImage) -> GrayImage:
    """Global Otsu binarization: dark trace -> 0, background -> 1.

    A uniform image has no trace and maps entirely to background.
    """
    levels = np.rint(img.pixels * 255.0).astype(np.int64)
    if levels.size == 0 or levels.min() == levels.max():
        return GrayImage(pixels=np.ones_like(img.pixels))
    t = otsu_threshold(levels)
    return GrayImage(pixels=np.where(levels <= t, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Convex hull crop
# ---------------------------------------------------------------------------

def convex_hull(points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Monotone-chain convex hull, counter-clockwise, no interior points."""
    pts = sorted(set((int(x), int(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: List[Tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_hull_crop(img: GrayImage) -> GrayImage:
    """Crop to the bounding box of the convex hull of trace pixels.

    Trace pixels are the zeros of a binarized image. Fewer than three
    non-collinear trace pixels leave nothing to crop around.
    """
    ys, xs = np.nonzero(img.pixels == 0.0)
    if ys.size < 3:
        raise ImagingError("no tracing region: fewer than 3 foreground pixels")
    hull = convex_hull(list(zip(xs.tolist(), ys.tolist())))
    if len(hull) < 3:
        raise ImagingError("no tracing region: foreground pixels are collinear")
    hx = [p[0] for p in hull]
    hy = [p[1] for p in hull]
    x0, x1 = min(hx), max(hx)
    y0, y1 = min(hy), max(hy)
    return GrayImage(pixels=img.pixels[y0 : y1 + 1, x0 : x1 + 1].copy())


# ---------------------------------------------------------------------------
# Resize
# ---------------------------------------------------------------------------

def resize(img: GrayImage, w: int, h: int) -> GrayImage:
    """Bilinear resample to w x h using half-pixel sample centers."""
    if w < 1 or h < 1:
        raise ImagingError("target dimensions must be positive")
    if w == img.width and h == img.height:
        return img
    src = img.pixels
    ys = np.clip((np.arange(h) + 0.5) * (img.height / h) - 0.5, 0, img.height - 1)
    xs = np.clip((np.arange(w) + 0.5) * (img.width / w) - 0.5, 0, img.width - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, img.height - 1)
    x1 = np.minimum(x0 + 1, img.width - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1 - wx) + src[np.ix_(y0, x1)] * wx
    bottom = src[np.ix_(y1, x0)] * (1 - wx) + src[np.ix_(y1, x1)] * wx
    out = top * (1 - wy) + bottom * wy
    return GrayImage(pixels=np.clip(out, 0.0, 1.0))


# ---------------------------------------------------------------------------
# PNG I/O
# ---------------------------------------------------------------------------

def read_png(source: bytes | str | Path) -> GrayImage:
    """Load a PNG as grayscale; color inputs are converted by luma."""
    try:
        if isinstance(source, bytes):
            pil = Image.open(io.BytesIO(source))
        else:
            pil = Image.open(source)
        pil.load()
    except Exception as exc:
        raise ImagingError(f"malformed png: {exc}") from None
    if pil.mode == "L":
        arr = np.asarray(pil, dtype=np.float64) / 255.0
    else:
        rgb = np.asarray(pil.convert("RGB"), dtype=np.float64) / 255.0
        arr = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return GrayImage(pixels=np.clip(arr, 0.0, 1.0))


def write_png(img: GrayImage, path: str | Path) -> None:
    """Write as 8-bit grayscale PNG."""
    levels = np.rint(img.pixels * 255.0).astype(np.uint8)
    Image.fromarray(levels, mode="L").save(path, format="PNG")


def png_bytes(img: GrayImage) -> bytes:
    levels = np.rint(img.pixels * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(levels, mode="L").save(buf, format="PNG")
    return buf.getvalue()
