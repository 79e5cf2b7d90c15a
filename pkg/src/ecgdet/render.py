"""Frame rasterization and augmentation.

Windows render as a black-on-white polyline across a 640x640 frame; every
beat gets a normalized xywh box. Rendering is deterministic: vertices are
rounded to the pixel grid with floor(v + 0.5) before rasterization, so the
same window and style always produce byte-identical pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .boxes import BoundingBox, LabeledBox
from .windows import FrameWindow

DEFAULT_GRAYSCALE_PROB = 0.75
DEFAULT_MAX_ROTATION_DEG = 1.0


@dataclass(frozen=True)
class RenderStyle:
    """Rendering parameters; defaults match the dataset recipe."""

    width: int = 640
    height: int = 640
    line_width: int = 2
    foreground: int = 0
    background: int = 255
    # Fraction of frame height kept clear above and below the trace.
    margin: float = 0.05
    # Box time extent: R-peak +/- this many seconds.
    box_half_width_s: float = 0.35
    # Total vertical padding added to the signal extent (half per side).
    box_pad: float = 0.02
    min_box_height: float = 0.02
    debug_symbols: bool = False


DEFAULT_STYLE = RenderStyle()


@dataclass(frozen=True)
class FrameProvenance:
    """Where a frame came from and how it was augmented."""

    record_id: str
    start_sample: int
    seed: Optional[int] = None
    grayscale_applied: bool = False
    rotation_deg: float = 0.0


@dataclass(frozen=True)
class LabeledFrame:
    """A rendered frame, its boxes, and its provenance."""

    image: np.ndarray
    labels: tuple[LabeledBox, ...]
    provenance: FrameProvenance

    @property
    def frame_id(self) -> str:
        p = self.provenance
        base = f"{p.record_id}-{p.start_sample:08d}"
        return f"{base}-a{p.seed}" if p.seed is not None else base


def normalize_amplitude(samples: np.ndarray, margin: float) -> np.ndarray:
    """Window min-max normalization to vertical positions (0 = top).

    A flat signal sits at mid-height. The trace spans [margin, 1 - margin].
    """
    samples = np.asarray(samples, dtype=np.float64)
    lo = samples.min()
    hi = samples.max()
    if hi > lo:
        u = (samples - lo) / (hi - lo)
    else:
        u = np.full(samples.shape, 0.5)
    return margin + (1.0 - u) * (1.0 - 2.0 * margin)


def render_frame(window: FrameWindow, style: RenderStyle = DEFAULT_STYLE) -> LabeledFrame:
    """Rasterize one window and compute its beat boxes.

    Box rule: time extent is the R-peak +/- box_half_width_s; vertical
    extent is the min/max of the trace over that span, padded by box_pad
    total, grown to min_box_height when flatter, then clipped to the unit
    square. A window without beats yields an empty label list.
    """
    n = len(window.samples)
    if n < 2:
        raise ValueError(f"window too short to render: {n} samples")
    w, h = style.width, style.height
    y_norm = normalize_amplitude(window.samples, style.margin)
    idx = np.arange(n, dtype=np.float64)
    x_pix = np.floor(idx * (w - 1) / (n - 1) + 0.5).astype(np.int64)
    y_pix = np.floor(y_norm * (h - 1) + 0.5).astype(np.int64)
    canvas = np.full((h, w), style.background, dtype=np.uint8)
    kernels.draw_polyline(canvas, x_pix, y_pix, style.line_width, style.foreground)

    half = style.box_half_width_s * window.sampling_rate
    labels = []
    for beat in window.beats:
        bi = beat.index
        x_lo = (bi - half) / (n - 1)
        x_hi = (bi + half) / (n - 1)
        i0 = max(0, int(math.ceil(bi - half)))
        i1 = min(n - 1, int(math.floor(bi + half)))
        span = y_norm[i0 : i1 + 1]
        y_top = float(span.min()) - style.box_pad / 2.0
        y_bot = float(span.max()) + style.box_pad / 2.0
        if y_bot - y_top < style.min_box_height:
            mid = (y_top + y_bot) / 2.0
            y_top = mid - style.min_box_height / 2.0
            y_bot = mid + style.min_box_height / 2.0
        box = BoundingBox.from_corners(x_lo, y_top, x_hi, y_bot).clipped()
        labels.append(LabeledBox(beat.class_id, box))

    if style.debug_symbols:
        # Annotation-assist overlay only; never part of training output.
        for beat, lb in zip(window.beats, labels):
            bx = int(math.floor(beat.index * (w - 1) / (n - 1) + 0.5))
            box_top_pix = int(math.floor((lb.box.cy - lb.box.h / 2.0) * (h - 1) + 0.5))
            _stamp_glyph(canvas, beat.symbol, bx, box_top_pix, style.foreground)

    image = np.stack([canvas, canvas, canvas], axis=-1)
    provenance = FrameProvenance(record_id=window.record_id, start_sample=window.start_sample)
    return LabeledFrame(image=image, labels=tuple(labels), provenance=provenance)


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Luma conversion; a no-op on pixels when all channels are equal."""
    if image.ndim == 2:
        return image.copy()
    f = image.astype(np.float64)
    gray = np.floor(f[..., 0] * 0.299 + f[..., 1] * 0.587 + f[..., 2] * 0.114 + 0.5)
    gray = gray.astype(np.uint8)
    return np.stack([gray] * image.shape[-1], axis=-1)


def rotate_box_hull(box: BoundingBox, angle_deg: float, width: int, height: int) -> BoundingBox:
    """Axis-aligned hull of the box's four corners after frame rotation.

    The corner transform is the forward map of the image rotation (positive
    angle = clockwise on screen), applied in pixel space about the pixel
    center, so labels track pixels exactly. Result is NOT clipped.
    """
    theta = angle_deg * math.pi / 180.0
    c = math.cos(theta)
    s = math.sin(theta)
    cxp = (width - 1) / 2.0
    cyp = (height - 1) / 2.0
    x1, y1, x2, y2 = box.corners()
    corners = ((x1, y1), (x2, y1), (x2, y2), (x1, y2))
    rx = []
    ry = []
    for xn, yn in corners:
        dx = xn * (width - 1) - cxp
        dy = yn * (height - 1) - cyp
        rx.append((cxp + c * dx - s * dy) / (width - 1))
        ry.append((cyp + s * dx + c * dy) / (height - 1))
    return BoundingBox.from_corners(min(rx), min(ry), max(rx), max(ry))


def augment(
    frame: LabeledFrame,
    seed: int,
    grayscale_prob: float = DEFAULT_GRAYSCALE_PROB,
    max_rotation_deg: float = DEFAULT_MAX_ROTATION_DEG,
) -> LabeledFrame:
    """Seeded augmentation: probabilistic grayscale, then a small rotation.

    Draw order is fixed (grayscale gate first, then the angle) so a seed
    fully determines the output. Grayscale on an already-gray render leaves
    pixels untouched but is still recorded in provenance. Boxes become the
    clipped hulls of their rotated corners.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    apply_gray = bool(rng.random() < grayscale_prob)
    angle = float(rng.uniform(-max_rotation_deg, max_rotation_deg))

    image = frame.image
    if apply_gray:
        image = to_grayscale(image)
    image = kernels.rotate_nearest(image, angle, fill=255)
    h, w = image.shape[:2]
    labels = tuple(
        LabeledBox(lb.class_id, rotate_box_hull(lb.box, angle, w, h).clipped())
        for lb in frame.labels
    )
    provenance = replace(
        frame.provenance, seed=seed, grayscale_applied=apply_gray, rotation_deg=angle
    )
    return LabeledFrame(image=image, labels=labels, provenance=provenance)


# --- Debug glyphs ------------------------------------------------------------

# 5x7 bitmaps for the beat symbols; '#' marks a foreground pixel.
_GLYPHS = {
    "N": ("#...#", "##..#", "##..#", "#.#.#", "#..##", "#..##", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "a": (".....", ".....", ".###.", "....#", ".####", "#...#", ".####"),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "e": (".....", ".....", ".###.", "#...#", "#####", "#....", ".###."),
    "j": ("...#.", ".....", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "f": ("..##.", ".#...", ".#...", "####.", ".#...", ".#...", ".#..."),
    "/": ("....#", "...#.", "...#.", "..#..", ".#...", ".#...", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "?": (".###.", "#...#", "....#", "...#.", "..#..", ".....", "..#.."),
}

_GLYPH_SCALE = 2
_GLYPH_GAP = 4


def _stamp_glyph(canvas: np.ndarray, symbol: str, x_center: int, y_above: int, value: int) -> None:
    rows = _GLYPHS.get(symbol, _GLYPHS["?"])
    gh = len(rows) * _GLYPH_SCALE
    gw = len(rows[0]) * _GLYPH_SCALE
    x0 = x_center - gw // 2
    y0 = y_above - _GLYPH_GAP - gh
    h, w = canvas.shape
    if y0 < 0:
        y0 = 0
    for r, row in enumerate(rows):
        for cidx, ch in enumerate(row):
            if ch != "#":
                continue
            ys = y0 + r * _GLYPH_SCALE
            xs = x0 + cidx * _GLYPH_SCALE
            for yy in range(ys, ys + _GLYPH_SCALE):
                for xx in range(xs, xs + _GLYPH_SCALE):
                    if 0 <= yy < h and 0 <= xx < w:
                        canvas[yy, xx] = value
