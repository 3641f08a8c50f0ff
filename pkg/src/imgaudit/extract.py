"""Native signal extractors: CIE-Lab luminance, skin-tone angle, file metadata.

These run directly on image files with no learned models involved. Model
outputs (face boxes, age vectors, NSFW scores, ...) always arrive through
signal manifests produced elsewhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np
from PIL import Image, UnidentifiedImageError

from .colorspace import to_cielab
from .errors import ExtractionError
from .manifest import SignalManifestEntry
from .segment import SkinMask, segment_skin

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".gif", ".bmp", ".webp", ".tif", ".tiff"}

# Pillow mode -> reported color mode name.
MODE_NAMES = {
    "1": "bilevel",
    "L": "grayscale",
    "LA": "grayscale_alpha",
    "P": "palette",
    "RGB": "RGB",
    "RGBA": "RGBA",
    "CMYK": "CMYK",
    "YCbCr": "YCbCr",
    "I": "integer",
    "F": "float",
}


@dataclass(frozen=True)
class ItaResult:
    """Skin-tone angle statistics over one skin mask.

    ``filtered_mean_ita`` averages only the per-pixel angles within one
    (population) standard deviation of the raw mean; ``n_excluded`` counts
    pixels dropped because their b channel is exactly 0, where the angle is
    undefined.
    """

    mean_ita: float
    filtered_mean_ita: float
    std_ita: float
    n_pixels: int
    n_excluded: int


@dataclass(frozen=True)
class FileMetadata:
    extension: str
    colormode: str
    aspect_ratio: float
    resolution: int
    width: int
    height: int


def _as_rgb_array(source) -> np.ndarray:
    if isinstance(source, np.ndarray):
        if source.ndim != 3 or source.shape[-1] != 3:
            raise ExtractionError(f"expected HxWx3 array, got shape {source.shape}")
        return source
    if isinstance(source, Image.Image):
        return np.asarray(source.convert("RGB"))
    try:
        with Image.open(source) as img:
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as exc:
        raise ExtractionError(f"cannot decode image {source}: {exc}") from None


def average_luminance(source) -> float:
    """Arithmetic mean of the CIE-Lab L channel over all pixels, in [0, 100]."""
    rgb = _as_rgb_array(source)
    return float(to_cielab(rgb)[..., 0].mean())


def ita_per_pixel(lab: np.ndarray, mask: np.ndarray | SkinMask) -> tuple[np.ndarray, int]:
    """Per-pixel skin-tone angles over masked pixels.

    The angle is arctan((L - 50) / b) * 180 / pi. Pixels with b exactly 0 are
    achromatic on the blue-yellow axis and the ratio is undefined, so they are
    excluded; the second return value counts them.
    """
    m = mask.mask if isinstance(mask, SkinMask) else np.asarray(mask, dtype=bool)
    pixels = np.asarray(lab)[m]
    lum = pixels[..., 0]
    b = pixels[..., 2]
    keep = b != 0
    values = np.degrees(np.arctan((lum[keep] - 50.0) / b[keep]))
    return values, int((~keep).sum())


def ita_statistics(values: np.ndarray, n_excluded: int = 0) -> ItaResult | None:
    """Mean, population std, and within-one-std filtered mean of angle values."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return None
    mean = float(values.mean())
    std = float(values.std())
    within = values[np.abs(values - mean) <= std]
    filtered = float(within.mean()) if within.size else mean
    return ItaResult(mean_ita=mean, filtered_mean_ita=filtered, std_ita=std,
                     n_pixels=int(values.size), n_excluded=n_excluded)


def compute_ita(lab: np.ndarray, mask: np.ndarray | SkinMask) -> ItaResult | None:
    """ITA statistics over a skin mask; None when no usable skin pixels exist."""
    values, excluded = ita_per_pixel(lab, mask)
    return ita_statistics(values, excluded)


def extract_metadata(path) -> FileMetadata:
    """File extension, color mode, aspect ratio, and resolution of an image."""
    p = Path(path)
    try:
        with Image.open(p) as img:
            width, height = img.size
            mode = MODE_NAMES.get(img.mode, img.mode)
    except (UnidentifiedImageError, OSError) as exc:
        raise ExtractionError(f"cannot read image {p}: {exc}") from None
    if width <= 0 or height <= 0:
        raise ExtractionError(f"{p}: degenerate image dimensions {width}x{height}")
    return FileMetadata(
        extension=p.suffix.lstrip(".").lower(),
        colormode=mode,
        aspect_ratio=width / height,
        resolution=width * height,
        width=width,
        height=height,
    )


def load_face_boxes(manifest_path) -> dict[str, dict[int, tuple[int, int, int, int]]]:
    """Collect face_box entries from a manifest file, keyed by sample and index."""
    boxes: dict[str, dict[int, tuple[int, int, int, int]]] = {}
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for raw in fh:
            text = raw.strip()
            if not text:
                continue
            doc = json.loads(text)
            if doc.get("attribute") != "face_box":
                continue
            x, y, w, h = doc["value"]
            boxes.setdefault(str(doc["sample_id"]), {})[int(doc["individual_index"])] = (
                x, y, w, h)
    return boxes


def crop_box(rgb: np.ndarray, box: tuple[int, int, int, int]) -> np.ndarray:
    x, y, w, h = box
    height, width = rgb.shape[:2]
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    return rgb[y0:y1, x0:x1]


def extract_image(path, sample_id: str,
                  face_boxes: Mapping[int, tuple[int, int, int, int]] | None = None,
                  include_path: bool = False) -> Iterator[SignalManifestEntry]:
    """Manifest entries for one image: metadata, luminance, and per-face ITA.

    Faces come from an upstream detector's manifest; with no boxes for a
    sample, no skin-tone signal is emitted and the sample counts as missing
    for that attribute.
    """
    meta = extract_metadata(path)
    yield SignalManifestEntry(sample_id, "image_size", "per_sample",
                              [meta.width, meta.height])
    if include_path:
        yield SignalManifestEntry(sample_id, "image_path", "per_sample", str(path))
    yield SignalManifestEntry(sample_id, "file_extension", "per_sample", meta.extension)
    yield SignalManifestEntry(sample_id, "colormode", "per_sample", meta.colormode)
    yield SignalManifestEntry(sample_id, "aspect_ratio", "per_sample", meta.aspect_ratio)
    yield SignalManifestEntry(sample_id, "resolution", "per_sample", float(meta.resolution))

    rgb = _as_rgb_array(path)
    yield SignalManifestEntry(sample_id, "luminance", "per_sample",
                              float(to_cielab(rgb)[..., 0].mean()))

    for idx, box in sorted((face_boxes or {}).items()):
        crop = crop_box(rgb, box)
        if crop.size == 0:
            continue
        skin = segment_skin(crop)
        if skin.pixel_count == 0:
            continue
        result = compute_ita(to_cielab(crop), skin)
        if result is None or math.isnan(result.filtered_mean_ita):
            continue
        yield SignalManifestEntry(sample_id, "ita", "per_individual",
                                  result.filtered_mean_ita, idx)


def extract_directory(images_dir, *, face_boxes=None,
                      include_paths: bool = False) -> Iterator[SignalManifestEntry]:
    """Walk an image directory (sorted, recursive) and emit manifest entries.

    Sample ids are file paths relative to the directory, with forward slashes.
    """
    root = Path(images_dir)
    if not root.is_dir():
        raise ExtractionError(f"{root} is not a directory")
    files = sorted(p for p in root.rglob("*")
                   if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS)
    for path in files:
        sample_id = path.relative_to(root).as_posix()
        boxes = (face_boxes or {}).get(sample_id)
        yield from extract_image(path, sample_id, face_boxes=boxes,
                                 include_path=include_paths)
