import numpy as np
import pytest

from conftest import hsv_pixel
from imgaudit.colorspace import rgb_to_hsv_degrees, rgb_to_ycbcr
from imgaudit.segment import segment_skin, skin_markers

SKIN = hsv_pixel(15, 60, 80)
GREEN = hsv_pixel(120, 80, 80)


def patch_image(size=100, patch=(30, 70)):
    img = np.zeros((size, size, 3), dtype=np.uint8)
    img[:, :] = GREEN
    img[patch[0]:patch[1], patch[0]:patch[1]] = SKIN
    truth = np.zeros((size, size), dtype=bool)
    truth[patch[0]:patch[1], patch[0]:patch[1]] = True
    return img, truth


def test_threshold_rules_on_chosen_colors():
    # The synthetic skin color passes the hue/saturation rule; the green
    # background fails both rules (its Cb falls below the chroma window).
    h, s, _v = rgb_to_hsv_degrees(SKIN)
    assert h < 25 and s > 40
    hg, sg, _vg = rgb_to_hsv_degrees(GREEN)
    assert not (hg < 25 and sg > 40)
    _y, cb, cr = rgb_to_ycbcr(GREEN)
    assert not (77 < cb < 127 and 133 < cr < 173)


def test_markers_union_of_both_rules():
    img, truth = patch_image()
    markers = skin_markers(img)
    assert (markers == truth).all()


def test_synthetic_patch_iou():
    img, truth = patch_image()
    mask = segment_skin(img).mask
    inter = (mask & truth).sum()
    union = (mask | truth).sum()
    assert inter / union >= 0.9


def test_all_blue_is_empty():
    img = np.zeros((50, 50, 3), dtype=np.uint8)
    img[:, :, 2] = 255
    assert segment_skin(img).pixel_count == 0


def test_inside_both_rules_covers_image():
    img = np.zeros((60, 60, 3), dtype=np.uint8)
    img[:, :] = SKIN
    result = segment_skin(img)
    assert result.pixel_count >= 0.95 * img.shape[0] * img.shape[1]


def test_idempotent_and_deterministic():
    img, _ = patch_image()
    first = segment_skin(img)
    second = segment_skin(img)
    assert (first.mask == second.mask).all()
    assert first.pixel_count == second.pixel_count


def test_pixel_count_matches_mask():
    img, _ = patch_image()
    result = segment_skin(img)
    assert result.pixel_count == int(result.mask.sum())


def test_empty_crop_rejected():
    with pytest.raises(ValueError):
        segment_skin(np.zeros((0, 10, 3), dtype=np.uint8))


def test_single_pixel_noise_removed():
    img = np.zeros((40, 40, 3), dtype=np.uint8)
    img[:, :] = GREEN
    img[20, 20] = SKIN   # lone marker pixel, erosion must discard it
    assert segment_skin(img).pixel_count == 0
