import numpy as np
import pytest

from imgaudit.records import Dataset, IndividualRecord, SampleRecord
from imgaudit.schema import load_schema


@pytest.fixture(scope="session")
def schema():
    return load_schema({})


def make_sample(sample_id, values=None, individuals=None, dims=(640, 480), path=None):
    inds = []
    for idx, sig in enumerate(individuals or []):
        sig = dict(sig)
        box = sig.pop("face_box", None)
        face_p = sig.pop("face_probability", None)
        abs_area = rel_area = None
        if box is not None:
            abs_area = float(box[2] * box[3])
            rel_area = abs_area / (dims[0] * dims[1])
        inds.append(IndividualRecord(
            individual_index=idx, face_box=box, face_probability=face_p,
            absolute_area=abs_area, relative_area=rel_area, signal_values=sig))
    return SampleRecord(sample_id=sample_id, image_dims=dims,
                        signal_values=dict(values or {}), individuals=tuple(inds),
                        image_path=path)


def make_dataset(samples, name="test"):
    return Dataset(name=name, samples=tuple(samples))


def hsv_pixel(h, s, v):
    """8-bit RGB from HSV given in degrees / percent / percent."""
    import colorsys

    r, g, b = colorsys.hsv_to_rgb(h / 360.0, s / 100.0, v / 100.0)
    return np.array([round(r * 255), round(g * 255), round(b * 255)], dtype=np.uint8)
