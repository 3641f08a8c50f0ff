"""Immutable per-image record model.

Records are assembled once by manifest ingestion and never mutated afterward,
so any number of aggregation queries can read them concurrently. Nothing in
this module is ever exported: aggregates leave the engine, records do not.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping


@dataclass(frozen=True)
class IndividualRecord:
    """One detected instance (a face or an object detection) within a sample."""

    individual_index: int
    face_box: tuple[int, int, int, int] | None = None  # x, y, w, h in pixels
    face_probability: float | None = None
    absolute_area: float | None = None   # box area, px^2
    relative_area: float | None = None   # box area / image area
    signal_values: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SampleRecord:
    """One image: its dimensions, per-sample signals, and detected individuals."""

    sample_id: str
    image_dims: tuple[int, int]          # width, height
    signal_values: Mapping[str, Any] = field(default_factory=dict)
    individuals: tuple[IndividualRecord, ...] = ()
    image_path: str | None = None        # only used by trusted-mode patch serving

    @property
    def pixel_count(self) -> int:
        return self.image_dims[0] * self.image_dims[1]


@dataclass(frozen=True)
class Dataset:
    """An ingested dataset: samples sorted by id, immutable, read-concurrent."""

    name: str
    samples: tuple[SampleRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {s.sample_id: s for s in self.samples})

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[SampleRecord]:
        return iter(self.samples)

    def get(self, sample_id: str) -> SampleRecord | None:
        return self._by_id.get(sample_id)  # type: ignore[attr-defined]

    def digest(self) -> str:
        """Stable content hash over the canonical serialized records."""
        from .manifest import dump_manifest  # late import to avoid a cycle

        h = hashlib.sha256()
        for line in dump_manifest(self):
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()
