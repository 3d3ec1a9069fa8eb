"""Bounded experience pool with similarity retrieval over normalized
feature vectors."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..states import Action

DEFAULT_CAPACITY = 512


@dataclass(frozen=True)
class ExperienceRecord:
    """One (state, action, outcome) demonstration unit."""

    features: np.ndarray
    action: Action
    outcome_avg_aoi: float
    step: int

    def features_avg_aoi(self) -> float:
        """Mean normalized AoI of the recorded state (first N feature slots)."""
        n = (len(self.features) - 4) // 2
        return float(np.mean(self.features[:n])) if n > 0 else 0.0


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Negative Euclidean distance; 0 is a perfect match."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"feature length mismatch: {a.shape} vs {b.shape}")
    return -float(np.linalg.norm(a - b))


class ExperiencePool:
    """Ring buffer of ExperienceRecords; eviction is oldest-first."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._records: List[ExperienceRecord] = []
        self._insert_counter = 0
        self._insert_ids: List[int] = []

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> Sequence[ExperienceRecord]:
        return tuple(self._records)

    def add(self, record: ExperienceRecord) -> None:
        if not math.isfinite(record.outcome_avg_aoi) or record.outcome_avg_aoi < 0:
            raise ValueError("outcome_avg_aoi must be finite and >= 0")
        self._records.append(record)
        self._insert_ids.append(self._insert_counter)
        self._insert_counter += 1
        if len(self._records) > self.capacity:
            del self._records[0]
            del self._insert_ids[0]

    def retrieve(self, current: np.ndarray, k: int) -> List[ExperienceRecord]:
        """Top-k most similar records; similarity ties go to the newer
        record; the result is in chronological (insertion) order."""
        if k <= 0 or not self._records:
            return []
        scored = sorted(
            zip(self._records, self._insert_ids),
            key=lambda pair: (similarity(pair[0].features, current), pair[1]),
            reverse=True,
        )
        picked = scored[:k]
        picked.sort(key=lambda pair: pair[1])
        return [record for record, _ in picked]

    def to_json(self) -> str:
        return json.dumps({
            "capacity": self.capacity,
            "insert_counter": self._insert_counter,
            "records": [
                {
                    "features": rec.features.tolist(),
                    "sensor": rec.action.sensor,
                    "velocity_mps": rec.action.velocity_mps,
                    "outcome_avg_aoi": rec.outcome_avg_aoi,
                    "step": rec.step,
                    "insert_id": iid,
                }
                for rec, iid in zip(self._records, self._insert_ids)
            ],
        })

    @classmethod
    def from_json(cls, text: str) -> "ExperiencePool":
        data = json.loads(text)
        pool = cls(capacity=data["capacity"])
        for item in data["records"]:
            pool._records.append(ExperienceRecord(
                features=np.array(item["features"], dtype=np.float64),
                action=Action(sensor=item["sensor"],
                              velocity_mps=item["velocity_mps"]),
                outcome_avg_aoi=item["outcome_avg_aoi"],
                step=item["step"],
            ))
            pool._insert_ids.append(item["insert_id"])
        pool._insert_counter = data["insert_counter"]
        return pool


def record_feedback(pool: ExperiencePool, features: np.ndarray, action: Action,
                    outcome_avg_aoi: float, step: int) -> None:
    pool.add(ExperienceRecord(features=np.asarray(features, dtype=np.float64),
                              action=action, outcome_avg_aoi=outcome_avg_aoi,
                              step=step))
