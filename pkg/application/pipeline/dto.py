from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from core.enums import ERelationship
from core.model.detector import Hypersphere, TrainConfig
from core.model.hsa import HsaParams


@dataclass(slots=True, eq=False)
class TrainedModel:
    """Tudo o que `detect`/`export-embeddings` precisam para reproduzir o forward treinado."""

    params: HsaParams
    sphere: Hypersphere
    config: TrainConfig
    relationships: tuple[ERelationship, ...]
    feature_mean: np.ndarray
    feature_std: np.ndarray
    topics_k: int = 0

    def padronizar(self, raw: np.ndarray) -> np.ndarray:
        return (np.asarray(raw, dtype=np.float64) - self.feature_mean) / self.feature_std

    def hiperparametros(self) -> dict:
        return asdict(self.config)
