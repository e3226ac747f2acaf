from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Protocol

import pandas as pd

from core.entities.hetnet import HetNet
from core.entities.subgraph import Subgraph
from core.enums import ERelationship
from core.graph.topics import TopicModel
from .dto import TrainedModel


class ArtifactRepositoryPort(Protocol):
    """Contrato de persistência dos artefatos entre etapas (DI)."""

    def path(self, name: str) -> Path: ...

    def exists(self, name: str) -> bool: ...

    def write_records(self, name: str, records: Iterable[dict]) -> Path: ...

    def read_records(self, name: str) -> list[dict]: ...

    def write_json(self, name: str, payload: Any) -> Path: ...

    def read_json(self, name: str) -> Any: ...

    def write_text(self, name: str, text: str) -> Path: ...

    def write_frame(self, stem: str, frame: pd.DataFrame, *, csv: bool = True) -> Path: ...

    def read_frame(self, stem: str) -> pd.DataFrame: ...

    def save_hetnet(self, g: HetNet) -> Path: ...

    def load_hetnet(self) -> HetNet: ...

    def save_subgraph(self, subgraph: Subgraph) -> Path: ...

    def load_subgraph(self, relationship: ERelationship, n: int) -> Subgraph: ...

    def save_model(self, model: TrainedModel) -> Path: ...

    def load_model(self) -> TrainedModel: ...

    def save_topics(self, model: TopicModel) -> Path: ...
